"""Command-line driver.

Two commands:

  certify <file>   run the tasks declared in a JSON problem file
  paper-example    run the built-in worked-example regression

Problem files declare one context, named polynomial definitions, named
supports, and a task list (classify / move / homotopy / extend / lower /
induced).  Reports are JSON with a versioned schema (or plain text) and are
byte-identical for identical (file, seed, field, version); wall-clock
timings are only embedded when --timings is passed.

Exit codes: 0 all tasks pass; 1 usage or problem-file errors; 2 a REFUTED
verdict or failed certificate; 3 an UNKNOWN verdict or exhausted retry
budget; 4 a resource budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from time import perf_counter

from . import __version__
from .idealkit import Budget, BudgetExceededError
from .mover import (
    MoveOptions,
    RetryBudgetExhausted,
    build_homotopy,
    build_pseudo_endo,
    extend_from_divisor,
    lower_by_hyperplane,
    move_affine_support,
    pullback_family,
)
from .polyring import PolyParseError, PrimeField, Rationals
from .simplicial import make_context
from .supports import (
    CERTIFIED,
    REFUTED,
    UNKNOWN,
    ClassifyOptions,
    Support,
    classify_support,
    is_induced,
    tower_position,
)
from .worked_example import run_checks

PROBLEM_SCHEMA = "cyclemover-problem/v1"
REPORT_SCHEMA = "cyclemover-report/v1"

STATUS_PASS = "PASS"
STATUS_REFUTED = "REFUTED"
STATUS_UNKNOWN = "UNKNOWN"
STATUS_BUDGET = "BUDGET_EXCEEDED"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REFUTED = 2
EXIT_UNKNOWN = 3
EXIT_BUDGET = 4


class ProblemError(ValueError):
    """Malformed problem file."""


def _parse_field(text: str):
    if text == "rational":
        return Rationals()
    if text == "fp":
        return PrimeField(32003)
    if text.startswith("fp:"):
        return PrimeField(int(text.split(":", 1)[1]))
    raise argparse.ArgumentTypeError(f"unknown field {text!r}; use rational or fp:<prime>")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cyclemover",
        description="exact certification of support conditions and moving constructions",
    )
    ap.add_argument("--version", action="version", version=f"cyclemover {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="seed for all genericity sampling")
        p.add_argument("--field", type=_parse_field, default=Rationals(),
                       help="coefficient field: rational (default) or fp:<prime>")
        p.add_argument("--max-spairs", type=int, default=Budget().max_spairs)
        p.add_argument("--max-degree", type=int, default=Budget().max_degree)
        p.add_argument("--retries", type=int, default=30, help="genericity retry budget")
        p.add_argument("--jobs", type=int, default=1, help="parallel task workers")
        p.add_argument("--report", type=str, default=None, help="write the report to this path")
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--timings", action="store_true",
                       help="embed wall-clock timings (breaks byte-level determinism)")

    pc = sub.add_parser("certify", help="run the tasks in a problem file")
    pc.add_argument("file", help="path to a JSON problem file")
    common(pc)

    pe = sub.add_parser("paper-example", help="run the built-in worked-example regression")
    common(pe)
    return ap


# ---------------------------------------------------------------------------
# Problem files


def load_problem(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ProblemError(f"cannot read problem file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ProblemError(f"problem file is not valid JSON: line {exc.lineno} col {exc.colno}") from exc
    if data.get("schema") != PROBLEM_SCHEMA:
        raise ProblemError(f"expected schema {PROBLEM_SCHEMA!r}, got {data.get('schema')!r}")
    for key in ("context", "tasks"):
        if key not in data:
            raise ProblemError(f"problem file missing {key!r}")
    return data


def _level_from(spec_level, fallback):
    if spec_level is None:
        return fallback
    return (int(spec_level["q"]), int(spec_level["e"]), int(spec_level["f"]))


class _TaskRunner:
    def __init__(self, problem: dict, field, seed: int, budget: Budget, retries: int):
        self.problem = problem
        self.field = field
        self.seed = seed
        self.budget = budget
        self.retries = retries
        cdecl = problem["context"]
        self.context = make_context(
            int(cdecl["n"]), int(cdecl["d"]), int(cdecl["q"]),
            cdecl.get("ambient", "affine"), field,
        )
        self.bindings = {}
        for name, text in (problem.get("definitions") or {}).items():
            try:
                self.bindings[name] = self.context.ring.parse(text, self.bindings)
            except PolyParseError as exc:
                raise ProblemError(f"definition {name!r}: {exc}") from exc
        self.support_decls = problem.get("supports") or {}
        for name, gens in self.support_decls.items():
            if not isinstance(gens, list):
                raise ProblemError(f"support {name!r} must list generator strings")
            for g in gens:
                try:
                    self.context.ring.parse(g, self.bindings)
                except PolyParseError as exc:
                    raise ProblemError(f"support {name!r}: {exc}") from exc

    def fresh_support(self, name: str) -> Support:
        if name not in self.support_decls:
            raise ProblemError(f"task references undefined support {name!r}")
        return Support.from_strings(self.context, self.support_decls[name], self.bindings)

    def _move_options(self, task_seed: int) -> MoveOptions:
        return MoveOptions(seed=task_seed, retries=self.retries, budget=self.budget)

    def _classify_options(self, task_seed: int) -> ClassifyOptions:
        return ClassifyOptions(budget=self.budget, seed=task_seed)

    def run_task(self, index: int, task: dict) -> dict:
        kind = task.get("task")
        seed = int(task.get("seed", self.seed))
        record: dict = {"index": index, "task": kind, "inputs": task}
        start = perf_counter()
        try:
            if kind == "classify":
                self._run_classify(task, seed, record)
            elif kind == "move":
                self._run_move(task, seed, record)
            elif kind == "homotopy":
                self._run_homotopy(task, seed, record)
            elif kind == "extend":
                self._run_extend(task, seed, record)
            elif kind == "lower":
                self._run_lower(task, seed, record)
            elif kind == "induced":
                self._run_induced(task, seed, record)
            else:
                raise ProblemError(f"unknown task kind {kind!r}")
        except BudgetExceededError as exc:
            record["status"] = STATUS_BUDGET
            record["detail"] = {"error": str(exc)}
        except RetryBudgetExhausted as exc:
            record["status"] = STATUS_UNKNOWN
            record["detail"] = {
                "error": str(exc),
                "certificates": [c.as_dict() for c in exc.certificates],
            }
        record["elapsed_ms"] = (perf_counter() - start) * 1000.0
        return record

    def _tower_level(self, S: Support, seed: int):
        tower = tower_position(S, self._classify_options(seed))
        if tower.empty or tower.q_max is None:
            return (S.context.q, 0, 0), tower
        return (min(tower.q_max, S.context.q), tower.e_bound, tower.f_bound or 0), tower

    def _run_classify(self, task, seed, record):
        S = self.fresh_support(task["support"])
        claim = task.get("claim")
        if claim is None:
            raise ProblemError("classify task needs a claim {q, e, f}")
        q, e, f = int(claim["q"]), int(claim["e"]), int(claim["f"])
        rec = classify_support(S, q, e, f, self._classify_options(seed))
        record["detail"] = rec.as_dict()
        record["status"] = {
            CERTIFIED: STATUS_PASS, REFUTED: STATUS_REFUTED, UNKNOWN: STATUS_UNKNOWN
        }[rec.verdict]

    def _run_move(self, task, seed, record):
        S = self.fresh_support(task["support"])
        level, tower = self._tower_level(S, seed) if task.get("level") is None else (None, None)
        level = _level_from(task.get("level"), level)
        opts = self._move_options(seed)
        if S.context.ambient_kind == "affine":
            pe, moved, cert = move_affine_support(S, level, seed, opts)
        else:
            pe, cert = build_pseudo_endo(S, level, seed, opts)
            moved = pe.pullback(S)
        record["detail"] = {
            "level": list(level),
            "certificate": cert.as_dict(),
            "pseudo_endomorphism": pe.as_dict(),
            "moved_generators": [str(g) for g in moved.generators],
        }
        record["status"] = STATUS_PASS if cert.ok else STATUS_UNKNOWN

    def _run_homotopy(self, task, seed, record):
        S = self.fresh_support(task["support"])
        base = S
        if S.context.ambient_kind == "affine":
            if S.context.d != 0:
                from .simplicial import ambient_closure

                proj_ctx, closed = ambient_closure(S.context, S.ideal, self.budget)
                base = Support(proj_ctx, [g for g in closed.generators if g != proj_ctx.relation])
        level, _ = self._tower_level(base, seed) if task.get("level") is None else (None, None)
        level = _level_from(task.get("level"), level)
        opts = self._move_options(seed)
        pe, cert = build_pseudo_endo(base, level, seed, opts)
        H, hcert = build_homotopy(pe, base, level, opts)
        members, union = pullback_family(base, H, task.get("variant", "F_star"), self.budget)
        record["detail"] = {
            "level": list(level),
            "pseudo_certificate": cert.as_dict(),
            "homotopy_certificate": hcert.as_dict(),
            "family": [
                {"j": list(j), "generators": [str(g) for g in m.generators]}
                for j, m in members
            ],
        }
        record["status"] = STATUS_PASS if (cert.ok and hcert.ok) else STATUS_UNKNOWN

    def _run_extend(self, task, seed, record):
        S = self.fresh_support(task["support"])
        div_text = task.get("divisor")
        if not div_text:
            raise ProblemError("extend task needs a divisor polynomial")
        h = self.context.ring.parse(div_text, self.bindings)
        Wp, cert = extend_from_divisor(S, h, seed, self._move_options(seed))
        record["detail"] = {
            "divisor": str(h),
            "certificate": cert.as_dict(),
            "extension_generators": [str(g) for g in Wp.generators],
        }
        record["status"] = STATUS_PASS if cert.ok else STATUS_UNKNOWN

    def _run_lower(self, task, seed, record):
        S = self.fresh_support(task["support"])
        level, _ = self._tower_level(S, seed) if task.get("level") is None else (None, None)
        level = _level_from(task.get("level"), level)
        H, Wp, cert = lower_by_hyperplane(S, level, seed, self._move_options(seed))
        record["detail"] = {
            "level": list(level),
            "hyperplane": str(H),
            "certificate": cert.as_dict(),
            "lowered_generators": [str(g) for g in Wp.generators],
        }
        record["status"] = STATUS_PASS if cert.ok else STATUS_UNKNOWN

    def _run_induced(self, task, seed, record):
        S = self.fresh_support(task["support"])
        flag, witness = is_induced(S, self.budget)
        record["detail"] = {
            "induced": flag,
            "witness": [str(g) for g in witness.generators],
        }
        expected = task.get("expect")
        if expected is not None and bool(expected) != flag:
            record["status"] = STATUS_REFUTED
        else:
            record["status"] = STATUS_PASS


# ---------------------------------------------------------------------------
# Reports


def _overall(statuses) -> tuple[str, int]:
    if any(s == STATUS_REFUTED for s in statuses):
        return STATUS_REFUTED, EXIT_REFUTED
    if any(s == STATUS_BUDGET for s in statuses):
        return STATUS_BUDGET, EXIT_BUDGET
    if any(s == STATUS_UNKNOWN for s in statuses):
        return STATUS_UNKNOWN, EXIT_UNKNOWN
    return STATUS_PASS, EXIT_OK


def _base_report(args, problem_name: str) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "tool": {"name": "cyclemover", "version": __version__},
        "problem": problem_name,
        "field": args.field.label,
        "modular": isinstance(args.field, PrimeField),
        "seed": args.seed,
    }


def _strip_timings(obj):
    if isinstance(obj, dict):
        return {k: _strip_timings(v) for k, v in obj.items() if k != "elapsed_ms"}
    if isinstance(obj, list):
        return [_strip_timings(v) for v in obj]
    return obj


def _emit(report: dict, args) -> None:
    if not args.timings:
        report = _strip_timings(report)
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        lines = [
            f"cyclemover {__version__} | problem {report['problem']} | "
            f"field {report['field']} | seed {report['seed']}"
        ]
        for task in report["tasks"]:
            name = task.get("task") or task.get("name")
            lines.append(f"[{task['status']:>7}] #{task['index']} {name}")
            detail = task.get("detail")
            if isinstance(detail, dict):
                for key in ("error", "verdict"):
                    if key in detail:
                        lines.append(f"          {key}: {detail[key]}")
        lines.append(f"overall: {report['overall']}")
        text = "\n".join(lines) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Commands


def cmd_certify(args) -> int:
    try:
        problem = load_problem(args.file)
        budget = Budget(args.max_spairs, args.max_degree)
        runner = _TaskRunner(problem, args.field, args.seed, budget, args.retries)
        tasks = problem["tasks"]
        if args.jobs > 1 and len(tasks) > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(
                    lambda pair: runner.run_task(pair[0], pair[1]), enumerate(tasks)
                ))
        else:
            results = [runner.run_task(i, t) for i, t in enumerate(tasks)]
    except (ProblemError, PolyParseError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    results.sort(key=lambda r: r["index"])
    report = _base_report(args, args.file)
    report["tasks"] = results
    overall, code = _overall([r["status"] for r in results])
    report["overall"] = overall
    _emit(report, args)
    return code


def cmd_paper_example(args) -> int:
    start = perf_counter()
    checks = run_checks(args.field, Budget(args.max_spairs, args.max_degree))
    elapsed = (perf_counter() - start) * 1000.0
    tasks = []
    for i, c in enumerate(checks):
        tasks.append({
            "index": i,
            "task": c.name,
            "status": STATUS_PASS if c.ok else STATUS_REFUTED,
            "detail": {"verdict": c.detail},
        })
    report = _base_report(args, "builtin:paper-example")
    report["tasks"] = tasks
    overall, code = _overall([t["status"] for t in tasks])
    report["overall"] = overall
    report["elapsed_ms"] = elapsed
    _emit(report, args)
    if code != EXIT_OK:
        failing = [c for c in checks if not c.ok]
        for c in failing:
            sys.stderr.write(f"FAILED identity: {c.name}: {c.detail}\n")
    return code


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "certify":
        return cmd_certify(args)
    if args.command == "paper-example":
        return cmd_paper_example(args)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
