"""Moving constructions: vertex moves, the pseudo-endomorphism ladder, the
homotopy to the identity, interval-embedding pullback families, divisor
extensions and hyperplane lowerings.

Every "sufficiently generic" choice is realized as seeded sampling of integer
coefficients followed by a full certificate check, with bounded resampling
and degree escalation.  A construction is handed back only when all of its
mandatory certificate properties PASS; UNKNOWN on a mandatory property
triggers a resample, never acceptance.

Ladder shape, with T_r the elementary sum of (r+1)-fold products of the
simplex coordinates and all forms homogeneous in the fiber variables of a
degree strictly increasing with r:

    level r adds to each t_i the terms t_i * t_I * c(r, position of i in I+i)
    level r adds to each Y_k (k >= 1) the term T_r * p(r, k) * Y_0

The position coefficients of each level sum to zero, which makes the ladder
restrict correctly to every face and preserves the simplex relation on the
nose.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from itertools import combinations
from typing import Sequence

from .idealkit import Budget, IdealPresentation, radical_membership
from .polyring import (
    AMBIENT_PROJECTIVE,
    FIBER,
    HOMOTOPY,
    Polynomial,
    PolyRing,
    SubstitutionMap,
)
from .simplicial import (
    HOMOTOPY_VAR,
    SimplicialContext,
    ambient_closure,
    chart_restrict,
)
from .supports import (
    CERTIFIED,
    REFUTED,
    ClassifyOptions,
    Support,
    classify_support,
    image_closure,
    locus_is_empty,
    quasi_finite_locus,
    support_codim,
    support_is_empty,
)

__all__ = [
    "MoveOptions",
    "PropertyRecord",
    "MoveCertificate",
    "RetryBudgetExhausted",
    "InputNotCertified",
    "PseudoEndo",
    "Homotopy",
    "f_j_embedding",
    "interval_sequences",
    "vertex_move",
    "build_pseudo_endo",
    "build_homotopy",
    "pullback_family",
    "extend_from_divisor",
    "lower_by_hyperplane",
    "move_affine_support",
    "target_level",
]


PASS = "PASS"
FAIL = "FAIL"
UNK = "UNKNOWN"


class RetryBudgetExhausted(RuntimeError):
    """All sampling attempts failed; carries the failing certificates."""

    def __init__(self, message: str, certificates: list["MoveCertificate"]):
        super().__init__(message)
        self.certificates = certificates


class InputNotCertified(ValueError):
    """The input support does not certify at the level the construction needs."""


@dataclass(frozen=True)
class MoveOptions:
    seed: int = 0
    coeff_box: int = 10
    retries: int = 30
    escalate_every: int = 3
    budget: Budget | None = None
    samples: int = 20
    boxes: tuple[int, ...] = (10, 100, 1000)
    allow_partial: bool = False

    def classify_options(self, seed_shift: int = 0) -> ClassifyOptions:
        return ClassifyOptions(self.budget, self.seed + seed_shift, self.samples, self.boxes)


@dataclass
class PropertyRecord:
    prop: str
    status: str
    detail: str = ""

    def as_dict(self):
        return {"property": self.prop, "status": self.status, "detail": self.detail}


@dataclass
class MoveCertificate:
    kind: str
    seed: int
    attempts: int = 0
    records: list[PropertyRecord] = dc_field(default_factory=list)

    def add(self, prop: str, status: str, detail: str = ""):
        self.records.append(PropertyRecord(prop, status, detail))

    @property
    def ok(self) -> bool:
        return all(r.status == PASS for r in self.records)

    def failing(self) -> list[PropertyRecord]:
        return [r for r in self.records if r.status != PASS]

    def as_dict(self):
        return {
            "kind": self.kind,
            "seed": self.seed,
            "attempts": self.attempts,
            "ok": self.ok,
            "records": [r.as_dict() for r in self.records],
        }


# ---------------------------------------------------------------------------
# Random forms


def _fiber_monomials(ring: PolyRing, degree: int):
    """Exponent vectors of exact total degree over the fiber block."""
    idx = ring.block_indices(FIBER)
    if not idx:
        raise ValueError("context has no fiber variables to sample forms in")
    monos: list[tuple[int, ...]] = []

    def rec(pos, remaining, acc):
        if pos == len(idx) - 1:
            monos.append(tuple(acc + [remaining]))
            return
        for e in range(remaining + 1):
            rec(pos + 1, remaining - e, acc + [e])
    rec(0, degree, [])
    out = []
    for m in monos:
        exp = [0] * ring.nvars
        for i, e in zip(idx, m):
            exp[i] = e
        out.append(tuple(exp))
    return out


def random_fiber_form(ring: PolyRing, degree: int, rng: random.Random, box: int) -> Polynomial:
    """Random homogeneous form of the given degree in the fiber variables,
    integer coefficients in [-box, box], never identically zero."""
    field = ring.field
    monos = _fiber_monomials(ring, degree)
    for _ in range(64):
        terms = {}
        for exp in monos:
            c = rng.randint(-box, box)
            if c:
                terms[exp] = field.convert(c)
        if terms:
            return Polynomial(ring, terms)
    # all-zero streak: force a pure power
    return Polynomial(ring, {monos[0]: field.one})


def _max_fiber_degree(gens: Sequence[Polynomial]) -> int:
    deg = 0
    for g in gens:
        if g.ring.has_block(FIBER):
            deg = max(deg, g.degree_in_block(FIBER))
    return deg


# ---------------------------------------------------------------------------
# The pseudo-endomorphism ladder


class PseudoEndo:
    """Degreewise family of self-maps commuting with all strictly increasing
    face embeddings; fiber variables fixed, Y_0 fixed."""

    def __init__(self, context: SimplicialContext, degrees: Sequence[int],
                 a_forms: dict[int, list[Polynomial]],
                 p_forms: dict[tuple[int, int], Polynomial], seed: int):
        self.context = context
        self.degrees = tuple(degrees)
        self.a_forms = a_forms
        self.p_forms = p_forms
        self.seed = seed
        self.maps: dict[int, SubstitutionMap] = {
            m: self._build_map(m) for m in range(context.n + 1)
        }

    def _build_map(self, m: int) -> SubstitutionMap:
        ctx = self.context.twin(n=m)
        ring = ctx.ring
        mapping: dict[str, Polynomial] = {}
        tvars = [ring.variable(f"t{i}") for i in range(m + 1)]
        for i in range(m + 1):
            image = tvars[i]
            for r in range(1, m + 1):
                if r not in self.a_forms:
                    continue
                coeffs = [self.context.ring.transfer(c, ring) for c in self.a_forms[r]]
                for subset in combinations([j for j in range(m + 1) if j != i], r):
                    full = tuple(sorted(subset + (i,)))
                    pos = full.index(i)
                    prod = tvars[i]
                    for j in subset:
                        prod = prod * tvars[j]
                    image = image + prod * coeffs[pos]
            mapping[f"t{i}"] = image
        if self.context.ambient_kind == "projective" and self.context.d > 0:
            y0 = ring.variable("Y0")
            t_sums = {}
            for r in range(0, m + 1):
                if r == 0:
                    t_sums[0] = ring.one()
                else:
                    total = ring.zero()
                    for subset in combinations(range(m + 1), r + 1):
                        prod = ring.one()
                        for j in subset:
                            prod = prod * tvars[j]
                        total = total + prod
                    t_sums[r] = total
            for k in range(1, self.context.d + 1):
                image = ring.variable(f"Y{k}")
                shift = ring.zero()
                for r in range(0, m + 1):
                    form = self.p_forms.get((r, k))
                    if form is None:
                        continue
                    shift = shift + t_sums[r] * self.context.ring.transfer(form, ring)
                mapping[f"Y{k}"] = image + shift * y0
        return SubstitutionMap.from_dict(ring, ring, mapping)

    def map_for(self, m: int) -> SubstitutionMap:
        return self.maps[m]

    def pullback(self, Z: Support) -> Support:
        phi = self.maps[Z.context.n]
        return Support(Z.context, [phi(g) for g in Z.generators])

    def check_face_compatibility(self) -> bool:
        """Exact polynomial identity theta* . phi_n = phi_m . theta* for every
        strictly increasing theta, all degree pairs."""
        for m2 in range(self.context.n + 1):
            ctx2 = self.context.twin(n=m2)
            for m1 in range(m2):
                for theta in combinations(range(m2 + 1), m1 + 1):
                    theta_pb = ctx2.monotone_pullback(theta)
                    lhs = theta_pb.after(self.maps[m2])
                    rhs = self.maps[m1].after(theta_pb)
                    if lhs != rhs:
                        return False
        return True

    def check_simplex_preservation(self) -> bool:
        """Sum of the t-images equals the sum of the t-variables exactly."""
        for m, phi in self.maps.items():
            ring = phi.source
            total = ring.zero()
            expected = ring.zero()
            for i in range(m + 1):
                total = total + phi.image_of(f"t{i}")
                expected = expected + ring.variable(f"t{i}")
            if total != expected:
                return False
        return True

    def as_dict(self):
        return {
            "degrees": list(self.degrees),
            "seed": self.seed,
            "maps": {
                m: {n: str(img) for n, img in zip(phi.source.var_names, phi.images)}
                for m, phi in self.maps.items()
            },
        }


# ---------------------------------------------------------------------------
# Level arithmetic


def target_level(context: SimplicialContext, q: int, e: int, f: int) -> tuple[int, int, int]:
    """One step down the filtration: raise f, or lower e when f is maximal.

    At e = 0 the support is already quasi-finite (the floor of the tower);
    the f-subtower is not used below e = 1, so the target stays put.
    """
    if e == 0:
        return (q, 0, f)
    cap = context.base_dim
    if f <= cap - 1:
        return (q, e, f + 1)
    return (q, e - 1, 0)


def _sample_tables(context: SimplicialContext, degrees: Sequence[int],
                   rng: random.Random, box: int):
    """Position coefficients (first r free, last solved to make the level sum
    to zero) and the Y-shift forms, all homogeneous of the level degree."""
    ring = context.ring
    a_forms: dict[int, list[Polynomial]] = {}
    for r in range(1, context.n + 1):
        free = [random_fiber_form(ring, degrees[r], rng, box) for _ in range(r)]
        last = ring.zero()
        for c in free:
            last = last - c
        a_forms[r] = free + [last]
    p_forms: dict[tuple[int, int], Polynomial] = {}
    if context.ambient_kind == "projective":
        for r in range(0, context.n + 1):
            for k in range(1, context.d + 1):
                p_forms[(r, k)] = random_fiber_form(ring, degrees[r], rng, box)
    return a_forms, p_forms


def _certify_structure(pe: PseudoEndo, cert: MoveCertificate):
    cert.add("P1-face-compatibility", PASS if pe.check_face_compatibility() else FAIL)
    cert.add("P1-simplex-preservation", PASS if pe.check_simplex_preservation() else FAIL)
    ladder_ok = all(
        pe.degrees[r] > pe.degrees[r - 1] for r in range(1, len(pe.degrees))
    )
    cert.add("P1-degree-ladder", PASS if ladder_ok else FAIL,
             f"degrees {list(pe.degrees)}")


def _quasi_finite_over_chart(moved: Support, budget) -> tuple[bool, str]:
    """Empty non-quasi-finite locus over the base, on chart 0 for projective."""
    if moved.context.ambient_kind == "projective":
        ctx0, ideal0 = chart_restrict(moved.context, moved.ideal, 0)
        gens = [g for g in ideal0.generators if g != ctx0.relation]
        probe = Support(ctx0, gens)
    else:
        probe = moved
    locus = quasi_finite_locus(probe, budget)
    empty = locus_is_empty(probe.context, locus, budget)
    return empty, "; ".join(str(g) for g in locus.generators)


def vertex_move(V: Support, degree: int, seed: int = 0,
                options: MoveOptions | None = None) -> tuple[PseudoEndo, MoveCertificate]:
    """Move a degree-0 support to one quasi-finite over the distinguished
    affine chart, by shifts Y_k -> Y_k + p_k(x) Y_0 of large degree."""
    options = options or MoveOptions(seed=seed)
    ctx = V.context
    if ctx.n != 0:
        raise ValueError("vertex moves live in simplicial degree 0")
    if ctx.ambient_kind != "projective":
        raise ValueError("vertex moves need a projective ambient")
    codim = support_codim(V, options.budget)
    if codim is not None and codim < ctx.q:
        raise InputNotCertified(f"support codimension {codim} below q={ctx.q}")
    min_degree = max(degree, _max_fiber_degree(V.generators) + 1)
    certs: list[MoveCertificate] = []
    rng = random.Random(seed)
    for attempt in range(options.retries):
        m = min_degree + attempt // options.escalate_every
        a_forms, p_forms = _sample_tables(ctx, [m], rng, options.coeff_box)
        pe = PseudoEndo(ctx, [m], a_forms, p_forms, seed)
        cert = MoveCertificate("vertex_move", seed, attempt + 1)
        _certify_structure(pe, cert)
        moved = pe.pullback(V)
        empty, detail = _quasi_finite_over_chart(moved, options.budget)
        cert.add("P2-quasi-finite-chart", PASS if empty else FAIL, detail)
        certs.append(cert)
        if cert.ok:
            return pe, cert
    if options.allow_partial:
        return pe, certs[-1]
    raise RetryBudgetExhausted("vertex move failed to certify", certs)


def build_pseudo_endo(W: Support, level: tuple[int, int, int], seed: int = 0,
                      options: MoveOptions | None = None) -> tuple[PseudoEndo, MoveCertificate]:
    """Full ladder for a support certified at (q, e, f): the returned
    pseudo-endomorphism pulls W back to a support quasi-finite over the
    distinguished chart and certified one level down the filtration."""
    options = options or MoveOptions(seed=seed)
    ctx = W.context
    q, e, f = level
    if ctx.q < 1:
        raise ValueError("moving needs at least one fiber variable")
    if ctx.ambient_kind != "projective" and ctx.d != 0:
        raise ValueError(
            "moves run on projective contexts (or the pure-affine d=0 mode); "
            "close up affine supports first"
        )
    if not support_is_empty(W, options.budget):
        input_rec = classify_support(W, q, e, f, options.classify_options())
        if input_rec.verdict != CERTIFIED:
            raise InputNotCertified(
                f"input support not certified at {level}: {input_rec.verdict}"
            )
    target = target_level(ctx, q, e, f)
    base_degree = _max_fiber_degree(W.generators) + 1
    rng = random.Random(seed)
    certs: list[MoveCertificate] = []
    pe = None
    for attempt in range(options.retries):
        bump = attempt // options.escalate_every
        degrees = [base_degree + bump + r for r in range(ctx.n + 1)]
        a_forms, p_forms = _sample_tables(ctx, degrees, rng, options.coeff_box)
        pe = PseudoEndo(ctx, degrees, a_forms, p_forms, seed)
        cert = MoveCertificate("build_pseudo_endo", seed, attempt + 1)
        _certify_structure(pe, cert)
        moved = pe.pullback(W)
        empty, detail = _quasi_finite_over_chart(moved, options.budget)
        cert.add("P2-quasi-finite-chart", PASS if empty else FAIL, detail)
        if not empty:
            certs.append(cert)
            continue
        rec = classify_support(moved, *target, options.classify_options(attempt + 1))
        status = PASS if rec.verdict == CERTIFIED else (FAIL if rec.verdict == REFUTED else UNK)
        cert.add("P3-moved-classification", status,
                 f"target {target}: {rec.verdict}")
        certs.append(cert)
        if cert.ok:
            return pe, cert
    if options.allow_partial and pe is not None:
        return pe, certs[-1]
    raise RetryBudgetExhausted("pseudo-endomorphism failed to certify", certs)


# ---------------------------------------------------------------------------
# Homotopy to the identity


class Homotopy:
    """The family u*id + (1-u)*phi on the homotopy-extended context."""

    def __init__(self, pseudo: PseudoEndo):
        self.pseudo = pseudo
        self.context = pseudo.context.with_homotopy()
        self.maps: dict[int, SubstitutionMap] = {
            m: self._build_map(m) for m in range(pseudo.context.n + 1)
        }

    def _build_map(self, m: int) -> SubstitutionMap:
        plain = self.pseudo.context.twin(n=m)
        hctx = plain.with_homotopy()
        ring = hctx.ring
        u = ring.variable(HOMOTOPY_VAR)
        one_minus_u = ring.one() - u
        lift = hctx.lift_from(plain)
        phi = self.pseudo.maps[m]
        mapping: dict[str, Polynomial] = {}
        for i in range(m + 1):
            name = f"t{i}"
            mapping[name] = u * ring.variable(name) + one_minus_u * lift(phi.image_of(name))
        if plain.ambient_kind == "projective" and plain.d > 0:
            for k in range(1, plain.d + 1):
                name = f"Y{k}"
                mapping[name] = u * ring.variable(name) + one_minus_u * lift(phi.image_of(name))
        return SubstitutionMap.from_dict(ring, ring, mapping)

    def map_for(self, m: int) -> SubstitutionMap:
        return self.maps[m]

    def pullback_of_base_preimage(self, Z: Support) -> Support:
        """Phi_n^{-1}(p^{-1}(Z)) on the homotopy-extended context."""
        m = Z.context.n
        plain = self.pseudo.context.twin(n=m)
        hctx = plain.with_homotopy()
        lift = hctx.lift_from(plain)
        phi = self.maps[m]
        return Support(hctx, [phi(lift(g)) for g in Z.generators])

    def endpoint_identities(self) -> bool:
        """At u=1 the family is the identity, at u=0 it is phi, exactly."""
        for m, Phi in self.maps.items():
            plain = self.pseudo.context.twin(n=m)
            hring = Phi.source
            phi = self.pseudo.maps[m]
            ev1 = {HOMOTOPY_VAR: hring.field.one}
            ev0 = {HOMOTOPY_VAR: hring.field.zero}
            for name in hring.var_names:
                img = Phi.image_of(name)
                at1 = img.evaluate(ev1)
                at0 = img.evaluate(ev0)
                if name == HOMOTOPY_VAR:
                    continue
                expect1 = hring.variable(name)
                if at1 != expect1:
                    return False
                lift = plain.twin().with_homotopy().lift_from(plain)
                expect0 = lift(phi.image_of(name)) if plain.ring.has_variable(name) else None
                if expect0 is not None and at0 != expect0:
                    return False
        return True


def interval_sequences(n: int, include_ones: bool = True) -> list[tuple[int, ...]]:
    """Monotone 0/1 sequences of length n+1, constant-0 first."""
    out = []
    for k in range(0, n + 2):
        j = (0,) * (n + 1 - k) + (1,) * k
        if not include_ones and k == n + 1:
            continue
        out.append(j)
    return out


def f_j_embedding(context: SimplicialContext, j: Sequence[int]) -> SubstitutionMap:
    """Pullback of the linear interval embedding sending vertex k to (v_k, j_k):
    a ring map from the homotopy-extended ring with u -> sum of j_k t_k."""
    j = tuple(j)
    if len(j) != context.n + 1:
        raise ValueError(f"sequence length {len(j)} does not match degree {context.n}")
    if any(v not in (0, 1) for v in j) or any(j[i] > j[i + 1] for i in range(len(j) - 1)):
        raise ValueError(f"interval vertex sequence must be monotone 0/1, got {j}")
    plain = context.without_homotopy() if context.homotopy else context
    hctx = plain.with_homotopy()
    image = plain.ring.zero()
    for k, bit in enumerate(j):
        if bit:
            image = image + plain.ring.variable(f"t{k}")
    mapping = {HOMOTOPY_VAR: image}
    return SubstitutionMap.from_dict(hctx.ring, plain.ring, mapping)


def build_homotopy(phi: PseudoEndo, W: Support, level: tuple[int, int, int],
                   options: MoveOptions | None = None) -> tuple[Homotopy, MoveCertificate]:
    """Homotopy between phi and the identity whose total pullback of W stays
    in the claimed support condition, is quasi-finite away from u=1 over the
    distinguished chart, and lands back in the condition under every interval
    embedding."""
    options = options or MoveOptions(seed=phi.seed)
    q, e, f = level
    ctx = phi.context
    certs: list[MoveCertificate] = []
    current = phi
    for attempt in range(max(1, options.retries // 3)):
        H = Homotopy(current)
        cert = MoveCertificate("build_homotopy", current.seed, attempt + 1)
        cert.add("H1-endpoints", PASS if H.endpoint_identities() else FAIL)
        pb = H.pullback_of_base_preimage(W)

        if ctx.ambient_kind == "projective":
            ctx0, ideal0 = chart_restrict(pb.context, pb.ideal, 0)
            probe = Support(ctx0, [g for g in ideal0.generators if g != ctx0.relation])
        else:
            probe = pb
        locus = quasi_finite_locus(probe, options.budget)
        u_minus_1 = locus.ring.variable(HOMOTOPY_VAR) - locus.ring.one()
        contained = locus_is_empty(probe.context, locus, options.budget) or radical_membership(
            u_minus_1, locus, options.budget
        )
        cert.add("H2-bad-locus-in-u1", PASS if contained else FAIL)

        rec = classify_support(pb, q, e, f, options.classify_options(attempt))
        cert.add(
            "H3-extended-classification",
            PASS if rec.verdict == CERTIFIED else (FAIL if rec.verdict == REFUTED else UNK),
            f"({q},{e},{f}) on homotopy context: {rec.verdict}",
        )

        h4_ok = True
        h4_detail = []
        for j in interval_sequences(ctx.n):
            member = _interval_pullback(H, W, j)
            jrec = classify_support(member, q, e, f, options.classify_options(attempt))
            h4_detail.append(f"f_{''.join(map(str, j))}: {jrec.verdict}")
            if jrec.verdict != CERTIFIED:
                h4_ok = False
        cert.add("H4-interval-members", PASS if h4_ok else UNK, "; ".join(h4_detail))

        certs.append(cert)
        if cert.ok:
            return H, cert
        # joint resample of the underlying pseudo-endomorphism
        current, _ = build_pseudo_endo(
            W, level, seed=current.seed + 7919,
            options=MoveOptions(
                seed=current.seed + 7919, coeff_box=options.coeff_box,
                retries=options.retries, escalate_every=options.escalate_every,
                budget=options.budget, samples=options.samples, boxes=options.boxes,
            ),
        )
    if options.allow_partial:
        return Homotopy(current), certs[-1]
    raise RetryBudgetExhausted("homotopy failed to certify", certs)


def _interval_pullback(H: Homotopy, Z: Support, j: Sequence[int]) -> Support:
    """(Phi_n . (f_j x 1 x 1))^{-1}(p^{-1}(Z)) as a support on the plain context."""
    m = Z.context.n
    plain = H.pseudo.context.twin(n=m)
    hctx = plain.with_homotopy()
    lift = hctx.lift_from(plain)
    fj = f_j_embedding(plain, j)
    comp = fj.after(H.maps[m])
    return Support(plain, [comp(lift(g)) for g in Z.generators])


def pullback_family(Z: Support, H: Homotopy, variant: str = "F_star",
                    budget: Budget | None = None):
    """The interval-embedding pullback family of Z through the homotopy.

    Returns (members, union) with members indexed by the monotone sequences;
    the all-ones member is Z itself and the all-zeros member is the
    pseudo-endomorphism pullback, as exact ideal identities.  The union is
    the radical-level union (product ideal) of the members.
    """
    if variant not in ("F_star", "R_star"):
        raise ValueError(f"variant must be F_star or R_star, got {variant!r}")
    n = Z.context.n
    members = []
    for j in interval_sequences(n, include_ones=(variant == "F_star")):
        members.append((j, _interval_pullback(H, Z, j)))
    union_gens = None
    for _, member in members:
        gens = list(member.generators) or [member.context.ring.zero()]
        if union_gens is None:
            union_gens = gens
        else:
            union_gens = [a * b for a in union_gens for b in gens]
    union = Support(Z.context, [g for g in (union_gens or []) if not g.is_zero()])
    return members, union


# ---------------------------------------------------------------------------
# Divisor extension


def _ambient_degree(context: SimplicialContext, p: Polynomial) -> int:
    kind = context.ambient_block_kind
    if not context.ring.has_block(kind):
        return 0
    return max(0, p.degree_in_block(kind))


def extend_from_divisor(W: Support, h: Polynomial, seed: int = 0,
                        options: MoveOptions | None = None) -> tuple[Support, MoveCertificate]:
    """Extension of W across the divisor h: a support agreeing with W along
    V(h) set-theoretically, dominant over the base, and quasi-finite away
    from V(h).  Generators f^(deg_Y h) + h^(deg_Y f) * p with fiber forms p
    of equal large degree whose leading forms have no common zero."""
    options = options or MoveOptions(seed=seed)
    ctx = W.context
    if ctx.ambient_kind != "projective":
        raise ValueError("divisor extension runs on projective contexts")
    if ctx.q < 1:
        raise ValueError("divisor extension needs fiber variables")
    if W.ideal.is_unit(options.budget):
        raise InputNotCertified("unit ideal rejected: nothing to extend")
    ring = ctx.ring
    if h.ring != ring:
        h = h.ring.transfer(h, ring)
    h_deg = _ambient_degree(ctx, h)
    if h_deg < 1:
        raise ValueError("divisor must involve the ambient coordinates")
    y_idx = ring.block_indices(AMBIENT_PROJECTIVE)
    if not h.is_homogeneous_in(y_idx):
        raise ValueError("divisor equation must be homogeneous in the ambient block")

    rng = random.Random(seed)
    base_gens = list(W.generators)
    # pad to at least q generators by random constant combinations
    while len(base_gens) < ctx.q:
        combo = ring.zero()
        for g in W.generators:
            combo = combo + g.scale(rng.randint(1, options.coeff_box))
        base_gens.append(combo)

    certs: list[MoveCertificate] = []
    big_n0 = max(h_deg * max(1, _max_fiber_degree([g for g in base_gens])), 1) + 1
    fiber_names = ring.block(FIBER).names
    result = None
    for attempt in range(options.retries):
        N = big_n0 + attempt // options.escalate_every
        new_gens = []
        for i, g in enumerate(base_gens):
            g_deg = _ambient_degree(ctx, g)
            lead_var = ring.variable(fiber_names[i % ctx.q])
            lead = (lead_var ** N).scale(rng.randint(1, options.coeff_box))
            pert = ring.zero()
            if N > 1:
                pert = random_fiber_form(ring, rng.randint(0, N - 1), rng, options.coeff_box)
                if rng.random() < 0.5:
                    pert = ring.zero()
            p_i = lead + pert
            new_gens.append(g ** h_deg + h ** g_deg * p_i)
        Wp = Support(ctx, new_gens)
        cert = MoveCertificate("extend_from_divisor", seed, attempt + 1)

        wd = IdealPresentation(ring, list(W.ideal.generators) + [h])
        wpd = IdealPresentation(ring, list(Wp.ideal.generators) + [h])
        e1 = all(radical_membership(g, wpd, options.budget) for g in wd.generators) and all(
            radical_membership(g, wd, options.budget) for g in wpd.generators
        )
        cert.add("E1-agreement-on-divisor", PASS if e1 else FAIL)

        locus = quasi_finite_locus(Wp, options.budget)
        e2 = locus_is_empty(ctx, locus, options.budget) or radical_membership(
            ring.transfer(h, locus.ring), locus, options.budget
        )
        cert.add("E2-bad-locus-in-divisor", PASS if e2 else FAIL)

        img = image_closure(Wp, options.budget)
        base_rel = ctx.ring.transfer(ctx.relation, img.ring)
        dominant = all(
            radical_membership(g, IdealPresentation(img.ring, [base_rel]), options.budget)
            for g in img.generators
        )
        cert.add("E3-dominance", PASS if dominant else FAIL)

        certs.append(cert)
        result = Wp
        if cert.ok:
            return Wp, cert
    if options.allow_partial and result is not None:
        return result, certs[-1]
    raise RetryBudgetExhausted("divisor extension failed to certify", certs)


# ---------------------------------------------------------------------------
# Hyperplane lowering


def lower_by_hyperplane(W: Support, level: tuple[int, int, int], seed: int = 0,
                        options: MoveOptions | None = None):
    """Random hyperplane H and extension W' agreeing with W along H and
    certified one level down the filtration."""
    options = options or MoveOptions(seed=seed)
    ctx = W.context
    if ctx.ambient_kind != "projective":
        raise ValueError("hyperplane lowering runs on projective contexts")
    q, e, f = level
    if not support_is_empty(W, options.budget):
        input_rec = classify_support(W, q, e, f, options.classify_options())
        if input_rec.verdict != CERTIFIED:
            raise InputNotCertified(f"input not certified at {level}: {input_rec.verdict}")
    target = target_level(ctx, q, e, f)
    rng = random.Random(seed)
    ring = ctx.ring
    certs: list[MoveCertificate] = []
    last = None
    for attempt in range(max(1, options.retries // 3)):
        coeffs = [rng.randint(-options.coeff_box, options.coeff_box) for _ in range(ctx.d + 1)]
        if all(c == 0 for c in coeffs):
            coeffs[0] = 1
        H = ring.zero()
        for k, c in enumerate(coeffs):
            H = H + ring.variable(f"Y{k}").scale(c)
        cert = MoveCertificate("lower_by_hyperplane", seed, attempt + 1)
        try:
            Wp, ecert = extend_from_divisor(
                W, H, seed=seed + attempt,
                options=MoveOptions(
                    seed=seed + attempt, coeff_box=options.coeff_box,
                    retries=max(3, options.retries // 5),
                    escalate_every=options.escalate_every, budget=options.budget,
                    samples=options.samples, boxes=options.boxes,
                ),
            )
        except RetryBudgetExhausted as exc:
            cert.add("L1-extension", FAIL, str(exc))
            certs.append(cert)
            continue
        cert.add("L1-extension", PASS, "agrees with input along the hyperplane (E1)")
        rec = classify_support(Wp, *target, options.classify_options(attempt))
        cert.add(
            "L2-lowered-classification",
            PASS if rec.verdict == CERTIFIED else (FAIL if rec.verdict == REFUTED else UNK),
            f"target {target}: {rec.verdict}",
        )
        certs.append(cert)
        last = (H, Wp, cert)
        if cert.ok:
            return H, Wp, cert
    if options.allow_partial and last is not None:
        return last
    raise RetryBudgetExhausted("hyperplane lowering failed to certify", certs)


# ---------------------------------------------------------------------------
# Affine entry point


def move_affine_support(W: Support, level: tuple[int, int, int], seed: int = 0,
                        options: MoveOptions | None = None):
    """Affine supports move through their ambient closure: close up, run the
    projective ladder, restrict the moved support back to the chart."""
    ctx = W.context
    if ctx.ambient_kind != "affine":
        raise ValueError("move_affine_support expects an affine context")
    if ctx.d == 0:
        pe, cert = build_pseudo_endo(W, level, seed, options)
        return pe, pe.pullback(W), cert
    options = options or MoveOptions(seed=seed)
    proj_ctx, closed = ambient_closure(ctx, W.ideal, options.budget)
    Wbar = Support(proj_ctx, [g for g in closed.generators if g != proj_ctx.relation])
    pe, cert = build_pseudo_endo(Wbar, level, seed, options)
    moved_bar = pe.pullback(Wbar)
    ctx0, ideal0 = chart_restrict(moved_bar.context, moved_bar.ideal, 0)
    moved = Support(ctx0, [g for g in ideal0.generators if g != ctx0.relation])
    return pe, moved, cert
