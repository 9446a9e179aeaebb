"""Classification of closed subschemes against the support-condition towers.

A support is certified against a claimed triple (q, e, f): codimension >= q
on every face, fiber dimension over the base at most e, and the image of the
top-dimensional-fiber locus of codimension >= f on the base and on every
face.  Fiber-dimension loci are sound over-approximations computed from the
fiber-at-infinity slice of the projective closure; the top stratum (k = q)
is exact via coefficient ideals, which also makes the q = 1 case exact.
Where the over-approximation blocks certification, rational points of the
offending locus are sampled and exact fiber dimensions recomputed by
substitution; a genuine violation refutes, otherwise the verdict is UNKNOWN.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

from .idealkit import (
    Budget,
    IdealPresentation,
    block_degree_order,
    eliminate_block,
    grevlex_order,
    ideal_dimension,
    ideal_product,
    lex_order,
    radical_membership,
    saturate,
)
from .polyring import (
    AMBIENT_PROJECTIVE,
    AUXILIARY,
    FIBER,
    Polynomial,
    PolyRing,
    PrimeField,
    SubstitutionMap,
    leading_form,
)
from .simplicial import FaceSelector, SimplicialContext, all_faces, face_restrict

__all__ = [
    "CERTIFIED",
    "REFUTED",
    "UNKNOWN",
    "Support",
    "ClassifyOptions",
    "Witness",
    "FaceRecord",
    "ClassificationRecord",
    "TowerRecord",
    "support_is_empty",
    "support_codim",
    "check_proper_intersections",
    "quasi_finite_locus",
    "full_fiber_locus",
    "fiber_dim_strata",
    "image_closure",
    "classify_support",
    "is_induced",
    "tower_position",
    "scheme_image",
    "locus_is_empty",
    "locus_codim",
    "fiber_dimension_at",
    "rational_points",
]

CERTIFIED = "CERTIFIED"
REFUTED = "REFUTED"
UNKNOWN = "UNKNOWN"


class Support:
    """A closed subscheme of a simplicial context, relation always adjoined."""

    def __init__(self, context: SimplicialContext, generators: Iterable[Polynomial]):
        self.context = context
        gens = []
        for g in generators:
            if g.ring != context.ring:
                g = g.ring.transfer(g, context.ring)
            if not g.is_zero() and g != context.relation:
                gens.append(g)
        if context.ambient_kind == "projective":
            y_idx = context.ring.block_indices(AMBIENT_PROJECTIVE)
            for g in gens:
                if not g.is_homogeneous_in(y_idx):
                    raise ValueError(f"generator {g} not homogeneous in the projective block")
        self.generators = tuple(gens)
        self.ideal = context.adjoin_relation(gens)
        self.certificates: dict[tuple[int, int, int], "ClassificationRecord"] = {}

    @classmethod
    def from_strings(cls, context: SimplicialContext, texts: Sequence[str],
                     bindings=None) -> "Support":
        return cls(context, [context.ring.parse(t, bindings) for t in texts])

    def face(self, sel: FaceSelector) -> "Support":
        target, ideal = face_restrict(self.context, self.ideal, sel)
        gens = [g for g in ideal.generators if g != target.relation]
        return Support(target, gens)

    def __repr__(self):
        inner = ", ".join(str(g) for g in self.generators) or "0"
        return f"Support({self.context!r}; {inner})"


@dataclass(frozen=True)
class ClassifyOptions:
    budget: Budget | None = None
    seed: int = 0
    samples: int = 20
    boxes: tuple[int, ...] = (10, 100, 1000)


@dataclass
class Witness:
    point: dict[str, object]
    fiber_dim: int
    face: tuple[int, ...]

    def as_dict(self):
        return {
            "point": {k: str(v) for k, v in sorted(self.point.items())},
            "fiber_dim": self.fiber_dim,
            "face": list(self.face),
        }


@dataclass
class FaceRecord:
    selector: FaceSelector
    codim: int | None           # None = empty on this face
    proper: bool
    strata: list[tuple[int, IdealPresentation, int | None]] = dc_field(default_factory=list)

    def as_dict(self):
        return {
            "face": list(self.selector.vertices),
            "face_description": self.selector.describe(),
            "codim": self.codim,
            "proper": self.proper,
            "strata": [
                {"k": k, "locus": [str(g) for g in L.generators], "codim": c}
                for k, L, c in self.strata
            ],
        }


@dataclass
class ClassificationRecord:
    claim: tuple[int, int, int]
    verdict: str
    faces: list[FaceRecord]
    witness: Witness | None = None
    notes: list[str] = dc_field(default_factory=list)

    def as_dict(self):
        return {
            "claim": {"q": self.claim[0], "e": self.claim[1], "f": self.claim[2]},
            "verdict": self.verdict,
            "faces": [f.as_dict() for f in self.faces],
            "witness": self.witness.as_dict() if self.witness else None,
            "notes": list(self.notes),
        }


@dataclass
class TowerRecord:
    per_face: list[tuple[FaceSelector, int | None, int, int | None]]
    q_max: int | None
    e_bound: int
    f_bound: int | None
    empty: bool = False

    def as_dict(self):
        return {
            "per_face": [
                {"face": list(sel.vertices), "q": q, "e": e, "f": f}
                for sel, q, e, f in self.per_face
            ],
            "q_max": self.q_max,
            "e_bound": self.e_bound,
            "f_bound": self.f_bound,
            "empty": self.empty,
        }


# ---------------------------------------------------------------------------
# Emptiness, dimension and codimension helpers


def _charts(context: SimplicialContext, ideal: IdealPresentation):
    """Affine charts of an ideal: the ideal itself for affine contexts, the
    d+1 standard chart restrictions for projective ones."""
    from .simplicial import chart_restrict

    if context.ambient_kind != "projective":
        return [(context, ideal)]
    return [chart_restrict(context, ideal, k) for k in range(context.d + 1)]


def support_is_empty(S: Support, budget: Budget | None = None) -> bool:
    return all(ideal.is_unit(budget) for _, ideal in _charts(S.context, S.ideal))


def support_dim(S: Support, budget: Budget | None = None) -> int | None:
    dims = []
    for _, ideal in _charts(S.context, S.ideal):
        if not ideal.is_unit(budget):
            dims.append(ideal_dimension(ideal, budget))
    return max(dims) if dims else None


def support_codim(S: Support, budget: Budget | None = None) -> int | None:
    """Exact codimension in Delta^n x X x A^q; None for the empty support."""
    dim = support_dim(S, budget)
    if dim is None:
        return None
    return S.context.ambient_dim - dim


def _base_ring(context: SimplicialContext) -> PolyRing:
    return context.base_ring()


def _base_relation(context: SimplicialContext) -> Polynomial:
    return context.ring.transfer(context.relation, _base_ring(context))


def _base_charts(context: SimplicialContext, L: IdealPresentation):
    """Affine charts of a locus living on the base Delta^n x X."""
    if context.ambient_kind != "projective":
        return [L]
    base = L.ring
    affine_ctx = context.twin(ambient_kind="affine")
    target = _base_ring(affine_ctx)
    out = []
    for k in range(context.d + 1):
        mapping: dict[str, Polynomial] = {f"Y{k}": target.one()}
        pos = 1
        for j in range(context.d + 1):
            if j == k:
                continue
            mapping[f"Y{j}"] = target.variable(f"y{pos}")
            pos += 1
        sub = SubstitutionMap.from_dict(base, target, mapping)
        out.append(IdealPresentation(target, [sub(g) for g in L.generators]))
    return out


def locus_is_empty(context: SimplicialContext, L: IdealPresentation,
                   budget: Budget | None = None) -> bool:
    return all(chart.is_unit(budget) for chart in _base_charts(context, L))


def locus_dim(context: SimplicialContext, L: IdealPresentation,
              budget: Budget | None = None) -> int | None:
    dims = []
    for chart in _base_charts(context, L):
        if not chart.is_unit(budget):
            dims.append(ideal_dimension(chart, budget))
    return max(dims) if dims else None


def locus_codim(context: SimplicialContext, L: IdealPresentation,
                budget: Budget | None = None) -> int | None:
    """Codimension of a closed locus within the base Delta^n x X; None if empty."""
    dim = locus_dim(context, L, budget)
    if dim is None:
        return None
    return context.base_dim - dim


# ---------------------------------------------------------------------------
# Proper intersection with faces


def check_proper_intersections(S: Support, q: int, budget: Budget | None = None):
    """Exact per-face codimension check; returns (all_proper, records, min_codim)."""
    records: list[FaceRecord] = []
    min_codim: int | None = None
    ok = True
    for sel in all_faces(S.context.n):
        face_S = S.face(sel)
        codim = support_codim(face_S, budget)
        proper = codim is None or codim >= q
        ok = ok and proper
        if codim is not None:
            min_codim = codim if min_codim is None else min(min_codim, codim)
        records.append(FaceRecord(sel, codim, proper))
    return ok, records, min_codim


# ---------------------------------------------------------------------------
# Fiber-dimension loci


def _fiber_infinity_generators(S: Support, budget: Budget | None = None) -> list[Polynomial]:
    """Generators of the fiber-at-infinity slice: leading fiber-forms of a
    Groebner basis under a fiber-degree-compatible order.  Equal to the
    projective fiber closure intersected with the infinity hyperplane."""
    ring = S.context.ring
    order = block_degree_order(ring, FIBER)
    basis = S.ideal.groebner_basis(order, budget)
    return [leading_form(b, FIBER) for b in basis if not b.is_zero()]


def _image_of_fiber_cone(S: Support, extra_vanishing: int,
                         budget: Budget | None = None) -> IdealPresentation:
    """Base-locus image of the infinity slice with the first `extra_vanishing`
    fiber coordinates forced to zero: union over the remaining fiber
    coordinates of (saturate, eliminate) chart images."""
    context = S.context
    ring = context.ring
    base = _base_ring(context)
    fiber_names = ring.block(FIBER).names
    remaining = fiber_names[extra_vanishing:]
    if not remaining:
        return IdealPresentation(base, [base.one()])
    gens = _fiber_infinity_generators(S, budget)
    gens = gens + [ring.variable(n) for n in fiber_names[:extra_vanishing]]
    J = IdealPresentation(ring, gens)
    result: IdealPresentation | None = None
    for name in remaining:
        sat = saturate(J, ring.variable(name), budget)
        elim = eliminate_block(sat, fiber_names, budget)
        part = IdealPresentation(base, [elim.ring.transfer(g, base) for g in elim.generators])
        result = part if result is None else ideal_product(result, part)
    return IdealPresentation(base, result.generators + (_base_relation(context),))


def full_fiber_locus(S: Support, budget: Budget | None = None) -> IdealPresentation:
    """Exact locus of base points whose fiber is all of A^q: every fiber
    coefficient of every generator vanishes."""
    context = S.context
    base = _base_ring(context)
    if context.q == 0:
        return IdealPresentation(base, [base.one()])
    ring = context.ring
    fiber_idx = ring.block_indices(FIBER)
    coeffs: list[Polynomial] = []
    for g in S.generators:
        for part in g.coefficients_by(fiber_idx).values():
            coeffs.append(ring.transfer(part, base))
    return IdealPresentation(base, coeffs + [_base_relation(context)])


def quasi_finite_locus(S: Support, budget: Budget | None = None) -> IdealPresentation:
    """Closed locus L with Z -> base quasi-finite over the complement of L.

    Sound over-approximation of the true non-quasi-finite locus via the
    image of the fiber-at-infinity slice; exact when q <= 1 (where the locus
    coincides with the identical-vanishing coefficient locus)."""
    context = S.context
    base = _base_ring(context)
    if context.q == 0:
        return IdealPresentation(base, [base.one()])
    if context.q == 1:
        return full_fiber_locus(S, budget)
    return _image_of_fiber_cone(S, 0, budget)


def fiber_dim_strata(S: Support, max_k: int, budget: Budget | None = None):
    """Nested loci D_1 ⊇ D_2 ⊇ ... with {fiber dim >= k} ⊆ D_k.

    D_1 is the quasi-finite locus; deeper strata slice the infinity part by
    one more coordinate hyperplane each; the top stratum k = q is exact.
    """
    context = S.context
    if max_k > context.q + 1:
        raise ValueError(f"max_k {max_k} exceeds fiber dimension bound {context.q} + 1")
    out = []
    for k in range(1, max_k + 1):
        if k > context.q:
            base = _base_ring(context)
            out.append(IdealPresentation(base, [base.one()]))
        elif k == context.q:
            out.append(full_fiber_locus(S, budget))
        elif k == 1:
            out.append(quasi_finite_locus(S, budget))
        else:
            out.append(_image_of_fiber_cone(S, k - 1, budget))
    return out


def image_closure(S: Support, budget: Budget | None = None) -> IdealPresentation:
    """Closure of the image of Z in the base Delta^n x X."""
    context = S.context
    base = _base_ring(context)
    if context.q == 0:
        return IdealPresentation(base, list(S.ideal.generators))
    fiber_names = context.ring.block(FIBER).names
    elim = eliminate_block(S.ideal, fiber_names, budget)
    gens = [elim.ring.transfer(g, base) for g in elim.generators]
    return IdealPresentation(base, gens + [_base_relation(context)])


def _stratum_locus(S: Support, k: int, budget: Budget | None = None) -> IdealPresentation:
    """D_k for k >= 1; D_0 is the image closure; empty beyond the fiber bound."""
    if k == 0:
        return image_closure(S, budget)
    if k > S.context.q:
        base = _base_ring(S.context)
        return IdealPresentation(base, [base.one()])
    return fiber_dim_strata(S, k, budget)[-1]


# ---------------------------------------------------------------------------
# Exact fiber dimension at rational points


def _fiber_ring(context: SimplicialContext) -> PolyRing:
    if context.q == 0:
        return PolyRing([], context.ring.field)
    return PolyRing([context.ring.block(FIBER)], context.ring.field)


def fiber_dimension_at(S: Support, point: dict[str, object],
                       budget: Budget | None = None) -> int:
    """Exact Krull dimension of the scheme-theoretic fiber over a base point.

    The point must assign a value to every base variable (for a projective
    ambient, chart-normalized homogeneous coordinates).  Returns -1 for an
    empty fiber.
    """
    ring = S.context.ring
    fiber = _fiber_ring(S.context)
    gens = []
    for g in S.ideal.generators:
        val = g.evaluate(point)
        gens.append(ring.transfer(val, fiber))
    return ideal_dimension(IdealPresentation(fiber, gens), budget)


# ---------------------------------------------------------------------------
# Rational point sampling (exact; seeded)


def _rational_root_candidates(coeffs: list[Fraction], box: int):
    """Candidate roots: small integers plus rational-root-theorem fractions."""
    seen = set()
    for v in range(-box, box + 1):
        seen.add(Fraction(v))
    nonzero = [c for c in coeffs if c != 0]
    if nonzero:
        den = 1
        for c in coeffs:
            den = den * c.denominator // _gcd(den, c.denominator)
        ints = [int(c * den) for c in coeffs]
        while ints and ints[0] == 0:
            ints = ints[1:]
        if ints:
            a0, an = abs(ints[0]), abs(ints[-1])
            for p in _small_divisors(a0, 200):
                for q in _small_divisors(an, 50):
                    seen.add(Fraction(p, q))
                    seen.add(Fraction(-p, q))
    return sorted(seen)


def _gcd(a: int, b: int) -> int:
    from math import gcd as g

    return g(a, b)


def _small_divisors(n: int, cap: int):
    if n == 0:
        return [1]
    out = set()
    d = 1
    while d * d <= n and len(out) < cap:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def _univariate_roots(ring: PolyRing, g: Polynomial, var_index: int, box: int):
    """Exact roots of a univariate polynomial in the ring's field."""
    field = ring.field
    coeff_map: dict[int, object] = {}
    for exp, c in g.terms.items():
        coeff_map[exp[var_index]] = c
    deg = max(coeff_map) if coeff_map else 0
    if isinstance(field, PrimeField):
        roots = []
        for a in range(field.p):
            acc = 0
            for e in range(deg, -1, -1):
                acc = (acc * a + coeff_map.get(e, 0)) % field.p
            if acc == 0:
                roots.append(a)
        return roots
    coeffs = [Fraction(coeff_map.get(e, 0)) for e in range(deg + 1)]
    roots = []
    for cand in _rational_root_candidates(coeffs, box):
        acc = Fraction(0)
        for e in range(deg, -1, -1):
            acc = acc * cand + coeffs[e]
        if acc == 0:
            roots.append(cand)
    return roots


def _substitute_and_shrink(I: IdealPresentation, name: str, value):
    ring = I.ring
    small = ring.drop_variables((name,))
    gens = []
    for g in I.generators:
        gens.append(ring.transfer(g.evaluate({name: value}), small))
    return IdealPresentation(small, gens)


def rational_points(I: IdealPresentation, rng: random.Random,
                    limit: int = 20, boxes: Sequence[int] = (10, 100, 1000),
                    budget: Budget | None = None) -> list[dict[str, object]]:
    """Exact points of V(I), found by triangular solving with rational-root
    extraction, sampling free variables from escalating integer boxes.

    Best-effort: an empty result does not prove V(I) has no rational points.
    """
    out: list[dict[str, object]] = []
    _solve(I, rng, limit, tuple(boxes), budget, {}, out, depth=0)
    dedup = []
    seen = set()
    for pt in out:
        key = tuple(sorted((k, str(v)) for k, v in pt.items()))
        if key not in seen:
            seen.add(key)
            dedup.append(pt)
    return dedup[:limit]


def _solve(I, rng, limit, boxes, budget, partial, out, depth):
    if len(out) >= limit or depth > 16:
        return
    ring = I.ring
    try:
        if I.is_unit(budget):
            return
    except Exception:
        return
    if ring.nvars == 0:
        out.append(dict(partial))
        return
    try:
        basis = I.groebner_basis(lex_order(ring), budget)
    except Exception:
        return
    # Univariate basis element -> branch on exact roots.
    for b in basis:
        used = {i for exp in b.terms for i, e in enumerate(exp) if e}
        if len(used) == 1:
            (i,) = used
            name = ring.var_names[i]
            for root in _univariate_roots(ring, b, i, boxes[0]):
                if len(out) >= limit:
                    return
                smaller = _substitute_and_shrink(I, name, root)
                _solve(smaller, rng, limit, boxes, budget, {**partial, name: root}, out, depth + 1)
            return
    # Positive-dimensional (or no univariate handle): sample a free variable.
    lts = []
    order = grevlex_order(ring)
    for b in basis:
        lt = max(b.terms, key=order.key)
        lts.append({i for i, e in enumerate(lt) if e})
    free = None
    for i in range(ring.nvars - 1, -1, -1):
        if all(s != {i} for s in lts):
            free = i
            break
    if free is None:
        free = ring.nvars - 1
    name = ring.var_names[free]
    field = ring.field
    for box in boxes:
        tries = min(2 * box + 1, 12)
        for _ in range(tries):
            if len(out) >= limit:
                return
            if isinstance(field, PrimeField):
                val = rng.randrange(field.p)
            else:
                val = Fraction(rng.randint(-box, box))
            smaller = _substitute_and_shrink(I, name, val)
            _solve(smaller, rng, limit, boxes, budget, {**partial, name: val}, out, depth + 1)
        if out:
            return


def _sample_base_points(context: SimplicialContext, L: IdealPresentation,
                        rng: random.Random, options: ClassifyOptions):
    """Rational points on a base locus; projective charts are normalized by
    setting the chart coordinate to 1 and renaming back to Y-coordinates."""
    points: list[dict[str, object]] = []
    if context.ambient_kind != "projective":
        for pt in rational_points(L, rng, options.samples, options.boxes, options.budget):
            points.append(pt)
        return points
    affine_ctx = context.twin(ambient_kind="affine")
    one = context.ring.field.one
    for k, chart in enumerate(_base_charts(context, L)):
        for pt in rational_points(chart, rng, options.samples, options.boxes, options.budget):
            full = {}
            pos = 1
            for j in range(context.d + 1):
                if j == k:
                    full[f"Y{j}"] = one
                else:
                    full[f"Y{j}"] = pt.get(f"y{pos}", 0)
                    pos += 1
            for name, v in pt.items():
                if not name.startswith("y"):
                    full[name] = v
            points.append(full)
        if len(points) >= options.samples:
            break
    return points[: options.samples]


# ---------------------------------------------------------------------------
# Classification


def classify_support(S: Support, q: int, e: int, f: int,
                     options: ClassifyOptions | None = None) -> ClassificationRecord:
    """Verdict for the claim: codim >= q with proper face intersections,
    fiber dimension <= e, and codim of the e-fiber-locus image >= f on the
    base and on every face."""
    key = (q, e, f)
    cached = S.certificates.get(key)
    if cached is not None:
        return cached
    options = options or ClassifyOptions()
    budget = options.budget
    notes: list[str] = []
    faces: list[FaceRecord] = []
    offenders_b: list[tuple[FaceSelector, Support, IdealPresentation]] = []
    offenders_c: list[FaceSelector] = []
    improper: FaceSelector | None = None

    for sel in all_faces(S.context.n):
        face_S = S.face(sel)
        codim = support_codim(face_S, budget)
        proper = codim is None or codim >= q
        rec = FaceRecord(sel, codim, proper)
        if not proper and improper is None:
            improper = sel
        d_next = _stratum_locus(face_S, e + 1, budget)
        d_e = _stratum_locus(face_S, e, budget)
        codim_next = locus_codim(face_S.context, d_next, budget)
        codim_e = locus_codim(face_S.context, d_e, budget)
        rec.strata = [(e, d_e, codim_e), (e + 1, d_next, codim_next)]
        faces.append(rec)
        if codim_next is not None:
            offenders_b.append((sel, face_S, d_next))
        if codim_e is not None and codim_e < f:
            offenders_c.append(sel)

    if improper is not None:
        record = ClassificationRecord(key, REFUTED, faces,
                                      notes=[f"improper intersection on face {improper.describe()}"])
        S.certificates[key] = record
        return record

    if not offenders_b and not offenders_c:
        record = ClassificationRecord(key, CERTIFIED, faces, notes=notes)
        S.certificates[key] = record
        return record

    # Over-approximations in the way: sample exact fiber dimensions.
    rng = random.Random(options.seed)
    for sel, face_S, locus in offenders_b:
        for pt in _sample_base_points(face_S.context, locus, rng, options):
            dim = fiber_dimension_at(face_S, pt, budget)
            if dim >= e + 1:
                witness = Witness(pt, dim, sel.vertices)
                record = ClassificationRecord(key, REFUTED, faces, witness=witness,
                                              notes=["fiber dimension exceeds claim at witness"])
                S.certificates[key] = record
                return record
        notes.append(
            f"face {sel.describe()}: D_{e + 1} over-approximation nonempty, no exact violation found"
        )
    for sel in offenders_c:
        notes.append(f"face {sel.describe()}: codim of D_{e} over-approximation below {f}")
    record = ClassificationRecord(key, UNKNOWN, faces, notes=notes)
    S.certificates[key] = record
    return record


# ---------------------------------------------------------------------------
# Induced supports


def is_induced(S: Support, budget: Budget | None = None):
    """Detect containment in the preimage of a codimension >= q subset of
    Delta^n x A^q; returns (flag, witness ideal in Delta^n x A^q coordinates)."""
    context = S.context
    ring = context.ring
    target_ctx = context.twin(d=0, ambient_kind="affine")
    target = target_ctx.ring
    if context.d == 0 and context.ambient_kind == "affine":
        witness = IdealPresentation(target, [ring.transfer(g, target) for g in S.ideal.generators])
    elif context.ambient_kind == "projective":
        names = ring.block(AMBIENT_PROJECTIVE).names
        part: IdealPresentation | None = None
        for nm in names:
            sat = saturate(S.ideal, ring.variable(nm), budget)
            elim = eliminate_block(sat, names, budget)
            piece = IdealPresentation(target, [elim.ring.transfer(g, target) for g in elim.generators])
            part = piece if part is None else ideal_product(part, piece)
        witness = IdealPresentation(target, part.generators + (target_ctx.relation,))
    else:
        names = ring.block(S.context.ambient_block_kind).names
        elim = eliminate_block(S.ideal, names, budget)
        witness = IdealPresentation(target, [elim.ring.transfer(g, target) for g in elim.generators])
    witness = target_ctx.adjoin_relation([g for g in witness.generators if g != target_ctx.relation])
    if witness.is_unit(budget):
        return True, witness
    dim = ideal_dimension(witness, budget)
    codim = target_ctx.ambient_dim - dim
    return codim >= context.q, witness


# ---------------------------------------------------------------------------
# Tower position


def tower_position(S: Support, options: ClassifyOptions | None = None) -> TowerRecord:
    """Largest certified q, smallest certified e, largest certified f for
    that e; reported per face and globally."""
    options = options or ClassifyOptions()
    budget = options.budget
    if support_is_empty(S, budget):
        return TowerRecord([], None, 0, None, empty=True)
    per_face = []
    q_max: int | None = None
    e_global = 0
    for sel in all_faces(S.context.n):
        face_S = S.face(sel)
        codim = support_codim(face_S, budget)
        if codim is not None:
            q_max = codim if q_max is None else min(q_max, codim)
        e_face = face_S.context.q
        for e in range(0, face_S.context.q + 1):
            if e + 1 > face_S.context.q:
                e_face = e
                break
            locus = _stratum_locus(face_S, e + 1, budget)
            if locus_is_empty(face_S.context, locus, budget):
                e_face = e
                break
        e_global = max(e_global, e_face)
        d_e = _stratum_locus(face_S, e_face, budget)
        f_face = locus_codim(face_S.context, d_e, budget)
        per_face.append((sel, codim, e_face, f_face))

    f_global: int | None = None
    cap = S.context.base_dim
    for sel in all_faces(S.context.n):
        face_S = S.face(sel)
        d_e = _stratum_locus(face_S, e_global, budget)
        f_face = locus_codim(face_S.context, d_e, budget)
        if f_face is not None:
            f_global = f_face if f_global is None else min(f_global, f_face)
    if f_global is None:
        f_global = cap
    f_global = min(f_global, cap)
    return TowerRecord(per_face, q_max, e_global, f_global)


# ---------------------------------------------------------------------------
# Scheme images


def scheme_image(I: IdealPresentation, morphism: SubstitutionMap,
                 budget: Budget | None = None) -> IdealPresentation:
    """Closure of the image of V(I) under the morphism whose coordinate
    pullback is `morphism` (target ring -> source ring): eliminate the source
    variables from the graph ideal."""
    source = morphism.target   # ring where V(I) lives
    target = morphism.source   # coordinate ring of the image space
    if I.ring != source:
        raise ValueError("ideal must live in the morphism's geometric source ring")
    aux_names = tuple(f"_w{i}" for i in range(target.nvars))
    big = source.extend_block(AUXILIARY, aux_names, front=False)
    gens = [source.transfer(g, big) for g in I.generators]
    for i, name in enumerate(target.var_names):
        image_poly = morphism.images[i]
        gens.append(big.variable(aux_names[i]) - source.transfer(image_poly, big))
    graph = IdealPresentation(big, gens)
    elim = eliminate_block(graph, source.var_names, budget)
    out = []
    rename = {f"_w{i}": target.variable(target.var_names[i]) for i in range(target.nvars)}
    sub = SubstitutionMap.from_dict(elim.ring, target, rename)
    for g in elim.generators:
        out.append(sub(g))
    return IdealPresentation(target, out)
