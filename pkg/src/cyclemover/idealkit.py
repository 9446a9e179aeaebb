"""Groebner-basis engine and ideal-theoretic primitives.

Buchberger with the sugar selection strategy and the classic pair-pruning
criteria (coprime leading terms, chain criterion).  Over the rationals the
inner loop works fraction-free on content-stripped integer rows; reduced
bases are returned monic with exact rational coefficients and are unique per
monomial order, so repeated runs are byte-identical.

All monomial orders used here are block-grevlex: an ordered partition of the
variables compared group by group with graded reverse-lexicographic inside
each group.  This single shape covers grevlex (one group), lex (singleton
groups), elimination orders (dropped group first) and the degree-compatible
block orders needed for projective closures.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .polyring import (
    AUXILIARY,
    Polynomial,
    PolyRing,
    PrimeField,
    Rationals,
    RingMismatchError,
)

__all__ = [
    "Budget",
    "BudgetExceededError",
    "MonomialOrder",
    "grevlex_order",
    "lex_order",
    "elimination_order",
    "block_degree_order",
    "IdealPresentation",
    "groebner_basis",
    "normal_form",
    "spoly_reductions_vanish",
    "eliminate_block",
    "saturate",
    "radical_membership",
    "ideal_dimension",
    "projective_closure",
    "ideal_sum",
    "ideal_product",
    "ideal_contains",
    "ideal_equal",
    "is_unit_ideal",
]


class BudgetExceededError(RuntimeError):
    """Resource budget exhausted; distinct from any mathematical verdict."""

    def __init__(self, what: str, limit: int):
        super().__init__(f"budget exceeded: {what} limit {limit}")
        self.what = what
        self.limit = limit


@dataclass(frozen=True)
class Budget:
    """Caps on the Groebner engine; exceeding raises, never returns wrong output."""

    max_spairs: int = 20000
    max_degree: int = 120


DEFAULT_BUDGET = Budget()


class _BudgetState:
    __slots__ = ("budget", "spairs")

    def __init__(self, budget: Budget):
        self.budget = budget
        self.spairs = 0

    def tick_spair(self):
        self.spairs += 1
        if self.spairs > self.budget.max_spairs:
            raise BudgetExceededError("S-pairs", self.budget.max_spairs)

    def check_degree(self, deg: int):
        if deg > self.budget.max_degree:
            raise BudgetExceededError("degree", self.budget.max_degree)


# ---------------------------------------------------------------------------
# Monomial orders


def _grevlex_part(exp: Sequence[int], idxs: Sequence[int]):
    return (sum(exp[i] for i in idxs), tuple(-exp[i] for i in reversed(idxs)))


class MonomialOrder:
    """Block-grevlex order determined by an ordered partition of variable indices."""

    __slots__ = ("groups", "name")

    def __init__(self, groups: Sequence[Sequence[int]], name: str = "block"):
        self.groups = tuple(tuple(g) for g in groups)
        self.name = name

    def key(self, exp: Sequence[int]):
        return tuple(_grevlex_part(exp, g) for g in self.groups)

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.groups == other.groups

    def __hash__(self):
        return hash(self.groups)

    def __repr__(self):
        return f"MonomialOrder({self.name}, groups={self.groups})"


def grevlex_order(ring: PolyRing) -> MonomialOrder:
    return MonomialOrder([tuple(range(ring.nvars))], "grevlex")


def lex_order(ring: PolyRing) -> MonomialOrder:
    return MonomialOrder([(i,) for i in range(ring.nvars)], "lex")


def elimination_order(ring: PolyRing, drop_names: Iterable[str]) -> MonomialOrder:
    """Dropped variables dominate; basis elements free of them generate I ∩ subring."""
    drop = {ring.index_of(n) for n in drop_names}
    first = tuple(sorted(drop))
    rest = tuple(i for i in range(ring.nvars) if i not in drop)
    return MonomialOrder([first, rest] if rest else [first], "elim")


def block_degree_order(ring: PolyRing, kinds) -> MonomialOrder:
    """Degree-compatible in the given block(s): block degree decides first."""
    block = set(ring.block_indices(kinds))
    first = tuple(sorted(block))
    rest = tuple(i for i in range(ring.nvars) if i not in block)
    return MonomialOrder([first, rest] if rest else [first], "blockdeg")


# ---------------------------------------------------------------------------
# Internal rows: term lists sorted descending under the active order.
# Coefficients are ints (fraction-free mode over Q, or residues mod p).


def _poly_to_row(p: Polynomial, order: MonomialOrder):
    return sorted(
        ((order.key(e), e, c) for e, c in p.terms.items()), key=lambda t: t[0], reverse=True
    )


def _row_to_poly(ring: PolyRing, row) -> Polynomial:
    return Polynomial(ring, {e: c for _, e, c in row})


def _int_rows(gens: Sequence[Polynomial], order: MonomialOrder):
    """Clear denominators and strip content; rational mode only."""
    rows = []
    for g in gens:
        if g.is_zero():
            continue
        den = 1
        for c in g.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        ints = {e: int(c * den) for e, c in g.terms.items()}
        content = 0
        for v in ints.values():
            content = gcd(content, abs(v))
        row = sorted(
            ((order.key(e), e, v // content) for e, v in ints.items()),
            key=lambda t: t[0],
            reverse=True,
        )
        rows.append(row)
    return rows


def _strip_content(row):
    content = 0
    for _, _, c in row:
        content = gcd(content, abs(c))
        if content == 1:
            return row
    if content <= 1:
        return row
    return [(k, e, c // content) for k, e, c in row]


def _mono_mul(exp, shift):
    return tuple(a + b for a, b in zip(exp, shift))


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _axpy_int(a: int, p, c: int, shift, g, order):
    """a*p + c*(x^shift * g) as a merge of descending rows, integer coefficients."""
    out = []
    i = j = 0
    shifted = [(None, _mono_mul(e, shift), cc) for _, e, cc in g]
    for idx in range(len(shifted)):
        _, e, cc = shifted[idx]
        shifted[idx] = (order.key(e), e, cc)
    while i < len(p) and j < len(shifted):
        kp, ep, cp = p[i]
        kg, eg, cg = shifted[j]
        if kp > kg:
            out.append((kp, ep, a * cp))
            i += 1
        elif kg > kp:
            out.append((kg, eg, c * cg))
            j += 1
        else:
            v = a * cp + c * cg
            if v:
                out.append((kp, ep, v))
            i += 1
            j += 1
    while i < len(p):
        kp, ep, cp = p[i]
        out.append((kp, ep, a * cp))
        i += 1
    while j < len(shifted):
        kg, eg, cg = shifted[j]
        out.append((kg, eg, c * cg))
        j += 1
    return out


def _nf_int(row, basis_rows, order, state: _BudgetState, full: bool = True):
    """Fraction-free normal form of an integer row against basis_rows."""
    cur = row
    idx = 0
    while idx < len(cur):
        key, exp, coeff = cur[idx]
        hit = None
        for b in basis_rows:
            if _divides(b[0][1], exp):
                hit = b
                break
        if hit is None:
            if not full:
                return cur
            idx += 1
            continue
        state.check_degree(sum(exp))
        lcg = hit[0][2]
        g = gcd(abs(coeff), abs(lcg))
        shift = tuple(a - b for a, b in zip(exp, hit[0][1]))
        cur = _axpy_int(lcg // g, cur, -(coeff // g), shift, hit, order)
        cur = _strip_content(cur)
    return cur


def _field_rows(gens: Sequence[Polynomial], order: MonomialOrder, field):
    rows = []
    for g in gens:
        if g.is_zero():
            continue
        rows.append(_poly_to_row(g, order))
    return rows


def _axpy_field(p, c, shift, g, order, field):
    """p + c*(x^shift * g) over the coefficient field."""
    out = []
    i = j = 0
    shifted = []
    for _, e, cc in g:
        e2 = _mono_mul(e, shift)
        shifted.append((order.key(e2), e2, field.mul(c, cc)))
    while i < len(p) and j < len(shifted):
        kp, ep, cp = p[i]
        kg, eg, cg = shifted[j]
        if kp > kg:
            out.append(p[i])
            i += 1
        elif kg > kp:
            out.append(shifted[j])
            j += 1
        else:
            v = field.add(cp, cg)
            if v != field.zero:
                out.append((kp, ep, v))
            i += 1
            j += 1
    out.extend(p[i:])
    out.extend(shifted[j:])
    return out


def _nf_field(row, basis_rows, order, field, state: _BudgetState, full: bool = True):
    cur = row
    idx = 0
    while idx < len(cur):
        key, exp, coeff = cur[idx]
        hit = None
        for b in basis_rows:
            if _divides(b[0][1], exp):
                hit = b
                break
        if hit is None:
            if not full:
                return cur
            idx += 1
            continue
        state.check_degree(sum(exp))
        factor = field.neg(field.mul(coeff, field.inv(hit[0][2])))
        shift = tuple(a - b for a, b in zip(exp, hit[0][1]))
        cur = _axpy_field(cur, factor, shift, hit, order, field)
    return cur


def _spair_int(f, g, order):
    lf, lg = f[0], g[0]
    lcm = tuple(max(a, b) for a, b in zip(lf[1], lg[1]))
    cf, cg = lf[2], lg[2]
    d = gcd(abs(cf), abs(cg))
    sf = tuple(a - b for a, b in zip(lcm, lf[1]))
    sg = tuple(a - b for a, b in zip(lcm, lg[1]))
    row = _axpy_int(cg // d, [(order.key(_mono_mul(e, sf)), _mono_mul(e, sf), c) for _, e, c in f],
                    -(cf // d), sg, g, order)
    return _strip_content(row)


def _spair_field(f, g, order, field):
    lf, lg = f[0], g[0]
    lcm = tuple(max(a, b) for a, b in zip(lf[1], lg[1]))
    sf = tuple(a - b for a, b in zip(lcm, lf[1]))
    sg = tuple(a - b for a, b in zip(lcm, lg[1]))
    fshift = [(order.key(_mono_mul(e, sf)), _mono_mul(e, sf), field.mul(c, field.inv(lf[2])))
              for _, e, c in f]
    return _axpy_field(fshift, field.neg(field.inv(lg[2])), sg, g, order, field)


def _buchberger(gens: Sequence[Polynomial], order: MonomialOrder, field, state: _BudgetState):
    modular = isinstance(field, PrimeField)
    if modular:
        rows = _field_rows(gens, order, field)
        nf = lambda r, basis: _nf_field(r, basis, order, field, state)
        spair = lambda f, g: _spair_field(f, g, order, field)
    else:
        rows = _int_rows(gens, order)
        nf = lambda r, basis: _nf_int(r, basis, order, state)
        spair = lambda f, g: _spair_int(f, g, order)

    rows.sort(key=lambda r: (r[0][0], len(r)))
    basis: list = []
    sugars: list[int] = []
    pairs: list[tuple[int, int, int, tuple]] = []  # (sugar, i, j, lcm-key)
    done: set[tuple[int, int]] = set()

    def add_row(row, sugar):
        i = len(basis)
        basis.append(row)
        sugars.append(sugar)
        for j in range(i):
            lcm = tuple(max(a, b) for a, b in zip(basis[j][0][1], row[0][1]))
            s = max(
                sugars[j] + sum(lcm) - sum(basis[j][0][1]),
                sugar + sum(lcm) - sum(row[0][1]),
            )
            pairs.append((s, order.key(lcm), j, i))
        pairs.sort(reverse=True)

    for row in rows:
        red = nf(row, basis)
        if red:
            if not modular:
                red = _strip_content(red)
            add_row(red, sum(red[0][1]))

    while pairs:
        sugar, lcmkey, i, j = pairs.pop()
        done.add((i, j))
        li, lj = basis[i][0][1], basis[j][0][1]
        lcm = tuple(max(a, b) for a, b in zip(li, lj))
        # Buchberger 1: coprime leading monomials.
        if all(a + b == m for a, b, m in zip(li, lj, lcm)):
            continue
        # Chain criterion.
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if _divides(basis[k][0][1], lcm):
                pik = (min(i, k), max(i, k))
                pjk = (min(j, k), max(j, k))
                if pik in done and pjk in done:
                    skip = True
                    break
        if skip:
            continue
        state.tick_spair()
        red = nf(spair(basis[i], basis[j]), basis)
        if red:
            add_row(red, max(sugar, sum(red[0][1])))

    return _interreduce(basis, order, field, state)


def _interreduce(basis, order, field, state: _BudgetState):
    """Minimalize then tail-reduce; output monic rows sorted by leading term."""
    modular = isinstance(field, PrimeField)
    basis = sorted(basis, key=lambda r: r[0][0])
    minimal = []
    for i, row in enumerate(basis):
        lt = row[0][1]
        keep = True
        for j, other in enumerate(basis):
            if i == j:
                continue
            olt = other[0][1]
            if _divides(olt, lt) and (olt != lt or j < i):
                keep = False
                break
        if keep:
            minimal.append(row)

    reduced = []
    for i, row in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        if modular:
            red = _nf_field(row, others, order, field, state)
        else:
            red = _strip_content(_nf_int(row, others, order, state))
        if red:
            reduced.append(red)

    out = []
    for row in sorted(reduced, key=lambda r: r[0][0]):
        if modular:
            inv = field.inv(row[0][2])
            out.append([(k, e, field.mul(c, inv)) for k, e, c in row])
        else:
            lc = row[0][2]
            out.append([(k, e, Fraction(c, lc)) for k, e, c in row])
    return out


# ---------------------------------------------------------------------------
# Ideal presentations


class IdealPresentation:
    """Generator list with a write-once cache of reduced Groebner bases."""

    __slots__ = ("ring", "generators", "_cache")

    def __init__(self, ring: PolyRing, generators: Iterable[Polynomial]):
        gens = []
        for g in generators:
            if g.ring != ring:
                raise RingMismatchError("generator outside the ideal's ring")
            if not g.is_zero():
                gens.append(g)
        self.ring = ring
        self.generators = tuple(gens)
        self._cache: dict[MonomialOrder, tuple[Polynomial, ...]] = {}

    def __repr__(self):
        inner = ", ".join(str(g) for g in self.generators) or "0"
        return f"Ideal({inner})"

    def groebner_basis(self, order: MonomialOrder | None = None, budget: Budget | None = None):
        order = order or grevlex_order(self.ring)
        cached = self._cache.get(order)
        if cached is not None:
            return cached
        state = _BudgetState(budget or DEFAULT_BUDGET)
        rows = _buchberger(self.generators, order, self.ring.field, state)
        basis = tuple(_row_to_poly(self.ring, r) for r in rows)
        self._cache[order] = basis
        return basis

    def normal_form(self, p: Polynomial, order: MonomialOrder | None = None,
                    budget: Budget | None = None) -> Polynomial:
        order = order or grevlex_order(self.ring)
        basis = self.groebner_basis(order, budget)
        rows = [_poly_to_row(b, order) for b in basis]
        state = _BudgetState(budget or DEFAULT_BUDGET)
        red = _nf_field(_poly_to_row(p, order), rows, order, self.ring.field, state)
        return _row_to_poly(self.ring, red)

    def contains(self, p: Polynomial, budget: Budget | None = None) -> bool:
        return self.normal_form(p, budget=budget).is_zero()

    def is_unit(self, budget: Budget | None = None) -> bool:
        basis = self.groebner_basis(budget=budget)
        return len(basis) == 1 and basis[0].total_degree() == 0

    def is_zero(self) -> bool:
        return not self.generators


# Functional surface.


def groebner_basis(I: IdealPresentation, order: MonomialOrder | None = None,
                   budget: Budget | None = None):
    return I.groebner_basis(order, budget)


def normal_form(p: Polynomial, I: IdealPresentation, order: MonomialOrder | None = None,
                budget: Budget | None = None) -> Polynomial:
    return I.normal_form(p, order, budget)


def spoly_reductions_vanish(I: IdealPresentation, order: MonomialOrder | None = None,
                            budget: Budget | None = None) -> bool:
    """Buchberger criterion on the emitted basis: every S-polynomial reduces to 0."""
    order = order or grevlex_order(I.ring)
    basis = I.groebner_basis(order, budget)
    if len(basis) < 2:
        return True
    check = IdealPresentation(I.ring, basis)
    check._cache[order] = basis
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            lt_i = max(basis[i].terms, key=order.key)
            lt_j = max(basis[j].terms, key=order.key)
            lcm = tuple(max(a, b) for a, b in zip(lt_i, lt_j))
            mi = tuple(a - b for a, b in zip(lcm, lt_i))
            mj = tuple(a - b for a, b in zip(lcm, lt_j))
            xi = Polynomial(I.ring, {mi: I.ring.field.one})
            xj = Polynomial(I.ring, {mj: I.ring.field.one})
            ci = basis[i].terms[lt_i]
            cj = basis[j].terms[lt_j]
            s = (xi * basis[i]).scale(cj) - (xj * basis[j]).scale(ci)
            if not check.normal_form(s, order, budget).is_zero():
                return False
    return True


def eliminate_block(I: IdealPresentation, drop_names: Iterable[str],
                    budget: Budget | None = None) -> IdealPresentation:
    """I ∩ k[remaining variables]; the closure of the coordinate projection."""
    drop = tuple(drop_names)
    if not drop:
        return I
    order = elimination_order(I.ring, drop)
    basis = I.groebner_basis(order, budget)
    drop_idx = [I.ring.index_of(n) for n in drop]
    small = I.ring.drop_variables(drop)
    kept = []
    for b in basis:
        if all(all(e[i] == 0 for i in drop_idx) for e in b.terms):
            kept.append(I.ring.transfer(b, small))
    return IdealPresentation(small, kept)


def _fresh_aux_name(ring: PolyRing, stem: str = "_z") -> str:
    i = 0
    while ring.has_variable(f"{stem}{i}"):
        i += 1
    return f"{stem}{i}"


def saturate(I: IdealPresentation, g: Polynomial, budget: Budget | None = None) -> IdealPresentation:
    """I : g^infinity via one elimination with the auxiliary 1 - z*g trick."""
    if g.is_zero():
        raise ValueError("cannot saturate by the zero polynomial")
    ring = I.ring
    z = _fresh_aux_name(ring)
    big = ring.extend_block(AUXILIARY, (z,), front=False)
    lifted = [ring.transfer(p, big) for p in I.generators]
    trick = big.one() - big.variable(z) * ring.transfer(g, big)
    J = IdealPresentation(big, lifted + [trick])
    elim = eliminate_block(J, (z,), budget)
    back = [elim.ring.transfer(p, ring) for p in elim.generators]
    return IdealPresentation(ring, back)


def radical_membership(p: Polynomial, I: IdealPresentation,
                       budget: Budget | None = None) -> bool:
    """True iff p vanishes on V(I): 1 in I + <1 - z*p>."""
    if p.is_zero():
        return True
    ring = I.ring
    z = _fresh_aux_name(ring)
    big = ring.extend_block(AUXILIARY, (z,), front=False)
    lifted = [ring.transfer(q, big) for q in I.generators]
    trick = big.one() - big.variable(z) * ring.transfer(p, big)
    J = IdealPresentation(big, lifted + [trick])
    return J.is_unit(budget)


def ideal_dimension(I: IdealPresentation, budget: Budget | None = None) -> int:
    """Krull dimension of ring/I from the leading-term ideal; -1 for the unit ideal."""
    basis = I.groebner_basis(budget=budget)
    n = I.ring.nvars
    if not basis:
        return n
    order = grevlex_order(I.ring)
    supports = []
    for b in basis:
        lt = max(b.terms, key=order.key)
        support = frozenset(i for i, e in enumerate(lt) if e)
        if not support:
            return -1
        supports.append(support)
    supports = set(supports)
    for size in range(n, -1, -1):
        for combo in combinations(range(n), size):
            u = set(combo)
            if all(not s <= u for s in supports):
                return size
    return 0


def projective_closure(I: IdealPresentation, kind: str, new_var: str,
                       budget: Budget | None = None) -> IdealPresentation:
    """Homogenize in the block after a degree-compatible Groebner run, then
    saturate by the new variable."""
    from . import polyring as pr

    ring = I.ring
    if not I.generators:
        big = ring.extend_block(kind, (new_var,), front=True)
        return IdealPresentation(big, [])
    order = block_degree_order(ring, kind)
    basis = I.groebner_basis(order, budget)
    homogenized = [pr.homogenize_block(b, kind, new_var) for b in basis]
    big = homogenized[0].ring
    J = IdealPresentation(big, homogenized)
    return saturate(J, big.variable(new_var), budget)


def ideal_sum(I: IdealPresentation, J: IdealPresentation) -> IdealPresentation:
    if I.ring != J.ring:
        raise RingMismatchError("ideal sum across different rings")
    return IdealPresentation(I.ring, I.generators + J.generators)


def ideal_product(I: IdealPresentation, J: IdealPresentation) -> IdealPresentation:
    """Pairwise generator products; same variety as the union of supports."""
    if I.ring != J.ring:
        raise RingMismatchError("ideal product across different rings")
    if not I.generators or not J.generators:
        return IdealPresentation(I.ring, [])
    return IdealPresentation(I.ring, [a * b for a in I.generators for b in J.generators])


def ideal_contains(I: IdealPresentation, J: IdealPresentation,
                   budget: Budget | None = None) -> bool:
    """True iff J ⊆ I, by reducing J's generators against I."""
    return all(I.contains(g, budget) for g in J.generators)


def ideal_equal(I: IdealPresentation, J: IdealPresentation,
                budget: Budget | None = None) -> bool:
    return ideal_contains(I, J, budget) and ideal_contains(J, I, budget)


def is_unit_ideal(I: IdealPresentation, budget: Budget | None = None) -> bool:
    return I.is_unit(budget)
