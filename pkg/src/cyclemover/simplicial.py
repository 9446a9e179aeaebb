"""Ambient cosimplicial geometry: algebraic simplices times an ambient space
times an affine fiber.

A context bundles the coordinate ring of simplex-degree n with ambient
dimension d (affine y-coordinates or projective Y-coordinates) and fiber
dimension q, together with the simplex relation t0 + ... + tn = 1.  The
relation is kept as an explicit adjoined generator everywhere; no variable
is eliminated, so face maps and the symmetric moving formulas stay literal
and dimension counts simply account for one linear relation.

Face maps follow the retained-vertex convention; report printers also show
the complementary vanishing-coordinate description.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .idealkit import Budget, IdealPresentation, projective_closure
from .polyring import (
    AMBIENT_AFFINE,
    AMBIENT_PROJECTIVE,
    FIBER,
    HOMOTOPY,
    SIMPLEX,
    Polynomial,
    PolyRing,
    Rationals,
    SubstitutionMap,
    VariableBlock,
)

__all__ = [
    "SimplicialContext",
    "make_context",
    "FaceSelector",
    "all_faces",
    "face_restrict",
    "simplicial_pullback",
    "chart_restrict",
    "ambient_closure",
    "HOMOTOPY_VAR",
]

HOMOTOPY_VAR = "u"


class FaceSelector:
    """A strictly increasing [m] -> [n], stored as the retained vertex tuple."""

    __slots__ = ("vertices", "n")

    def __init__(self, vertices: Iterable[int], n: int):
        verts = tuple(sorted(set(vertices)))
        if not verts:
            raise ValueError("face selector must retain at least one vertex")
        if verts[0] < 0 or verts[-1] > n:
            raise ValueError(f"vertices {verts} out of range for degree {n}")
        self.vertices = verts
        self.n = n

    @property
    def m(self) -> int:
        return len(self.vertices) - 1

    def dropped(self) -> tuple[int, ...]:
        kept = set(self.vertices)
        return tuple(i for i in range(self.n + 1) if i not in kept)

    def is_full(self) -> bool:
        return len(self.vertices) == self.n + 1

    def describe(self) -> str:
        """Retained-vertex description plus the vanishing-coordinate reading."""
        dropped = self.dropped()
        tail = "" if not dropped else " (" + " = ".join(f"t{i}" for i in dropped) + " = 0)"
        return "{" + ",".join(str(v) for v in self.vertices) + "}" + tail

    def __eq__(self, other):
        return (
            isinstance(other, FaceSelector)
            and self.vertices == other.vertices
            and self.n == other.n
        )

    def __hash__(self):
        return hash((self.vertices, self.n))

    def __repr__(self):
        return f"FaceSelector({self.vertices}, n={self.n})"


class SimplicialContext:
    """The coordinate ring of Delta^n x X x A^q with its simplex relation."""

    def __init__(self, n: int, d: int, q: int, ambient_kind: str,
                 field=None, homotopy: bool = False):
        if min(n, d, q) < 0:
            raise ValueError("n, d, q must be nonnegative")
        if ambient_kind not in ("affine", "projective"):
            raise ValueError(f"ambient_kind must be affine or projective, got {ambient_kind!r}")
        self.n = n
        self.d = d
        self.q = q
        self.ambient_kind = ambient_kind
        self.homotopy = homotopy
        field = field if field is not None else Rationals()

        blocks = [VariableBlock(SIMPLEX, tuple(f"t{i}" for i in range(n + 1)))]
        if homotopy:
            blocks.append(VariableBlock(HOMOTOPY, (HOMOTOPY_VAR,)))
        if ambient_kind == "projective":
            blocks.append(VariableBlock(AMBIENT_PROJECTIVE, tuple(f"Y{k}" for k in range(d + 1))))
        elif d > 0:
            blocks.append(VariableBlock(AMBIENT_AFFINE, tuple(f"y{k}" for k in range(1, d + 1))))
        if q > 0:
            blocks.append(VariableBlock(FIBER, tuple(f"x{k}" for k in range(1, q + 1))))
        self.ring = PolyRing(blocks, field)

        rel = self.ring.const(-1)
        for i in range(n + 1):
            rel = rel + self.ring.variable(f"t{i}")
        self.relation = rel

    # -- dimensions -----------------------------------------------------------

    @property
    def ambient_dim(self) -> int:
        """Dimension of Delta^n x X x A^q (plus the homotopy line if present)."""
        return self.n + self.d + self.q + (1 if self.homotopy else 0)

    @property
    def base_dim(self) -> int:
        """Dimension of the base Delta^n x X (plus homotopy line)."""
        return self.n + self.d + (1 if self.homotopy else 0)

    @property
    def cone_dim(self) -> int:
        """Dimension of V(relation) in the full affine coordinate space; for a
        projective ambient this is the dimension of the Y-cone."""
        extra = 1 if self.ambient_kind == "projective" else 0
        return self.ambient_dim + extra

    @property
    def ambient_block_kind(self) -> str:
        return AMBIENT_PROJECTIVE if self.ambient_kind == "projective" else AMBIENT_AFFINE

    def base_kinds(self) -> tuple[str, ...]:
        kinds = [SIMPLEX]
        if self.homotopy:
            kinds.append(HOMOTOPY)
        if self.ring.has_block(self.ambient_block_kind):
            kinds.append(self.ambient_block_kind)
        return tuple(kinds)

    # -- derived contexts -------------------------------------------------------

    def twin(self, n: int | None = None, d: int | None = None, q: int | None = None,
             ambient_kind: str | None = None, homotopy: bool | None = None) -> "SimplicialContext":
        return SimplicialContext(
            self.n if n is None else n,
            self.d if d is None else d,
            self.q if q is None else q,
            self.ambient_kind if ambient_kind is None else ambient_kind,
            self.ring.field,
            self.homotopy if homotopy is None else homotopy,
        )

    def with_homotopy(self) -> "SimplicialContext":
        return self.twin(homotopy=True)

    def without_homotopy(self) -> "SimplicialContext":
        return self.twin(homotopy=False)

    def base_ring(self) -> PolyRing:
        """Ring of the base Delta^n x X (fiber variables removed)."""
        if self.q == 0:
            return self.ring
        return self.ring.drop_variables(self.ring.block(FIBER).names)

    # -- maps ----------------------------------------------------------------------

    def lift_from(self, other: "SimplicialContext") -> SubstitutionMap:
        """Inclusion of rings for a context with fewer blocks (e.g. no homotopy)."""
        return SubstitutionMap.from_dict(other.ring, self.ring, {})

    def adjoin_relation(self, generators: Sequence[Polynomial]) -> IdealPresentation:
        gens = list(generators)
        if not any(g == self.relation for g in gens):
            gens.append(self.relation)
        return IdealPresentation(self.ring, gens)

    def face_map(self, sel: FaceSelector) -> SubstitutionMap:
        """Pullback along the face inclusion: retained t-variables are renamed
        in order, dropped ones are sent to 0; all other variables are fixed."""
        if sel.n != self.n:
            raise ValueError(f"selector for degree {sel.n} applied in degree {self.n}")
        target = self.twin(n=sel.m)
        mapping: dict[str, Polynomial] = {}
        for pos, v in enumerate(sel.vertices):
            mapping[f"t{v}"] = target.ring.variable(f"t{pos}")
        for v in sel.dropped():
            mapping[f"t{v}"] = target.ring.zero()
        return SubstitutionMap.from_dict(self.ring, target.ring, mapping)

    def monotone_pullback(self, theta: Sequence[int]) -> SubstitutionMap:
        """Pullback along the linear map Delta^m -> Delta^n induced on vertices
        by a monotone theta: [m] -> [n]; t_j pulls back to the sum of the
        t-coordinates in its preimage."""
        m = len(theta) - 1
        if m < 0:
            raise ValueError("theta must be nonempty")
        if any(theta[i] > theta[i + 1] for i in range(m)):
            raise ValueError(f"theta {tuple(theta)} is not monotone")
        if theta[0] < 0 or theta[-1] > self.n:
            raise ValueError(f"theta {tuple(theta)} out of range for degree {self.n}")
        target = self.twin(n=m)
        mapping: dict[str, Polynomial] = {}
        for j in range(self.n + 1):
            image = target.ring.zero()
            for i, tj in enumerate(theta):
                if tj == j:
                    image = image + target.ring.variable(f"t{i}")
            mapping[f"t{j}"] = image
        return SubstitutionMap.from_dict(self.ring, target.ring, mapping)

    def __repr__(self):
        h = " x A^1_u" if self.homotopy else ""
        amb = f"P^{self.d}" if self.ambient_kind == "projective" else f"A^{self.d}"
        return f"SimplicialContext(Delta^{self.n}{h} x {amb} x A^{self.q}; {self.ring.field.label})"


def make_context(n: int, d: int, q: int, ambient_kind: str,
                 field=None, homotopy: bool = False) -> SimplicialContext:
    return SimplicialContext(n, d, q, ambient_kind, field, homotopy)


def all_faces(n: int) -> list[FaceSelector]:
    """Every face selector of Delta^n, full face first, deterministic order."""
    out: list[FaceSelector] = []
    for mask in range(1, 1 << (n + 1)):
        verts = tuple(i for i in range(n + 1) if mask & (1 << i))
        out.append(FaceSelector(verts, n))
    out.sort(key=lambda s: (-len(s.vertices), s.vertices))
    return out


def face_restrict(context: SimplicialContext, ideal: IdealPresentation,
                  sel: FaceSelector) -> tuple[SimplicialContext, IdealPresentation]:
    """Restriction of a closed subscheme to a face, with t-variables renamed
    to the face context; the simplex relation maps to the lower relation."""
    fmap = context.face_map(sel)
    target = context.twin(n=sel.m)
    gens = [fmap(g) for g in ideal.generators]
    return target, target.adjoin_relation(gens)


def simplicial_pullback(context: SimplicialContext, ideal: IdealPresentation,
                        theta: Sequence[int], direction: str) -> tuple[SimplicialContext, IdealPresentation]:
    """Structure-map pullback of a support along a monotone theta: [m] -> [n].

    direction='coface' requires theta strictly increasing (face restriction);
    direction='codegeneracy' requires theta surjective (degree-raising
    substitution t_i -> t_i + t_{i+1} and friends).
    """
    theta = tuple(theta)
    if direction == "coface":
        if any(theta[i] >= theta[i + 1] for i in range(len(theta) - 1)):
            raise ValueError(f"coface requires strictly increasing theta, got {theta}")
    elif direction == "codegeneracy":
        if set(theta) != set(range(context.n + 1)):
            raise ValueError(f"codegeneracy requires surjective theta, got {theta}")
    else:
        raise ValueError(f"unknown direction {direction!r}")
    pb = context.monotone_pullback(theta)
    target = context.twin(n=len(theta) - 1)
    gens = [pb(g) for g in ideal.generators]
    return target, target.adjoin_relation(gens)


def chart_restrict(context: SimplicialContext, ideal: IdealPresentation,
                   chart_index: int) -> tuple[SimplicialContext, IdealPresentation]:
    """Standard affine chart Y_k = 1 of a projective context; the remaining
    Y-coordinates become the affine y-coordinates in order."""
    if context.ambient_kind != "projective":
        raise ValueError("chart restriction needs a projective context")
    if not 0 <= chart_index <= context.d:
        raise ValueError(f"chart index {chart_index} out of range")
    y_idx = context.ring.block_indices(AMBIENT_PROJECTIVE)
    for g in ideal.generators:
        if not g.is_homogeneous_in(y_idx):
            raise ValueError(f"generator {g} is not homogeneous in the projective block")
    target = context.twin(ambient_kind="affine")
    mapping: dict[str, Polynomial] = {f"Y{chart_index}": target.ring.one()}
    pos = 1
    for k in range(context.d + 1):
        if k == chart_index:
            continue
        mapping[f"Y{k}"] = target.ring.variable(f"y{pos}")
        pos += 1
    sub = SubstitutionMap.from_dict(context.ring, target.ring, mapping)
    gens = [sub(g) for g in ideal.generators]
    return target, target.adjoin_relation(gens)


def ambient_closure(context: SimplicialContext, ideal: IdealPresentation,
                    budget: Budget | None = None) -> tuple[SimplicialContext, IdealPresentation]:
    """Projective closure of an affine-ambient support: Y-homogenize via chart 0.

    Inverse (up to saturation by the chart variable) of chart_restrict at 0.
    """
    if context.ambient_kind != "affine" or context.d == 0:
        raise ValueError("ambient closure needs an affine context of positive dimension")
    closed = projective_closure(ideal, AMBIENT_AFFINE, "Y0", budget)
    target = context.twin(ambient_kind="projective")
    mapping: dict[str, Polynomial] = {"Y0": target.ring.variable("Y0")}
    for k in range(1, context.d + 1):
        mapping[f"y{k}"] = target.ring.variable(f"Y{k}")
    sub = SubstitutionMap.from_dict(closed.ring, target.ring, mapping)
    gens = [sub(g) for g in closed.generators]
    return target, target.adjoin_relation(gens)
