"""Exact multivariate polynomial arithmetic with named variable blocks.

Polynomials are sparse dictionaries mapping exponent tuples to nonzero
coefficients.  Coefficients are exact: Fraction in rational mode, ints in
[0, p) in prime-field mode.  Variables are grouped into semantic blocks
(simplex coordinates, ambient coordinates, fiber coordinates, homotopy
parameter, auxiliaries); block-aware operations (leading forms,
homogenization, graded pieces) key off these groups.

Everything here is immutable and safe to share between workers.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "SIMPLEX",
    "AMBIENT_AFFINE",
    "AMBIENT_PROJECTIVE",
    "FIBER",
    "HOMOTOPY",
    "AUXILIARY",
    "Rationals",
    "PrimeField",
    "VariableBlock",
    "PolyRing",
    "Polynomial",
    "SubstitutionMap",
    "PolyParseError",
    "RingMismatchError",
    "parse_poly",
    "leading_form",
    "homogenize_block",
    "dehomogenize_block",
    "apply_substitution",
]

# Block kinds.
SIMPLEX = "simplex"
AMBIENT_AFFINE = "ambient-affine"
AMBIENT_PROJECTIVE = "ambient-projective"
FIBER = "fiber"
HOMOTOPY = "homotopy"
AUXILIARY = "auxiliary"

_KINDS = (SIMPLEX, AMBIENT_AFFINE, AMBIENT_PROJECTIVE, FIBER, HOMOTOPY, AUXILIARY)


class PolyParseError(ValueError):
    """Raised on malformed polynomial text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class RingMismatchError(ValueError):
    """Raised when operands belong to different rings."""


# ---------------------------------------------------------------------------
# Coefficient fields


class Rationals:
    """Arbitrary-precision rational coefficients."""

    label = "rational"

    zero = Fraction(0)
    one = Fraction(1)

    def convert(self, value):
        return Fraction(value)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return Fraction(1) / a

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "Rationals()"


class PrimeField:
    """Integers modulo a prime, elements normalized to [0, p)."""

    def __init__(self, p: int):
        if p < 2:
            raise ValueError(f"prime must be >= 2, got {p}")
        self.p = p
        self.label = f"fp:{p}"
        self.zero = 0
        self.one = 1 % p

    def convert(self, value):
        if isinstance(value, Fraction):
            num = value.numerator % self.p
            den = value.denominator % self.p
            return num * pow(den, -1, self.p) % self.p
        return int(value) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


# ---------------------------------------------------------------------------
# Rings


class VariableBlock:
    """An ordered group of variable names sharing a semantic role."""

    __slots__ = ("kind", "names")

    def __init__(self, kind: str, names: Sequence[str]):
        if kind not in _KINDS:
            raise ValueError(f"unknown block kind {kind!r}")
        self.kind = kind
        self.names = tuple(names)

    def __eq__(self, other):
        return (
            isinstance(other, VariableBlock)
            and self.kind == other.kind
            and self.names == other.names
        )

    def __hash__(self):
        return hash((self.kind, self.names))

    def __repr__(self):
        return f"VariableBlock({self.kind!r}, {self.names!r})"


class PolyRing:
    """Descriptor of a polynomial ring: ordered variable blocks + coefficient field.

    The exponent layout of every Polynomial in the ring is one flat tuple
    following block declaration order.
    """

    def __init__(self, blocks: Sequence[VariableBlock], field=None):
        self.blocks = tuple(blocks)
        self.field = field if field is not None else Rationals()
        names: list[str] = []
        ranges: dict[str, tuple[int, int]] = {}
        pos = 0
        for block in self.blocks:
            if block.kind in ranges:
                raise ValueError(f"duplicate block kind {block.kind!r}")
            ranges[block.kind] = (pos, pos + len(block.names))
            names.extend(block.names)
            pos += len(block.names)
        self.var_names = tuple(names)
        if len(set(self.var_names)) != len(self.var_names):
            raise ValueError("variable names must be unique across blocks")
        self._index = {name: i for i, name in enumerate(self.var_names)}
        self._ranges = ranges
        self.nvars = len(self.var_names)
        self._zero_exp = (0,) * self.nvars

    # -- identity ----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.blocks == other.blocks
            and self.field == other.field
        )

    def __hash__(self):
        return hash((self.blocks, self.field))

    def __repr__(self):
        parts = " | ".join(",".join(b.names) for b in self.blocks)
        return f"PolyRing({parts}; {self.field.label})"

    # -- variable bookkeeping ----------------------------------------------

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no variable {name!r} in {self!r}") from None

    def has_variable(self, name: str) -> bool:
        return name in self._index

    def block(self, kind: str) -> VariableBlock:
        for b in self.blocks:
            if b.kind == kind:
                return b
        raise KeyError(f"no block of kind {kind!r} in {self!r}")

    def has_block(self, kind: str) -> bool:
        return kind in self._ranges

    def block_indices(self, kinds) -> tuple[int, ...]:
        """Indices of all variables in the given block kind(s)."""
        if isinstance(kinds, str):
            kinds = (kinds,)
        out: list[int] = []
        for kind in kinds:
            lo, hi = self._ranges[kind]
            out.extend(range(lo, hi))
        return tuple(sorted(out))

    # -- element constructors ------------------------------------------------

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, value) -> "Polynomial":
        c = self.field.convert(value)
        if c == self.field.zero:
            return self.zero()
        return Polynomial(self, {self._zero_exp: c})

    def variable(self, name: str) -> "Polynomial":
        i = self.index_of(name)
        exp = list(self._zero_exp)
        exp[i] = 1
        return Polynomial(self, {tuple(exp): self.field.one})

    def variables(self, kind: str | None = None) -> tuple["Polynomial", ...]:
        names = self.var_names if kind is None else self.block(kind).names
        return tuple(self.variable(n) for n in names)

    def parse(self, text: str, bindings: Mapping[str, "Polynomial"] | None = None) -> "Polynomial":
        return parse_poly(text, self, bindings)

    # -- ring surgery --------------------------------------------------------

    def with_field(self, field) -> "PolyRing":
        return PolyRing(self.blocks, field)

    def extend_block(self, kind: str, new_names: Sequence[str], front: bool = True) -> "PolyRing":
        """Ring with extra variables added to a block (created if absent)."""
        new_names = tuple(new_names)
        blocks = []
        done = False
        for b in self.blocks:
            if b.kind == kind:
                names = new_names + b.names if front else b.names + new_names
                blocks.append(VariableBlock(kind, names))
                done = True
            else:
                blocks.append(b)
        if not done:
            blocks.append(VariableBlock(kind, new_names))
        return PolyRing(blocks, self.field)

    def drop_variables(self, names: Iterable[str]) -> "PolyRing":
        gone = set(names)
        blocks = []
        for b in self.blocks:
            kept = tuple(n for n in b.names if n not in gone)
            if kept:
                blocks.append(VariableBlock(b.kind, kept))
        return PolyRing(blocks, self.field)

    def transfer(self, p: "Polynomial", target: "PolyRing") -> "Polynomial":
        """Re-express p in a ring containing the same variable names.

        Works by name lookup, so it covers inclusions, reorderings and
        deletions of variables that p does not use.
        """
        if p.ring is target:
            return p
        source = p.ring
        positions = [target._index.get(n) for n in source.var_names]
        terms: dict[tuple[int, ...], object] = {}
        for exp, coeff in p.terms.items():
            new_exp = [0] * target.nvars
            for i, e in enumerate(exp):
                if e == 0:
                    continue
                j = positions[i]
                if j is None:
                    raise RingMismatchError(
                        f"variable {source.var_names[i]!r} does not exist in target ring"
                    )
                new_exp[j] = e
            key = tuple(new_exp)
            c = target.field.convert(coeff)
            if key in terms:
                c = target.field.add(terms[key], c)
            if c == target.field.zero:
                terms.pop(key, None)
            else:
                terms[key] = c
        return Polynomial(target, terms)


# ---------------------------------------------------------------------------
# Polynomials


def _grevlex_key(exp: tuple[int, ...]):
    return (sum(exp), tuple(-e for e in reversed(exp)))


class Polynomial:
    """Immutable sparse polynomial over a PolyRing.

    terms: exponent tuple -> nonzero coefficient.  Constructors are expected
    to strip zeros; arithmetic below maintains the invariant.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- basics --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise RingMismatchError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")

    def _coerce(self, value) -> "Polynomial":
        if isinstance(value, Polynomial):
            self._check(value)
            return value
        return self.ring.const(value)

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        field = self.ring.field
        out = dict(self.terms)
        for exp, coeff in other.terms.items():
            c = field.add(out.get(exp, field.zero), coeff)
            if c == field.zero:
                out.pop(exp, None)
            else:
                out[exp] = c
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        field = self.ring.field
        return Polynomial(self.ring, {e: field.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = self._coerce(other)
        field = self.ring.field
        out: dict[tuple[int, ...], object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                c = field.add(out.get(exp, field.zero), field.mul(c1, c2))
                if c == field.zero:
                    out.pop(exp, None)
                else:
                    out[exp] = c
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative polynomial power")
        result = self.ring.one()
        base = self
        k = exponent
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def scale(self, value) -> "Polynomial":
        field = self.ring.field
        c0 = field.convert(value)
        if c0 == field.zero:
            return self.ring.zero()
        return Polynomial(self.ring, {e: field.mul(c, c0) for e, c in self.terms.items()})

    # -- degrees and block structure ------------------------------------------

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, indices: Sequence[int]) -> int:
        """Max total degree in the given variable positions; -1 if zero."""
        if not self.terms:
            return -1
        return max(sum(e[i] for i in indices) for e in self.terms)

    def degree_in_block(self, kinds) -> int:
        return self.degree_in(self.ring.block_indices(kinds))

    def is_homogeneous_in(self, indices: Sequence[int]) -> bool:
        degrees = {sum(e[i] for i in indices) for e in self.terms}
        return len(degrees) <= 1

    def coefficients_by(self, indices: Sequence[int]) -> dict[tuple[int, ...], "Polynomial"]:
        """Split into coefficient polynomials keyed by the exponent pattern
        on the given variables; coefficients live in the same ring with those
        variables absent from their terms."""
        index_set = tuple(indices)
        buckets: dict[tuple[int, ...], dict] = {}
        for exp, coeff in self.terms.items():
            key = tuple(exp[i] for i in index_set)
            rest = list(exp)
            for i in index_set:
                rest[i] = 0
            buckets.setdefault(key, {})[tuple(rest)] = coeff
        return {k: Polynomial(self.ring, t) for k, t in buckets.items()}

    def evaluate(self, assignment: Mapping[str, object]) -> "Polynomial":
        """Substitute field constants for the named variables."""
        ring = self.ring
        field = ring.field
        values = {ring.index_of(n): field.convert(v) for n, v in assignment.items()}
        out: dict[tuple[int, ...], object] = {}
        for exp, coeff in self.terms.items():
            c = coeff
            new_exp = list(exp)
            for i, v in values.items():
                if exp[i]:
                    if v == field.zero:
                        c = field.zero
                        break
                    for _ in range(exp[i]):
                        c = field.mul(c, v)
                    new_exp[i] = 0
            if c == field.zero:
                continue
            key = tuple(new_exp)
            c = field.add(out.get(key, field.zero), c)
            if c == field.zero:
                out.pop(key, None)
            else:
                out[key] = c
        return Polynomial(self.ring, out)

    # -- printing ---------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        """Terms in canonical storage order: grevlex descending."""
        return sorted(self.terms.items(), key=lambda kv: _grevlex_key(kv[0]), reverse=True)

    def __str__(self) -> str:
        return to_string(self)

    def __repr__(self) -> str:
        return f"<poly {to_string(self)}>"


def _coeff_str(coeff) -> tuple[bool, str]:
    """(is_negative, magnitude string) for printing; Fractions print as a/b."""
    if isinstance(coeff, Fraction):
        neg = coeff < 0
        mag = -coeff if neg else coeff
        if mag.denominator == 1:
            return neg, str(mag.numerator)
        return neg, f"{mag.numerator}/{mag.denominator}"
    return False, str(coeff)


def to_string(p: Polynomial) -> str:
    """Canonical rendering: grevlex-descending terms, declaration-order variables."""
    if not p.terms:
        return "0"
    names = p.ring.var_names
    chunks: list[str] = []
    for exp, coeff in p.sorted_terms():
        neg, mag = _coeff_str(coeff)
        factors = []
        for i, e in enumerate(exp):
            if e == 1:
                factors.append(names[i])
            elif e > 1:
                factors.append(f"{names[i]}^{e}")
        if not factors:
            body = mag
        elif mag == "1":
            body = "*".join(factors)
        else:
            body = "*".join([mag] + factors)
        if not chunks:
            chunks.append(f"-{body}" if neg else body)
        else:
            chunks.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(chunks)


# ---------------------------------------------------------------------------
# Parser
#
# Grammar:  expr   := term (('+'|'-') term)*
#           term   := factor ('*' factor)*
#           factor := base ('^' natural)?
#           base   := integer | ident | '(' expr ')'
# Extension beyond the file-format grammar: integer '/' natural is accepted
# as a rational literal so that printed rational coefficients round-trip.


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos >= len(self.text):
            return None, self.pos
        ch = self.text[self.pos]
        if ch.isdigit():
            j = self.pos
            while j < len(self.text) and self.text[j].isdigit():
                j += 1
            return self.text[self.pos:j], self.pos
        if ch.isalpha() or ch == "_":
            j = self.pos
            while j < len(self.text) and (self.text[j].isalnum() or self.text[j] == "_"):
                j += 1
            return self.text[self.pos:j], self.pos
        return ch, self.pos

    def next(self):
        tok, pos = self.peek()
        if tok is not None:
            self.pos = pos + len(tok)
        return tok, pos


class _Parser:
    def __init__(self, text: str, ring: PolyRing, bindings):
        self.tk = _Tokenizer(text)
        self.ring = ring
        self.bindings = bindings or {}

    def parse(self) -> Polynomial:
        p = self.expr()
        tok, pos = self.tk.peek()
        if tok is not None:
            raise PolyParseError(f"unexpected {tok!r}", pos)
        return p

    def expr(self) -> Polynomial:
        tok, _ = self.tk.peek()
        negate = False
        if tok == "-":
            self.tk.next()
            negate = True
        elif tok == "+":
            self.tk.next()
        p = self.term()
        if negate:
            p = -p
        while True:
            tok, _ = self.tk.peek()
            if tok == "+":
                self.tk.next()
                p = p + self.term()
            elif tok == "-":
                self.tk.next()
                p = p - self.term()
            else:
                return p

    def term(self) -> Polynomial:
        p = self.factor()
        while True:
            tok, _ = self.tk.peek()
            if tok == "*":
                self.tk.next()
                p = p * self.factor()
            else:
                return p

    def factor(self) -> Polynomial:
        p = self.base()
        tok, _ = self.tk.peek()
        if tok == "^":
            self.tk.next()
            tok, pos = self.tk.next()
            if tok is None or not tok.isdigit():
                raise PolyParseError("expected natural number after '^'", pos)
            p = p ** int(tok)
        return p

    def base(self) -> Polynomial:
        tok, pos = self.tk.next()
        if tok is None:
            raise PolyParseError("unexpected end of input", pos)
        if tok == "(":
            p = self.expr()
            tok2, pos2 = self.tk.next()
            if tok2 != ")":
                raise PolyParseError("expected ')'", pos2)
            return p
        if tok.isdigit():
            nxt, _ = self.tk.peek()
            if nxt == "/":
                self.tk.next()
                den, dpos = self.tk.next()
                if den is None or not den.isdigit() or int(den) == 0:
                    raise PolyParseError("expected nonzero natural after '/'", dpos)
                return self.ring.const(Fraction(int(tok), int(den)))
            return self.ring.const(int(tok))
        if tok[0].isalpha() or tok[0] == "_":
            if self.ring.has_variable(tok):
                return self.ring.variable(tok)
            if tok in self.bindings:
                bound = self.bindings[tok]
                if bound.ring != self.ring:
                    return bound.ring.transfer(bound, self.ring)
                return bound
            raise PolyParseError(f"undeclared variable {tok!r}", pos)
        raise PolyParseError(f"unexpected {tok!r}", pos)


def parse_poly(text: str, ring: PolyRing, bindings: Mapping[str, Polynomial] | None = None) -> Polynomial:
    """Parse an expression into canonical expanded form.

    Identifiers must be declared ring variables or names supplied via
    bindings (used by problem files for named polynomial definitions).
    """
    return _Parser(text, ring, bindings).parse()


# ---------------------------------------------------------------------------
# Block operations


def leading_form(p: Polynomial, kinds) -> Polynomial:
    """Homogeneous component of maximal total degree in the selected block(s).

    All other variables ride along as coefficients.  A composite selector
    like (SIMPLEX, AMBIENT_AFFINE) grades by the union of the blocks.
    """
    if p.is_zero():
        raise ValueError("leading form of the zero polynomial is undefined")
    indices = p.ring.block_indices(kinds)
    top = max(sum(e[i] for i in indices) for e in p.terms)
    kept = {e: c for e, c in p.terms.items() if sum(e[i] for i in indices) == top}
    return Polynomial(p.ring, kept)


def homogenize_block(p: Polynomial, kind: str, new_var: str) -> Polynomial:
    """Homogenize in the block: each term is padded by new_var to the block's
    max degree.  The result lives in the ring extended by new_var at the
    front of the block."""
    target = p.ring.extend_block(kind, (new_var,), front=True)
    if p.is_zero():
        return target.zero()
    lifted = p.ring.transfer(p, target)
    indices = target.block_indices(kind)
    new_idx = target.index_of(new_var)
    top = max(sum(e[i] for i in indices) for e in lifted.terms)
    out = {}
    for exp, coeff in lifted.terms.items():
        deg = sum(exp[i] for i in indices)
        e = list(exp)
        e[new_idx] = top - deg
        out[tuple(e)] = coeff
    return Polynomial(target, out)


def dehomogenize_block(p: Polynomial, kind: str, var: str) -> Polynomial:
    """Set var = 1 and remove it from the ring.

    Requires p homogeneous in the block containing var, so that
    dehomogenize . homogenize is the identity.
    """
    ring = p.ring
    indices = ring.block_indices(kind)
    if not p.is_homogeneous_in(indices):
        raise ValueError(f"polynomial is not homogeneous in block {kind!r}")
    var_idx = ring.index_of(var)
    target = ring.drop_variables((var,))
    stripped = {}
    field = ring.field
    for exp, coeff in p.terms.items():
        e = list(exp)
        e[var_idx] = 0
        key = tuple(e)
        c = field.add(stripped.get(key, field.zero), coeff)
        if c == field.zero:
            stripped.pop(key, None)
        else:
            stripped[key] = c
    return ring.transfer(Polynomial(ring, stripped), target)


def homogenize_dispatch(p: Polynomial, kind: str, new_var: str, direction: str) -> Polynomial:
    """Single entry point matching the two-directional contract."""
    if direction == "homogenize":
        return homogenize_block(p, kind, new_var)
    if direction == "dehomogenize":
        return dehomogenize_block(p, kind, new_var)
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# Substitution homomorphisms


class SubstitutionMap:
    """Ring homomorphism source -> target given by one image per source variable."""

    __slots__ = ("source", "target", "images")

    def __init__(self, source: PolyRing, target: PolyRing, images: Sequence[Polynomial]):
        if len(images) != source.nvars:
            raise ValueError(
                f"expected {source.nvars} images, got {len(images)}"
            )
        for img in images:
            if img.ring != target:
                raise RingMismatchError("substitution image outside target ring")
        self.source = source
        self.target = target
        self.images = tuple(images)

    @classmethod
    def identity(cls, ring: PolyRing) -> "SubstitutionMap":
        return cls(ring, ring, [ring.variable(n) for n in ring.var_names])

    @classmethod
    def from_dict(cls, source: PolyRing, target: PolyRing, mapping: Mapping[str, Polynomial]) -> "SubstitutionMap":
        """Images default to the same-named target variable when unmapped."""
        images = []
        for name in source.var_names:
            if name in mapping:
                images.append(mapping[name])
            else:
                images.append(target.variable(name))
        return cls(source, target, images)

    def image_of(self, name: str) -> Polynomial:
        return self.images[self.source.index_of(name)]

    def __call__(self, p: Polynomial) -> Polynomial:
        return apply_substitution(self, p)

    def after(self, other: "SubstitutionMap") -> "SubstitutionMap":
        """Composite map p -> self(other(p)); other.target must be self.source."""
        if other.target != self.source:
            raise RingMismatchError("composition rings do not line up")
        return SubstitutionMap(other.source, self.target, [self(img) for img in other.images])

    def __eq__(self, other):
        return (
            isinstance(other, SubstitutionMap)
            and self.source == other.source
            and self.target == other.target
            and self.images == other.images
        )

    def __repr__(self):
        pairs = ", ".join(
            f"{n} -> {img}" for n, img in zip(self.source.var_names, self.images)
        )
        return f"SubstitutionMap({pairs})"


def apply_substitution(s: SubstitutionMap, p: Polynomial) -> Polynomial:
    """Ring-homomorphic image of p under s; powers of images are cached."""
    if p.ring != s.source:
        raise RingMismatchError("polynomial does not live in the source ring")
    target = s.target
    field = target.field
    power_cache: list[dict[int, Polynomial]] = [
        {0: target.one(), 1: img} for img in s.images
    ]

    def power(i: int, e: int) -> Polynomial:
        cache = power_cache[i]
        if e not in cache:
            half = power(i, e // 2)
            res = half * half
            if e % 2:
                res = res * cache[1]
            cache[e] = res
        return cache[e]

    total = target.zero()
    for exp, coeff in p.terms.items():
        piece = target.const(field.convert(coeff))
        for i, e in enumerate(exp):
            if e:
                piece = piece * power(i, e)
        total = total + piece
    return total
