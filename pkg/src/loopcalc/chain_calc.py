"""Exact symbolic chains on a based loop space.

A chain is a finite rational combination of *words*; a word is an ordered
tuple of atoms multiplied with the Pontryagin (concatenation) product.  An
atom is a building block -- a :class:`Generator`, a homology
:class:`Witness`, a named :class:`Block`, or a sub-expression -- optionally
pushed forward by the loop power map ``{k}``.

Every chain carries geometric bookkeeping: curfew (additive under products),
and upper bounds for suplength and volume computed by :func:`cost_bounds`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "Generator",
    "Witness",
    "Block",
    "Atom",
    "FormalChain",
    "CostBound",
    "ChainError",
    "atom_chain",
    "zero",
    "product",
    "bracket",
    "boundary",
    "loop_power",
    "scalar",
    "add",
    "sub",
    "linear_combination",
    "cost_bounds",
    "lipschitz_bound",
    "is_cycle",
    "BULLET",
]


class ChainError(ValueError):
    """Raised for ill-formed chain constructions."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class CostBound:
    suplength: Fraction
    volume: Fraction


@dataclass(frozen=True, eq=False)
class Generator:
    """A named building-block chain with fixed cost data.

    Identity is the ``id``; two generators with equal ids are the same chain.
    """

    id: str
    degree: int
    curfew: Fraction = Fraction(1)
    suplength: Fraction = Fraction(1)
    volume: Fraction = Fraction(1)
    boundary: "FormalChain | None" = None
    skeleton: int = 0
    spherical: bool = False

    def __post_init__(self):
        for name in ("curfew", "suplength", "volume"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.degree < 0:
            raise ChainError(f"{self.id}: negative degree")
        if self.curfew <= 0:
            raise ChainError(f"{self.id}: curfew must be positive")
        if self.suplength < 0 or self.volume < 0:
            raise ChainError(f"{self.id}: negative cost")
        b = self.boundary
        if b is None:
            object.__setattr__(self, "boundary", zero())
        elif not b.is_zero():
            if b.degree != self.degree - 1:
                raise ChainError(f"{self.id}: boundary has degree {b.degree}")
            if b.curfew != self.curfew:
                raise ChainError(f"{self.id}: boundary curfew {b.curfew} != {self.curfew}")
            if not boundary(b).is_zero():
                raise ChainError(f"{self.id}: boundary is not a cycle")

    @property
    def lipschitz(self) -> Fraction:
        return self.suplength

    def __eq__(self, other):
        return isinstance(other, Generator) and other.id == self.id

    def __hash__(self):
        return hash(("G", self.id))

    def __repr__(self):
        return self.id


@dataclass(frozen=True)
class Witness:
    """An opaque chain known only through its boundary and cost bounds.

    ``pieces`` optionally records named sub-bounds (volume of each part of
    the construction); ``provenance`` records how the witness was produced.
    """

    id: str
    dimension: int
    boundary: "FormalChain"
    curfew: Fraction
    suplength: Fraction
    volume: Fraction
    skeleton: int
    lipschitz: Fraction = Fraction(0)
    provenance: tuple = ()
    pieces: tuple = ()

    def __post_init__(self):
        for name in ("curfew", "suplength", "volume", "lipschitz"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        b = self.boundary
        if not b.is_zero():
            if b.degree + 1 != self.dimension:
                raise ChainError(f"{self.id}: dimension != degree(boundary) + 1")
            if b.curfew != self.curfew:
                raise ChainError(f"{self.id}: boundary curfew mismatch")
            if not boundary(b).is_zero():
                raise ChainError(f"{self.id}: boundary is not a cycle")

    @property
    def degree(self) -> int:
        return self.dimension

    def __repr__(self):
        return self.id


@dataclass(frozen=True)
class Block:
    """A named sub-chain whose cost is a recorded (coarser) upper bound.

    Boundary and pairings see through to ``body``; cost bounds use the
    recorded values, which must dominate the body's own recursion.
    """

    id: str
    body: "FormalChain"
    suplength: Fraction
    volume: Fraction

    def __post_init__(self):
        object.__setattr__(self, "suplength", _frac(self.suplength))
        object.__setattr__(self, "volume", _frac(self.volume))
        if self.body.is_zero():
            raise ChainError(f"{self.id}: empty block")
        own = cost_bounds(self.body)
        if own.suplength > self.suplength or own.volume > self.volume:
            raise ChainError(f"{self.id}: recorded bound below body bound {own}")

    @property
    def degree(self) -> int:
        return self.body.degree

    @property
    def curfew(self) -> Fraction:
        return self.body.curfew

    @property
    def skeleton(self) -> int:
        return self.body.skeleton

    @property
    def lipschitz(self) -> Fraction:
        return lipschitz_bound(self.body)

    def __repr__(self):
        return self.id


@dataclass(frozen=True)
class Atom:
    """``{scale}_* base``; the base is a Generator, Witness, Block, or a
    one-word FormalChain (sub-expression)."""

    base: object
    scale: int = 1

    def __post_init__(self):
        if not isinstance(self.scale, int) or self.scale < 1:
            raise ChainError("scale must be a positive integer")

    @property
    def degree(self) -> int:
        return self.base.degree

    @property
    def curfew(self) -> Fraction:
        return self.scale * self.base.curfew

    @property
    def skeleton(self) -> int:
        return self.base.skeleton

    def __repr__(self):
        b = repr(self.base)
        if isinstance(self.base, FormalChain):
            b = f"({b})"
        return b if self.scale == 1 else f"{{{self.scale}}}{b}"


Word = tuple  # tuple[Atom, ...]


class FormalChain:
    """Exact rational linear combination of words.

    Terms are normalized on construction: zero coefficients are dropped and
    all words must share one degree and one curfew.
    """

    __slots__ = ("terms", "degree", "curfew", "_hash")

    def __init__(self, terms: Mapping[Word, Fraction] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for word, coeff in items:
            word = tuple(word)
            acc[word] = acc.get(word, 0) + _frac(coeff)
        self.terms = {w: c for w, c in acc.items() if c != 0}
        self.degree = None
        self.curfew = None
        for w in self.terms:
            deg = sum(a.degree for a in w)
            cf = sum((a.curfew for a in w), Fraction(0))
            if self.degree is None:
                self.degree, self.curfew = deg, cf
            elif deg != self.degree:
                raise ChainError(f"mixed degrees {self.degree} and {deg}")
            elif cf != self.curfew:
                raise ChainError(f"mixed curfews {self.curfew} and {cf}")
        self._hash = None

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def skeleton(self) -> int:
        return max((a.skeleton for w in self.terms for a in w), default=0)

    def __eq__(self, other):
        return isinstance(other, FormalChain) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return scalar(-1, self)

    def __mul__(self, other):
        if isinstance(other, FormalChain):
            return product(self, other)
        return scalar(other, self)

    def __rmul__(self, other):
        return scalar(other, self)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda t: repr(t[0])):
            word = "*".join(repr(a) for a in w) or "1"
            parts.append(word if c == 1 else f"{c}*{word}")
        return " + ".join(parts)

    # sub-expression interface (used when a word is wrapped in a scale atom)
    @property
    def suplength(self) -> Fraction:
        return cost_bounds(self).suplength

    @property
    def volume(self) -> Fraction:
        return cost_bounds(self).volume

    @property
    def lipschitz(self) -> Fraction:
        return lipschitz_bound(self)


def zero() -> FormalChain:
    return FormalChain()


def atom_chain(base, scale: int = 1, coeff=1) -> FormalChain:
    """The chain ``coeff * {scale}_* base``."""
    if isinstance(base, FormalChain):
        return scalar(coeff, loop_power(scale, base))
    return FormalChain({(Atom(base, scale),): coeff})


BULLET = Generator("•", 0, curfew=1, suplength=0, volume=1)


def add(c1: FormalChain, c2: FormalChain) -> FormalChain:
    return FormalChain(list(c1.terms.items()) + list(c2.terms.items()))


def sub(c1: FormalChain, c2: FormalChain) -> FormalChain:
    return add(c1, scalar(-1, c2))


def linear_combination(pairs) -> FormalChain:
    """Sum of ``coeff * chain`` over ``(coeff, chain)`` pairs."""
    items = []
    for coeff, c in pairs:
        coeff = _frac(coeff)
        items.extend((w, coeff * v) for w, v in c.terms.items())
    return FormalChain(items)


def scalar(lam, c: FormalChain) -> FormalChain:
    lam = _frac(lam)
    if lam == 0:
        return zero()
    return FormalChain({w: lam * v for w, v in c.terms.items()})


def product(c1: FormalChain, c2: FormalChain) -> FormalChain:
    return FormalChain(
        (w1 + w2, v1 * v2) for w1, v1 in c1.terms.items() for w2, v2 in c2.terms.items()
    )


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def bracket(c1: FormalChain, c2: FormalChain) -> FormalChain:
    """Graded commutator ``c1 c2 - (-1)^{|c1||c2|} c2 c1``."""
    if c1.is_zero() or c2.is_zero():
        return zero()
    m, n = c1.degree, c2.degree
    return add(product(c1, c2), scalar(-_sign(m * n), product(c2, c1)))


def _scale_word(k: int, word: Word) -> Atom:
    if len(word) == 1:
        a = word[0]
        return Atom(a.base, a.scale * k)
    return Atom(FormalChain({word: 1}), k)


def loop_power(k: int, c: FormalChain) -> FormalChain:
    """Push ``c`` forward by the k-fold self-concatenation map.

    Linear in ``c`` but not multiplicative: a word of several atoms is kept
    as an opaque sub-expression under one scale atom.  ``{j}{k} = {jk}``.
    """
    if not isinstance(k, int) or k < 1:
        raise ChainError(f"loop power must be a positive integer, got {k!r}")
    if k == 1:
        return c
    return FormalChain(((_scale_word(k, w),), v) for w, v in c.terms.items())


def _atom_boundary(a: Atom) -> FormalChain:
    base = a.base
    if isinstance(base, FormalChain):
        inner = boundary(base)
    elif isinstance(base, Block):
        inner = boundary(base.body)
    else:
        inner = base.boundary
    return loop_power(a.scale, inner)


_boundary_cache: dict = {}


def _word_boundary(word: Word) -> FormalChain:
    hit = _boundary_cache.get(word)
    if hit is not None:
        return hit
    items = []
    deg = 0
    for i, a in enumerate(word):
        da = _atom_boundary(a)
        if not da.is_zero():
            sgn = _sign(deg)
            left, right = word[:i], word[i + 1:]
            items.extend((left + w + right, sgn * v) for w, v in da.terms.items())
        deg += a.degree
    out = FormalChain(items)
    if len(_boundary_cache) > 200_000:
        _boundary_cache.clear()
    _boundary_cache[word] = out
    return out


def boundary(c: FormalChain) -> FormalChain:
    """Graded Leibniz boundary: d(xy) = dx y + (-1)^{|x|} x dy."""
    items = []
    for w, v in c.terms.items():
        items.extend((w2, v * v2) for w2, v2 in _word_boundary(w).terms.items())
    return FormalChain(items)


def is_cycle(c: FormalChain) -> bool:
    return boundary(c).is_zero()


def _atom_cost(a: Atom, product_constant: Fraction) -> CostBound:
    base = a.base
    if isinstance(base, FormalChain):
        inner = cost_bounds(base, product_constant)
        sup, vol = inner.suplength, inner.volume
    else:
        sup, vol = base.suplength, base.volume
    # {k} multiplies suplength, is 1-Lipschitz on constant-curfew chains
    return CostBound(a.scale * sup, vol)


def cost_bounds(c: FormalChain, product_constant=1) -> CostBound:
    """Recursive suplength/volume upper bounds.

    Word suplength is the sum over atoms; word volume is the product of atom
    volumes times ``product_constant`` per binary product; chain volume is
    the |coeff|-weighted sum, chain suplength the max over words.
    """
    cp = _frac(product_constant)
    sup = Fraction(0)
    vol = Fraction(0)
    for w, v in c.terms.items():
        ws = Fraction(0)
        wv = cp ** (len(w) - 1) if w else Fraction(1)
        for a in w:
            ac = _atom_cost(a, cp)
            ws += ac.suplength
            wv *= ac.volume
        sup = max(sup, ws)
        vol += abs(v) * wv
    return CostBound(sup, vol)


def lipschitz_bound(c: FormalChain) -> Fraction:
    """Lipschitz data of the parametrizing map: scale-free word suplength."""
    best = Fraction(0)
    for w in c.terms:
        best = max(best, sum((a.base.lipschitz for a in w), Fraction(0)))
    return best
