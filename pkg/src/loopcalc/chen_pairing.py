"""Iterated-integral cochains evaluated on formal chains.

Evaluation follows three rules: Chen's splitting formula over products,
``<w, {k}_* G> = k <w, G>`` for a single closed letter, and vanishing of a
word on chains supported in a skeleton where one of its forms vanishes.
Generators are read off a pairing table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .chain_calc import Atom, Block, ChainError, FormalChain, Generator, cost_bounds, is_cycle

__all__ = [
    "FormLabel",
    "FormWord",
    "PairingTable",
    "InexpressiblePairing",
    "CertifiedBound",
    "word_degree",
    "pair",
    "distortion_certificate",
]


class InexpressiblePairing(ChainError):
    """No evaluation rule applies; the pairing is not silently zero."""


@dataclass(frozen=True)
class FormLabel:
    id: str
    degree: int
    closed: bool = True
    vanishing_skeleton: int = -1

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"form {self.id} must have degree >= 1")

    def __repr__(self):
        return self.id


FormWord = tuple  # tuple[FormLabel, ...]


class PairingTable(dict):
    """``(letters, generator_id) -> Fraction``; letters is a tuple of form ids.

    A missing entry with matching degree pairs to zero.
    """

    def __setitem__(self, key, value):
        letters, gen = key
        super().__setitem__((tuple(letters), gen), Fraction(value))

    def lookup(self, letters, gen_id):
        return self.get((tuple(f.id for f in letters), gen_id), Fraction(0))


def word_degree(w: Sequence[FormLabel]) -> int:
    """Degree of the iterated integral: sum of (deg - 1)."""
    return sum(f.degree - 1 for f in w)


def _vanishes(letters, skeleton: int) -> bool:
    return any(f.vanishing_skeleton >= skeleton for f in letters)


class _Evaluator:
    def __init__(self, table: PairingTable):
        self.table = table
        self.cache: dict = {}

    def chain(self, letters: tuple, c: FormalChain) -> Fraction:
        if c.is_zero() or word_degree(letters) != c.degree:
            return Fraction(0)
        return sum((v * self.word(letters, w) for w, v in c.terms.items()), Fraction(0))

    def word(self, letters: tuple, atoms: tuple) -> Fraction:
        key = (letters, atoms)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if word_degree(letters) != sum(a.degree for a in atoms):
            out = Fraction(0)
        elif not atoms:
            out = Fraction(1)  # unit word, letters is empty here
        elif len(atoms) == 1:
            out = self.atom(letters, atoms[0])
        else:
            head, tail = atoms[:1], atoms[1:]
            dh = head[0].degree
            out = Fraction(0)
            # splitting sum; only the cut with matching degree contributes
            for i in range(len(letters) + 1):
                if word_degree(letters[:i]) != dh:
                    continue
                left = self.word(letters[:i], head)
                if left:
                    out += left * self.word(letters[i:], tail)
        self.cache[key] = out
        return out

    def atom(self, letters: tuple, a: Atom) -> Fraction:
        base = a.base
        if not letters:
            # augmentation: a 0-chain of one loop
            if isinstance(base, (FormalChain, Block)):
                return self.chain((), base if isinstance(base, FormalChain) else base.body)
            return Fraction(1)
        if _vanishes(letters, a.skeleton):
            return Fraction(0)
        if a.scale != 1:
            if len(letters) == 1 and letters[0].closed:
                return a.scale * self.atom(letters, Atom(base, 1))
            raise InexpressiblePairing(
                f"inexpressible pairing: {''.join(map(repr, letters))} on {a!r}")
        if isinstance(base, Generator):
            return self.table.lookup(letters, base.id)
        if isinstance(base, FormalChain):
            return self.chain(letters, base)
        if isinstance(base, Block):
            return self.chain(letters, base.body)
        raise InexpressiblePairing(
            f"inexpressible pairing: {''.join(map(repr, letters))} on witness {a!r}")


def pair(w: Sequence[FormLabel], c: FormalChain, table: PairingTable) -> Fraction:
    """Exact value of the iterated integral ``w`` on the chain ``c``.

    Zero when the degrees differ.  Raises :class:`InexpressiblePairing`
    when no rule reduces the pairing.
    """
    return _Evaluator(table).chain(tuple(w), c)


@dataclass(frozen=True)
class CertifiedBound:
    """Certificate ``delta_w(suplength) >= value``."""

    L: int
    suplength: Fraction
    volume: Fraction
    pairing: Fraction
    lam: Fraction
    value: Fraction

    def to_json(self) -> dict:
        return {
            "format_version": 1,
            "L": self.L,
            "suplength": str(self.suplength),
            "volume": str(self.volume),
            "pairing": str(self.pairing),
            "lambda": str(self.lam),
            "value": str(self.value),
        }

    def normalized(self, exponent: float, log_power: int = 0) -> float:
        """``value * log2(L)^log_power / L^exponent`` as a float."""
        return float(self.value) * math.log2(self.L) ** log_power / self.L ** exponent


def distortion_certificate(w: Sequence[FormLabel], family: Callable[[int], FormalChain],
                           L: int, table: PairingTable) -> CertifiedBound:
    """Rescale ``family(L)`` to saturate the volume budget ``s^n``.

    With ``s`` the suplength bound and ``V`` the volume bound, the cycle
    ``(s^n / V) * family(L)`` has suplength ``s`` and volume ``s^n``, so the
    cohomological distortion at ``s`` is at least ``s^n / V * pairing``.
    """
    z = family(L)
    n = word_degree(w)
    if z.is_zero() or z.degree != n:
        raise ChainError(f"family({L}) is not a cycle of dimension {n}")
    if not is_cycle(z):
        raise ChainError(f"family({L}) is not a cycle")
    cb = cost_bounds(z)
    p = pair(w, z, table)
    lam = cb.suplength ** n / cb.volume
    return CertifiedBound(L, cb.suplength, cb.volume, p, lam, lam * p)
