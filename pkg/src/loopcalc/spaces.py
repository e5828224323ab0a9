"""Preset base spaces.

``Y`` is the punctured 6-manifold ``[(CP^2)^#4 x S^2]°`` described by its
Adams-Hilton generators: 1-cycles ``A1..A4, B`` from the five 2-cells and
3-chains ``C1..C4, D`` from the five 4-cells, with

    dC_i = [A_i, B],        dD = sum_i [A_i, A_i].

``S<n>`` is the n-sphere with its sweepout cycle ``zeta`` of degree n-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .chain_calc import (
    Atom,
    Block,
    ChainError,
    FormalChain,
    Generator,
    atom_chain,
    bracket,
    cost_bounds,
    linear_combination,
    loop_power,
    scalar,
)
from .chen_pairing import FormLabel, PairingTable, word_degree
from .homology_builder import log2_exact, multiscale_witness

__all__ = [
    "SpacePreset",
    "preset_Y",
    "preset_sphere",
    "get_preset",
    "build_Z1",
    "build_ZL",
    "sphere_degree_family",
    "sphere_hopf_family",
]


@dataclass(frozen=True, eq=False)
class SpacePreset:
    name: str
    dimension: int
    generators: dict
    forms: dict
    pairing_table: PairingTable = field(compare=False)

    def gen(self, name: str) -> FormalChain:
        return atom_chain(self.generators[name])

    def word(self, text: str) -> tuple:
        """Parse a whitespace-separated word such as ``"a1 c1"``."""
        try:
            return tuple(self.forms[t] for t in text.split())
        except KeyError as exc:
            raise KeyError(f"unknown form label {exc.args[0]!r} for space {self.name}") from None


@lru_cache(maxsize=None)
def preset_Y() -> SpacePreset:
    A = [Generator(f"A{i}", 1, skeleton=2, spherical=True) for i in range(1, 5)]
    B = Generator("B", 1, skeleton=2, spherical=True)
    a = [atom_chain(g) for g in A]
    b = atom_chain(B)
    C = [Generator(f"C{i}", 3, curfew=2, boundary=bracket(a[i - 1], b), skeleton=6)
         for i in range(1, 5)]
    D = Generator("D", 3, curfew=2, boundary=linear_combination((1, bracket(x, x)) for x in a),
                  skeleton=6)
    gens = {g.id: g for g in (*A, B, *C, D)}

    forms = {}
    for i in range(1, 5):
        forms[f"a{i}"] = FormLabel(f"a{i}", 2)
        forms[f"c{i}"] = FormLabel(f"c{i}", 4, vanishing_skeleton=2)
    forms["b"] = FormLabel("b", 2)
    forms["d"] = FormLabel("d", 4)

    table = PairingTable()
    for i in range(1, 5):
        for j in range(1, 5):
            table[(f"a{j}",), f"A{i}"] = int(i == j)
            table[(f"c{j}",), f"C{i}"] = int(i == j)
        table[(f"a{i}",), "B"] = 0
        table[(f"c{i}",), "D"] = 0
        table[("b",), f"A{i}"] = 0
        table[("d",), f"C{i}"] = 0
    table[("b",), "B"] = 1
    table[("d",), "D"] = 1
    return SpacePreset("Y", 6, gens, forms, table)


@lru_cache(maxsize=None)
def preset_sphere(n: int) -> SpacePreset:
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"sphere dimension must be >= 2, got {n!r}")
    zeta = Generator("zeta", n - 1, skeleton=n, spherical=True)
    omega = FormLabel("omega", n, vanishing_skeleton=n - 1)
    table = PairingTable()
    table[("omega",), "zeta"] = 1
    return SpacePreset(f"S{n}", n, {"zeta": zeta}, {"omega": omega}, table)


def get_preset(name: str) -> SpacePreset:
    if name == "Y":
        return preset_Y()
    if name.startswith("S") and name[1:].isdigit():
        return preset_sphere(int(name[1:]))
    raise KeyError(f"unknown space preset {name!r}")


def build_Z1(preset: SpacePreset | None = None) -> FormalChain:
    """``[B, D] + 2 sum_i [A_i, C_i]``."""
    p = preset or preset_Y()
    g = p.gen
    terms = [(1, bracket(g("B"), g("D")))]
    terms += [(2, bracket(g(f"A{i}"), g(f"C{i}"))) for i in range(1, 5)]
    return linear_combination(terms)


def _block(name: str, body: FormalChain, L: int) -> FormalChain:
    # suplength <= const*L, volume <= const*L*log2(L): absorb the linear
    # part L*Vol into the L*log2(L) term, valid for L >= 2
    k = log2_exact(L)
    own = cost_bounds(body)
    vol_linear = Fraction(0)
    vol_log = Fraction(0)
    for w, v in body.terms.items():
        wc = cost_bounds(FormalChain({w: v}))
        if isinstance(w[0].base, Block):
            vol_log += wc.volume
        else:
            vol_linear += wc.volume
    return atom_chain(Block(name, body, own.suplength, k * vol_linear + vol_log))


@lru_cache(maxsize=64)
def build_ZL(L: int, preset: SpacePreset | None = None) -> FormalChain:
    """``[B_L, D_L] + 2 sum_i [A_{i,L}, C_{i,L}]``.

    ``C_{i,L} = L{L}C_i + P(A_i, B, L)`` and
    ``D_L = L{L}D + sum_i P(A_i, A_i, L)``, each packaged as a block with
    volume bound proportional to ``L log2 L``.
    """
    p = preset or preset_Y()
    k = log2_exact(L)
    if k == 0:
        return build_Z1(p)
    g = p.gen
    A = [g(f"A{i}") for i in range(1, 5)]
    B = g("B")
    AL = [loop_power(L, x) for x in A]
    BL = loop_power(L, B)
    CL = []
    for i in range(4):
        body = scalar(L, loop_power(L, g(f"C{i + 1}"))) + multiscale_witness(A[i], B, L)
        CL.append(_block(f"C{i + 1},{L}", body, L))
    body = scalar(L, loop_power(L, g("D"))) + linear_combination(
        (1, multiscale_witness(x, x, L)) for x in A)
    DL = _block(f"D,{L}", body, L)
    terms = [(1, bracket(BL, DL))]
    terms += [(2, bracket(AL[i], CL[i])) for i in range(4)]
    return linear_combination(terms)


def sphere_degree_family(n: int):
    """``L -> L^(n-1) {L}_* zeta`` on S^n."""
    p = preset_sphere(n)

    def family(L: int) -> FormalChain:
        return scalar(L ** (n - 1), loop_power(L, p.gen("zeta")))

    return family


def sphere_hopf_family(n: int):
    """``L -> L^(2n-2) [{L} zeta, {L} zeta]`` on S^n, n even."""
    if n % 2:
        raise ValueError("the Hopf family needs an even-dimensional sphere")
    p = preset_sphere(n)

    def family(L: int) -> FormalChain:
        z = loop_power(L, p.gen("zeta"))
        return scalar(L ** (2 * n - 2), bracket(z, z))

    return family
