"""Small-volume homologies between ``[{L}Z1, {L}Z2]`` and ``L{L}[Z1, Z2]``.

The single-scale witness trades ``[{2}Z1, {2}Z2]`` for ``2{2}[Z1, Z2]``;
stacking it over dyadic scales gives a homology with suplength O(L) and
volume O(L log L).  :func:`naive_witness` is the unary comparator whose
volume grows like L^2.
"""

from __future__ import annotations

from fractions import Fraction

from .chain_calc import (
    Atom,
    Block,
    ChainError,
    FormalChain,
    Witness,
    atom_chain,
    bracket,
    cost_bounds,
    linear_combination,
    lipschitz_bound,
    loop_power,
    scalar,
    zero,
)

__all__ = [
    "single_scale_witness",
    "multiscale_witness",
    "multiscale_boundary",
    "naive_witness",
    "log2_exact",
    "WITNESS_CONSTANT",
]

# constant C(n1, n2) of the single-scale homology; bounds are tracked up to it
WITNESS_CONSTANT = Fraction(1)


def log2_exact(L: int) -> int:
    """Return k with L == 2**k, rejecting anything else."""
    if not isinstance(L, int) or isinstance(L, bool) or L < 1 or L & (L - 1):
        raise ChainError(f"L = {L!r} is not a power of two")
    return L.bit_length() - 1


def _single_generator(c: FormalChain):
    if len(c.terms) != 1:
        return None
    (word, coeff), = c.terms.items()
    if coeff != 1 or len(word) != 1:
        return None
    return word[0]


def _check_inputs(z1: FormalChain, z2: FormalChain):
    for z in (z1, z2):
        if z.is_zero():
            raise ChainError("witness inputs must be nonzero cycles")
        a = _single_generator(z)
        base = getattr(a, "base", None)
        if a is None or not getattr(base, "spherical", False):
            raise ChainError(f"{z!r} is not a spherical cycle")
    if z1.curfew != z2.curfew:
        raise ChainError(f"curfew mismatch {z1.curfew} vs {z2.curfew}")


def _label(z: FormalChain) -> str:
    return repr(z).replace(" ", "")


def single_scale_witness(z1: FormalChain, z2: FormalChain, lipschitz=None,
                         constant=WITNESS_CONSTANT) -> Witness:
    """Homology P' with boundary ``2{2}[z1, z2] - [{2}z1, {2}z2]``.

    Inputs are spherical cycles (possibly loop powers of a spherical
    generator) of equal curfew.  Volume is tracked as three pieces: the
    diagonal-to-bouquet homologies P1 and P3 (each ``C/2 * L0^(n+1)``) and
    the reparametrization homotopy P2 (``C * L1 * L0^n``), where L0 is the
    Lipschitz constant and L1 the suplength of the inputs.
    """
    _check_inputs(z1, z2)
    n = z1.degree + z2.degree
    l0 = Fraction(lipschitz) if lipschitz is not None else max(
        lipschitz_bound(z1), lipschitz_bound(z2))
    l1 = max(cost_bounds(z1).suplength, cost_bounds(z2).suplength)
    C = Fraction(constant)
    p1 = C / 2 * l0 ** (n + 1)
    p2 = C * l1 * l0 ** n
    p3 = C / 2 * l0 ** (n + 1)
    bd = scalar(2, loop_power(2, bracket(z1, z2))) - bracket(loop_power(2, z1), loop_power(2, z2))
    return Witness(
        id=f"P'[{_label(z1)},{_label(z2)}]",
        dimension=n + 1,
        boundary=bd,
        curfew=4 * z1.curfew,
        suplength=4 * l1,
        volume=p1 + p2 + p3,
        skeleton=max(z1.skeleton, z2.skeleton),
        lipschitz=l0,
        provenance=(("Z1", _label(z1)), ("Z2", _label(z2)), ("scale", 2)),
        pieces=(("P1", p1), ("P2", p2), ("P3", p3)),
    )


def multiscale_boundary(z1: FormalChain, z2: FormalChain, L: int) -> FormalChain:
    """``[{L}z1, {L}z2] - L {L}[z1, z2]``, the target boundary."""
    log2_exact(L)
    return bracket(loop_power(L, z1), loop_power(L, z2)) - scalar(L, loop_power(L, bracket(z1, z2)))


def _telescope(z1, z2, k, constant):
    # P = -sum_i 2^i {2^i}_* P'({2^(k-1-i)} z1, {2^(k-1-i)} z2)
    pairs = []
    l0 = max(lipschitz_bound(z1), lipschitz_bound(z2))
    for i in range(k):
        m = 2 ** (k - 1 - i)
        w = single_scale_witness(loop_power(m, z1), loop_power(m, z2), lipschitz=l0,
                                 constant=constant)
        pairs.append((-(2 ** i), atom_chain(w, 2 ** i)))
    return linear_combination(pairs)


def multiscale_witness(z1: FormalChain, z2: FormalChain, L: int,
                       constant=WITNESS_CONSTANT) -> FormalChain:
    """Homology P with ``boundary(P) = [{L}z1, {L}z2] - L{L}[z1, z2]``.

    Returned as a single block whose recorded bounds are suplength
    ``4 L L1`` and volume ``C L log2(L) L0^n max(L0, L1)``: each of the log2(L)
    summands has volume at most ``C L L0^n max(L0, L1)``.
    """
    k = log2_exact(L)
    _check_inputs(z1, z2)
    if k == 0:
        return zero()
    body = _telescope(z1, z2, k, constant)
    n = z1.degree + z2.degree
    l0 = max(lipschitz_bound(z1), lipschitz_bound(z2))
    l1 = max(cost_bounds(z1).suplength, cost_bounds(z2).suplength)
    block = Block(
        id=f"P[{_label(z1)},{_label(z2)};{L}]",
        body=body,
        suplength=4 * L * l1,
        volume=Fraction(constant) * L * k * l0 ** n * max(l0, l1),
    )
    return FormalChain({(Atom(block),): 1})


def naive_witness(z1: FormalChain, z2: FormalChain, L: int,
                  constant=WITNESS_CONSTANT) -> FormalChain:
    """Unary telescope with the same boundary as :func:`multiscale_witness`.

    Passes through L-2 intermediate cycles ``Q_j``; the step from ``Q_j``
    to ``Q_{j+1}`` reparametrizes loops of suplength ``(j+1) L1`` and costs
    ``C L0^n (L0 + j L1)``.  Total volume is bounded by ``C L^2 L0^n max(L0, L1)``.
    """
    if not isinstance(L, int) or L < 1:
        raise ChainError(f"L must be a positive integer, got {L!r}")
    _check_inputs(z1, z2)
    if L == 1:
        return zero()
    n = z1.degree + z2.degree
    l0 = max(lipschitz_bound(z1), lipschitz_bound(z2))
    l1 = max(cost_bounds(z1).suplength, cost_bounds(z2).suplength)
    C = Fraction(constant)
    start = scalar(L, loop_power(L, bracket(z1, z2)))
    end = bracket(loop_power(L, z1), loop_power(L, z2))
    curfew = start.curfew
    tag = f"{_label(z1)},{_label(z2)};{L}"
    stages = [start]
    for j in range(2, L):
        q = Witness(id=f"Q{j}[{tag}]", dimension=n, boundary=zero(), curfew=curfew,
                    suplength=L * l1 * 2, volume=0, skeleton=max(z1.skeleton, z2.skeleton))
        stages.append(atom_chain(q))
    stages.append(end)
    steps = []
    for j in range(1, L):
        w = Witness(
            id=f"N{j}[{tag}]",
            dimension=n + 1,
            boundary=stages[j] - stages[j - 1],
            curfew=curfew,
            suplength=4 * L * l1,
            volume=C * l0 ** n * (l0 + j * l1),
            skeleton=max(z1.skeleton, z2.skeleton),
            lipschitz=l0,
            provenance=(("step", j),),
        )
        steps.append((1, atom_chain(w)))
    block = Block(
        id=f"N[{tag}]",
        body=linear_combination(steps),
        suplength=4 * L * l1,
        volume=C * L * L * l0 ** n * max(l0, l1),
    )
    return FormalChain({(Atom(block),): 1})
