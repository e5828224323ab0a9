from fractions import Fraction

import pytest
from hypothesis import given, settings

from loopcalc.chain_calc import (
    BULLET,
    Atom,
    Block,
    ChainError,
    FormalChain,
    Generator,
    Witness,
    atom_chain,
    boundary,
    bracket,
    cost_bounds,
    is_cycle,
    linear_combination,
    loop_power,
    product,
    scalar,
    zero,
)
from loopcalc.spaces import build_Z1, preset_Y

from .strategies import chains, nonzero_chains

Y = preset_Y()
A1, B, C1, D = (Y.gen(n) for n in ("A1", "B", "C1", "D"))


def sgn(n):
    return -1 if n % 2 else 1


# --- examples -------------------------------------------------------------

def test_bracket_of_degree_one_generators():
    # odd * odd: the commutator is symmetric
    assert bracket(A1, B) == A1 * B + B * A1


def test_boundary_of_C_is_bracket():
    assert boundary(C1) == bracket(A1, B)


def test_boundary_of_D():
    a = [Y.gen(f"A{i}") for i in range(1, 5)]
    assert boundary(D) == linear_combination((1, bracket(x, x)) for x in a)


def test_Z1_is_cycle_of_degree_4():
    z = build_Z1()
    assert z.degree == 4
    assert is_cycle(z)


def test_zero_chain():
    z = zero()
    assert z.is_zero() and z.degree is None
    assert boundary(z).is_zero()
    assert bracket(z, A1).is_zero()


def test_mixed_degree_rejected():
    with pytest.raises(ChainError, match="mixed degrees"):
        A1 + C1


def test_mixed_curfew_rejected():
    with pytest.raises(ChainError, match="mixed curfews"):
        A1 + loop_power(2, B)


def test_generator_boundary_must_be_cycle():
    with pytest.raises(ChainError):
        Generator("X", 2, boundary=C1 * 0 + A1 * B)


def test_loop_power_rejects_bad_k():
    for k in (0, -1, 1.5):
        with pytest.raises(ChainError):
            loop_power(k, A1)


def test_loop_power_identity_and_composition():
    assert loop_power(1, C1) == C1
    assert loop_power(2, loop_power(3, A1)) == loop_power(6, A1)
    w = A1 * B
    assert loop_power(2, loop_power(2, w)) == loop_power(4, w)
    assert boundary(loop_power(4, C1)) == loop_power(4, bracket(A1, B))


def test_loop_power_is_not_multiplicative():
    assert loop_power(2, A1 * B) != loop_power(2, A1) * loop_power(2, B)


def test_curfew_and_cost_of_a_generator():
    cb = cost_bounds(A1)
    assert (cb.suplength, cb.volume) == (1, 1)
    assert loop_power(8, A1).curfew == 8
    assert cost_bounds(loop_power(8, A1)) == cost_bounds(A1).__class__(8, 1)


def test_cost_bounds_of_products_and_sums():
    cb = cost_bounds(3 * (A1 * B) - 2 * (B * A1))
    assert cb.suplength == 2 and cb.volume == 5
    assert cost_bounds(A1 * B, product_constant=4).volume == 4


def test_bullet_is_a_unit_curfew_point():
    bullet = atom_chain(BULLET)
    assert bullet.degree == 0 and bullet.curfew == 1
    assert is_cycle(A1 * bullet)


def test_witness_and_block_validate_their_bounds():
    w = Witness("W", 3, boundary=bracket(A1, B), curfew=2, suplength=2, volume=3, skeleton=2)
    c = atom_chain(w)
    assert boundary(c) == bracket(A1, B)
    with pytest.raises(ChainError):
        Block("bad", c, suplength=1, volume=3)
    blk = Block("ok", c, suplength=2, volume=3)
    assert boundary(atom_chain(blk)) == bracket(A1, B)


def test_repr_is_order_independent():
    assert repr(A1 * B + B * A1) == repr(B * A1 + A1 * B)


# --- properties -------------------------------------------------------------

@settings(max_examples=1000)
@given(chains())
def test_boundary_squared_is_zero(c):
    assert boundary(boundary(c)).is_zero()


@settings(max_examples=1000)
@given(nonzero_chains, nonzero_chains)
def test_graded_leibniz(x, y):
    lhs = boundary(x * y)
    rhs = boundary(x) * y + sgn(x.degree) * (x * boundary(y))
    assert lhs == rhs


@settings(max_examples=1000)
@given(nonzero_chains, nonzero_chains)
def test_graded_antisymmetry(x, y):
    assert bracket(x, y) == -sgn(x.degree * y.degree) * bracket(y, x)


@settings(max_examples=1000)
@given(chains(max_len=2), chains(max_len=2), chains(max_len=2))
def test_graded_jacobi(x, y, z):
    if x.is_zero() or y.is_zero() or z.is_zero():
        return
    a, b, c = x.degree, y.degree, z.degree
    jac = (sgn(a * c) * bracket(x, bracket(y, z))
           + sgn(b * a) * bracket(y, bracket(z, x))
           + sgn(c * b) * bracket(z, bracket(x, y)))
    assert jac.is_zero()


@settings(max_examples=300)
@given(nonzero_chains, nonzero_chains)
def test_curfew_adds_and_suplength_is_subadditive(x, y):
    p = x * y
    assert p.curfew == x.curfew + y.curfew
    assert cost_bounds(p).suplength <= cost_bounds(x).suplength + cost_bounds(y).suplength


@settings(max_examples=300)
@given(nonzero_chains)
def test_loop_power_commutes_with_boundary(c):
    assert boundary(loop_power(3, c)) == loop_power(3, boundary(c))
    assert loop_power(3, c).curfew == 3 * c.curfew


@settings(max_examples=300)
@given(nonzero_chains)
def test_scalar_linearity(c):
    q = Fraction(3, 7)
    assert boundary(scalar(q, c)) == scalar(q, boundary(c))
    assert cost_bounds(scalar(q, c)).volume == q * cost_bounds(c).volume
