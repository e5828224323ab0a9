from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopcalc.chain_calc import (
    Atom,
    ChainError,
    FormalChain,
    Witness,
    atom_chain,
    bracket,
    loop_power,
    scalar,
)
from loopcalc.chen_pairing import (
    FormLabel,
    InexpressiblePairing,
    PairingTable,
    distortion_certificate,
    pair,
    word_degree,
)
from loopcalc.spaces import build_Z1, build_ZL, preset_Y

Y = preset_Y()
T = Y.pairing_table
w = Y.word


def test_word_degree():
    assert word_degree(w("a1 c1")) == 4
    assert word_degree(()) == 0


def test_generator_entries():
    assert pair(w("a1"), Y.gen("A1"), T) == 1
    assert pair(w("a1"), Y.gen("A2"), T) == 0
    assert pair(w("a1"), Y.gen("B"), T) == 0
    assert pair(w("c2"), Y.gen("C2"), T) == 1


def test_degree_mismatch_is_zero():
    assert pair(w("a1"), Y.gen("C1"), T) == 0


def test_empty_word_is_augmentation():
    assert pair((), scalar(5, FormalChain({(): 1})), T) == 5


def test_single_letter_scales_with_loop_power():
    assert pair(w("a1"), loop_power(8, Y.gen("A1")), T) == 8


def test_splitting_formula_on_product():
    assert pair(w("a1 c1"), Y.gen("A1") * Y.gen("C1"), T) == 1
    assert pair(w("a1 c1"), Y.gen("C1") * Y.gen("A1"), T) == 0
    assert pair(w("a1 c1"), bracket(Y.gen("A1"), Y.gen("C1")), T) == 1


def test_skeleton_vanishing():
    # c1 vanishes on the 2-skeleton, where the A and B loops live
    assert pair(w("c1"), Y.gen("A1") * Y.gen("B") * Y.gen("A1"), T) == 0


def test_Z1_pairing():
    assert pair(w("a1 c1"), build_Z1(), T) == 2


@pytest.mark.parametrize("L", [2, 4, 8, 64, 1024])
def test_ZL_pairing(L):
    assert pair(w("a1 c1"), build_ZL(L), T) == 2 * L ** 3


def test_inexpressible_scaled_word():
    two = w("a1 a1")
    with pytest.raises(InexpressiblePairing, match="inexpressible"):
        pair(two, loop_power(2, Y.gen("A1") * Y.gen("A1")), T)


def test_inexpressible_witness():
    wit = Witness("Wx", 3, boundary=bracket(Y.gen("A1"), Y.gen("B")), curfew=2,
                  suplength=2, volume=1, skeleton=4)
    with pytest.raises(InexpressiblePairing):
        pair(w("c1"), atom_chain(wit), T)


def test_pairing_table_missing_entry_is_zero():
    t = PairingTable()
    f = FormLabel("f", 2)
    assert t.lookup((f,), "A1") == 0


def test_form_label_degree_validated():
    with pytest.raises(ValueError):
        FormLabel("g", 0)


def test_certificate_fields():
    c = distortion_certificate(w("a1 c1"), build_ZL, 16, T)
    assert c.pairing == 2 * 16 ** 3
    assert c.lam == c.suplength ** 4 / c.volume
    assert c.value == c.lam * c.pairing
    d = c.to_json()
    assert d["format_version"] == 1 and Fraction(d["value"]) == c.value


def test_certificate_rejects_non_cycle():
    with pytest.raises(ChainError, match="not a cycle"):
        distortion_certificate(w("c1"), lambda L: Y.gen("C1"), 2, T)


@settings(max_examples=200)
@given(st.integers(0, 10), st.integers(1, 4))
def test_pairing_is_linear(k, i):
    L = 2 ** k
    z = build_ZL(L)
    word = w(f"a{i} c{i}")
    assert pair(word, scalar(Fraction(3, 2), z), T) == Fraction(3, 2) * pair(word, z, T)
