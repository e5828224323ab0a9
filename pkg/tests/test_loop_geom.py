import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from loopcalc.loop_geom import (
    NORTH,
    DiscreteLoop,
    area_form,
    chen_integral_numeric,
    concat,
    constant_family,
    hausdorff_length_mc,
    loop_distance,
    loop_family,
    power,
    suplength,
    sweepout_s2,
    volume_upper,
    zeta_points,
)
from loopcalc.scaling import family_snapshot

M = 16


@st.composite
def loops(draw):
    raw = draw(arrays(np.float64, (M - 1, 3), elements=st.floats(-1, 1)))
    raw = raw + np.array([0.0, 0.0, 1e-3])  # keep away from the origin
    pts = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    samples = np.vstack([NORTH, pts[1:], NORTH])
    return DiscreteLoop(draw(st.sampled_from([1.0, 2.0, 3.5])), samples)


@settings(max_examples=1000)
@given(loops(), loops(), loops())
def test_metric_axioms(x, y, z):
    assert loop_distance(x, x) == 0.0
    assert loop_distance(x, y) == loop_distance(y, x)
    assert loop_distance(x, y) >= 0.0
    assert loop_distance(x, z) <= loop_distance(x, y) + loop_distance(y, z) + 1e-12


def test_loop_validation():
    with pytest.raises(ValueError, match="basepoint"):
        DiscreteLoop(1.0, np.array([[1.0, 0, 0], NORTH]))
    with pytest.raises(ValueError, match="unit sphere"):
        DiscreteLoop(1.0, np.array([NORTH, [0, 0, 2.0], NORTH]))


def test_zeta_endpoints_are_constant():
    t = np.linspace(0, 1, 33)
    assert np.array_equal(zeta_points(0.0, t), np.broadcast_to(NORTH, (33, 3)))
    assert np.array_equal(zeta_points(1.0, t), np.broadcast_to(NORTH, (33, 3)))
    mid = zeta_points(0.5, t)
    assert np.allclose(mid[0], NORTH) and np.allclose(mid[-1], NORTH)


def test_sweepout_suplength():
    assert suplength(sweepout_s2()) == pytest.approx(2 * math.pi, abs=1e-3)


@pytest.mark.parametrize("L", [2, 3, 8])
def test_power_suplength_and_volume(L):
    f = sweepout_s2(32, 64)
    assert abs(suplength(power(L, f)) - L * suplength(f)) <= 1e-9
    assert volume_upper(power(L, f)).value <= volume_upper(f).value * (1 + 1e-6)
    assert power(L, f).curfew == L * f.curfew


def test_power_rejects_bad_k():
    with pytest.raises(ValueError):
        power(0, sweepout_s2(4, 8))


def test_constant_family_volume_zero():
    assert volume_upper(constant_family(arity=1)).value == 0.0
    assert volume_upper(constant_family(arity=2, resolution=4)).value == 0.0


def test_sweepout_volume_against_monte_carlo():
    f = sweepout_s2()
    est = hausdorff_length_mc(lambda s: zeta_points(s, np.arange(257) / 256), seed=1)
    bound = volume_upper(f).value
    assert est / 4 <= bound <= 4 * est
    assert bound >= est * (1 - 1e-3)


def test_refinement_converges():
    v = volume_upper(sweepout_s2(16, 256), refine=4, builder=lambda R: sweepout_s2(R, 256))
    assert v.converged and v.level >= 1


def test_refinement_reports_cap():
    v = volume_upper(sweepout_s2(4, 256), refine=1, builder=lambda R: sweepout_s2(R, 256),
                     rtol=1e-12)
    assert not v.converged and v.level == 1


def test_product_volume_bound():
    f = sweepout_s2(16, 64)
    assert volume_upper(concat(f, f)).value <= 4 * volume_upper(f).value ** 2


def test_volume_scales_by_weight_and_adds():
    f = sweepout_s2(16, 64)
    v = volume_upper(f).value
    assert volume_upper(f.scaled(-3)).value == pytest.approx(3 * v)
    assert volume_upper([f, f.scaled(2)]).value == pytest.approx(3 * v)


def test_concat_adds_curfew_and_suplength():
    f = sweepout_s2(8, 32)
    g = power(3, f)
    h = concat(f, g)
    assert h.curfew == f.curfew + g.curfew
    assert h.arity == 2
    assert abs(suplength(h) - suplength(f) - suplength(g)) <= 1e-9


def test_chen_sweepout_degree():
    f = sweepout_s2()
    assert chen_integral_numeric([area_form()], f) == pytest.approx(1.0, abs=1e-3)
    for L in (2, 4, 8):
        assert chen_integral_numeric([area_form()], power(L, f)) == pytest.approx(L, abs=L * 1e-3)


def test_chen_degree_mismatch_is_zero():
    f = sweepout_s2(8, 32)
    assert chen_integral_numeric([area_form(), area_form()], f) == 0.0


def test_chen_splitting_with_point_family():
    f = sweepout_s2()
    t = np.arange(257) / 256
    f0 = loop_family(DiscreteLoop(1.0, zeta_points(0.3, t)), 256)
    one = chen_integral_numeric([area_form()], f)
    for prod in (concat(f, f0), concat(f0, f)):
        assert chen_integral_numeric([area_form()], prod) == pytest.approx(one + 0.0, abs=1e-3)


def test_chen_nonconstant_density():
    # density z + 1/(4 pi): the z part integrates to zero over the sphere
    from loopcalc.loop_geom import SphereForm

    form = SphereForm(lambda x: x[..., 2] + 1 / (4 * np.pi))
    assert chen_integral_numeric([form], sweepout_s2()) == pytest.approx(1.0, abs=1e-3)


def test_chen_two_letters_on_product():
    # on the product of two sweepouts the word (w, w) picks up <w,f><w,f> = 1
    f = sweepout_s2(16, 32)
    val = chen_integral_numeric([area_form(), area_form()], concat(f, f))
    assert val == pytest.approx(1.0, abs=0.1)


def test_deterministic():
    a = volume_upper(sweepout_s2(32, 64)).value
    b = volume_upper(sweepout_s2(32, 64)).value
    assert a == b


def test_snapshot_is_json_and_versioned():
    import json

    snap = family_snapshot(sweepout_s2(4, 8), include_samples=True)
    assert snap["format_version"] == 1
    back = json.loads(json.dumps(snap))
    assert np.asarray(back["segments"][0]["samples"]).shape == (5, 9, 3)
