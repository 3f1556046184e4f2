from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multlab import bounds
from multlab.experiment import ExperimentConfig, generate_instance
from multlab.multiplicity import (
    CERTIFIED_INFINITE,
    FINITE,
    INCONCLUSIVE,
    SUM_BOUND,
    ZERO_CHAIN,
    PointError,
    SingularPointError,
    certified_cutoff,
    certified_vanishing,
    instance_degrees,
    multiplicity,
    multiplicity_sum,
    multiplicity_via_series,
)
from multlab.polyalg import PolynomialError, VectorField, evaluate, parse_poly, translate


def P(text, n=2, mode="affine"):
    return parse_poly(text, n, mode)


SHEAR = VectorField.parse(["1", "x1"])
EIGEN = VectorField.parse(["2*x1", "3*x2"])


def test_coordinate_case():
    res = multiplicity(VectorField.parse(["1"]), P("x1", 1), (0,))
    assert (res.status, res.order) == (FINITE, 1)


def test_shear_example():
    res = multiplicity(SHEAR, P("x2"), (0, 0))
    assert (res.status, res.order, res.witness_value) == (FINITE, 2, 1)
    assert res.chain_values == (0, 0, 1)


def test_eigenfunction_certified_infinite():
    res = multiplicity(EIGEN, P("x1^3 - x2^2"), (1, 1))
    assert res.status == CERTIFIED_INFINITE
    assert res.certificate == SUM_BOUND
    assert res.cutoff == bounds.single_point_bound(2, 3, 1) == 48


def test_nonvanishing_is_order_zero():
    res = multiplicity(SHEAR, P("x2 + 1"), (0, 0))
    assert (res.status, res.order) == (FINITE, 0)


def test_user_cutoff_below_bound_is_inconclusive():
    assert multiplicity(SHEAR, P("x2"), (0, 0), cutoff=1).status == INCONCLUSIVE
    assert multiplicity(EIGEN, P("x1^3 - x2^2"), (1, 1), cutoff=5).status == INCONCLUSIVE


def test_user_cutoff_at_bound_certifies():
    assert multiplicity(EIGEN, P("x1^3 - x2^2"), (1, 1), cutoff=48).status == CERTIFIED_INFINITE


def test_zero_chain_certificate():
    # V = d/dx1 kills any polynomial in x2 alone
    res = multiplicity(VectorField.parse(["1", "0"]), P("x2^2 - 1"), (0, 1))
    assert res.status == CERTIFIED_INFINITE and res.certificate == ZERO_CHAIN


def test_singular_point_is_an_error():
    with pytest.raises(SingularPointError, match="singular point"):
        multiplicity(EIGEN, P("x1"), (0, 0))


def test_torus_point_required_for_laurent_inputs():
    v = VectorField([P("x1", 2, "torus"), P("x2^-1", 2, "torus")])
    with pytest.raises(PolynomialError, match="torus"):
        multiplicity(v, P("x1 - 1", 2, "torus"), (1, 0))


def test_torus_instance_uses_cleared_degrees():
    # x' = x, y' = 1/y; P = x*y^-1 - 1 on the torus
    v = VectorField([P("x1", 2, "torus"), P("x2^-1", 2, "torus")])
    p = P("x1*x2^-1 - 1", 2, "torus")
    assert instance_degrees(v, p) == (1, 2)
    chain = multiplicity(v, p, (1, 1))
    series = multiplicity_via_series(v, p, (1, 1), 8)
    assert chain.status == series.status == FINITE
    assert chain.order == series.order


def test_series_examples():
    assert multiplicity_via_series(SHEAR, P("x2"), (0, 0), 5).order == 2
    assert multiplicity_via_series(SHEAR, P("x2 - 3"), (0, 0), 5).order == 0
    assert multiplicity_via_series(EIGEN, P("x1^3 - x2^2"), (1, 1), 10).status == INCONCLUSIVE


def test_multiplicity_sum_examples():
    assert multiplicity_sum(SHEAR, P("x2"), [(0, 0)]).total == 2
    res = multiplicity_sum(SHEAR, P("x2"), [(0, 0), (1, 1)])
    assert [r.order for r in res.results] == [2, 0]
    assert res.total == 2 and res.valid
    empty = multiplicity_sum(SHEAR, P("x2"), [])
    assert empty.total == 0 and empty.results == ()


def test_multiplicity_sum_flags_infinite_and_reports_index():
    res = multiplicity_sum(EIGEN, P("x1^3 - x2^2"), [(2, 1), (1, 1)])
    assert not res.valid
    assert res.total == 0
    with pytest.raises(PointError) as err:
        multiplicity_sum(EIGEN, P("x1"), [(1, 1), (0, 0)])
    assert err.value.index == 1


def test_multiplicity_sum_parallel_matches_serial():
    pts = [(Fraction(i, 2), Fraction(1 - i, 3)) for i in range(6)]
    p = P("2*x2 - x1^2")
    assert multiplicity_sum(SHEAR, p, pts, workers=4) == multiplicity_sum(SHEAR, p, pts)


def test_certified_vanishing_examples():
    cert = certified_vanishing(EIGEN, P("x1^3 - x2^2"), (1, 1))
    assert cert.vanishes
    assert cert.bound_value == 48
    assert cert.checked_through == 48
    assert bounds.weak_single_point_bound(2, 3, 1) == 72
    assert not certified_vanishing(EIGEN, P("x1^3 - x2^2 + 1"), (1, 1)).vanishes
    shear = certified_vanishing(SHEAR, P("x2"), (0, 0))
    assert not shear.vanishes and shear.checked_through == 2


# randomized properties ------------------------------------------------------------------


def _instances(count, n, seed):
    cfg = ExperimentConfig(n=n, d=3, delta=3, trials=count, seed=seed)
    return [generate_instance(cfg, i) for i in range(count)]


@pytest.mark.parametrize("n", [2, 3])
def test_oracles_agree(n):
    for inst in _instances(40, n, seed=11):
        chain = multiplicity(inst.field, inst.poly, inst.point, cutoff=12)
        series = multiplicity_via_series(inst.field, inst.poly, inst.point, 12)
        assert chain.status in (FINITE, INCONCLUSIVE, CERTIFIED_INFINITE)
        if chain.is_finite or series.is_finite:
            assert (chain.status, chain.order) == (series.status, series.order)


def test_positivity_link():
    for inst in _instances(40, 2, seed=5):
        p = inst.poly + 1  # breaks the forced zero
        for poly in (inst.poly, p):
            res = multiplicity(inst.field, poly, inst.point, cutoff=12)
            if res.is_finite:
                assert (res.order >= 1) == (evaluate(poly, inst.point) == 0)


def test_bound_soundness_on_random_instances():
    for inst in _instances(40, 3, seed=2):
        res = multiplicity(inst.field, inst.poly, inst.point, cutoff=12)
        if res.is_finite:
            d, delta = instance_degrees(inst.field, inst.poly)
            assert res.order <= bounds.single_point_bound(3, d, delta)
            assert res.order <= bounds.gabrielov_bound(3, d, delta)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
def test_shift_invariance(seed, shift):
    inst = generate_instance(ExperimentConfig(n=2, d=3, delta=2, seed=seed), 0)
    moved_point = tuple(x - c for x, c in zip(inst.point, shift))
    moved_field = inst.field.translate(shift)
    moved_poly = translate(inst.poly, shift)
    a = multiplicity(inst.field, inst.poly, inst.point, cutoff=10)
    b = multiplicity(moved_field, moved_poly, moved_point, cutoff=10)
    assert (a.status, a.order) == (b.status, b.order)


def test_higher_order_contact():
    # the parabola x2 = x1^2/2 is the trajectory of the shear through the origin
    rng = random.Random(3)
    for _ in range(10):
        a = Fraction(rng.randint(1, 5))
        p = P("2*x2 - x1^2").scale(a) * P("x1 + 1")
        assert multiplicity(SHEAR, p, (0, 0)).status == CERTIFIED_INFINITE
    cubic = P("x2 - x1^3")
    assert multiplicity(SHEAR, cubic, (0, 0)).order == multiplicity_via_series(SHEAR, cubic, (0, 0), 6).order == 2


def test_certified_cutoff_padding():
    # n = 3 with a linear P pads d to n - 1 = 2
    v = VectorField.parse(["1", "0", "0"])
    assert certified_cutoff(v, P("x1", 3)) == bounds.single_point_bound(3, 2, 1)
