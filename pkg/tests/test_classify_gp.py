"""Generalized-Poisson bound-direction thresholds in the dispersion parameter
and the three-way classification built on them."""

import pytest

from gwbounds.classify_gp import classify_gp, gp_f_values, gp_thresholds
from gwbounds.errors import DomainError
from gwbounds.fl_bounds import (
    LOWER_ON_S,
    SWITCHES,
    UPPER_ON_S,
    matching_fl,
    sn_fl_bound,
)
from gwbounds.pgf_core import extinction_probability, gp_from_s, moments, pgf_eval


# ---------------------------------------------------------------------------
# Threshold anchors (independent bisection targets pinned from high-accuracy
# evaluation)
# ---------------------------------------------------------------------------

def test_thresholds_s_01():
    th = gp_thresholds(0.1)
    assert th.lambda_c0 == pytest.approx(0.27857, abs=2e-5)
    assert th.lambda_c1 == pytest.approx(0.26820, abs=2e-5)
    assert th.lambda_c2 == pytest.approx(0.26967, abs=2e-5)
    assert th.lambda_c1 < th.lambda_c2 < th.lambda_c0


def test_thresholds_s_03():
    th = gp_thresholds(0.3)
    assert th.lambda_c0 == pytest.approx(0.31433, abs=2e-4)
    assert th.lambda_c1 == pytest.approx(0.30160, abs=2e-4)
    assert th.lambda_c2 == pytest.approx(0.30596, abs=2e-4)
    assert th.lambda_c1 < th.lambda_c2 < th.lambda_c0


def test_threshold_defining_properties():
    # Each critical lambda is a genuine sign-change point of its functional.
    for s in (0.1, 0.3):
        th = gp_thresholds(s)
        eps = 1e-4

        def f0(lam):
            model = gp_from_s(lam, s)
            fp = extinction_probability(model)
            fl = matching_fl(fp).to_model()
            return pgf_eval(model, 0.0) - pgf_eval(fl, 0.0)

        assert f0(th.lambda_c0 - eps) * f0(th.lambda_c0 + eps) < 0.0
        assert abs(f0(th.lambda_c0)) < 1e-8

        # lambda_c1: m * gamma - 1 changes sign.
        def mg(lam):
            fp = extinction_probability(gp_from_s(lam, s))
            return (1.0 + s) * fp.gamma - 1.0

        assert mg(th.lambda_c1 - eps) < 0.0 < mg(th.lambda_c1 + eps)


def test_small_s_approximations():
    # The linear-in-s approximations track the exact thresholds for s <= 0.3.
    for s in (0.05, 0.1, 0.2, 0.3):
        th = gp_thresholds(s)
        assert th.lambda_c0 == pytest.approx(th.lambda_c0_approx, abs=0.01)
        assert th.lambda_c1 == pytest.approx(th.lambda_c1_approx, abs=0.01)
        assert th.lambda_c2 == pytest.approx(th.lambda_c2_approx, abs=0.01)


def test_thresholds_domain():
    with pytest.raises(DomainError):
        gp_thresholds(0.0)
    with pytest.raises(DomainError):
        gp_thresholds(0.7)


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

def test_classify_poisson_limit_proven():
    d = classify_gp(0.1, 0.0)
    assert d.kind == UPPER_ON_S
    assert not d.conjectured


def test_classify_three_zones():
    th = gp_thresholds(0.1)
    assert classify_gp(0.1, 0.1).kind == UPPER_ON_S
    assert classify_gp(0.1, 0.1).conjectured
    mid = 0.5 * (th.lambda_c2 + th.lambda_c0)
    d = classify_gp(0.1, mid)
    assert d.kind == SWITCHES
    assert d.conjectured
    assert d.switch_n is not None and d.switch_n >= 1
    assert classify_gp(0.1, 0.5).kind == LOWER_ON_S


def test_classify_switch_anchor():
    # lambda = 0.276, s = 0.1: switch between generations 3 and 4.
    d = classify_gp(0.1, 0.276)
    assert d.kind == SWITCHES
    assert d.switch_n in (3, 4)


def test_classify_domain():
    with pytest.raises(DomainError):
        classify_gp(0.1, 1.0)
    with pytest.raises(DomainError):
        classify_gp(0.1, -0.2)


# ---------------------------------------------------------------------------
# Direction claims verified against exact iterates
# ---------------------------------------------------------------------------

def test_upper_zone_bound_holds_on_iterates():
    for lam in (0.05, 0.15, 0.25):
        model = gp_from_s(lam, 0.1)
        assert classify_gp(0.1, lam).kind == UPPER_ON_S
        fp = extinction_probability(model)
        x = 0.0
        for n in range(1, 100):
            x = pgf_eval(model, x)
            assert 1.0 - x <= sn_fl_bound(model, n, fp) + 1e-13, (lam, n)


def test_lower_zone_bound_holds_on_iterates():
    for lam in (0.4, 0.6, 0.9):
        model = gp_from_s(lam, 0.1)
        assert classify_gp(0.1, lam).kind == LOWER_ON_S
        fp = extinction_probability(model)
        x = 0.0
        for n in range(1, 100):
            x = pgf_eval(model, x)
            assert 1.0 - x >= sn_fl_bound(model, n, fp) - 1e-13, (lam, n)


def test_switch_zone_bound_changes_side_once():
    model = gp_from_s(0.276, 0.1)
    d = classify_gp(0.1, 0.276)
    fp = extinction_probability(model)
    x = 0.0
    sides = []
    for n in range(1, 200):
        x = pgf_eval(model, x)
        diff = (1.0 - x) - sn_fl_bound(model, n, fp)
        if abs(diff) > 1e-14:
            sides.append(1 if diff > 0 else -1)
    # Exactly one sign change: upper bound (diff < 0) for small n, then
    # lower bound (diff > 0) for large n.
    changes = sum(1 for a, b in zip(sides, sides[1:]) if a != b)
    assert changes == 1
    assert sides[0] == -1 and sides[-1] == 1
    first_pos = next(i + 1 for i, v in enumerate(sides) if v == 1)
    assert first_pos == d.switch_n


def test_mg_product_exceeds_one_beyond_c1():
    # Above lambda_c1 the mean-rate product m*gamma exceeds 1, unlike the
    # proven families.
    fp = extinction_probability(gp_from_s(0.3, 0.1))
    m = moments(gp_from_s(0.3, 0.1)).m
    assert m * fp.gamma > 1.0


def test_gp_f_values_probe():
    vals = gp_f_values(0.1, 0.276, (0.0, 0.5, 0.99))
    assert len(vals) == 3
    assert vals[0] > 0.0  # below lambda_c0, f(0) > 0 as in the Poisson limit
