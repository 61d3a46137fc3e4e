"""Population-genetics layer: mutant-frequency density, per-locus variance,
trait variance through time, and Wright-Fisher fixation probabilities."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import exp1 as scipy_exp1
from scipy.stats import binom

from gwbounds.errors import DomainError
from gwbounds.genetics import (
    TraitModel,
    WFModel,
    mutant_density,
    scaling_report,
    v1_inf,
    vg_inf,
    vg_tau,
    wf_fixation_a,
    wf_fixation_diffusion,
    wf_fixation_exact,
    within_variance,
)
from gwbounds.pgf_core import (
    FiniteThree,
    iterate_extinction,
    moments,
    poisson_from_s,
)


# ---------------------------------------------------------------------------
# Mutant-frequency density and per-locus variance
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("a", [0.1, 1.0, 5.0, 50.0])
def test_mutant_density_normalizes_to_one(a):
    # Substituting u = x/(1-x) turns the integral into int_0^inf a*e^(-a*u) du.
    val, err = quad(lambda x: mutant_density(a, x), 0.0, 1.0, limit=200)
    assert val == pytest.approx(1.0, abs=max(1e-8, 10 * err))


@pytest.mark.parametrize("a", [0.05, 0.5, 2.0, 20.0])
def test_within_variance_matches_quadrature(a):
    val, err = quad(lambda x: x * (1.0 - x) * mutant_density(a, x), 0.0, 1.0,
                    limit=200)
    assert within_variance(a) == pytest.approx(val, abs=max(1e-10, 10 * err))


def test_within_variance_bounded_by_quarter():
    # x(1-x) <= 1/4 and the density integrates to 1.
    for a in (1e-3, 0.1, 1.0, 10.0, 1e3):
        assert 0.0 < within_variance(a) < 0.25


def test_within_variance_vanishing_limits():
    assert within_variance(1e-8) < 1e-6
    assert within_variance(1e6) < 2e-6


def test_density_domain_errors():
    with pytest.raises(DomainError):
        mutant_density(0.0, 0.5)
    with pytest.raises(DomainError):
        mutant_density(1.0, 1.0)
    with pytest.raises(DomainError):
        within_variance(-1.0)


# ---------------------------------------------------------------------------
# Trait variance through time
# ---------------------------------------------------------------------------

def vg_tau_oracle(tm, model, tau, dt=1e-3):
    """Riemann-sum oracle: integrate S^([t]) * w(a_[t]) with the nearest
    integer map evaluated pointwise."""
    mom = moments(model)
    n_max = int(tau) + 1
    s_by_n = [1.0 - iterate_extinction(model, n) for n in range(n_max + 1)]
    total = 0.0
    t = 0.5 * dt
    while t < tau:
        n = int(t + 0.5)
        s_n = s_by_n[n]
        a_n = tm.pop_size * s_n / mom.m ** n
        total += dt * s_n * within_variance(a_n)
        t += dt
    return tm.theta_mut * tm.alpha ** 2 * total


def test_vg_tau_matches_riemann_oracle():
    tm = TraitModel(theta_mut=1.0, alpha=1.0, s_sel=0.1, pop_size=1000)
    model = poisson_from_s(0.1)
    for tau in (0.4, 1.0, 3.7, 10.0):
        assert vg_tau(tm, model, tau) == pytest.approx(
            vg_tau_oracle(tm, model, tau), rel=1e-3)


def test_vg_tau_anchor():
    tm = TraitModel(theta_mut=1.0, alpha=1.0, s_sel=0.1, pop_size=1000)
    assert vg_tau(tm, poisson_from_s(0.1), 10.0) == pytest.approx(0.0163582, abs=1e-6)


def test_vg_tau_monotone_in_tau():
    tm = TraitModel(theta_mut=1.0, alpha=1.0, s_sel=0.1, pop_size=1000)
    model = poisson_from_s(0.1)
    prev = 0.0
    for tau in (1.0, 2.0, 5.0, 10.0, 20.0):
        cur = vg_tau(tm, model, tau)
        assert cur > prev
        prev = cur


def test_vg_tau_scales_with_theta_and_alpha():
    base = TraitModel(theta_mut=1.0, alpha=1.0, s_sel=0.1, pop_size=1000)
    double_theta = TraitModel(theta_mut=2.0, alpha=1.0, s_sel=0.1, pop_size=1000)
    model = poisson_from_s(0.1)
    assert vg_tau(double_theta, model, 5.0) == pytest.approx(
        2.0 * vg_tau(base, model, 5.0), rel=1e-12)


def test_vg_tau_domain():
    tm = TraitModel(theta_mut=1.0, alpha=1.0, s_sel=0.1, pop_size=1000)
    with pytest.raises(DomainError):
        vg_tau(tm, poisson_from_s(0.1), 0.0)


# ---------------------------------------------------------------------------
# Asymptotic variance and response
# ---------------------------------------------------------------------------

def test_v1_inf_against_scipy():
    for n_pop, s_inf, sa in ((1000, 0.1813, 0.1), (100, 0.4, 0.2)):
        z = n_pop * s_inf
        expected = z * math.exp(z) * float(scipy_exp1(z)) / sa if z < 700 else None
        if z < 700:
            assert v1_inf(n_pop, sa, s_inf) == pytest.approx(expected, rel=1e-10)


def test_vg_inf_poisson_anchors():
    tm = TraitModel(theta_mut=1.0, alpha=1.0, s_sel=0.1, pop_size=1000)
    v = vg_inf(tm, poisson_from_s(0.1))
    assert v.v1_inf == pytest.approx(9.94386, abs=1e-5)
    assert v.leading == pytest.approx(1.75145, abs=1e-5)
    assert v.simple == pytest.approx(2.0 * (1.0 - (8.0 / 3.0) * 0.1), rel=1e-12)
    assert v.delta_mean == pytest.approx(0.146667, abs=1e-6)


def test_vg_inf_response_is_s_times_variance():
    tm = TraitModel(theta_mut=0.5, alpha=2.0, s_sel=0.05, pop_size=500)
    v = vg_inf(tm, poisson_from_s(0.1))
    assert v.delta_mean == pytest.approx(tm.s_sel * v.simple, rel=1e-12)


def test_vg_inf_no_series_family_gives_nan():
    tm = TraitModel(theta_mut=1.0, alpha=1.0, s_sel=0.1, pop_size=1000)
    model = FiniteThree(p0=0.1, p1=0.5, p2=0.2, p3=0.2)
    v = vg_inf(tm, model)
    assert v.v1_inf > 0.0 and v.leading > 0.0
    assert math.isnan(v.simple) and math.isnan(v.delta_mean)


def test_trait_model_validation():
    with pytest.raises(DomainError):
        TraitModel(theta_mut=-1.0, alpha=1.0, s_sel=0.1, pop_size=100)
    with pytest.raises(DomainError):
        TraitModel(theta_mut=1.0, alpha=0.0, s_sel=0.1, pop_size=100)
    tm = TraitModel(theta_mut=1.0, alpha=2.0, s_sel=0.05, pop_size=100)
    assert tm.fitness == pytest.approx(math.exp(0.1))


# ---------------------------------------------------------------------------
# Wright-Fisher fixation probabilities
# ---------------------------------------------------------------------------

def test_diffusion_anchors():
    # (1 - e^(-2s))/(1 - e^(-2sN)) at N = Ne = 1000.
    for s, target in ((0.2, 0.3297), (0.1, 0.1813), (0.02, 0.0392)):
        wf = WFModel(pop_size=1000, s_sel=s, effective_size=1000.0)
        assert wf_fixation_diffusion(wf) == pytest.approx(target, abs=1e-4)


def test_diffusion_small_s_approaches_neutral():
    wf = WFModel(pop_size=1000, s_sel=1e-9, effective_size=1000.0)
    assert wf_fixation_diffusion(wf) == pytest.approx(1.0 / 1000.0, rel=1e-5)


def test_diffusion_effective_size_reduces_fixation():
    full = WFModel(pop_size=1000, s_sel=0.1, effective_size=1000.0)
    reduced = WFModel(pop_size=1000, s_sel=0.1, effective_size=500.0)
    assert wf_fixation_diffusion(reduced) < wf_fixation_diffusion(full)


def test_wf_exact_n2_closed_form():
    # N = 2: from one mutant, psi = (1+s)/(2+s) and
    # q = psi^2 / (1 - 2*psi*(1-psi)).
    for s in (0.05, 0.2, 0.5):
        psi = (1.0 + s) / (2.0 + s)
        closed = psi ** 2 / (1.0 - 2.0 * psi * (1.0 - psi))
        wf = WFModel(pop_size=2, s_sel=s, effective_size=2.0)
        assert wf_fixation_exact(wf) == pytest.approx(closed, rel=1e-12)


def test_wf_exact_against_forward_chain():
    # Independent oracle: push the full state distribution forward until the
    # transient mass is gone; the mass at N is the fixation probability.
    n, s = 50, 0.1
    i = np.arange(0, n + 1)
    x = i / n
    psi = x * (1.0 + s) / (1.0 + s * x)
    transition = binom.pmf(np.arange(0, n + 1)[None, :], n, psi[:, None])
    dist = np.zeros(n + 1)
    dist[1] = 1.0
    for _ in range(20_000):
        dist = dist @ transition
    assert dist[1:n].sum() < 1e-12
    wf = WFModel(pop_size=n, s_sel=s, effective_size=float(n))
    assert wf_fixation_exact(wf) == pytest.approx(float(dist[n]), abs=1e-10)


def test_wf_exact_anchor():
    wf = WFModel(pop_size=1000, s_sel=0.1, effective_size=1000.0)
    assert wf_fixation_exact(wf) == pytest.approx(0.1761, abs=1e-4)


def test_wf_exact_below_diffusion():
    for n, s in ((100, 0.1), (500, 0.05), (1000, 0.1)):
        wf = WFModel(pop_size=n, s_sel=s, effective_size=float(n))
        assert wf_fixation_exact(wf) < wf_fixation_diffusion(wf)


def test_wf_exact_size_cap():
    with pytest.raises(DomainError):
        wf_fixation_exact(WFModel(pop_size=6000, s_sel=0.1, effective_size=6000.0))


def test_wf_fixation_a_anchors():
    assert wf_fixation_a(1000, 0.1) == pytest.approx(0.1758, abs=1e-4)
    assert wf_fixation_a(100, 0.1) == pytest.approx(0.1755, abs=1e-4)


def test_wf_fixation_a_default_tracks_exact():
    # The refined exponential form sits within 3e-3 relative of the exact
    # value, much closer than the diffusion approximation.
    for n, s in ((100, 0.1), (1000, 0.1), (1000, 0.05)):
        wf = WFModel(pop_size=n, s_sel=s, effective_size=float(n))
        exact = wf_fixation_exact(wf)
        refined = wf_fixation_a(n, s)
        diffusion = wf_fixation_diffusion(wf)
        assert abs(refined - exact) < abs(diffusion - exact)
        assert refined == pytest.approx(exact, rel=3e-3)


def test_wf_fixation_a_reduces_to_diffusion():
    wf = WFModel(pop_size=200, s_sel=0.1, effective_size=200.0)
    assert wf_fixation_a(200, 0.1, a1=2.0, a2=0.0) == pytest.approx(
        wf_fixation_diffusion(wf), rel=1e-13)


def test_wf_fixation_a_domain():
    with pytest.raises(DomainError):
        wf_fixation_a(1000, 0.0)
    with pytest.raises(DomainError):
        wf_fixation_a(1, 0.1)


# ---------------------------------------------------------------------------
# Scaling diagnostic
# ---------------------------------------------------------------------------

def test_scaling_report():
    assert scaling_report(1000, 0.1) == pytest.approx(3.0, rel=1e-12)
    assert scaling_report(10_000, 0.01) == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(DomainError):
        scaling_report(1000, 0.5, c_const=0.1)  # C <= s
