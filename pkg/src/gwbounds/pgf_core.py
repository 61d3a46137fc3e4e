"""Offspring-distribution models and the exact machinery built on their pgfs:
evaluation, derivatives, moments, iteration of the pgf at 0 (the oracle for all
bounds), the extinction probability, and the convergence rate gamma.

All model types are immutable values; all operations are pure.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import ConvergenceError, DomainError
from .specfun import lambert_w0


def max_iterations(default: int = 100_000) -> int:
    """Iteration cap, overridable through the GWB_MAX_ITER environment variable."""
    raw = os.environ.get("GWB_MAX_ITER")
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(f"GWB_MAX_ITER must be an integer, got {raw!r}") from exc
    if value < 1:
        raise DomainError("GWB_MAX_ITER must be >= 1")
    return value


# ---------------------------------------------------------------------------
# Model types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Poisson:
    m: float

    def __post_init__(self):
        if not self.m > 1.0:
            raise DomainError(f"Poisson requires mean m > 1, got {self.m!r}")


@dataclass(frozen=True)
class Binomial:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"Binomial requires n >= 2, got {self.n!r}")
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"Binomial requires p in (0,1), got {self.p!r}")
        if not self.n * self.p > 1.0:
            raise DomainError(f"Binomial requires mean n*p > 1, got {self.n * self.p!r}")


@dataclass(frozen=True)
class NegBinomial:
    r: int
    p: float

    def __post_init__(self):
        if self.r < 1:
            raise DomainError(f"NegBinomial requires r >= 1, got {self.r!r}")
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"NegBinomial requires p in (0,1), got {self.p!r}")
        if not self.r * (1.0 - self.p) / self.p > 1.0:
            raise DomainError("NegBinomial requires mean r(1-p)/p > 1")


@dataclass(frozen=True)
class FractionalLinear:
    pi: float
    rho: float

    def __post_init__(self):
        if not 0.0 < self.pi < 1.0:
            raise DomainError(f"FractionalLinear requires pi in (0,1), got {self.pi!r}")
        if not 0.0 < self.rho < 1.0:
            raise DomainError(f"FractionalLinear requires rho in (0,1), got {self.rho!r}")
        if not self.rho < self.pi:
            raise DomainError("FractionalLinear requires rho < pi (supercritical)")


@dataclass(frozen=True)
class FiniteThree:
    p0: float
    p1: float
    p2: float
    p3: float

    def __post_init__(self):
        probs = (self.p0, self.p1, self.p2, self.p3)
        if any(p < 0.0 for p in probs):
            raise DomainError("FiniteThree probabilities must be >= 0")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise DomainError("FiniteThree probabilities must sum to 1")
        if not self.p0 > 0.0:
            raise DomainError("FiniteThree requires p0 > 0")
        if not self.p0 + self.p1 < 1.0:
            raise DomainError("FiniteThree requires p0 + p1 < 1")
        mean = 1.0 - self.p0 + self.p2 + 2.0 * self.p3
        if not mean > 1.0:
            raise DomainError(f"FiniteThree requires mean > 1, got {mean!r}")


@dataclass(frozen=True)
class GeneralizedPoisson:
    mu: float
    lam: float

    def __post_init__(self):
        if not self.mu > 0.0:
            raise DomainError(f"GeneralizedPoisson requires mu > 0, got {self.mu!r}")
        if not 0.0 <= self.lam < 1.0:
            raise DomainError(f"GeneralizedPoisson requires lambda in [0,1), got {self.lam!r}")
        if not self.mu / (1.0 - self.lam) > 1.0:
            raise DomainError("GeneralizedPoisson requires mean mu/(1-lambda) > 1")


OffspringModel = Union[Poisson, Binomial, NegBinomial, FractionalLinear,
                       FiniteThree, GeneralizedPoisson]


@dataclass(frozen=True)
class Moments:
    m: float
    var: float
    b: float
    c: float


@dataclass(frozen=True)
class FixedPoint:
    p_inf: float
    s_inf: float
    gamma: float


# ---------------------------------------------------------------------------
# Generalized Poisson internals
# ---------------------------------------------------------------------------
# The pgf is exp(mu*(t(x) - 1)) where t solves t = x*exp(lam*(t-1)); in terms
# of the Lambert function, t(x) = -W(-x*lam*exp(-lam))/lam.  Derivatives of t:
#   t'   = t / (x*(1 - lam*t))
#   t''  = lam*t^2*(2 - lam*t) / (x^2*(1 - lam*t)^3)
# and t''' follows by logarithmic differentiation of t''.

def _gp_t(x: float, lam: float) -> float:
    if x == 0.0:
        return 0.0
    return -lambert_w0(-x * lam * math.exp(-lam)) / lam


def _gp_t_derivs(x: float, lam: float):
    """Return (t, t', t'', t''') at x for the given lambda > 0."""
    if x == 0.0:
        e = math.exp(-lam)
        return 0.0, e, 2.0 * lam * e * e, 9.0 * lam * lam * e ** 3
    t = _gp_t(x, lam)
    g = 1.0 - lam * t
    t1 = t / (x * g)
    t2 = lam * t * t * (1.0 + g) / (x * x * g ** 3)
    # t'''/t'' = 2 t'/t - lam*t'/(1+g) - 2/x + 3 lam*t'/g
    t3 = t2 * (2.0 * t1 / t - lam * t1 / (1.0 + g) - 2.0 / x + 3.0 * lam * t1 / g)
    return t, t1, t2, t3


# ---------------------------------------------------------------------------
# pgf evaluation and derivatives
# ---------------------------------------------------------------------------

def pgf_eval(model: OffspringModel, x: float) -> float:
    """phi(x) for x in [0,1]."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"pgf_eval requires x in [0,1], got {x!r}")
    if isinstance(model, Poisson):
        return math.exp(-model.m * (1.0 - x))
    if isinstance(model, Binomial):
        return (1.0 - model.p + model.p * x) ** model.n
    if isinstance(model, NegBinomial):
        return model.p ** model.r / (1.0 - (1.0 - model.p) * x) ** model.r
    if isinstance(model, FractionalLinear):
        return (model.rho + x * (1.0 - model.pi - model.rho)) / (1.0 - x * model.pi)
    if isinstance(model, FiniteThree):
        return model.p0 + model.p1 * x + model.p2 * x * x + model.p3 * x ** 3
    if isinstance(model, GeneralizedPoisson):
        if model.lam == 0.0:
            return math.exp(-model.mu * (1.0 - x))
        if x == 0.0:
            return math.exp(-model.mu)
        t = _gp_t(x, model.lam)
        return math.exp(model.mu * (t - 1.0))
    raise DomainError(f"unknown model {model!r}")


def pgf_derivative(model: OffspringModel, x: float, order: int) -> float:
    """Closed-form derivative phi^(order)(x) for order in {1, 2, 3}."""
    if order not in (1, 2, 3):
        raise DomainError(f"order must be in {{1,2,3}}, got {order!r}")
    # x < 0 is allowed: the closed forms extend analytically below 0, which
    # the Quine lower bound needs when evaluating phi'''(1 - 2*beta).
    if not x <= 1.0:
        raise DomainError(f"pgf_derivative requires x <= 1, got {x!r}")
    if isinstance(model, Poisson):
        return model.m ** order * math.exp(-model.m * (1.0 - x))
    if isinstance(model, Binomial):
        n, p = model.n, model.p
        coef = 1.0
        for i in range(order):
            coef *= n - i
        if coef <= 0.0:
            return 0.0
        return coef * p ** order * (1.0 - p + p * x) ** (n - order)
    if isinstance(model, NegBinomial):
        r, p = model.r, model.p
        q = 1.0 - p
        coef = 1.0
        for i in range(order):
            coef *= r + i
        return coef * q ** order * p ** r / (1.0 - q * x) ** (r + order)
    if isinstance(model, FractionalLinear):
        pi, rho = model.pi, model.rho
        b = (1.0 - pi) * (1.0 - rho) / pi
        return b * math.factorial(order) * pi ** order / (1.0 - pi * x) ** (order + 1)
    if isinstance(model, FiniteThree):
        if order == 1:
            return model.p1 + 2.0 * model.p2 * x + 3.0 * model.p3 * x * x
        if order == 2:
            return 2.0 * model.p2 + 6.0 * model.p3 * x
        return 6.0 * model.p3
    if isinstance(model, GeneralizedPoisson):
        mu, lam = model.mu, model.lam
        if lam == 0.0:
            return mu ** order * math.exp(-mu * (1.0 - x))
        t, t1, t2, t3 = _gp_t_derivs(x, lam)
        phi = math.exp(mu * (t - 1.0))
        if order == 1:
            return phi * mu * t1
        if order == 2:
            return phi * (mu * t2 + (mu * t1) ** 2)
        return phi * (mu * t3 + 3.0 * mu * mu * t1 * t2 + (mu * t1) ** 3)
    raise DomainError(f"unknown model {model!r}")


def moments(model: OffspringModel) -> Moments:
    """Mean, variance, b = phi''(1-) and c = phi'''(1-)."""
    m = pgf_derivative(model, 1.0, 1)
    b = pgf_derivative(model, 1.0, 2)
    c = pgf_derivative(model, 1.0, 3)
    return Moments(m=m, var=b + m - m * m, b=b, c=c)


# ---------------------------------------------------------------------------
# Extinction probability and iteration
# ---------------------------------------------------------------------------

def _root_solve_p_inf(model: OffspringModel) -> float:
    # g(x) = phi(x) - x changes sign exactly once in (0,1) for a supercritical
    # pgf: bracketed bisection to width 1e-6, then Newton polish to 1e-14.
    lo, hi = 0.0, 1.0 - 1e-9
    g_lo = pgf_eval(model, lo) - lo
    g_hi = pgf_eval(model, hi) - hi
    if g_lo <= 0.0 or g_hi >= 0.0:
        raise ConvergenceError("extinction root is not bracketed; pathological parameters")
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if pgf_eval(model, mid) - mid > 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    prev_step = math.inf
    for _ in range(100):
        g = pgf_eval(model, x) - x
        dg = pgf_derivative(model, x, 1) - 1.0
        step = g / dg
        x -= step
        # Converged, or stalled at the rounding-noise floor of phi(x) - x
        # (steps stop contracting; near-critical models amplify that noise
        # through the small slope phi'(x) - 1).
        if abs(step) <= 1e-14 or (abs(step) < 1e-9 and abs(step) >= 0.5 * prev_step):
            break
        prev_step = abs(step)
    else:
        raise ConvergenceError("Newton polish for extinction probability did not converge")
    return min(max(x, 0.0), 1.0)


def extinction_probability(model: OffspringModel) -> FixedPoint:
    """The fixed point P_inf of phi in (0,1) together with gamma = phi'(P_inf)."""
    if isinstance(model, Poisson):
        m = model.m
        p_inf = -lambert_w0(-m * math.exp(-m)) / m
    elif isinstance(model, FractionalLinear):
        p_inf = model.rho / model.pi
    elif isinstance(model, FiniteThree):
        if model.p3 > 0.0:
            s = model.p2 + model.p3
            p_inf = (math.sqrt(4.0 * model.p0 * model.p3 + s * s) - s) / (2.0 * model.p3)
        else:
            p_inf = model.p0 / model.p2
    else:
        p_inf = _root_solve_p_inf(model)
    gamma = pgf_derivative(model, p_inf, 1)
    return FixedPoint(p_inf=p_inf, s_inf=1.0 - p_inf, gamma=gamma)


def binomial_xi(model: Binomial) -> float:
    """xi = P_inf^(1/n), the reparameterization used by the closed-form gamma."""
    return extinction_probability(model).p_inf ** (1.0 / model.n)


def negbinomial_zeta(model: NegBinomial) -> float:
    """zeta = P_inf^(1/r)."""
    return extinction_probability(model).p_inf ** (1.0 / model.r)


def iterate_extinction(model: OffspringModel, n: int) -> float:
    """P^(n) = phi^(n)(0), the probability of extinction by generation n."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n!r}")
    x = 0.0
    for _ in range(n):
        x = pgf_eval(model, x)
    return x


def survival_curve(model: OffspringModel, n_max: int) -> Sequence[float]:
    """[S^(0), ..., S^(n_max)] with S^(n) = 1 - phi^(n)(0)."""
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max!r}")
    out = [1.0]
    x = 0.0
    for _ in range(n_max):
        x = pgf_eval(model, x)
        out.append(1.0 - x)
    return out


# ---------------------------------------------------------------------------
# Constructors for slightly supercritical families with mean 1 + s
# ---------------------------------------------------------------------------

def poisson_from_s(s: float) -> Poisson:
    return Poisson(m=1.0 + s)


def binomial_from_s(n: int, s: float) -> Binomial:
    return Binomial(n=n, p=(1.0 + s) / n)


def negbinomial_from_s(r: int, s: float) -> NegBinomial:
    return NegBinomial(r=r, p=r / (r + 1.0 + s))


def gp_from_s(lam: float, s: float) -> GeneralizedPoisson:
    return GeneralizedPoisson(mu=(1.0 + s) * (1.0 - lam), lam=lam)


def fl_from_s(pi: float, s: float) -> FractionalLinear:
    return FractionalLinear(pi=pi, rho=pi * (1.0 + s) - s)
