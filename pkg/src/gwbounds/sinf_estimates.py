"""Bounds and small-s series expansions for the eventual survival probability
S_inf of a slightly supercritical process with mean m = 1 + s: the simple
moment bound beta, Quine's two-sided bounds, the Daley-Narayan upper bound,
the generalized Haldane approximation theta*s, and the expansions of S_inf and
of the convergence rate gamma up to third order in s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .errors import ApplicabilityError, DomainError
from .pgf_core import (
    Binomial,
    FractionalLinear,
    GeneralizedPoisson,
    Moments,
    NegBinomial,
    OffspringModel,
    Poisson,
    moments,
    pgf_derivative,
)


@dataclass(frozen=True)
class MuDerivatives:
    """Mixed partial derivatives mu_kl of phi(x; s) at (x, s) = (1, 0) for a
    family parameterized so that the mean is 1 + s."""
    mu20: float
    mu21: float
    mu22: float
    mu30: float
    mu31: float
    mu40: float

    def __post_init__(self):
        if not self.mu20 > 0.0:
            raise DomainError(f"mu20 must be > 0, got {self.mu20!r}")
        if self.mu30 < 0.0:
            raise DomainError(f"mu30 must be >= 0, got {self.mu30!r}")


@dataclass(frozen=True)
class SinfBounds:
    """All bounds/approximations of S_inf for one model at its current s."""
    beta: float
    quine_lower: Optional[float]
    quine_upper: Optional[float]
    dn_upper: Optional[float]
    series3: float
    haldane: float
    exact: float


@dataclass(frozen=True)
class SeriesCoeffs:
    theta: float
    delta2: float
    delta3: float
    gamma2: float
    gamma3: float


def mu_derivatives_poisson() -> MuDerivatives:
    return MuDerivatives(mu20=1.0, mu21=2.0, mu22=2.0, mu30=1.0, mu31=3.0, mu40=1.0)


def mu_derivatives_binomial(n: int) -> MuDerivatives:
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n!r}")
    a = (n - 1) / n
    b = (n - 1) * (n - 2) / n ** 2
    c = (n - 1) * (n - 2) * (n - 3) / n ** 3
    return MuDerivatives(mu20=a, mu21=2.0 * a, mu22=2.0 * a, mu30=b, mu31=3.0 * b, mu40=c)


def mu_derivatives_negbinomial(r: int) -> MuDerivatives:
    if r < 1:
        raise DomainError(f"r must be >= 1, got {r!r}")
    a = (r + 1) / r
    b = (r + 1) * (r + 2) / r ** 2
    c = (r + 1) * (r + 2) * (r + 3) / r ** 3
    return MuDerivatives(mu20=a, mu21=2.0 * a, mu22=2.0 * a, mu30=b, mu31=3.0 * b, mu40=c)


def mu_derivatives_gp(lam: float) -> MuDerivatives:
    if not 0.0 <= lam < 1.0:
        raise DomainError(f"lam must be in [0, 1), got {lam!r}")
    u = 1.0 - lam
    return MuDerivatives(
        mu20=1.0 / u ** 2,
        mu21=1.0 + 1.0 / u ** 2,
        mu22=2.0,
        mu30=(1.0 + 2.0 * lam) / u ** 4,
        mu31=(3.0 - 3.0 * lam ** 2 + 4.0 * lam ** 3 - lam ** 4) / u ** 4,
        mu40=(1.0 + lam * (6.0 + 9.0 * lam - lam ** 3)) / u ** 6,
    )


def mu_derivatives_fl(pi: float) -> MuDerivatives:
    if not 0.0 < pi < 1.0:
        raise DomainError(f"pi must be in (0, 1), got {pi!r}")
    a = 2.0 * pi / (1.0 - pi)
    b = 6.0 * pi ** 2 / (1.0 - pi) ** 2
    c = 24.0 * pi ** 3 / (1.0 - pi) ** 3
    return MuDerivatives(mu20=a, mu21=a, mu22=0.0, mu30=b, mu31=b, mu40=c)


def mu_derivatives(model: OffspringModel) -> MuDerivatives:
    """Mu table for the s-parameterized family passing through the given
    model (the family member with mean 1 + s for varying s)."""
    if isinstance(model, Poisson):
        return mu_derivatives_poisson()
    if isinstance(model, Binomial):
        return mu_derivatives_binomial(model.n)
    if isinstance(model, NegBinomial):
        return mu_derivatives_negbinomial(model.r)
    if isinstance(model, GeneralizedPoisson):
        return mu_derivatives_gp(model.lam)
    if isinstance(model, FractionalLinear):
        return mu_derivatives_fl(model.pi)
    raise DomainError(f"no mu table for {model!r}")


def sinf_series(mu: MuDerivatives) -> SeriesCoeffs:
    """Coefficients of S_inf = theta*s - delta2*s^2 + delta3*s^3 + O(s^4) and
    gamma = 1 - s + gamma2*s^2 - gamma3*s^3 + O(s^4)."""
    m2, m21, m22, m3, m31, m4 = (mu.mu20, mu.mu21, mu.mu22, mu.mu30, mu.mu31, mu.mu40)
    theta = 2.0 / m2
    delta2 = (6.0 * m2 * m21 - 4.0 * m3) / (3.0 * m2 ** 3)
    delta3 = (18.0 * m2 ** 2 * m21 ** 2 - 9.0 * m2 ** 3 * m22 + 16.0 * m3 ** 2
              - 36.0 * m2 * m21 * m3 + 12.0 * m2 ** 2 * m31 - 6.0 * m2 * m4) / (9.0 * m2 ** 5)
    gamma2 = 2.0 * m3 / (3.0 * m2 ** 2)
    # gamma3 from composing gamma(s) = phi^(1,0)(1 - S(s); s) with the S_inf
    # series; the closed combination below reproduces the per-family values.
    gamma3 = (theta * m22 / 2.0 - delta2 * m21 + delta3 * m2
              - theta ** 2 * m31 / 2.0 + theta * delta2 * m3 + theta ** 3 * m4 / 6.0)
    return SeriesCoeffs(theta=theta, delta2=delta2, delta3=delta3,
                        gamma2=gamma2, gamma3=gamma3)


# `family` arguments below accept a SeriesCoeffs, a MuDerivatives, or any
# offspring model with a mu table.

def _coeffs_of(family) -> SeriesCoeffs:
    if isinstance(family, SeriesCoeffs):
        return family
    if isinstance(family, MuDerivatives):
        return sinf_series(family)
    return sinf_series(mu_derivatives(family))


def sinf_series_eval(family, s: float, order: int = 3) -> float:
    """Series value of S_inf truncated at the given order:
    theta*s - delta2*s^2 + delta3*s^3."""
    if order not in (1, 2, 3):
        raise DomainError(f"order must be in {{1,2,3}}, got {order!r}")
    c = _coeffs_of(family)
    out = c.theta * s
    if order >= 2:
        out -= c.delta2 * s ** 2
    if order >= 3:
        out += c.delta3 * s ** 3
    return out


def gamma_series_eval(family, s: float, order: int = 3) -> float:
    """Series value of gamma truncated at the given order:
    1 - s + gamma2*s^2 - gamma3*s^3."""
    if order not in (1, 2, 3):
        raise DomainError(f"order must be in {{1,2,3}}, got {order!r}")
    c = _coeffs_of(family)
    out = 1.0 - s
    if order >= 2:
        out += c.gamma2 * s ** 2
    if order >= 3:
        out -= c.gamma3 * s ** 3
    return out


# ---------------------------------------------------------------------------
# Classical bounds on S_inf
# ---------------------------------------------------------------------------

def _moments_of(mo) -> Moments:
    return mo if isinstance(mo, Moments) else moments(mo)


def beta_bound(mo) -> float:
    """beta = 2(m-1)/phi''(1), a simple lower bound for small s.  Accepts a
    Moments value or an offspring model."""
    mom = _moments_of(mo)
    if not mom.b > 0.0:
        raise DomainError(f"phi''(1) must be > 0, got {mom.b!r}")
    return 2.0 * (mom.m - 1.0) / mom.b


def quine_bounds(model: OffspringModel) -> Tuple[float, float]:
    """Quine's two-sided bounds (lower, upper) on S_inf; requires
    2*beta < min(1, 3b/(2c))."""
    mom = moments(model)
    b, c = mom.b, mom.c
    if not (b > 0.0 and c > 0.0):
        raise DomainError(f"require phi''(1) > 0 and phi'''(1) > 0, got b={b!r}, c={c!r}")
    beta = beta_bound(mom)
    limit = min(1.0, 3.0 * b / (2.0 * c))
    if not 2.0 * beta < limit:
        raise ApplicabilityError("2*beta < min(1, 3b/(2c))", 2.0 * beta, limit)
    lower = beta + beta ** 2 * pgf_derivative(model, 1.0 - 2.0 * beta, 3) / (3.0 * b)
    upper = beta + beta ** 2 * (c / (3.0 * b)) * (1.0 - 4.0 * c * beta / (3.0 * b)) ** -1.5
    return lower, upper


def dn_upper(mo) -> float:
    """The Daley-Narayan upper bound on S_inf; requires 8c(m-1) < 3b^2.
    Accepts a Moments value or an offspring model."""
    mom = _moments_of(mo)
    b, c, m = mom.b, mom.c, mom.m
    if not (b > 0.0 and c > 0.0):
        raise DomainError(f"require phi''(1) > 0 and phi'''(1) > 0, got b={b!r}, c={c!r}")
    if not 8.0 * c * (m - 1.0) < 3.0 * b * b:
        raise ApplicabilityError("8c(m-1) < 3b^2", 8.0 * c * (m - 1.0), 3.0 * b * b)
    return (3.0 * b - 3.0 * math.sqrt(b * b - (8.0 / 3.0) * c * (m - 1.0))) / (2.0 * c)


# ---------------------------------------------------------------------------
# Series-based approximations for convergence times and P^(n)
# ---------------------------------------------------------------------------

def t_ser(family, s: float, eps: float) -> int:
    """Series approximation of the convergence time:
    ceil((1/s - 1/2 + gamma2) * ln(1 + 1/eps) - theta)."""
    if not s > 0.0:
        raise DomainError(f"s must be > 0, got {s!r}")
    if not eps > 0.0:
        raise DomainError(f"eps must be > 0, got {eps!r}")
    c = _coeffs_of(family)
    return math.ceil((1.0 / s - 0.5 + c.gamma2) * math.log1p(1.0 / eps) - c.theta)


def t_simple(s: float, eps: float) -> int:
    """Leading-order approximation ceil(ln(1 + 1/eps)/s)."""
    if not (s > 0.0 and eps > 0.0):
        raise DomainError(f"require s > 0 and eps > 0, got s={s!r}, eps={eps!r}")
    return math.ceil(math.log1p(1.0 / eps) / s)


def pn_ratio_series(family, s: float, n: int) -> float:
    """First-order approximation of P^(n)/P_inf, accurate when s*n < 1:
    1 - theta/(n + theta) + n*(theta*(n+1) + 2*delta2 - 2*theta*gamma2)
    / (2*(n + theta)^2) * s."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n!r}")
    c = _coeffs_of(family)
    th = c.theta
    lead = 1.0 - th / (n + th)
    corr = n * (th * (n + 1.0) + 2.0 * c.delta2 - 2.0 * th * c.gamma2) \
        / (2.0 * (n + th) ** 2)
    return lead + corr * s


def sinf_bounds_all(model: OffspringModel, s: float) -> SinfBounds:
    """Every bound/approximation of S_inf for one model whose mean is 1 + s.

    quine_lower and quine_upper are evaluated whenever the expressions are
    real-valued (the guaranteed-bound condition of quine_bounds may fail);
    dn_upper is None when its applicability condition fails."""
    from .pgf_core import extinction_probability
    mom = moments(model)
    c = _coeffs_of(model)
    beta = beta_bound(mom)
    ql = beta + beta ** 2 * pgf_derivative(model, 1.0 - 2.0 * beta, 3) / (3.0 * mom.b)
    radicand = 1.0 - 4.0 * mom.c * beta / (3.0 * mom.b)
    if radicand > 0.0:
        qu = beta + beta ** 2 * (mom.c / (3.0 * mom.b)) * radicand ** -1.5
    else:
        qu = None
    try:
        dn = dn_upper(mom)
    except ApplicabilityError:
        dn = None
    return SinfBounds(
        beta=beta,
        quine_lower=ql,
        quine_upper=qu,
        dn_upper=dn,
        series3=sinf_series_eval(c, s),
        haldane=c.theta * s,
        exact=extinction_probability(model).s_inf,
    )
