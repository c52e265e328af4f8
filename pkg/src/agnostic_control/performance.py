"""Performance of the Bayesian strategy for a fixed true drift.

The expected cost-to-go of the Bayesian controller when the true drift is a
adds two time-dependent corrections F0, F# to the known-a value function:

    cost = e2 q^2 + e1 q a + e0 a^2 + F0(t) (a_bar - a)^2 + F#(t)

with (writing p = sigma^-2, p = 0 for the improper prior)

    F0(t) = (t + p)^2 * I0(t),   I0(t) = int_t^T e1(tau)^2 / (4 (tau+p)^2) dtau
    F#(t) = e_sharp(t) + int_t^T (tau - t) e1(tau)^2 / (4 (tau+p)^2) dtau.

The F# form follows from swapping the order of integration in its defining
double integral; an independent backward RK4 integration of the coefficient
ODEs is provided as a cross-check (perf_coeffs_rk4).

From these come the three regret functionals: additive regret (requires an
observation phase t_start > 0), multiplicative regret (competitive ratio,
t_start = 0), and the fuel-tax cost ratio against an opponent whose control
effort is taxed at weight lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .bayes import GaussianPrior
from .errors import DomainError, QuadratureError, SingularityError
from .model import ProblemSpec, gains, own_gains, sech

#: Default symmetric drift grid: covers both the small-a (F#-dominated) and
#: large-a (F0-dominated) regimes; all regret formulas depend on a^2 only.
A_GRID_DEFAULT = (0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0)

_QUAD_EPSREL = 1e-10
_QUAD_EPSABS = 1e-14


@dataclass(frozen=True)
class RegretReport:
    """Per-drift regret values plus worst-case summaries for one strategy."""

    a_values: tuple[float, ...]
    additive: tuple[float, ...] | None
    multiplicative: tuple[float, ...] | None
    ar_worst: float | None
    mr_worst: float | None
    strategy: dict
    additive_se: tuple[float, ...] | None = None
    multiplicative_se: tuple[float, ...] | None = None


def _e1_sq(tau: float, horizon: float) -> float:
    e1 = 2.0 * (1.0 - sech(horizon - tau))
    return e1 * e1


def _quad(f, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    val, abserr = quad(f, lo, hi, epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL, limit=200)
    if abserr > max(_QUAD_EPSREL * abs(val), 100.0 * _QUAD_EPSABS):
        raise QuadratureError(
            f"quadrature error estimate {abserr} too large for value {val}"
        )
    return val


@lru_cache(maxsize=16384)
def _coeffs_cached(t: float, precision: float, horizon: float) -> tuple[float, float]:
    # Substitute v = log(tau + p): d tau / (tau + p)^2 = e^{-v} dv.  The raw
    # integrand has a near-singular 1/(tau+p)^2 peak when p is tiny; in log
    # coordinates it is smooth for every prior width.
    p = precision
    lo = math.log(t + p)
    hi = math.log(horizon + p)

    def i0_integrand(v: float) -> float:
        tau = math.exp(v) - p
        return _e1_sq(tau, horizon) * 0.25 * math.exp(-v)

    i0 = _quad(i0_integrand, lo, hi)
    f0 = (t + p) ** 2 * i0

    def tail_integrand(v: float) -> float:
        tau = math.exp(v) - p
        return (tau - t) * _e1_sq(tau, horizon) * 0.25 * math.exp(-v)

    tail = _quad(tail_integrand, lo, hi)
    e_sharp = gains(t, ProblemSpec(horizon=horizon)).e_sharp
    f_sharp = e_sharp + tail
    return f0, f_sharp


def perf_coeffs(t: float, prior: GaussianPrior, spec: ProblemSpec) -> tuple[float, float]:
    """(F0(t), F#(t)) for the given prior, by adaptive quadrature."""
    if t < 0.0 or t > spec.horizon:
        raise DomainError(f"t={t} outside [0, {spec.horizon}]")
    if prior.is_improper and t <= 0.0:
        raise SingularityError("F# diverges (logarithmically) as t -> 0 for the improper prior")
    return _coeffs_cached(float(t), prior.precision, spec.horizon)


def perf_coeffs_rk4(
    t: float, prior: GaussianPrior, spec: ProblemSpec, n_steps: int = 8000
) -> tuple[float, float]:
    """Independent evaluation of (F0, F#): backward RK4 on the coefficient ODEs.

        dF0/dt = 2 F0 / (t + p) - e1^2 / 4
        dF#/dt = -e2 - F0 / (t + p)^2

    integrated from t=T (where both vanish) down to t.  Used to cross-check
    perf_coeffs; the two must agree to ~1e-8 relative.
    """
    if t < 0.0 or t > spec.horizon:
        raise DomainError(f"t={t} outside [0, {spec.horizon}]")
    if prior.is_improper and t <= 0.0:
        raise SingularityError("improper-prior coefficients undefined at t=0")
    p = prior.precision
    T = spec.horizon

    def rhs(tau: float, y: np.ndarray) -> np.ndarray:
        # rounding in the step loop can push tau a hair outside [0, T]
        g = own_gains(min(max(tau, 0.0), T), spec)
        d = tau + p
        return np.array(
            [2.0 * y[0] / d - 0.25 * g.e1 * g.e1, -g.e2 - y[0] / (d * d)]
        )

    h = (t - T) / n_steps  # negative: integrating backwards
    y = np.zeros(2)
    tau = T
    for _ in range(n_steps):
        k1 = rhs(tau, y)
        k2 = rhs(tau + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(tau + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(tau + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tau += h
    return float(y[0]), float(y[1])


def bayes_cost(
    q: float, xi: float, t: float, a: float, prior: GaussianPrior, spec: ProblemSpec
) -> float:
    """Expected cost-to-go of the Bayesian strategy when the true drift is a."""
    g = own_gains(t, spec)
    if t == spec.horizon:
        return 0.0
    f0, f_sharp = perf_coeffs(t, prior, spec)
    w = t + prior.precision
    if w <= 0.0:
        raise SingularityError("posterior mean undefined at t=0 for the improper prior")
    a_bar = xi / w
    d = a_bar - a
    return g.e2 * q * q + g.e1 * q * a + g.e0 * a * a + f0 * d * d + f_sharp


def additive_regret(a: float, prior: GaussianPrior, spec: ProblemSpec) -> float:
    """Expected additive regret of the Bayesian strategy started from q(0)=0.

    Requires an observation phase t_start > 0 (the regret diverges as
    t_start -> 0).  For the improper prior the result is independent of a.
    """
    t0 = spec.t_start
    if t0 <= 0.0:
        raise DomainError("additive regret requires t_start > 0 (it diverges at 0)")
    f0, f_sharp = perf_coeffs(t0, prior, spec)
    e_sharp = own_gains(t0, spec).e_sharp
    if prior.is_improper:
        return f0 / t0 + f_sharp - e_sharp
    p = prior.precision
    weight = (t0 + a * a * p * p) / (t0 + p) ** 2
    return f0 * weight + f_sharp - e_sharp


def multiplicative_regret(a: float, prior: GaussianPrior, spec: ProblemSpec) -> float:
    """Competitive ratio of the Bayesian strategy vs the informed opponent, t_start=0."""
    if spec.t_start != 0.0:
        raise DomainError("multiplicative regret is defined for t_start = 0")
    if prior.is_improper:
        raise DomainError("multiplicative regret needs a proper prior (t_start = 0)")
    g = own_gains(0.0, spec)
    f0, f_sharp = perf_coeffs(0.0, prior, spec)
    a2 = a * a
    return ((g.e0 + f0) * a2 + f_sharp) / (g.e0 * a2 + g.e_sharp)


def multiplicative_regret_limit(prior: GaussianPrior, spec: ProblemSpec) -> float:
    """The a -> infinity limit of the competitive ratio (t_start = 0)."""
    if spec.t_start != 0.0:
        raise DomainError("multiplicative regret is defined for t_start = 0")
    g = own_gains(0.0, spec)
    f0, _ = perf_coeffs(0.0, prior, spec)
    return (g.e0 + f0) / g.e0


def fueltax_ratio(
    a: float, prior: GaussianPrior, lambda_opp: float, spec: ProblemSpec
) -> float:
    """Ratio of our (untaxed) Bayesian cost to the informed opponent's cost
    at fuel weight lambda_opp, both from (q=0, t=0)."""
    if spec.t_start != 0.0:
        raise DomainError("fuel-tax ratio is defined for t_start = 0")
    if lambda_opp < 1.0:
        raise DomainError(f"opponent fuel weight must be >= 1, got {lambda_opp}")
    g1 = own_gains(0.0, spec)
    f0, f_sharp = perf_coeffs(0.0, prior, spec)
    g_lam = gains(0.0, spec.with_fuel_weight(lambda_opp))
    a2 = a * a
    return ((g1.e0 + f0) * a2 + f_sharp) / (g_lam.e0 * a2 + g_lam.e_sharp)


def opponent_cost(a: float, spec: ProblemSpec, fuel_weight: float = 1.0) -> float:
    """Expected total cost of the informed opponent started from q(0)=0.

    The opponent also observes only on [0, t_start]; its cost is the
    expectation of the known-a value function over q(t_start) ~ N(a t0, t0).
    """
    t0 = spec.t_start
    g = gains(t0, spec.with_fuel_weight(fuel_weight))
    return (
        g.e2 * (a * a * t0 * t0 + t0)
        + g.e1 * a * a * t0
        + g.e0 * a * a
        + g.e_sharp
    )


def mr_general(a: float, prior: GaussianPrior, spec: ProblemSpec) -> float:
    """Competitive ratio allowing an observation phase t_start > 0."""
    if spec.t_start == 0.0:
        return multiplicative_regret(a, prior, spec)
    return 1.0 + additive_regret(a, prior, spec) / opponent_cost(a, spec)


def mr_general_limit(prior: GaussianPrior, spec: ProblemSpec) -> float:
    """The a -> infinity limit of mr_general."""
    if spec.t_start == 0.0:
        return multiplicative_regret_limit(prior, spec)
    t0 = spec.t_start
    g = own_gains(t0, spec)
    denom = g.e2 * t0 * t0 + g.e1 * t0 + g.e0
    if prior.is_improper:
        return 1.0
    f0, _ = perf_coeffs(t0, prior, spec)
    p = prior.precision
    return 1.0 + f0 * p * p / (t0 + p) ** 2 / denom
