"""Closed-form solution of the scalar control problem with known drift.

The system is dq = (a + u) dt + dW with quadratic running cost
q^2 + lambda * u^2 on [T0, T].  For known drift a the value function is a
quadratic in (q, a) whose time-varying coefficients (the gain schedule)
have exact hyperbolic closed forms, here generalized to an arbitrary fuel
weight lambda via the rescaled remaining time s = (T - t) / sqrt(lambda).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError

_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class ProblemSpec:
    """Cost/horizon configuration: observe-only until t_start, control until horizon."""

    horizon: float
    t_start: float = 0.0
    fuel_weight: float = 1.0
    noise_scale: float = 1.0  # fixed by normalization; kept explicit for clarity

    def __post_init__(self):
        if not self.horizon > 0.0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if not 0.0 <= self.t_start < self.horizon:
            raise DomainError(
                f"t_start must satisfy 0 <= t_start < horizon, got {self.t_start}"
            )
        if self.fuel_weight < 1.0:
            raise DomainError(f"fuel_weight must be >= 1, got {self.fuel_weight}")
        if self.noise_scale != 1.0:
            raise DomainError("noise_scale is fixed at 1 by the problem normalization")

    def with_fuel_weight(self, lam: float) -> "ProblemSpec":
        return replace(self, fuel_weight=lam)


@dataclass(frozen=True)
class GainSchedule:
    """Values of the four value-function coefficients at a single time."""

    e2: float
    e1: float
    e0: float
    e_sharp: float


def log_cosh(x: float) -> float:
    # |x| - log 2 + log1p(e^{-2|x|}) avoids overflow of cosh for large |x|
    ax = abs(x)
    return ax - _LOG2 + math.log1p(math.exp(-2.0 * ax))


def sech(x: float) -> float:
    ax = abs(x)
    e = math.exp(-ax)
    return 2.0 * e / (1.0 + e * e)


def _check_time(t: float, spec: ProblemSpec) -> None:
    if t < 0.0 or t > spec.horizon:
        raise DomainError(f"t={t} outside [0, {spec.horizon}]")


def gains(t: float, spec: ProblemSpec) -> GainSchedule:
    """Gain schedule at time t for the spec's fuel weight.

    With s = (T - t)/sqrt(lambda):
        e2 = sqrt(lambda) tanh s
        e1 = 2 lambda (1 - sech s)
        e0 = lambda^{3/2} (s - tanh s)
        e_sharp = lambda log cosh s
    All four vanish at t = T and are nonincreasing in t.
    """
    _check_time(t, spec)
    lam = spec.fuel_weight
    sqrt_lam = math.sqrt(lam)
    s = (spec.horizon - t) / sqrt_lam
    th = math.tanh(s)
    return GainSchedule(
        e2=sqrt_lam * th,
        e1=2.0 * lam * (1.0 - sech(s)),
        e0=lam * sqrt_lam * (s - th),
        e_sharp=lam * log_cosh(s),
    )


def own_gains(t: float, spec: ProblemSpec) -> GainSchedule:
    """Gain schedule at fuel weight 1 (our side never pays the fuel tax)."""
    if spec.fuel_weight == 1.0:
        return gains(t, spec)
    return gains(t, spec.with_fuel_weight(1.0))


def value_known_a(q: float, t: float, a: float, spec: ProblemSpec) -> float:
    """Expected cost-to-go from (q, t) under the optimal known-a control."""
    g = gains(t, spec)
    return g.e2 * q * q + g.e1 * q * a + g.e0 * a * a + g.e_sharp


def control_known_a(q: float, t: float, a: float, spec: ProblemSpec) -> float:
    """Optimal control u = -e2 q - (e1/2) a, at fuel weight 1."""
    if t < spec.t_start or t > spec.horizon:
        raise DomainError(f"t={t} outside [{spec.t_start}, {spec.horizon}]")
    g = own_gains(t, spec)
    return -g.e2 * q - 0.5 * g.e1 * a
