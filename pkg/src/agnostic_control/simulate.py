"""Euler-Maruyama Monte Carlo simulation of dq = (a + u) dt + dW.

Paths are driven by counter-based Philox streams keyed on (seed, path index),
so results are bit-identical regardless of how paths are chunked or whether
they run serially or in parallel.  The control is evaluated at the left
endpoint of each step and is forced to zero during the observation phase
[0, t_start); the realized cost is the left-endpoint Riemann sum of
q^2 + u^2 over [t_start, T].  Tests may inject a deterministic noise array
in place of the generator.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .bayes import GaussianPrior
from .errors import BudgetError, DomainError, NonFiniteError
from .model import ProblemSpec, own_gains, value_known_a
from .performance import RegretReport, opponent_cost

MAX_TOTAL_STEPS = 10 ** 9
_CHUNK = 2048


@dataclass(frozen=True)
class SimConfig:
    spec: ProblemSpec
    a_true: float
    dt: float = 1e-3
    n_paths: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.n_paths < 1:
            raise DomainError(f"n_paths must be >= 1, got {self.n_paths}")
        n = round(self.spec.horizon / self.dt)
        if n < 1 or abs(n * self.dt - self.spec.horizon) > 1e-9 * max(1.0, self.spec.horizon):
            raise DomainError(
                f"dt={self.dt} does not divide horizon {self.spec.horizon}"
            )

    @property
    def n_steps(self) -> int:
        return round(self.spec.horizon / self.dt)


@dataclass(frozen=True)
class CostEstimate:
    mean: float
    stderr: float
    n_paths: int
    costs: np.ndarray | None = None


class Strategy:
    """Maps (q, xi, t) to a control; vectorized over paths."""

    name = "strategy"

    def control(self, q: np.ndarray, xi: np.ndarray, t: float, spec: ProblemSpec):
        raise NotImplementedError

    def describe(self) -> dict:
        return {"variant": self.name}

    def check_config(self, config: SimConfig) -> None:
        pass


class ZeroControl(Strategy):
    name = "zero_control"

    def control(self, q, xi, t, spec):
        return np.zeros_like(q)


class KnownA(Strategy):
    name = "known_a"

    def __init__(self, a: float):
        self.a = a

    def control(self, q, xi, t, spec):
        g = own_gains(t, spec)
        return -g.e2 * q - 0.5 * g.e1 * self.a

    def describe(self):
        return {"variant": self.name, "a": self.a}


class Bayes(Strategy):
    """Bayesian control for a Gaussian prior; the improper prior needs t_start > 0."""

    def __init__(self, prior: GaussianPrior):
        self.prior = prior

    @property
    def name(self):
        return "bayes_improper" if self.prior.is_improper else "bayes"

    def control(self, q, xi, t, spec):
        a_bar = xi / (t + self.prior.precision)
        g = own_gains(t, spec)
        return -g.e2 * q - 0.5 * g.e1 * a_bar

    def describe(self):
        d = {"variant": self.name}
        if not self.prior.is_improper:
            d["sigma"] = self.prior.sigma
        return d

    def check_config(self, config: SimConfig) -> None:
        if self.prior.is_improper and config.spec.t_start <= 0.0:
            raise DomainError("improper-prior strategy requires t_start > 0")


def make_strategy(
    variant: str, *, a: float | None = None, sigma: float | None = None
) -> Strategy:
    if variant == "zero_control":
        return ZeroControl()
    if variant == "known_a":
        if a is None:
            raise DomainError("known_a strategy needs the true drift a")
        return KnownA(a)
    if variant == "bayes":
        if sigma is None:
            raise DomainError("bayes strategy needs a prior width sigma")
        return Bayes(GaussianPrior(sigma))
    if variant == "bayes_improper":
        return Bayes(GaussianPrior.improper())
    raise DomainError(f"unknown strategy variant {variant!r}")


def path_noise(seed: int, path_index: int, n_steps: int) -> np.ndarray:
    """Standard-normal increments for one path from its own Philox stream."""
    key = np.array([seed, path_index], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    return rng.standard_normal(n_steps)


def _run_block(
    strategy: Strategy,
    config: SimConfig,
    noise: np.ndarray,
    record: bool = False,
):
    """Advance a block of paths; returns (costs, trajectory or None).

    noise has shape (n_paths_in_block, n_steps).  The trajectory, recorded
    only for single-path runs, has rows (t, q, xi, u) at each step start.
    """
    spec = config.spec
    dt = config.dt
    sqrt_dt = math.sqrt(dt)
    n_steps = config.n_steps
    m = noise.shape[0]
    t0 = spec.t_start

    q = np.zeros(m)
    xi = np.zeros(m)
    cost = np.zeros(m)
    rows = [] if record else None

    for k in range(n_steps):
        t = k * dt
        if t >= t0 - 1e-12:
            u = np.asarray(strategy.control(q, xi, t, spec), dtype=float)
            u = np.broadcast_to(u, q.shape)
            cost += (q * q + u * u) * dt
        else:
            u = np.zeros(m)
        if record:
            rows.append((t, float(q[0]), float(xi[0]), float(u[0])))
        dq = (config.a_true + u) * dt + sqrt_dt * noise[:, k]
        q = q + dq
        xi = xi + dq - u * dt

    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(cost))):
        raise NonFiniteError("simulation produced non-finite state")
    traj = np.array(rows) if record else None
    return cost, traj, q, xi


def simulate_path(
    strategy: Strategy,
    config: SimConfig,
    noise: np.ndarray | None = None,
    path_index: int = 0,
) -> tuple[np.ndarray, float]:
    """One path; returns (trajectory with columns t,q,xi,u, realized cost).

    A caller-supplied noise array (n_steps standard normals, e.g. all zeros)
    replaces the path's random stream.
    """
    strategy.check_config(config)
    _check_budget(config, n_paths=1)
    if noise is None:
        noise = path_noise(config.seed, path_index, config.n_steps)
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (config.n_steps,):
        raise DomainError(
            f"noise must have shape ({config.n_steps},), got {noise.shape}"
        )
    cost, traj, _, _ = _run_block(strategy, config, noise[None, :], record=True)
    return traj, float(cost[0])


def _check_budget(config: SimConfig, n_paths: int | None = None) -> None:
    n = config.n_paths if n_paths is None else n_paths
    total = n * config.n_steps
    if total > MAX_TOTAL_STEPS:
        raise BudgetError(
            f"{n} paths x {config.n_steps} steps = {total} exceeds budget {MAX_TOTAL_STEPS}"
        )


def monte_carlo_cost(
    strategy: Strategy, config: SimConfig, keep_costs: bool = False
) -> CostEstimate:
    """Mean realized cost and its standard error over independent paths."""
    strategy.check_config(config)
    _check_budget(config)
    n_steps = config.n_steps
    costs = np.empty(config.n_paths)
    for start in range(0, config.n_paths, _CHUNK):
        stop = min(start + _CHUNK, config.n_paths)
        noise = np.empty((stop - start, n_steps))
        for i in range(start, stop):
            noise[i - start] = path_noise(config.seed, i, n_steps)
        block_costs, _, _, _ = _run_block(strategy, config, noise)
        costs[start:stop] = block_costs
    mean = float(np.mean(costs))
    se = float(np.std(costs, ddof=1) / math.sqrt(config.n_paths)) if config.n_paths > 1 else math.inf
    return CostEstimate(mean, se, config.n_paths, costs if keep_costs else None)


def analytic_cost(strategy: Strategy, config: SimConfig) -> float:
    """Closed-form expected cost matching a simulated strategy, from q(0)=0."""
    spec = config.spec
    a = config.a_true
    t0 = spec.t_start
    if isinstance(strategy, ZeroControl):
        # E[q(t)^2] = a^2 t^2 + t under pure drift-plus-noise
        T = spec.horizon
        return a * a * (T ** 3 - t0 ** 3) / 3.0 + (T * T - t0 * t0) / 2.0
    if isinstance(strategy, KnownA):
        if strategy.a != a:
            raise DomainError("analytic cost for known_a assumes the strategy knows a_true")
        if t0 == 0.0:
            return value_known_a(0.0, 0.0, a, spec)
        return opponent_cost(a, spec)
    if isinstance(strategy, Bayes):
        from .performance import additive_regret, bayes_cost

        if t0 == 0.0:
            return bayes_cost(0.0, 0.0, 0.0, a, strategy.prior, spec)
        return opponent_cost(a, spec) + additive_regret(a, strategy.prior, spec)
    raise DomainError(f"no analytic reference for strategy {strategy.name!r}")


def regret_empirical(
    strategy: Strategy, a_values, config: SimConfig
) -> RegretReport:
    """Empirical additive/multiplicative regret over a drift grid.

    Our cost comes from Monte Carlo; the informed opponent's cost is exact
    (expectation of the known-a value function).  Standard errors propagate
    directly: se(AR) = se, se(MR) = se / opponent cost.
    """
    a_values = tuple(float(a) for a in a_values)
    ar, mr, ar_se, mr_se = [], [], [], []
    for a in a_values:
        est = monte_carlo_cost(strategy, replace(config, a_true=a))
        opp = opponent_cost(a, config.spec)
        ar.append(est.mean - opp)
        mr.append(est.mean / opp)
        ar_se.append(est.stderr)
        mr_se.append(est.stderr / opp)
    return RegretReport(
        a_values=a_values,
        additive=tuple(ar),
        multiplicative=tuple(mr),
        ar_worst=max(ar),
        mr_worst=max(mr),
        strategy={**strategy.describe(), "T": config.spec.horizon,
                  "T0": config.spec.t_start, "dt": config.dt,
                  "n_paths": config.n_paths, "seed": config.seed},
        additive_se=tuple(ar_se),
        multiplicative_se=tuple(mr_se),
    )


def dump_trajectory(path, trajectory: np.ndarray) -> None:
    """Write one trajectory as CSV with header t,q,xi,u."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "q", "xi", "u"])
        for row in trajectory:
            writer.writerow([format(v, ".17g") for v in row])
