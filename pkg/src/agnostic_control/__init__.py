"""Optimal and regret-minimizing control of the scalar drift-learning system
dq = (a + u) dt + dW: closed-form known-drift control, Gaussian-prior
Bayesian control, the additive / multiplicative / fuel-tax regret solvers,
and a Monte Carlo simulator that validates every analytic formula."""

__version__ = "0.1.0"

from .bayes import ControlState, GaussianPrior, control_bayes, posterior, xi_update
from .errors import (
    BudgetError,
    DomainError,
    NoRootError,
    NonFiniteError,
    QuadratureError,
    SingularityError,
)
from .model import (
    GainSchedule,
    ProblemSpec,
    control_known_a,
    gains,
    value_known_a,
)
from .performance import (
    A_GRID_DEFAULT,
    RegretReport,
    additive_regret,
    bayes_cost,
    fueltax_ratio,
    multiplicative_regret,
    multiplicative_regret_limit,
    opponent_cost,
    perf_coeffs,
    perf_coeffs_rk4,
)
from .simulate import (
    Bayes,
    CostEstimate,
    KnownA,
    SimConfig,
    Strategy,
    ZeroControl,
    make_strategy,
    monte_carlo_cost,
    regret_empirical,
    simulate_path,
)
from .solvers import (
    SolveResult,
    SweepTable,
    certify_constant_mr,
    find_root,
    solve_fueltax,
    solve_sigma_mr,
    sweep,
    worst_case_mr,
)
