"""Generalized information bottleneck with decision-theoretic utility measures."""

from .decision import (
    DecisionRule,
    FiniteActions,
    LossFunction,
    SimplexActions,
    alpha_loss,
    arimoto_conditional_entropy,
    bayes_decision_rule,
    bayes_risk,
    brute_force_optimal_risk,
    evpi,
    evsi,
    log_loss,
    optimal_bayes_risk,
    scoring_rule,
    squared_error_loss,
    zero_one_loss,
)
from .functionals import (
    GINI,
    SHANNON,
    VARIANCE,
    ConcaveFunctional,
    get_functional,
    h_conditional,
    h_mutual_information,
    induced_loss,
    register_functional,
    variational_objective,
)
from .prob import (
    Alphabet,
    Channel,
    Distribution,
    Joint,
    compose_markov,
    conditional_shannon_entropy,
    kl_divergence,
    marginal_x,
    marginal_y,
    mi_variational_gap,
    mutual_information,
    posterior,
    push_channel,
    shannon_entropy,
)
from .solver import (
    ConvergenceReport,
    SolverConfig,
    SolverState,
    objective,
    random_initial_channel,
    solve,
    update_p,
    update_q,
    update_r,
)
from .sweep import SweepConfig, TradeoffPoint, reproduce_paper, run_sweep

__version__ = "0.1.0"
