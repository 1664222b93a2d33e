"""Bayes risks, Bayes decision rules, EVSI and EVPI on finite problems.

Joints passed to this module are laid out with rows indexed by the target Y
and columns by the observation T (``joint_yt.mass[y, t] = p(y, t)``).

A decision either picks one of finitely many actions (:class:`FiniteActions`)
or reports a distribution over Y (:class:`SimplexActions`).  For the latter the
per-observation minimization is only available in closed form; losses carry a
``bayes_action`` map from a belief ``p`` over Y to the minimizing report.
:func:`brute_force_optimal_risk` is the grid-search oracle for checking those
closed forms.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AlphaOutOfRange, GridTooCoarseWarning, NumericYRequired, UnsupportedActionSpace
from .functionals import expected_loss, get_functional, loss_table, numeric_values_for
from .prob import Alphabet, Distribution, Joint, as_distribution, as_joint, entropy_array


@dataclass(frozen=True)
class FiniteActions:
    alphabet: Alphabet


@dataclass(frozen=True)
class SimplexActions:
    alphabet: Alphabet


@dataclass(frozen=True)
class LossFunction:
    """Loss ``l(y, a)``.

    ``table(actions)`` returns ``L[i, j] = l(y_j, actions[i])``.  Actions are
    integer indices for :class:`FiniteActions` and rows of a matrix of
    distributions for :class:`SimplexActions`.
    """

    name: str
    action_space: FiniteActions | SimplexActions
    table: Callable[[np.ndarray], np.ndarray]
    bayes_action: Callable[[np.ndarray], np.ndarray] | None = None
    proper: bool = False

    @property
    def simplex(self) -> bool:
        return isinstance(self.action_space, SimplexActions)

    def __call__(self, y: int, a) -> float:
        if self.simplex:
            return float(self.table(np.asarray(a, dtype=float)[None, :])[0, y])
        return float(self.table(np.array([a]))[0, y])


@dataclass(frozen=True)
class DecisionRule:
    """One action per observation symbol t."""

    actions: tuple

    def __call__(self, t: int):
        return self.actions[t]

    def __len__(self):
        return len(self.actions)


# ---------------------------------------------------------------------------
# standard losses
# ---------------------------------------------------------------------------

def zero_one_loss(alphabet_y: Alphabet) -> LossFunction:
    m = alphabet_y.size
    matrix = 1.0 - np.eye(m)
    return LossFunction("zero_one", FiniteActions(alphabet_y), lambda idx: matrix[np.asarray(idx, dtype=int)])


def squared_error_loss(alphabet_y: Alphabet) -> LossFunction:
    """Squared error of the point prediction ``sum_y r(y) y`` encoded by a report r."""
    y = alphabet_y.values()
    if y is None:
        raise NumericYRequired("squared error needs numeric Y values")

    def table(r):
        return (y[None, :] - (r @ y)[:, None]) ** 2

    return LossFunction("squared_error", SimplexActions(alphabet_y), table, lambda p: np.array(p, dtype=float), True)


def log_loss(alphabet_y: Alphabet) -> LossFunction:
    def table(r):
        with np.errstate(divide="ignore"):
            return -np.log(r)

    return LossFunction("log", SimplexActions(alphabet_y), table, lambda p: np.array(p, dtype=float), True)


def _check_alpha(alpha):
    if not (alpha > 0 and alpha != 1 and np.isfinite(alpha)):
        raise AlphaOutOfRange(f"alpha must lie in (0, 1) or (1, inf), got {alpha}")


def alpha_loss(alphabet_y: Alphabet, alpha: float) -> LossFunction:
    """``alpha/(alpha-1) * (1 - r(y)^(1 - 1/alpha))``; its Bayes report is the alpha-tilted posterior."""
    _check_alpha(alpha)
    c = alpha / (alpha - 1.0)
    e = 1.0 - 1.0 / alpha

    def table(r):
        with np.errstate(divide="ignore"):
            return c * (1.0 - np.power(r, e))

    def tilted(p):
        w = np.power(np.asarray(p, dtype=float), alpha)
        return w / w.sum()

    return LossFunction(f"alpha[{alpha:g}]", SimplexActions(alphabet_y), table, tilted, False)


def scoring_rule(h, alphabet_y: Alphabet) -> LossFunction:
    """Proper scoring rule induced by a concave functional (see :mod:`genib.functionals`)."""
    h = get_functional(h)
    yv = numeric_values_for(h, alphabet_y)
    return LossFunction(
        f"psr[{h.name}]",
        SimplexActions(alphabet_y),
        lambda r: loss_table(h, r, yv),
        lambda p: np.array(p, dtype=float),
        True,
    )


# ---------------------------------------------------------------------------
# rules and risks
# ---------------------------------------------------------------------------

def _conditionals(joint_yt: Joint):
    """p_T and the rows p_{Y|T}(.|t); zero-mass t get p_Y."""
    m = joint_yt.mass
    pt = m.sum(axis=0)
    py = m.sum(axis=1)
    post = np.tile(py, (pt.shape[0], 1))
    live = pt > 0
    post[live] = (m[:, live] / pt[live]).T
    return pt, post


def _best_action(loss: LossFunction, p: np.ndarray):
    if loss.simplex:
        if loss.bayes_action is None:
            raise UnsupportedActionSpace(
                f"loss {loss.name!r} has no closed-form Bayes report; use brute_force_optimal_risk"
            )
        return loss.bayes_action(p)
    n = loss.action_space.alphabet.size
    exp = expected_loss(p[None, :], loss.table(np.arange(n)))
    return int(np.argmin(exp))  # first index wins ties


def min_expected_loss(loss: LossFunction, p) -> float:
    """min_a E_{Y~p}[l(Y, a)]."""
    p = as_distribution(p).mass
    a = _best_action(loss, p)
    return float(expected_loss(p, _table_for(loss, [a])[0]))


def _table_for(loss: LossFunction, actions) -> np.ndarray:
    if loss.simplex:
        return loss.table(np.asarray(actions, dtype=float))
    return loss.table(np.asarray(actions, dtype=int))


def bayes_decision_rule(loss: LossFunction, joint_yt: Joint) -> DecisionRule:
    """Per-t minimizer of the posterior expected loss."""
    joint_yt = as_joint(joint_yt)
    _, post = _conditionals(joint_yt)
    return DecisionRule(tuple(_best_action(loss, post[t]) for t in range(post.shape[0])))


def bayes_risk(loss: LossFunction, rule: DecisionRule, joint_yt: Joint) -> float:
    """E_{Y,T}[l(Y, rule(T))]; +inf if the rule puts zero mass on an outcome that occurs."""
    joint_yt = as_joint(joint_yt)
    table = _table_for(loss, list(rule.actions))  # [t, y]
    return float(np.sum(expected_loss(joint_yt.mass.T, table)))


def optimal_bayes_risk(loss: LossFunction, joint_yt: Joint) -> float:
    joint_yt = as_joint(joint_yt)
    return bayes_risk(loss, bayes_decision_rule(loss, joint_yt), joint_yt)


def evsi(loss: LossFunction, joint_yt: Joint) -> float:
    """Expected value of sample information: prior-only optimal risk minus the optimal risk given T."""
    joint_yt = as_joint(joint_yt)
    py = joint_yt.mass.sum(axis=1)
    return min_expected_loss(loss, Distribution(joint_yt.alphabet_x, py)) - optimal_bayes_risk(loss, joint_yt)


def evpi(loss: LossFunction, prior_y: Distribution) -> float:
    """Expected value of perfect information about Y."""
    prior_y = as_distribution(prior_y)
    p = prior_y.mass
    informed = 0.0
    for y in np.flatnonzero(p > 0):
        informed += p[y] * min_expected_loss(loss, Distribution.point_mass(prior_y.alphabet, y))
    return min_expected_loss(loss, prior_y) - informed


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def arimoto_conditional_entropy(alpha: float, joint_yt: Joint) -> float:
    """alpha/(1-alpha) * log sum_t p_T(t) (sum_y p(y|t)^alpha)^(1/alpha)."""
    _check_alpha(alpha)
    pt, post = _conditionals(as_joint(joint_yt))
    norms = np.sum(post**alpha, axis=1) ** (1.0 / alpha)
    return float(alpha / (1.0 - alpha) * np.log(pt @ norms))


def alpha_loss_optimal_risk(alpha: float, joint_yt: Joint) -> float:
    """Optimal alpha-loss Bayes risk via the Arimoto conditional entropy."""
    ha = arimoto_conditional_entropy(alpha, joint_yt)
    return float(alpha / (alpha - 1.0) * (1.0 - np.exp((1.0 - alpha) / alpha * ha)))


def conditional_entropy_yt(joint_yt: Joint) -> float:
    pt, post = _conditionals(as_joint(joint_yt))
    return float(pt @ entropy_array(post))


def map_error(joint_yt: Joint) -> float:
    """1 - E_T[max_y p(y|T)], the 0-1 risk of the MAP rule."""
    pt, post = _conditionals(as_joint(joint_yt))
    return float(1.0 - pt @ post.max(axis=1))


def expected_conditional_variance(joint_yt: Joint) -> float:
    joint_yt = as_joint(joint_yt)
    y = joint_yt.alphabet_x.values()
    if y is None:
        raise NumericYRequired("conditional variance needs numeric Y values")
    pt, post = _conditionals(joint_yt)
    mean = post @ y
    return float(pt @ (post @ (y * y) - mean * mean))


# ---------------------------------------------------------------------------
# grid oracle
# ---------------------------------------------------------------------------

def grid_size(m: int, k: int) -> int:
    return math.comb(k + m - 1, m - 1)


def simplex_grid(m: int, k: int, interior_shift: float = 0.0) -> np.ndarray:
    """All points of the simplex in R^m whose coordinates are multiples of 1/k.

    With ``interior_shift > 0`` every coordinate is raised by that amount and
    the rows renormalized, which keeps log-type losses finite.
    """
    if m < 1 or k < 1:
        raise ValueError("simplex_grid needs m >= 1 and k >= 1")
    if m == 1:
        return np.ones((1, 1))
    bars = np.array(list(itertools.combinations(range(k + m - 1), m - 1)), dtype=int)
    n = bars.shape[0]
    edges = np.concatenate([np.full((n, 1), -1), bars, np.full((n, 1), k + m - 1)], axis=1)
    grid = (np.diff(edges, axis=1) - 1) / k
    if interior_shift:
        grid = (grid + interior_shift) / (1.0 + m * interior_shift)
    return grid


def brute_force_optimal_risk(
    loss: LossFunction,
    joint_yt: Joint,
    simplex_grid_resolution: int,
    node_budget: int = 2_000_000,
    interior_shift: float = 1e-9,
) -> float:
    """Optimal risk with each per-t minimization done over a regular simplex grid.

    An upper bound on the true optimum that tightens as the resolution grows.
    If the grid would exceed ``node_budget`` points the resolution is lowered
    and a :class:`GridTooCoarseWarning` is issued.
    """
    if not loss.simplex:
        raise UnsupportedActionSpace("brute_force_optimal_risk needs distribution-valued actions")
    joint_yt = as_joint(joint_yt)
    m = joint_yt.alphabet_x.size
    k = int(simplex_grid_resolution)
    if grid_size(m, k) > node_budget:
        while k > 1 and grid_size(m, k) > node_budget:
            k -= 1
        warnings.warn(
            f"simplex grid for |Y|={m} at resolution {simplex_grid_resolution} exceeds "
            f"{node_budget} nodes; using resolution {k}",
            GridTooCoarseWarning,
            stacklevel=2,
        )
    grid = simplex_grid(m, k, interior_shift)
    table = loss.table(grid)  # [g, y]
    pt, post = _conditionals(joint_yt)
    risks = expected_loss(post[:, None, :], table[None, :, :])  # [t, g]
    return float(pt @ risks.min(axis=1))
