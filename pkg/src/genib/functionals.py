"""Concave entropy-like functionals and the proper scoring rules they induce.

A functional ``H`` on the simplex over Y, together with a (super)gradient
``z(r)``, induces the loss

    l_H(y, r) = H(r) + z(r)[y] - z(r) . r

which is a proper scoring rule whose Bayes risk is ``H``.  The H-mutual
information is ``I_H(Y;T) = H(p_Y) - sum_t p_T(t) H(p_{Y|T}(.|t))``.

Built-ins:

``shannon``
    ``-sum p log p``; induces the log loss.
``variance``
    variance of the numeric Y values; induces the squared error of the
    predicted mean.  Needs an alphabet with ``numeric_values``.
``gini``
    ``1 - sum p^2``; induces the Brier score.  Not part of the original
    method; included as a third non-logarithmic example.

All functions here are vectorized over leading axes: a matrix argument is
treated as a stack of distributions, one per row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericYRequired
from .prob import (
    Channel,
    Distribution,
    Joint,
    as_channel,
    as_distribution,
    entropy_array,
    _same,
)


@dataclass(frozen=True)
class ConcaveFunctional:
    """A concave functional with gradient access.

    ``value(P, y)`` maps an array of distributions (last axis = Y) to an array
    of reals, ``gradient(P, y)`` returns an array shaped like ``P``.  ``y`` is
    the vector of numeric Y values (``None`` unless ``requires_numeric_y``).
    """

    name: str
    value: Callable[[np.ndarray, np.ndarray | None], np.ndarray]
    gradient: Callable[[np.ndarray, np.ndarray | None], np.ndarray]
    requires_numeric_y: bool = False

    def __call__(self, p, y=None):
        return self.value(np.asarray(p, dtype=float), y)


def _shannon_gradient(p, y=None):
    with np.errstate(divide="ignore"):
        return -np.log(p) - 1.0


def _variance_value(p, y):
    mean = p @ y
    return p @ (y * y) - mean * mean


def _variance_gradient(p, y):
    mean = p @ y
    return y * y - 2.0 * np.asarray(mean)[..., None] * y


SHANNON = ConcaveFunctional("shannon", lambda p, y=None: entropy_array(p), _shannon_gradient)
VARIANCE = ConcaveFunctional("variance", _variance_value, _variance_gradient, requires_numeric_y=True)
GINI = ConcaveFunctional(
    "gini",
    lambda p, y=None: 1.0 - np.sum(p * p, axis=-1),
    lambda p, y=None: -2.0 * p,
)

FUNCTIONALS: dict[str, ConcaveFunctional] = {}


def register_functional(h: ConcaveFunctional, replace: bool = False) -> ConcaveFunctional:
    """Make ``h`` selectable by name (CLI ``--functional`` and :func:`get_functional`)."""
    if h.name in FUNCTIONALS and not replace:
        raise ValueError(f"functional {h.name!r} is already registered")
    FUNCTIONALS[h.name] = h
    return h


for _h in (SHANNON, VARIANCE, GINI):
    register_functional(_h)


def get_functional(h) -> ConcaveFunctional:
    if isinstance(h, ConcaveFunctional):
        return h
    try:
        return FUNCTIONALS[h]
    except KeyError:
        raise KeyError(f"unknown functional {h!r}; choose from {sorted(FUNCTIONALS)}") from None


def numeric_values_for(h: ConcaveFunctional, alphabet) -> np.ndarray | None:
    """Y values needed by ``h``, taken from the alphabet's ``numeric_values``."""
    if not h.requires_numeric_y:
        return None
    y = alphabet.values()
    if y is None:
        raise NumericYRequired(
            f"functional {h.name!r} needs numeric Y values but alphabet {alphabet.labels} has none"
        )
    return y


# ---------------------------------------------------------------------------
# induced proper scoring rule
# ---------------------------------------------------------------------------

def loss_table(h: ConcaveFunctional, r: np.ndarray, y: np.ndarray | None = None) -> np.ndarray:
    """``L[..., j] = l_H(y_j, r)`` for every distribution ``r`` in the stack.

    Components where ``r`` is zero contribute nothing to ``z . r``; if the
    gradient diverges there (Shannon) the loss of that outcome is ``+inf``.
    """
    r = np.asarray(r, dtype=float)
    z = h.gradient(r, y)
    with np.errstate(invalid="ignore"):
        zr = np.sum(np.where(r > 0, z * r, 0.0), axis=-1)
    return np.asarray(h.value(r, y))[..., None] + z - zr[..., None]


def induced_loss(h, y, r: Distribution) -> float:
    """Value of the induced scoring rule ``l_H(y, r)``.

    ``y`` is either a symbol index (int) or a label of ``r``'s alphabet.
    """
    h = get_functional(h)
    r = as_distribution(r)
    yv = numeric_values_for(h, r.alphabet)
    idx = y if isinstance(y, (int, np.integer)) else r.alphabet.index(y)
    return float(loss_table(h, r.mass, yv)[idx])


def expected_loss(p: np.ndarray, table: np.ndarray) -> np.ndarray:
    """``sum_y p[..., y] * table[..., y]`` with 0 * inf = 0."""
    with np.errstate(invalid="ignore"):
        return np.sum(np.where(p > 0, p * table, 0.0), axis=-1)


# ---------------------------------------------------------------------------
# H-mutual information
# ---------------------------------------------------------------------------

def h_conditional(h, py_t: Channel, pt: Distribution) -> float:
    """H(Y|T) = sum_t p_T(t) H(p_{Y|T}(.|t)); ``py_t`` is a channel T -> Y."""
    h = get_functional(h)
    py_t, pt = as_channel(py_t), as_distribution(pt)
    _same(pt.alphabet, py_t.source, "h_conditional")
    yv = numeric_values_for(h, py_t.target)
    live = pt.mass > 0
    return float(pt.mass[live] @ np.asarray(h.value(py_t.rows[live], yv)))


def _reverse(prior_y: Distribution, p_t_y: Channel):
    """(p_T, p_{Y|T} rows) from a prior on Y and a channel Y -> T.  Dead t get p_Y."""
    joint = prior_y.mass[:, None] * p_t_y.rows
    pt = joint.sum(axis=0)
    rows = np.tile(prior_y.mass, (pt.shape[0], 1))
    live = pt > 0
    rows[live] = (joint[:, live] / pt[live]).T
    return pt, rows


def h_mutual_information(h, prior_y: Distribution, p_t_y: Channel) -> float:
    """I_H(Y;T) = H(p_Y) - H(Y|T) for ``Y ~ prior_y`` observed through ``p_t_y``."""
    h = get_functional(h)
    prior_y, p_t_y = as_distribution(prior_y), as_channel(p_t_y)
    _same(prior_y.alphabet, p_t_y.source, "h_mutual_information")
    yv = numeric_values_for(h, prior_y.alphabet)
    pt, rows = _reverse(prior_y, p_t_y)
    live = pt > 0
    cond = float(pt[live] @ np.asarray(h.value(rows[live], yv)))
    return float(h.value(prior_y.mass, yv)) - cond


def variational_objective(h, prior_y: Distribution, p_t_y: Channel, r_y_t: Channel) -> float:
    """F_H = H(p_Y) - E_{Y,T}[l_H(Y, r(.|T))]; maximized over ``r_y_t`` by the posterior."""
    h = get_functional(h)
    prior_y, p_t_y, r_y_t = as_distribution(prior_y), as_channel(p_t_y), as_channel(r_y_t)
    _same(prior_y.alphabet, p_t_y.source, "variational_objective")
    _same(p_t_y.target, r_y_t.source, "variational_objective")
    yv = numeric_values_for(h, prior_y.alphabet)
    joint_ty = (prior_y.mass[:, None] * p_t_y.rows).T
    risk = float(np.sum(expected_loss(joint_ty, loss_table(h, r_y_t.rows, yv))))
    return float(h.value(prior_y.mass, yv)) - risk


def h_mutual_information_joint(h, joint_yt: Joint) -> float:
    """I_H(Y;T) from a joint with rows Y and columns T."""
    h = get_functional(h)
    yv = numeric_values_for(h, joint_yt.alphabet_x)
    m = joint_yt.mass
    pt = m.sum(axis=0)
    live = pt > 0
    cond = float(pt[live] @ np.asarray(h.value((m[:, live] / pt[live]).T, yv)))
    return float(h.value(m.sum(axis=1), yv)) - cond
