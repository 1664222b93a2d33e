"""Alternating minimization for the generalized information bottleneck.

For a joint p(x, y), an encoder p(t|x), a reference marginal q(t) and a
decoder r(y|t), the Lagrangian

    G(p, q, r) = D(p_X p_{T|X} || p_X q_T) - beta * F_H(p_{T|Y}, r_{Y|T})

is minimized one block at a time.  Each block has an exact minimizer:

* r(.|t) is the posterior p(y|t) (propriety of the induced scoring rule),
* q is the output marginal p_T,
* p(t|x) is proportional to q(t) exp(-beta E[l_H(Y, r(.|t)) | X = x]).

so G never increases along the iteration.  The p-update is done in log
space with the row maximum subtracted before exponentiation.

Symbols t whose marginal q(t) reaches zero stay dead: their encoder weight is
exactly zero from then on, and their decoder row is set to p_Y and carries no
weight in G.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AllMassCollapsed, AlphabetMismatch, NotConvergedWarning
from .functionals import ConcaveFunctional, expected_loss, get_functional, loss_table, numeric_values_for
from .prob import (
    Alphabet,
    Channel,
    Distribution,
    Joint,
    _kl,
    as_channel,
    as_distribution,
    as_joint,
    entropy_array,
)

STOP_RULES = ("objective", "channel")


@dataclass(frozen=True)
class SolverConfig:
    """Settings for one run.

    ``stop_rule="objective"`` stops when |G(k) - G(k-1)| < epsilon;
    ``stop_rule="channel"`` stops when the encoder moves less than epsilon in
    max norm.  The initial encoder is ``initial_channel`` when given,
    otherwise drawn from ``seed``.
    """

    beta: float
    epsilon: float = 1e-9
    max_iterations: int = 10_000
    t_size: int = 2
    functional: str | ConcaveFunctional = "shannon"
    seed: int | None = 0
    initial_channel: object = None
    stop_rule: str = "objective"

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.t_size < 1:
            raise ValueError("t_size must be >= 1")
        if self.stop_rule not in STOP_RULES:
            raise ValueError(f"stop_rule must be one of {STOP_RULES}")
        get_functional(self.functional)


@dataclass(frozen=True, eq=False)
class SolverState:
    p_t_x: Channel
    q_t: Distribution
    r_y_t: Channel
    objective: float
    iteration: int


@dataclass
class ConvergenceReport:
    beta: float
    functional: str
    objective_trace: list = field(default_factory=list)
    block_trace: list = field(default_factory=list)  # (phase, G) after each block update
    iterations: int = 0
    converged: bool = False
    final_I_xt: float = float("nan")
    final_I_h_yt: float = float("nan")

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]


class _Problem:
    """Array kernels for a fixed (joint, functional, beta)."""

    def __init__(self, p_xy: Joint, h: ConcaveFunctional, beta: float):
        self.joint = p_xy
        self.h = h
        self.beta = float(beta)
        self.yv = numeric_values_for(h, p_xy.alphabet_y)
        m = p_xy.mass
        self.px = m.sum(axis=1)
        self.py = m.sum(axis=0)
        self.pyx = np.tile(self.py, (m.shape[0], 1))
        live = self.px > 0
        self.pyx[live] = m[live] / self.px[live, None]
        self.h_y = float(h.value(self.py, self.yv))

    def marginal(self, p):
        return self.px @ p

    def decoder(self, p, q):
        num = (self.px[:, None] * p).T @ self.pyx  # p(t, y)
        r = np.tile(self.py, (p.shape[1], 1))
        live = q > 0
        r[live] = num[live] / num[live].sum(axis=1, keepdims=True)
        return r

    def expected_losses(self, r):
        """E[l_H(Y, r(.|t)) | X = x] as an (x, t) matrix."""
        table = loss_table(self.h, r, self.yv)  # [t, y]
        return expected_loss(self.pyx[:, None, :], table[None, :, :])

    def encoder(self, q, r):
        with np.errstate(divide="ignore"):
            e = np.log(q)[None, :] + np.zeros((self.px.shape[0], 1))
        if self.beta > 0:
            e = e - self.beta * self.expected_losses(r)
        top = e.max(axis=1, keepdims=True)
        if not np.all(np.isfinite(top)):
            bad = np.flatnonzero(~np.isfinite(top[:, 0])).tolist()
            raise AllMassCollapsed(f"every t has zero weight for x rows {bad}")
        w = np.exp(e - top)
        return w / w.sum(axis=1, keepdims=True)

    def compression(self, p, q):
        """D(p_X p_{T|X} || p_X q_T)."""
        joint = self.px[:, None] * p
        mask = joint > 0
        qq = np.broadcast_to(q, p.shape)
        if np.any(qq[mask] <= 0):
            return np.inf
        return float(np.sum(joint[mask] * np.log(p[mask] / qq[mask])))

    def utility_bound(self, p, r):
        """F_H(p_{T|Y}, r)."""
        joint_ty = (self.px[:, None] * p).T @ self.pyx
        risk = np.sum(expected_loss(joint_ty, loss_table(self.h, r, self.yv)))
        return self.h_y - float(risk)

    def objective(self, p, q, r):
        d = self.compression(p, q)
        if self.beta == 0:
            return d
        return d - self.beta * self.utility_bound(p, r)

    def information(self, p):
        """(I(X;T), I_H(Y;T)) for encoder p."""
        q = self.marginal(p)
        i_xt = float(entropy_array(q) - self.px @ entropy_array(p))
        joint_ty = (self.px[:, None] * p).T @ self.pyx
        live = q > 0
        cond = float(q[live] @ np.asarray(self.h.value(joint_ty[live] / q[live, None], self.yv)))
        return i_xt, self.h_y - cond


def _problem(p_xy, h, beta) -> _Problem:
    return _Problem(as_joint(p_xy), get_functional(h), beta)


def _t_alphabet(n: int) -> Alphabet:
    return Alphabet.of_size(n)


# ---------------------------------------------------------------------------
# public block updates
# ---------------------------------------------------------------------------

def objective(p_xy: Joint, state: SolverState, h, beta: float) -> float:
    """G_beta at (state.p_t_x, state.q_t, state.r_y_t); ``+inf`` if q misses encoder mass."""
    prob = _problem(p_xy, h, beta)
    return prob.objective(state.p_t_x.rows, state.q_t.mass, state.r_y_t.rows)


def update_r(p_xy: Joint, p_t_x: Channel) -> Channel:
    """Exact posterior p(y|t) induced by the encoder (dead t get p_Y)."""
    p_xy, p_t_x = as_joint(p_xy), as_channel(p_t_x)
    if p_t_x.source.size != p_xy.alphabet_x.size:
        raise AlphabetMismatch("encoder input alphabet does not match X")
    prob = _Problem(p_xy, get_functional("shannon"), 0.0)
    q = prob.marginal(p_t_x.rows)
    return Channel(p_t_x.target, p_xy.alphabet_y, prob.decoder(p_t_x.rows, q))


def update_q(p_x: Distribution, p_t_x: Channel) -> Distribution:
    p_x, p_t_x = as_distribution(p_x), as_channel(p_t_x)
    if p_t_x.source.size != p_x.alphabet.size:
        raise AlphabetMismatch("encoder input alphabet does not match p_X")
    return Distribution(p_t_x.target, p_x.mass @ p_t_x.rows)


def update_p(p_xy: Joint, q_t: Distribution, r_y_t: Channel, h, beta: float) -> Channel:
    """Encoder minimizing G for fixed (q, r)."""
    p_xy, q_t, r_y_t = as_joint(p_xy), as_distribution(q_t), as_channel(r_y_t)
    prob = _problem(p_xy, h, beta)
    return Channel(p_xy.alphabet_x, q_t.alphabet, prob.encoder(q_t.mass, r_y_t.rows))


def classic_update_p(p_xy: Joint, q_t: Distribution, r_y_t: Channel, beta: float) -> Channel:
    """Encoder update of the original (Shannon) IB: q(t) exp(-beta D(p(.|x) || r(.|t)))."""
    p_xy, q_t, r_y_t = as_joint(p_xy), as_distribution(q_t), as_channel(r_y_t)
    m = p_xy.mass
    pyx = m / m.sum(axis=1, keepdims=True)
    nx, nt = m.shape[0], q_t.alphabet.size
    logits = np.empty((nx, nt))
    for x in range(nx):
        for t in range(nt):
            d = _kl(pyx[x], r_y_t.rows[t])
            logits[x, t] = -np.inf if q_t.mass[t] == 0 else math.log(q_t.mass[t]) - beta * d
    logits -= logits.max(axis=1, keepdims=True)
    w = np.exp(logits)
    return Channel(p_xy.alphabet_x, q_t.alphabet, w / w.sum(axis=1, keepdims=True))


def random_initial_channel(seed, x_size: int, t_size: int) -> Channel:
    """Entries uniform on [0, 1], each row normalized."""
    if x_size < 1 or t_size < 1:
        raise ValueError("channel sizes must be >= 1")
    u = np.random.default_rng(seed).uniform(size=(x_size, t_size))
    return Channel(Alphabet.of_size(x_size), _t_alphabet(t_size), u / u.sum(axis=1, keepdims=True))


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def initial_encoder(p_xy: Joint, config: SolverConfig) -> np.ndarray:
    nx = p_xy.alphabet_x.size
    if config.initial_channel is not None:
        p0 = as_channel(config.initial_channel).rows
        if p0.shape != (nx, config.t_size):
            raise AlphabetMismatch(
                f"initial channel has shape {p0.shape}, expected {(nx, config.t_size)}"
            )
        return np.array(p0)
    return np.array(random_initial_channel(config.seed, nx, config.t_size).rows)


def solve(p_xy: Joint, config: SolverConfig, warn: bool = True, record_blocks: bool = True):
    """Run the alternating minimization; returns ``(ConvergenceReport, SolverState)``.

    Iteration k applies the p-, q- and r-updates in that order and then
    evaluates G(k).  ``block_trace`` records G after every block, so the
    entries tagged ``"p"`` are G(p(k), q(k-1), r(k-1)); pass
    ``record_blocks=False`` to skip those extra evaluations.
    """
    p_xy = as_joint(p_xy)
    h = get_functional(config.functional)
    prob = _Problem(p_xy, h, config.beta)

    p = initial_encoder(p_xy, config)
    q = prob.marginal(p)
    r = prob.decoder(p, q)
    g = prob.objective(p, q, r)
    report = ConvergenceReport(config.beta, h.name, [g], [("init", g)])

    k = 0
    while k < config.max_iterations:
        k += 1
        p_new = prob.encoder(q, r)
        if record_blocks:
            report.block_trace.append(("p", prob.objective(p_new, q, r)))
        q = prob.marginal(p_new)
        if record_blocks:
            report.block_trace.append(("q", prob.objective(p_new, q, r)))
        r = prob.decoder(p_new, q)
        g_new = prob.objective(p_new, q, r)
        if record_blocks:
            report.block_trace.append(("r", g_new))
        report.objective_trace.append(g_new)

        if config.stop_rule == "objective":
            delta = abs(g_new - g)
        else:
            delta = float(np.max(np.abs(p_new - p)))
        p, g = p_new, g_new
        if delta < config.epsilon:
            report.converged = True
            break

    report.iterations = k
    report.final_I_xt, report.final_I_h_yt = prob.information(p)
    if warn and not report.converged:
        warnings.warn(
            f"no convergence after {k} iterations at beta={config.beta}", NotConvergedWarning, stacklevel=2
        )

    t_alpha = _t_alphabet(config.t_size)
    state = SolverState(
        Channel(p_xy.alphabet_x, t_alpha, p),
        Distribution(t_alpha, q),
        Channel(t_alpha, p_xy.alphabet_y, r),
        g,
        k,
    )
    return report, state
