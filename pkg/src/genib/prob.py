"""Finite-alphabet probability algebra.

Distributions, channels (row-stochastic matrices) and joints are immutable
wrappers around read-only numpy arrays.  Every constructor validates the
simplex constraints: entries must be nonnegative and each probability vector
must sum to one within ``SIMPLEX_TOL``.  Vectors off by at most
``RENORM_TOL`` are renormalized silently; anything further off is rejected
with :class:`~genib.errors.SimplexViolation`.

All logarithms are natural, so information quantities are in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlphabetMismatch, SimplexViolation, ZeroMarginalRow

SIMPLEX_TOL = 1e-12
RENORM_TOL = 1e-9


@dataclass(frozen=True)
class Alphabet:
    labels: tuple
    numeric_values: tuple | None = None

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        if len(labels) < 1:
            raise ValueError("an alphabet needs at least one symbol")
        if len(set(labels)) != len(labels):
            raise ValueError(f"alphabet labels must be distinct: {labels}")
        object.__setattr__(self, "labels", labels)
        if self.numeric_values is not None:
            vals = tuple(float(v) for v in self.numeric_values)
            if len(vals) != len(labels):
                raise ValueError(
                    f"numeric_values has length {len(vals)}, alphabet has {len(labels)} symbols"
                )
            object.__setattr__(self, "numeric_values", vals)

    @property
    def size(self) -> int:
        return len(self.labels)

    @classmethod
    def of_size(cls, n: int, numeric: bool = False) -> "Alphabet":
        """Alphabet with labels ``"1" .. "n"``; optionally numeric values 1..n."""
        if n < 1:
            raise ValueError("alphabet size must be >= 1")
        labels = tuple(str(i + 1) for i in range(n))
        return cls(labels, tuple(float(i + 1) for i in range(n)) if numeric else None)

    def values(self) -> np.ndarray | None:
        if self.numeric_values is None:
            return None
        return np.asarray(self.numeric_values, dtype=float)

    def index(self, symbol) -> int:
        return self.labels.index(str(symbol))


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _validate_simplex(vec: np.ndarray, row=None, what="distribution") -> np.ndarray:
    where = f" (row {row})" if row is not None else ""
    if not np.all(np.isfinite(vec)):
        raise SimplexViolation(f"{what}{where} has non-finite entries", row=row)
    if np.any(vec < 0):
        raise SimplexViolation(
            f"{what}{where} has negative entries (min {vec.min():.3g})", row=row
        )
    total = vec.sum()
    dev = abs(total - 1.0)
    if dev <= SIMPLEX_TOL:
        return vec
    if dev <= RENORM_TOL:
        return vec / total
    raise SimplexViolation(
        f"{what}{where} sums to {total!r} (deviation {dev:.3g})", row=row, deviation=dev
    )


@dataclass(frozen=True, eq=False)
class Distribution:
    alphabet: Alphabet
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.ndim != 1 or mass.shape[0] != self.alphabet.size:
            raise AlphabetMismatch(
                f"mass of shape {mass.shape} does not fit alphabet of size {self.alphabet.size}"
            )
        object.__setattr__(self, "mass", _frozen(_validate_simplex(mass)))

    @classmethod
    def from_array(cls, mass, alphabet: Alphabet | None = None) -> "Distribution":
        mass = np.asarray(mass, dtype=float)
        return cls(alphabet or Alphabet.of_size(mass.shape[0]), mass)

    @classmethod
    def uniform(cls, alphabet: Alphabet) -> "Distribution":
        return cls(alphabet, np.full(alphabet.size, 1.0 / alphabet.size))

    @classmethod
    def point_mass(cls, alphabet: Alphabet, index: int) -> "Distribution":
        m = np.zeros(alphabet.size)
        m[index] = 1.0
        return cls(alphabet, m)

    @property
    def support(self) -> np.ndarray:
        return self.mass > 0

    def __len__(self):
        return self.alphabet.size

    def __repr__(self):
        return f"Distribution({np.array2string(self.mass, precision=6)})"


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic conditional distribution: ``rows[i, j] = p(target_j | source_i)``."""

    source: Alphabet
    target: Alphabet
    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape != (self.source.size, self.target.size):
            raise AlphabetMismatch(
                f"channel matrix of shape {rows.shape} does not fit "
                f"{self.source.size}x{self.target.size} alphabets"
            )
        for i in range(rows.shape[0]):
            rows[i] = _validate_simplex(rows[i], row=i, what="channel row")
        object.__setattr__(self, "rows", _frozen(rows))

    @classmethod
    def from_array(cls, rows, source: Alphabet | None = None, target: Alphabet | None = None):
        rows = np.asarray(rows, dtype=float)
        return cls(
            source or Alphabet.of_size(rows.shape[0]),
            target or Alphabet.of_size(rows.shape[1]),
            rows,
        )

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "Channel":
        return cls(alphabet, alphabet, np.eye(alphabet.size))

    @classmethod
    def constant(cls, source: Alphabet, row: Distribution) -> "Channel":
        return cls(source, row.alphabet, np.tile(row.mass, (source.size, 1)))

    def row(self, i: int) -> Distribution:
        return Distribution(self.target, self.rows[i])

    def __repr__(self):
        return f"Channel(\n{np.array2string(self.rows, precision=6)})"


@dataclass(frozen=True, eq=False)
class Joint:
    """Joint pmf with ``mass[i, j] = p(x_i, y_j)``."""

    alphabet_x: Alphabet
    alphabet_y: Alphabet
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        if mass.ndim != 2 or mass.shape != (self.alphabet_x.size, self.alphabet_y.size):
            raise AlphabetMismatch(
                f"joint matrix of shape {mass.shape} does not fit "
                f"{self.alphabet_x.size}x{self.alphabet_y.size} alphabets"
            )
        flat = _validate_simplex(mass.ravel(), what="joint")
        object.__setattr__(self, "mass", _frozen(flat.reshape(mass.shape)))

    @classmethod
    def from_array(cls, mass, alphabet_x: Alphabet | None = None, alphabet_y: Alphabet | None = None):
        mass = np.asarray(mass, dtype=float)
        return cls(
            alphabet_x or Alphabet.of_size(mass.shape[0]),
            alphabet_y or Alphabet.of_size(mass.shape[1]),
            mass,
        )

    @classmethod
    def from_channel(cls, prior: Distribution, ch: Channel) -> "Joint":
        """Joint of (input, output) for ``input ~ prior`` sent through ``ch``."""
        _same(prior.alphabet, ch.source, "prior vs channel input")
        return cls(prior.alphabet, ch.target, prior.mass[:, None] * ch.rows)

    def transpose(self) -> "Joint":
        return Joint(self.alphabet_y, self.alphabet_x, self.mass.T)

    def __repr__(self):
        return f"Joint(\n{np.array2string(self.mass, precision=8)})"


def _same(a: Alphabet, b: Alphabet, context: str):
    if a.size != b.size:
        raise AlphabetMismatch(f"{context}: sizes {a.size} and {b.size} differ")


def as_distribution(p) -> Distribution:
    return p if isinstance(p, Distribution) else Distribution.from_array(p)


def as_channel(ch) -> Channel:
    return ch if isinstance(ch, Channel) else Channel.from_array(ch)


def as_joint(j) -> Joint:
    return j if isinstance(j, Joint) else Joint.from_array(j)


# ---------------------------------------------------------------------------
# marginals, posteriors, composition
# ---------------------------------------------------------------------------

def marginal_x(j: Joint) -> Distribution:
    j = as_joint(j)
    return Distribution(j.alphabet_x, j.mass.sum(axis=1))


def marginal_y(j: Joint) -> Distribution:
    j = as_joint(j)
    return Distribution(j.alphabet_y, j.mass.sum(axis=0))


def posterior(j: Joint) -> Channel:
    """Conditional ``p(y|x) = p(x, y) / p(x)`` as a channel from X to Y.

    Raises :class:`ZeroMarginalRow` listing every x with ``p(x) = 0``; the
    conditional is undefined there and the caller has to restrict support.
    """
    j = as_joint(j)
    px = j.mass.sum(axis=1)
    dead = np.flatnonzero(px <= 0)
    if dead.size:
        raise ZeroMarginalRow(
            f"p_X is zero at rows {dead.tolist()}; conditional undefined there", rows=dead
        )
    return Channel(j.alphabet_x, j.alphabet_y, j.mass / px[:, None])


def push_channel(prior: Distribution, ch: Channel) -> Distribution:
    """Output marginal ``sum_x prior(x) ch(t|x)``."""
    prior, ch = as_distribution(prior), as_channel(ch)
    _same(prior.alphabet, ch.source, "push_channel")
    return Distribution(ch.target, prior.mass @ ch.rows)


def compose_markov(first: Channel, second: Channel) -> Channel:
    """Channel of the chain ``A -first-> B -second-> C``.

    With ``first = p_{X|Y}`` and ``second = p_{T|X}`` this is
    ``p_{T|Y}(t|y) = sum_x p_{T|X}(t|x) p_{X|Y}(x|y)``.
    """
    first, second = as_channel(first), as_channel(second)
    _same(first.target, second.source, "compose_markov")
    return Channel(first.source, second.target, first.rows @ second.rows)


# ---------------------------------------------------------------------------
# divergences and Shannon quantities
# ---------------------------------------------------------------------------

def _kl(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    if np.any(q[mask] <= 0):
        return np.inf
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def kl_divergence(p: Distribution, q: Distribution) -> float:
    """D(p||q) in nats; ``+inf`` when p is not absolutely continuous w.r.t. q."""
    p, q = as_distribution(p), as_distribution(q)
    _same(p.alphabet, q.alphabet, "kl_divergence")
    return _kl(p.mass, q.mass)


def entropy_array(p: np.ndarray) -> np.ndarray:
    """Shannon entropy along the last axis with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log(p), 0.0)
    return terms.sum(axis=-1)


def shannon_entropy(p: Distribution) -> float:
    return float(entropy_array(as_distribution(p).mass))


def conditional_shannon_entropy(py_t: Channel, pt: Distribution) -> float:
    """H(Y|T) = sum_t p_T(t) H(p_{Y|T}(.|t)); ``py_t`` is a channel from T to Y."""
    py_t, pt = as_channel(py_t), as_distribution(pt)
    _same(pt.alphabet, py_t.source, "conditional_shannon_entropy")
    return float(pt.mass @ entropy_array(py_t.rows))


def mutual_information(prior: Distribution, ch: Channel) -> float:
    """I(input; output) for ``input ~ prior`` through ``ch``, as H(out) - H(out|in)."""
    prior, ch = as_distribution(prior), as_channel(ch)
    out = push_channel(prior, ch)
    return shannon_entropy(out) - conditional_shannon_entropy(ch, prior)


def relative_information(prior: Distribution, ch: Channel, q: Distribution) -> float:
    """D(p_X p_{T|X} || p_X q_T), the quantity minimized over q by the true marginal."""
    prior, ch, q = as_distribution(prior), as_channel(ch), as_distribution(q)
    _same(ch.target, q.alphabet, "relative_information")
    joint = prior.mass[:, None] * ch.rows
    product = prior.mass[:, None] * q.mass[None, :]
    return _kl(joint.ravel(), product.ravel())


def mi_variational_gap(prior: Distribution, ch: Channel, q: Distribution) -> float:
    """D(p_X p_{T|X} || p_X q) - I(X;T); nonnegative, zero iff q is the output marginal."""
    d = relative_information(prior, ch, q)
    if not np.isfinite(d):
        return d
    return d - mutual_information(prior, ch)
