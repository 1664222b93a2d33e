import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genib import instance
from genib.decision import simplex_grid
from genib.errors import AlphabetMismatch, SimplexViolation, ZeroMarginalRow
from genib.prob import (
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
    relative_information,
)

from conftest import prior_and_channel, simplex_vectors

PRINTED = instance.JOINT.tolist()
TOTAL = sum(sum(r) for r in PRINTED)


# -- construction -------------------------------------------------------------

def test_alphabet_validation():
    with pytest.raises(ValueError):
        Alphabet(("a", "a"))
    with pytest.raises(ValueError):
        Alphabet(("a", "b"), (1.0,))
    a = Alphabet.of_size(3, numeric=True)
    assert a.size == 3 and a.numeric_values == (1.0, 2.0, 3.0)


def test_distribution_rejects_negative_and_far_off_mass():
    with pytest.raises(SimplexViolation):
        Distribution.from_array([1.2, -0.2])
    with pytest.raises(SimplexViolation):
        Distribution.from_array([0.5, 0.5 + 1e-6])


def test_distribution_renormalizes_tiny_deviation():
    d = Distribution.from_array([0.5, 0.5 + 5e-10])
    assert abs(d.mass.sum() - 1.0) <= 1e-15


def test_values_are_read_only():
    d = Distribution.from_array([0.25, 0.75])
    with pytest.raises(ValueError):
        d.mass[0] = 1.0


def test_channel_row_violation_reports_row():
    with pytest.raises(SimplexViolation) as exc:
        Channel.from_array([[0.5, 0.5], [0.7, 0.7]])
    assert exc.value.row == 1


def test_shape_mismatch():
    with pytest.raises(AlphabetMismatch):
        Distribution(Alphabet.of_size(3), np.array([0.5, 0.5]))


# -- marginals and posteriors -------------------------------------------------

def test_uniform_joint_marginals():
    j = Joint.from_array(np.full((2, 2), 0.25))
    np.testing.assert_array_equal(marginal_x(j).mass, [0.5, 0.5])
    np.testing.assert_array_equal(marginal_y(j).mass, [0.5, 0.5])


def test_example_marginal_is_row_sums(example_joint):
    expected = [sum(r) / TOTAL for r in PRINTED]
    np.testing.assert_allclose(marginal_x(example_joint).mass, expected, atol=1e-15)
    np.testing.assert_allclose(marginal_x(example_joint).mass, [0.3, 0.4, 0.3], atol=1e-8)


def test_product_joint_marginals():
    p, q = np.array([0.2, 0.8]), np.array([0.1, 0.6, 0.3])
    j = Joint.from_array(np.outer(p, q))
    np.testing.assert_allclose(marginal_x(j).mass, p, atol=1e-15)
    np.testing.assert_allclose(marginal_y(j).mass, q, atol=1e-15)


def test_posterior_independent_and_diagonal():
    p, q = np.array([0.3, 0.7]), np.array([0.5, 0.25, 0.25])
    ch = posterior(Joint.from_array(np.outer(p, q)))
    for row in ch.rows:
        np.testing.assert_allclose(row, q, atol=1e-15)
    diag = posterior(Joint.from_array(np.diag([0.2, 0.3, 0.5])))
    np.testing.assert_array_equal(diag.rows, np.eye(3))


def test_posterior_example(example_joint):
    ch = posterior(example_joint)
    for i, row in enumerate(PRINTED):
        s = sum(row)
        np.testing.assert_allclose(ch.rows[i], [v / s for v in row], atol=1e-15)


def test_posterior_zero_marginal_row():
    with pytest.raises(ZeroMarginalRow) as exc:
        posterior(Joint.from_array([[0.5, 0.5], [0.0, 0.0]]))
    assert exc.value.rows == (1,)


# -- channels -----------------------------------------------------------------

def test_push_identity_and_constant():
    prior = Distribution.from_array([0.2, 0.5, 0.3])
    out = push_channel(prior, Channel.identity(prior.alphabet))
    np.testing.assert_array_equal(out.mass, prior.mass)
    r = Distribution.from_array([0.9, 0.1])
    out = push_channel(prior, Channel.constant(prior.alphabet, r))
    np.testing.assert_allclose(out.mass, r.mass, atol=1e-15)


def test_push_example_initial_marginal(example_joint):
    # q_T(0) by hand: 0.3*0.46707838 + 0.4*0.89856339 + 0.3*0.45165810 = 0.6350463
    q = push_channel(marginal_x(example_joint), instance.initial_encoder())
    np.testing.assert_allclose(q.mass, [0.6350463, 0.3649537], atol=1e-8)


def test_push_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        push_channel(Distribution.from_array([0.5, 0.5]), Channel.identity(Alphabet.of_size(3)))


def test_compose_identity_and_deterministic():
    p_x_y = Channel.from_array([[0.2, 0.8], [0.6, 0.4]])
    np.testing.assert_allclose(compose_markov(p_x_y, Channel.identity(Alphabet.of_size(2))).rows, p_x_y.rows)
    p_t_x = Channel.from_array([[0.1, 0.9], [0.7, 0.3]])
    swap = Channel.from_array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(compose_markov(swap, p_t_x).rows, p_t_x.rows[::-1])


def test_compose_example(example_joint):
    m = PRINTED
    py = [sum(m[x][y] for x in range(3)) for y in range(3)]
    p0 = instance.INITIAL_ENCODER.tolist()
    expected = [[sum(m[x][y] / py[y] * p0[x][t] for x in range(3)) for t in range(2)] for y in range(3)]
    p_x_y = posterior(example_joint.transpose())
    np.testing.assert_allclose(compose_markov(p_x_y, instance.initial_encoder()).rows, expected, atol=1e-12)


# -- divergences and information ---------------------------------------------

def test_kl_examples():
    p = Distribution.from_array([0.3, 0.7])
    assert kl_divergence(p, p) == 0.0
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)
    assert kl_divergence([1.0, 0.0], [0.0, 1.0]) == math.inf


def test_mutual_information_examples():
    prior = Distribution.from_array([0.5, 0.5])
    assert mutual_information(prior, Channel.constant(prior.alphabet, Distribution.from_array([0.3, 0.7]))) == pytest.approx(0.0, abs=1e-15)
    assert mutual_information(prior, Channel.identity(prior.alphabet)) == pytest.approx(math.log(2), abs=1e-15)


def test_printed_converged_encoder_information(example_joint):
    # the published operating point: I(X;T) ~ 0.2496
    px = marginal_x(example_joint)
    i = mutual_information(px, Channel.from_array(instance.CONVERGED_108))
    assert i == pytest.approx(0.2496, abs=5e-4)


def test_conditional_entropy_of_identity_is_zero():
    assert conditional_shannon_entropy(Channel.identity(Alphabet.of_size(3)), [0.2, 0.3, 0.5]) == 0.0


def test_gap_zero_at_exact_marginal(rng):
    prior = Distribution.from_array([0.2, 0.5, 0.3])
    ch = Channel.from_array(rng.dirichlet(np.ones(2), size=3))
    assert mi_variational_gap(prior, ch, push_channel(prior, ch)) == pytest.approx(0.0, abs=1e-15)


def test_gap_identity_channel_uniform_reference():
    # chain rule by enumeration: D(p_X p_{T|X} || p_X u) - I(X;T) = D(p_T || u) for T = X
    gap = mi_variational_gap([0.7, 0.3], Channel.identity(Alphabet.of_size(2)), [0.5, 0.5])
    expected = 0.7 * math.log(0.7 / 0.5) + 0.3 * math.log(0.3 / 0.5)
    assert gap == pytest.approx(expected, abs=1e-15)


def test_mi_is_min_over_grid_of_references(rng):
    prior = Distribution.from_array(rng.dirichlet(np.ones(3)))
    ch = Channel.from_array(rng.dirichlet(np.ones(2), size=3))
    grid = simplex_grid(2, 400)
    grid = grid[(grid > 0).all(axis=1)]
    values = [relative_information(prior, ch, q) for q in grid]
    mi = mutual_information(prior, ch)
    assert min(values) >= mi - 1e-15
    assert min(values) == pytest.approx(mi, abs=1e-4)
    best = grid[int(np.argmin(values))]
    np.testing.assert_allclose(best, push_channel(prior, ch).mass, atol=1.0 / 400)
    assert all(mi_variational_gap(prior, ch, q) >= 0 for q in grid)


# -- properties ----------------------------------------------------------------

@given(simplex_vectors(4), simplex_vectors(4))
def test_kl_nonnegative(p, q):
    assert kl_divergence(p, q) >= 0


@given(prior_and_channel())
def test_push_is_a_distribution(pc):
    prior, ch = pc
    assert abs(push_channel(prior, ch).mass.sum() - 1.0) <= 1e-12


@given(prior_and_channel(), prior_and_channel())
def test_compose_preserves_stochasticity(a, b):
    _, first = a
    _, second = b
    if first.target.size != second.source.size:
        return
    rows = compose_markov(first, second).rows
    np.testing.assert_allclose(rows.sum(axis=1), 1.0, atol=1e-12)


@settings(max_examples=50)
@given(prior_and_channel(), st.randoms(use_true_random=False))
def test_mi_relabeling_invariance(pc, rnd):
    prior, ch = pc
    px = list(range(prior.alphabet.size))
    pt = list(range(ch.target.size))
    rnd.shuffle(px)
    rnd.shuffle(pt)
    permuted = Channel.from_array(ch.rows[px][:, pt])
    base = mutual_information(prior, ch)
    assert mutual_information(prior.mass[px], permuted) == pytest.approx(base, abs=1e-12)
    assert base >= -1e-12
