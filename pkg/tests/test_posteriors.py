"""Tempered-posterior algebra: updates, sampling, and invariants."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alpha_bandits.errors import InvalidAlpha, RewardOutOfSupport
from alpha_bandits.posteriors import (
    BetaBernoulli,
    BetaPrior,
    DirichletCategorical,
    DirichletPrior,
    GammaPoisson,
    GammaPrior,
    GaussianGaussian,
    GaussianPrior,
    batch_update,
    init_posterior,
    sample_mean,
    sample_means,
    update,
)


def rng_for(seed):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# Initialization
# ---------------------------------------------------------------------------


def test_init_is_prior_passthrough():
    post = init_posterior(BetaPrior(1, 1), 0.5)
    assert (post.a, post.b, post.n_obs) == (1.0, 1.0, 0)

    post = init_posterior(DirichletPrior((1, 1, 1)), 0.3)
    assert post.conc == (1.0, 1.0, 1.0) and post.n_obs == 0

    post = init_posterior(GaussianPrior(0.0, 1.0), 1.0)
    assert (post.post_mean, post.post_precision, post.n_obs) == (0.0, 1.0, 0)

    post = init_posterior(GammaPrior(2.0, 3.0), 0.9)
    assert (post.shape, post.rate, post.n_obs) == (2.0, 3.0, 0)


@pytest.mark.parametrize("alpha", [0.0, -0.2, 1.0001, 2.0])
def test_init_rejects_bad_alpha(alpha):
    with pytest.raises(InvalidAlpha):
        init_posterior(BetaPrior(1, 1), alpha)


@pytest.mark.parametrize(
    "make",
    [
        lambda: BetaPrior(0.0, 1.0),
        lambda: DirichletPrior((1.0, -1.0)),
        lambda: DirichletPrior((1.0, 1.0), values=(0.0,)),
        lambda: GaussianPrior(0.0, 0.0),
        lambda: GammaPrior(1.0, 0.0),
    ],
)
def test_invalid_priors_rejected(make):
    with pytest.raises(ValueError):
        make()


# ---------------------------------------------------------------------------
# Update rules
# ---------------------------------------------------------------------------


def test_beta_tempered_counts():
    # 1 + alpha * successes / failures
    post = init_posterior(BetaPrior(1, 1), 0.5)
    post = batch_update(post, [1, 1, 1, 1, 0, 0])
    assert (post.a, post.b) == (3.0, 2.0)
    assert post.n_obs == 6


def test_dirichlet_tempered_counts():
    post = init_posterior(DirichletPrior((1, 1, 1)), 0.5)
    post = batch_update(post, [0, 0, 2, 2, 2, 2])
    assert post.conc == (2.0, 1.0, 3.0)


def test_gaussian_tempered_update():
    post = init_posterior(GaussianPrior(0.0, 1.0, likelihood_var=1.0), 0.5)
    post = batch_update(post, [1.0, 1.0, 1.0])
    assert post.post_precision == pytest.approx(2.5, abs=0)
    assert post.post_mean == pytest.approx(0.6, abs=1e-15)


def test_gamma_tempered_update():
    post = init_posterior(GammaPrior(1.0, 1.0), 0.5)
    post = batch_update(post, [2, 4])
    assert (post.shape, post.rate) == (4.0, 2.0)


def test_batch_update_empty_is_identity():
    post = init_posterior(BetaPrior(1, 1), 0.5)
    assert batch_update(post, []) == post


def test_standard_posterior_at_alpha_one():
    post = batch_update(init_posterior(BetaPrior(1, 1), 1.0), [1, 0, 1])
    assert (post.a, post.b) == (3.0, 2.0)


@pytest.mark.parametrize(
    "post,bad",
    [
        (init_posterior(BetaPrior(1, 1), 0.5), 0.5),
        (init_posterior(BetaPrior(1, 1), 0.5), 2.0),
        (init_posterior(DirichletPrior((1, 1, 1)), 0.5), 3.0),
        (init_posterior(DirichletPrior((1, 1), values=(5.0, 6.0)), 0.5), 0.0),
        (init_posterior(GaussianPrior(), 0.5), float("inf")),
        (init_posterior(GammaPrior(), 0.5), -1.0),
        (init_posterior(GammaPrior(), 0.5), 2.5),
    ],
)
def test_reward_out_of_support(post, bad):
    with pytest.raises(RewardOutOfSupport):
        update(post, bad)


def test_batch_update_raises_at_first_offender():
    post = init_posterior(BetaPrior(1, 1), 0.5)
    with pytest.raises(RewardOutOfSupport):
        batch_update(post, [1, 0, 0.5, 1])


# ---------------------------------------------------------------------------
# Algebraic invariants
# ---------------------------------------------------------------------------


@given(st.lists(st.sampled_from([0.0, 1.0]), max_size=40), st.randoms(use_true_random=False))
@settings(max_examples=200, deadline=None)
def test_beta_order_invariance(rewards, pyrandom):
    shuffled = list(rewards)
    pyrandom.shuffle(shuffled)
    a = batch_update(init_posterior(BetaPrior(1, 1), 0.7), rewards)
    b = batch_update(init_posterior(BetaPrior(1, 1), 0.7), shuffled)
    assert (a.a, a.b, a.n_obs) == (b.a, b.b, b.n_obs)


def test_order_invariance_all_families():
    rng = rng_for(41)
    for _ in range(100):
        n = int(rng.integers(1, 30))
        perm = rng.permutation(n)

        xs = list(rng.integers(0, 2, n).astype(float))
        a = batch_update(init_posterior(BetaPrior(2, 3), 0.4), xs)
        b = batch_update(init_posterior(BetaPrior(2, 3), 0.4), [xs[i] for i in perm])
        assert (a.a, a.b) == (b.a, b.b)

        xs = list(rng.integers(0, 3, n).astype(float))
        a = batch_update(init_posterior(DirichletPrior((1, 1, 1)), 0.4), xs)
        b = batch_update(init_posterior(DirichletPrior((1, 1, 1)), 0.4), [xs[i] for i in perm])
        assert a.conc == b.conc

        xs = list(rng.integers(0, 8, n).astype(float))
        a = batch_update(init_posterior(GammaPrior(1, 1), 0.4), xs)
        b = batch_update(init_posterior(GammaPrior(1, 1), 0.4), [xs[i] for i in perm])
        assert a.rate == b.rate
        assert a.shape == pytest.approx(b.shape, rel=1e-12)

        xs = list(rng.normal(0, 1, n))
        a = batch_update(init_posterior(GaussianPrior(), 0.4), xs)
        b = batch_update(init_posterior(GaussianPrior(), 0.4), [xs[i] for i in perm])
        assert a.post_precision == pytest.approx(b.post_precision, rel=1e-12)
        assert a.post_mean == pytest.approx(b.post_mean, rel=1e-12, abs=1e-12)


def test_alpha_one_matches_textbook_conjugacy():
    rng = rng_for(42)
    for _ in range(50):
        n = int(rng.integers(1, 40))

        xs = rng.integers(0, 2, n).astype(float)
        post = batch_update(init_posterior(BetaPrior(1.5, 2.5), 1.0), xs)
        assert post.a == 1.5 + xs.sum() and post.b == 2.5 + (n - xs.sum())

        xs = rng.integers(0, 6, n).astype(float)
        post = batch_update(init_posterior(GammaPrior(2.0, 1.0), 1.0), xs)
        running = 2.0
        for x in xs:
            running += x
        assert post.shape == running and post.rate == 1.0 + n

        xs = rng.normal(0.3, 1.0, n)
        post = batch_update(init_posterior(GaussianPrior(0.0, 2.0, 1.0), 1.0), xs)
        prec = 2.0 + n
        assert post.post_precision == pytest.approx(prec, rel=1e-14)
        assert post.post_mean == pytest.approx(float(xs.sum()) / prec, rel=1e-12, abs=1e-12)


def test_tempering_halving():
    # two updates at alpha 0.5 move the statistics like one at alpha 1
    for x in (0.0, 1.0):
        twice = batch_update(init_posterior(BetaPrior(1, 1), 0.5), [x, x])
        once = batch_update(init_posterior(BetaPrior(1, 1), 1.0), [x])
        assert (twice.a, twice.b) == (once.a, once.b)

    twice = batch_update(init_posterior(DirichletPrior((1, 1, 1)), 0.5), [2, 2])
    once = batch_update(init_posterior(DirichletPrior((1, 1, 1)), 1.0), [2])
    assert twice.conc == once.conc

    twice = batch_update(init_posterior(GammaPrior(1, 1), 0.5), [3, 3])
    once = batch_update(init_posterior(GammaPrior(1, 1), 1.0), [3])
    assert (twice.shape, twice.rate) == (once.shape, once.rate)

    twice = batch_update(init_posterior(GaussianPrior(), 0.5), [0.7, 0.7])
    once = batch_update(init_posterior(GaussianPrior(), 1.0), [0.7])
    assert twice.post_precision == once.post_precision
    assert twice.post_mean == pytest.approx(once.post_mean, abs=1e-12)


def test_n_obs_counts_updates():
    post = init_posterior(GaussianPrior(), 0.5)
    for i in range(5):
        assert post.n_obs == i
        post = update(post, 0.1 * i)
    assert post.n_obs == 5


# ---------------------------------------------------------------------------
# Posterior sampling
# ---------------------------------------------------------------------------


def test_sample_mean_deterministic_given_stream():
    post = BetaBernoulli(3.0, 2.0, 0.5)
    assert sample_mean(post, rng_for(5)) == sample_mean(post, rng_for(5))


def test_beta_sample_mean_distribution():
    post = BetaBernoulli(3.0, 2.0, 0.5)
    draws = sample_means(post, rng_for(51), 100_000)
    assert abs(draws.mean() - 0.6) < 0.005


def test_dirichlet_concentrated_sample():
    post = DirichletCategorical((1e9, 1.0, 1.0), 0.5)
    val = sample_mean(post, rng_for(52))
    assert abs(val) < 1e-3


def test_gaussian_posterior_sample_variance():
    post = GaussianGaussian(0.6, 2.5, 1.0, 0.5)
    draws = sample_means(post, rng_for(53), 100_000)
    assert abs(draws.var() - 0.4) < 0.01


def test_custom_support_dirichlet_mean_map():
    post = DirichletCategorical((1e9, 1.0), 0.5, values=(10.0, 20.0))
    assert abs(sample_mean(post, rng_for(54)) - 10.0) < 1e-3


@pytest.mark.parametrize(
    "post",
    [
        BetaBernoulli(3.0, 2.0, 0.5),
        DirichletCategorical((2.0, 1.0, 4.0), 0.5),
        GaussianGaussian(0.6, 2.5, 1.0, 0.5),
        GammaPoisson(4.0, 2.0, 0.5),
    ],
)
def test_posterior_mean_sanity(post):
    # MC mean within 4 standard errors of the analytic posterior mean
    draws = sample_means(post, rng_for(55), 100_000)
    se = draws.std(ddof=1) / np.sqrt(draws.size)
    assert abs(draws.mean() - post.mean_of_mean) <= 4.0 * se
