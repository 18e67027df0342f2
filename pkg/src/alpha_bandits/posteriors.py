"""Conjugate tempered posteriors.

A tempered posterior raises each likelihood term to a power
``alpha`` in (0, 1] before normalization, so one observation moves the
sufficient statistics by ``alpha`` times its usual increment:

- Beta-Bernoulli:        a += alpha on success, b += alpha on failure
- Dirichlet-Categorical: conc[category] += alpha
- Gaussian-Gaussian:     precision += alpha / likelihood_var
- Gamma-Poisson:         shape += alpha * x, rate += alpha

``alpha == 1`` reproduces the standard conjugate posterior exactly.
Posterior values are immutable; ``update`` returns a new value, which lets
callers snapshot histories freely.  All draws use the caller's generator
as the sole entropy source.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidAlpha, RewardOutOfSupport


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise InvalidAlpha(f"tempering alpha must be in (0, 1], got {alpha!r}")
    return alpha


# ---------------------------------------------------------------------------
# Prior specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BetaPrior:
    a0: float = 1.0
    b0: float = 1.0

    def __post_init__(self):
        if not (self.a0 > 0.0 and self.b0 > 0.0):
            raise ValueError("Beta hyperparameters must be positive")


@dataclass(frozen=True)
class DirichletPrior:
    conc: tuple
    values: tuple = None

    def __post_init__(self):
        conc = tuple(float(c) for c in self.conc)
        if len(conc) < 1 or any(c <= 0.0 for c in conc):
            raise ValueError("Dirichlet concentrations must be positive")
        values = self.values
        if values is None:
            values = tuple(float(i) for i in range(len(conc)))
        else:
            values = tuple(float(v) for v in values)
            if len(values) != len(conc):
                raise ValueError("values length must match concentration length")
        object.__setattr__(self, "conc", conc)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class GaussianPrior:
    mean0: float = 0.0
    precision0: float = 1.0
    likelihood_var: float = 1.0

    def __post_init__(self):
        if not (self.precision0 > 0.0 and self.likelihood_var > 0.0):
            raise ValueError("precision and likelihood variance must be positive")


@dataclass(frozen=True)
class GammaPrior:
    shape0: float = 1.0
    rate0: float = 1.0

    def __post_init__(self):
        if not (self.shape0 > 0.0 and self.rate0 > 0.0):
            raise ValueError("Gamma hyperparameters must be positive")


PriorSpec = BetaPrior | DirichletPrior | GaussianPrior | GammaPrior


# ---------------------------------------------------------------------------
# Tempered posteriors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BetaBernoulli:
    a: float
    b: float
    alpha: float
    n_obs: int = 0

    def __post_init__(self):
        if not (self.a > 0.0 and self.b > 0.0):
            raise ValueError("Beta parameters must be positive")

    def update(self, reward: float) -> "BetaBernoulli":
        if reward == 1.0:
            return BetaBernoulli(self.a + self.alpha, self.b, self.alpha, self.n_obs + 1)
        if reward == 0.0:
            return BetaBernoulli(self.a, self.b + self.alpha, self.alpha, self.n_obs + 1)
        raise RewardOutOfSupport(f"Bernoulli reward must be 0 or 1, got {reward!r}")

    def sample_mean(self, rng: np.random.Generator) -> float:
        return float(rng.beta(self.a, self.b))

    def sample_means(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.beta(self.a, self.b, size)

    @property
    def mean_of_mean(self) -> float:
        return self.a / (self.a + self.b)


@dataclass(frozen=True)
class DirichletCategorical:
    conc: tuple
    alpha: float
    n_obs: int = 0
    values: tuple = None

    def __post_init__(self):
        conc = tuple(float(c) for c in self.conc)
        if any(c <= 0.0 for c in conc):
            raise ValueError("Dirichlet concentrations must be positive")
        values = self.values
        if values is None:
            values = tuple(float(i) for i in range(len(conc)))
        else:
            values = tuple(float(v) for v in values)
        if len(values) != len(conc):
            raise ValueError("values length must match concentration length")
        object.__setattr__(self, "conc", conc)
        object.__setattr__(self, "values", values)

    def update(self, reward: float) -> "DirichletCategorical":
        try:
            idx = self.values.index(float(reward))
        except ValueError:
            raise RewardOutOfSupport(
                f"categorical reward {reward!r} not in support {self.values!r}"
            ) from None
        conc = list(self.conc)
        conc[idx] += self.alpha
        return DirichletCategorical(tuple(conc), self.alpha, self.n_obs + 1, self.values)

    def sample_mean(self, rng: np.random.Generator) -> float:
        w = rng.dirichlet(self.conc)
        return float(np.dot(self.values, w))

    def sample_means(self, rng: np.random.Generator, size: int) -> np.ndarray:
        w = rng.dirichlet(self.conc, size)
        return w @ np.asarray(self.values)

    @property
    def mean_of_mean(self) -> float:
        conc = np.asarray(self.conc)
        return float(np.dot(self.values, conc / conc.sum()))


@dataclass(frozen=True)
class GaussianGaussian:
    post_mean: float
    post_precision: float
    likelihood_var: float
    alpha: float
    n_obs: int = 0

    def __post_init__(self):
        if not (self.post_precision > 0.0 and self.likelihood_var > 0.0):
            raise ValueError("precision and likelihood variance must be positive")

    def update(self, reward: float) -> "GaussianGaussian":
        reward = float(reward)
        if not np.isfinite(reward):
            raise RewardOutOfSupport(f"Gaussian reward must be finite, got {reward!r}")
        w = self.alpha / self.likelihood_var
        new_prec = self.post_precision + w
        new_mean = (self.post_precision * self.post_mean + w * reward) / new_prec
        return GaussianGaussian(
            new_mean, new_prec, self.likelihood_var, self.alpha, self.n_obs + 1
        )

    def sample_mean(self, rng: np.random.Generator) -> float:
        return float(rng.normal(self.post_mean, self.post_precision**-0.5))

    def sample_means(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.post_mean, self.post_precision**-0.5, size)

    @property
    def mean_of_mean(self) -> float:
        return self.post_mean


@dataclass(frozen=True)
class GammaPoisson:
    shape: float
    rate: float
    alpha: float
    n_obs: int = 0

    def __post_init__(self):
        if not (self.shape > 0.0 and self.rate > 0.0):
            raise ValueError("Gamma parameters must be positive")

    def update(self, reward: float) -> "GammaPoisson":
        reward = float(reward)
        if reward < 0.0 or reward != int(reward):
            raise RewardOutOfSupport(
                f"Poisson reward must be a nonnegative integer, got {reward!r}"
            )
        return GammaPoisson(
            self.shape + self.alpha * reward, self.rate + self.alpha, self.alpha, self.n_obs + 1
        )

    def sample_mean(self, rng: np.random.Generator) -> float:
        return float(rng.gamma(self.shape, 1.0 / self.rate))

    def sample_means(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.gamma(self.shape, 1.0 / self.rate, size)

    @property
    def mean_of_mean(self) -> float:
        return self.shape / self.rate


TemperedPosterior = BetaBernoulli | DirichletCategorical | GaussianGaussian | GammaPoisson


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def init_posterior(prior: PriorSpec, alpha: float) -> TemperedPosterior:
    """Posterior equal to the prior, before any data, with n_obs = 0."""
    alpha = _check_alpha(alpha)
    if isinstance(prior, BetaPrior):
        return BetaBernoulli(prior.a0, prior.b0, alpha)
    if isinstance(prior, DirichletPrior):
        return DirichletCategorical(prior.conc, alpha, 0, prior.values)
    if isinstance(prior, GaussianPrior):
        return GaussianGaussian(prior.mean0, prior.precision0, prior.likelihood_var, alpha)
    if isinstance(prior, GammaPrior):
        return GammaPoisson(prior.shape0, prior.rate0, alpha)
    raise TypeError(f"unknown prior spec {prior!r}")


def update(post: TemperedPosterior, reward: float) -> TemperedPosterior:
    """One tempered conjugate update; returns a new posterior value."""
    return post.update(reward)


def batch_update(post: TemperedPosterior, rewards) -> TemperedPosterior:
    """Fold ``update`` over ``rewards`` in order."""
    for x in rewards:
        post = post.update(x)
    return post


def sample_mean(post: TemperedPosterior, rng: np.random.Generator) -> float:
    """Draw a parameter from the posterior, return the implied reward mean."""
    return post.sample_mean(rng)


def sample_means(post: TemperedPosterior, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized ``sample_mean``: ``size`` independent draws."""
    return post.sample_means(rng, size)
