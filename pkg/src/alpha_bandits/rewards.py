"""Parametric reward families and the divergence engine.

Four reward families are supported: Bernoulli, Categorical over a finite
support, Gaussian with known variance, and Poisson.  Each model knows its
exact mean, can draw samples from a caller-supplied generator, and exposes
a log-density used by the numeric quadrature oracle.

Divergences come in two flavours:

- ``renyi_divergence`` / ``kl_divergence``: closed forms.  The Renyi order
  may be any value in (0, 1] or exactly 2; order 2 is the neighbourhood
  divergence used by the prior-mass checker.  Order 1 returns the KL limit.
- ``renyi_quadrature_oracle``: an independent adaptive-quadrature
  evaluation of the defining integral, used to validate the closed forms
  for continuous families.

Conventions: ``renyi_divergence(a, b, alpha)`` integrates
``pdf_a**alpha * pdf_b**(1 - alpha)``, i.e. the first argument carries the
exponent ``alpha``.  All logs are natural.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import (
    DivergenceInfinite,
    InvalidAlpha,
    MixedFamilies,
    QuadratureDidNotConverge,
    UnsupportedFamily,
)

# Absolute tolerance for "parameters are equal" decisions (divergence == 0).
PARAM_TOL = 1e-12

# Quadrature truncation half-width in posterior standard deviations; the
# neglected tail mass is < 1e-12 for both endpoints.
_QUAD_SIGMAS = 12.0


@dataclass(frozen=True)
class DivergenceOrder:
    """Renyi order: any alpha in (0, 1] for tempering, or exactly 2.

    Orders in (0, 1) appear in the tempered-posterior theory; order 2 only
    in the prior-mass neighbourhood condition.  Anything else is rejected.
    """

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 < a <= 1.0 or a == 2.0):
            raise InvalidAlpha(f"divergence order must be in (0, 1] or == 2, got {a!r}")
        object.__setattr__(self, "alpha", a)


def _order(alpha) -> float:
    if isinstance(alpha, DivergenceOrder):
        return alpha.alpha
    return DivergenceOrder(float(alpha)).alpha


@dataclass(frozen=True)
class Bernoulli:
    """Bernoulli reward with success probability ``p``."""

    p: float
    family = "bernoulli"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"Bernoulli p must be in [0, 1], got {self.p!r}")

    @property
    def mean(self) -> float:
        return self.p

    def sample(self, rng: np.random.Generator) -> float:
        return 1.0 if rng.random() < self.p else 0.0

    def _probs(self) -> np.ndarray:
        return np.array([1.0 - self.p, self.p])


@dataclass(frozen=True)
class Categorical:
    """Categorical reward over ``values`` (default support 0..d-1).

    ``probs`` must be a simplex vector: entries >= 0 summing to 1 within
    1e-12.  A Categorical with d=2 and values {0, 1} is distribution-equal
    to a Bernoulli.
    """

    probs: tuple
    values: tuple = None
    family = "categorical"

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) < 1:
            raise ValueError("Categorical needs at least one category")
        if any(p < 0.0 for p in probs):
            raise ValueError("Categorical probs must be nonnegative")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError(f"Categorical probs must sum to 1, got {sum(probs)!r}")
        values = self.values
        if values is None:
            values = tuple(float(i) for i in range(len(probs)))
        else:
            values = tuple(float(v) for v in values)
            if len(values) != len(probs):
                raise ValueError("values and probs must have equal length")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "values", values)

    @property
    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def sample(self, rng: np.random.Generator) -> float:
        cum = np.cumsum(self.probs)
        idx = int(np.searchsorted(cum, rng.random(), side="right"))
        return self.values[min(idx, len(self.values) - 1)]

    def _probs(self) -> np.ndarray:
        return np.asarray(self.probs)


@dataclass(frozen=True)
class GaussianKnownVar:
    """Gaussian reward with known variance."""

    mean: float
    var: float
    family = "gaussian"

    def __post_init__(self):
        if not self.var > 0.0:
            raise ValueError(f"Gaussian variance must be positive, got {self.var!r}")
        if not math.isfinite(self.mean):
            raise ValueError("Gaussian mean must be finite")

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.normal(self.mean, math.sqrt(self.var)))

    def logpdf(self, x: float) -> float:
        return -0.5 * (x - self.mean) ** 2 / self.var - 0.5 * math.log(2.0 * math.pi * self.var)


@dataclass(frozen=True)
class Poisson:
    """Poisson reward with rate ``rate``.

    The natural parameter is log(rate) with log-partition exp; the
    user-facing parameter stays the rate.
    """

    rate: float
    family = "poisson"

    def __post_init__(self):
        if not self.rate > 0.0:
            raise ValueError(f"Poisson rate must be positive, got {self.rate!r}")

    @property
    def mean(self) -> float:
        return self.rate

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.poisson(self.rate))


RewardModel = Bernoulli | Categorical | GaussianKnownVar | Poisson


def mean(model: RewardModel) -> float:
    """Exact mean of the reward distribution."""
    return model.mean


def sample(model: RewardModel, rng: np.random.Generator) -> float:
    """One reward draw; identical stream state gives an identical draw."""
    return model.sample(rng)


def _check_same_family(a: RewardModel, b: RewardModel) -> None:
    if type(a) is not type(b):
        raise MixedFamilies(f"cannot mix {type(a).__name__} with {type(b).__name__}")
    if isinstance(a, Categorical) and a.values != b.values:
        raise MixedFamilies("categorical models have different supports")


def _params_equal(a: RewardModel, b: RewardModel) -> bool:
    if isinstance(a, Bernoulli):
        return abs(a.p - b.p) <= PARAM_TOL
    if isinstance(a, Categorical):
        return all(abs(x - y) <= PARAM_TOL for x, y in zip(a.probs, b.probs))
    if isinstance(a, GaussianKnownVar):
        return abs(a.mean - b.mean) <= PARAM_TOL and abs(a.var - b.var) <= PARAM_TOL
    return abs(a.rate - b.rate) <= PARAM_TOL


def _renyi_discrete(p: np.ndarray, q: np.ndarray, alpha: float) -> float:
    if alpha == 2.0:
        if np.any((p > 0.0) & (q == 0.0)):
            raise DivergenceInfinite("first model puts mass where the reference has none")
        mask = p > 0.0
        return math.log(float(np.sum(p[mask] ** 2 / q[mask])))
    mask = p > 0.0
    s = float(np.sum(p[mask] ** alpha * q[mask] ** (1.0 - alpha)))
    if s <= 0.0:
        raise DivergenceInfinite("supports are disjoint")
    return math.log(s) / (alpha - 1.0)


def renyi_divergence(model_a: RewardModel, model_b: RewardModel, alpha) -> float:
    """Closed-form Renyi divergence of order ``alpha`` between same-family models.

    Returns 0 exactly when the parameters are equal within ``PARAM_TOL``.
    Order 1 returns the KL divergence (the continuity limit).
    """
    a = _order(alpha)
    _check_same_family(model_a, model_b)
    if _params_equal(model_a, model_b):
        return 0.0
    if a == 1.0:
        return kl_divergence(model_a, model_b)

    if isinstance(model_a, (Bernoulli, Categorical)):
        d = _renyi_discrete(model_a._probs(), model_b._probs(), a)
    elif isinstance(model_a, GaussianKnownVar):
        vbar = a * model_b.var + (1.0 - a) * model_a.var
        if vbar <= 0.0:
            raise DivergenceInfinite("variance combination not integrable at this order")
        d = a * (model_a.mean - model_b.mean) ** 2 / (2.0 * vbar)
        d += math.log(vbar / (model_a.var ** (1.0 - a) * model_b.var**a)) / (2.0 * (a - 1.0))
    else:
        la, lb = model_a.rate, model_b.rate
        # Exponential-family form with log-partition exp(theta), theta = log rate.
        d = (a * la + (1.0 - a) * lb - la**a * lb ** (1.0 - a)) / (1.0 - a)
    return max(float(d), 0.0)


def kl_divergence(model_a: RewardModel, model_b: RewardModel) -> float:
    """Closed-form KL(model_a || model_b) for same-family models."""
    _check_same_family(model_a, model_b)
    if _params_equal(model_a, model_b):
        return 0.0

    if isinstance(model_a, (Bernoulli, Categorical)):
        p, q = model_a._probs(), model_b._probs()
        if np.any((p > 0.0) & (q == 0.0)):
            raise DivergenceInfinite("first model puts mass where the reference has none")
        mask = p > 0.0
        d = float(np.sum(p[mask] * np.log(p[mask] / q[mask])))
    elif isinstance(model_a, GaussianKnownVar):
        d = 0.5 * math.log(model_b.var / model_a.var)
        d += (model_a.var + (model_a.mean - model_b.mean) ** 2) / (2.0 * model_b.var) - 0.5
    else:
        la, lb = model_a.rate, model_b.rate
        d = la * math.log(la / lb) - la + lb
    return max(float(d), 0.0)


def renyi_quadrature_oracle(model_a: RewardModel, model_b: RewardModel, alpha) -> float:
    """Numeric Renyi divergence by adaptive quadrature (continuous families).

    Independent of the closed forms: integrates
    ``exp(alpha * logpdf_a + (1 - alpha) * logpdf_b)`` over a truncated
    support covering all but < 1e-12 of both masses, to absolute tolerance
    1e-8 on the divergence.
    """
    a = _order(alpha)
    if a == 1.0:
        raise InvalidAlpha("quadrature oracle is defined for orders in (0, 1) and 2")
    _check_same_family(model_a, model_b)
    if not isinstance(model_a, GaussianKnownVar):
        raise UnsupportedFamily("quadrature oracle supports continuous families only")
    if a == 2.0 and 2.0 * model_b.var - model_a.var <= 0.0:
        raise DivergenceInfinite("variance combination not integrable at this order")

    sd_a, sd_b = math.sqrt(model_a.var), math.sqrt(model_b.var)
    lo = min(model_a.mean - _QUAD_SIGMAS * sd_a, model_b.mean - _QUAD_SIGMAS * sd_b)
    hi = max(model_a.mean + _QUAD_SIGMAS * sd_a, model_b.mean + _QUAD_SIGMAS * sd_b)

    def integrand(x: float) -> float:
        return math.exp(a * model_a.logpdf(x) + (1.0 - a) * model_b.logpdf(x))

    value, abserr, info, *rest = integrate.quad(
        integrand, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=300, full_output=True
    )
    if rest or value <= 0.0 or abserr > 1e-8 * max(value, 1.0):
        raise QuadratureDidNotConverge(
            f"quadrature failed for {model_a} vs {model_b} at order {a}"
        )
    return max(math.log(value) / (a - 1.0), 0.0)
