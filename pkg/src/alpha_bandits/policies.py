"""Decision rules: tempered-posterior Thompson sampling and index baselines.

``AlphaTS`` keeps one tempered posterior per arm, draws a mean for every
arm, and plays the argmax.  The argmax of one draw per arm is an exact
single sample from the categorical distribution whose k-th weight is the
posterior probability that arm k has the largest mean, so no explicit
weight computation is needed; ``arm_selection_probabilities`` estimates
those weights by Monte Carlo when they are wanted as numbers.

The frequentist baselines are the classical index policies UCB1, UCB-V
(empirical-variance Bernstein index) and MOSS (horizon-aware widths).

All policies are immutable values: ``record_reward`` returns a new policy.
Ties in any argmax break toward the lowest arm index.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import posteriors
from .errors import ArmOutOfRange, NotWarmStarted


@dataclass(frozen=True)
class ArmChoice:
    """Chosen arm plus the per-arm scores that produced it."""

    arm_index: int
    scores: np.ndarray


def ucb1_indices(means, counts, t) -> np.ndarray:
    """UCB1: mean + sqrt(2 ln t / n)."""
    means, counts = np.asarray(means, float), np.asarray(counts, float)
    return means + np.sqrt(2.0 * np.log(t) / counts)


def ucbv_indices(means, variances, counts, t, var_coef=2.0, bias_coef=3.0) -> np.ndarray:
    """UCB-V: mean + sqrt(var_coef * V * ln t / n) + bias_coef * ln t / n."""
    means, counts = np.asarray(means, float), np.asarray(counts, float)
    variances = np.asarray(variances, float)
    logt = np.log(t)
    return means + np.sqrt(var_coef * variances * logt / counts) + bias_coef * logt / counts


def moss_indices(means, counts, horizon, n_arms) -> np.ndarray:
    """MOSS: mean + sqrt(max(ln(T / (K n)), 0) / n)."""
    means, counts = np.asarray(means, float), np.asarray(counts, float)
    width = np.maximum(np.log(horizon / (n_arms * counts)), 0.0)
    return means + np.sqrt(width / counts)


@dataclass(frozen=True)
class AlphaTS:
    """Thompson sampling with one tempered posterior per arm.

    Well-defined from the priors alone, so unlike the index policies it
    never raises ``NotWarmStarted``; the simulator still warm-starts it.
    """

    arm_posteriors: tuple
    t: int = 0

    def __post_init__(self):
        alphas = {p.alpha for p in self.arm_posteriors}
        if len(alphas) > 1:
            raise ValueError(f"all arm posteriors must share one alpha, got {alphas}")

    @property
    def n_arms(self) -> int:
        return len(self.arm_posteriors)

    @property
    def alpha(self) -> float:
        return self.arm_posteriors[0].alpha

    def choose_arm(self, rng: np.random.Generator) -> ArmChoice:
        scores = np.array([p.sample_mean(rng) for p in self.arm_posteriors])
        return ArmChoice(int(np.argmax(scores)), scores)

    def record_reward(self, arm: int, reward: float) -> "AlphaTS":
        if not 0 <= arm < self.n_arms:
            raise ArmOutOfRange(f"arm {arm} not in [0, {self.n_arms})")
        posts = list(self.arm_posteriors)
        posts[arm] = posts[arm].update(reward)
        return AlphaTS(tuple(posts), self.t + 1)

    def arm_selection_probabilities(
        self, mc_draws: int, rng: np.random.Generator
    ) -> np.ndarray:
        """Monte Carlo estimate of the per-arm optimality probabilities.

        Repeats the draw-and-argmax experiment ``mc_draws`` times; the
        returned count ratios are nudged on the largest entry so they sum
        to 1.0 exactly.
        """
        if mc_draws < 1:
            raise ValueError("mc_draws must be >= 1")
        draws = np.stack(
            [posteriors.sample_means(p, rng, mc_draws) for p in self.arm_posteriors]
        )
        winners = np.argmax(draws, axis=0)
        counts = np.bincount(winners, minlength=self.n_arms)
        probs = counts / float(mc_draws)
        for _ in range(5):
            deficit = 1.0 - float(probs.sum())
            if deficit == 0.0:
                break
            probs[int(np.argmax(probs))] += deficit
        return probs


def _check_recorded(counts) -> None:
    if min(counts) < 1:
        raise NotWarmStarted("every arm needs at least one recorded reward")


@dataclass(frozen=True)
class UCB1:
    counts: tuple
    sums: tuple
    t: int = 0

    @classmethod
    def fresh(cls, n_arms: int) -> "UCB1":
        return cls((0,) * n_arms, (0.0,) * n_arms)

    @property
    def n_arms(self) -> int:
        return len(self.counts)

    def choose_arm(self, rng: np.random.Generator) -> ArmChoice:
        _check_recorded(self.counts)
        counts = np.asarray(self.counts, float)
        scores = ucb1_indices(np.asarray(self.sums) / counts, counts, self.t)
        return ArmChoice(int(np.argmax(scores)), scores)

    def record_reward(self, arm: int, reward: float) -> "UCB1":
        if not 0 <= arm < self.n_arms:
            raise ArmOutOfRange(f"arm {arm} not in [0, {self.n_arms})")
        counts = list(self.counts)
        sums = list(self.sums)
        counts[arm] += 1
        sums[arm] += reward
        return UCB1(tuple(counts), tuple(sums), self.t + 1)


@dataclass(frozen=True)
class UCBV:
    counts: tuple
    sums: tuple
    sum_squares: tuple
    t: int = 0
    var_coef: float = 2.0
    bias_coef: float = 3.0

    @classmethod
    def fresh(cls, n_arms: int, var_coef: float = 2.0, bias_coef: float = 3.0) -> "UCBV":
        zeros = (0.0,) * n_arms
        return cls((0,) * n_arms, zeros, zeros, 0, var_coef, bias_coef)

    @property
    def n_arms(self) -> int:
        return len(self.counts)

    def empirical_variances(self) -> np.ndarray:
        counts = np.asarray(self.counts, float)
        means = np.asarray(self.sums) / counts
        return np.maximum(np.asarray(self.sum_squares) / counts - means**2, 0.0)

    def choose_arm(self, rng: np.random.Generator) -> ArmChoice:
        _check_recorded(self.counts)
        counts = np.asarray(self.counts, float)
        means = np.asarray(self.sums) / counts
        scores = ucbv_indices(
            means, self.empirical_variances(), counts, self.t, self.var_coef, self.bias_coef
        )
        return ArmChoice(int(np.argmax(scores)), scores)

    def record_reward(self, arm: int, reward: float) -> "UCBV":
        if not 0 <= arm < self.n_arms:
            raise ArmOutOfRange(f"arm {arm} not in [0, {self.n_arms})")
        counts = list(self.counts)
        sums = list(self.sums)
        sq = list(self.sum_squares)
        counts[arm] += 1
        sums[arm] += reward
        sq[arm] += reward * reward
        return replace(self, counts=tuple(counts), sums=tuple(sums), sum_squares=tuple(sq), t=self.t + 1)


@dataclass(frozen=True)
class MOSS:
    counts: tuple
    sums: tuple
    horizon: int
    t: int = 0

    @classmethod
    def fresh(cls, n_arms: int, horizon: int) -> "MOSS":
        if horizon < 1:
            raise ValueError("MOSS needs a positive horizon")
        return cls((0,) * n_arms, (0.0,) * n_arms, horizon)

    @property
    def n_arms(self) -> int:
        return len(self.counts)

    def choose_arm(self, rng: np.random.Generator) -> ArmChoice:
        _check_recorded(self.counts)
        counts = np.asarray(self.counts, float)
        scores = moss_indices(np.asarray(self.sums) / counts, counts, self.horizon, self.n_arms)
        return ArmChoice(int(np.argmax(scores)), scores)

    def record_reward(self, arm: int, reward: float) -> "MOSS":
        if not 0 <= arm < self.n_arms:
            raise ArmOutOfRange(f"arm {arm} not in [0, {self.n_arms})")
        counts = list(self.counts)
        sums = list(self.sums)
        counts[arm] += 1
        sums[arm] += reward
        return MOSS(tuple(counts), tuple(sums), self.horizon, self.t + 1)


Policy = AlphaTS | UCB1 | UCBV | MOSS


def choose_arm(policy: Policy, rng: np.random.Generator) -> ArmChoice:
    """Next arm plus per-arm diagnostics for the given policy state."""
    return policy.choose_arm(rng)


def record_reward(policy: Policy, arm: int, reward: float) -> Policy:
    """Feed one observed reward; returns the successor policy state."""
    return policy.record_reward(arm, reward)


def arm_selection_probabilities(
    policy: AlphaTS, mc_draws: int, rng: np.random.Generator
) -> np.ndarray:
    """Monte Carlo optimality probabilities for a Thompson-sampling state."""
    return policy.arm_selection_probabilities(mc_draws, rng)
