"""Experiment engine: interaction loop, pseudo-regret accounting, replicates.

A replicate first pulls every arm ``init_pulls`` times (warm start), then
runs ``horizon`` adaptive rounds of choose / observe / record.  Cumulative
pseudo-regret sums the true mean gap of the chosen arm, not realized
rewards, and covers only the adaptive rounds; the warm-start contribution
is reported separately on the trace.

Replicate r of policy p always runs on the seed derived from
``(base_seed, p, r)``, so results are independent of scheduling and thread
count, and ``run_experiment`` output is sorted by (policy, replicate).
"""

import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from . import posteriors as post_mod
from . import rewards
from .errors import MixedHorizons
from .policies import MOSS, UCB1, UCBV, AlphaTS
from .rng import derive_seed, make_rng

MEAN_TIE_TOL = 1e-12

POLICY_KINDS = ("alpha_ts", "ts", "ucb1", "ucbv", "moss")


@dataclass(frozen=True)
class BanditInstance:
    """A fixed set of reward arms with a unique best arm.

    Duplicated maxima are rejected unless ``allow_ties`` is set (useful
    only for degenerate tests where every gap is zero).
    """

    arms: tuple
    allow_ties: bool = False

    def __post_init__(self):
        arms = tuple(self.arms)
        if len(arms) < 2:
            raise ValueError("an instance needs at least 2 arms")
        object.__setattr__(self, "arms", arms)
        means = self.true_means
        if not self.allow_ties:
            n_best = int(np.sum(means >= means.max() - MEAN_TIE_TOL))
            if n_best != 1:
                raise ValueError("best arm is not unique; pass allow_ties to permit this")

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    @property
    def true_means(self) -> np.ndarray:
        return np.array([arm.mean for arm in self.arms])

    @property
    def best_arm(self) -> int:
        return int(np.argmax(self.true_means))

    @property
    def gaps(self) -> np.ndarray:
        means = self.true_means
        return means.max() - means


@dataclass(frozen=True)
class PolicySpec:
    """One policy entry of an experiment: kind plus its parameters."""

    kind: str
    alpha: float = None
    ucbv_var_coef: float = 2.0
    ucbv_bias_coef: float = 3.0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}; expected one of {POLICY_KINDS}")
        if self.kind == "ts":
            object.__setattr__(self, "alpha", 1.0)
        elif self.kind == "alpha_ts":
            if self.alpha is None:
                raise ValueError("alpha_ts needs an alpha")
        else:
            object.__setattr__(self, "alpha", None)

    @property
    def label(self) -> str:
        return self.kind


@dataclass(frozen=True)
class RegretTrace:
    """Per-step cumulative pseudo-regret of one replicate."""

    replicate_id: int
    algorithm_label: str
    alpha: float
    cum_regret: np.ndarray
    pulls: np.ndarray
    seed: int
    warm_start_regret: float


@dataclass(frozen=True)
class ExperimentConfig:
    instance: BanditInstance
    horizon: int
    replicates: int
    policies: tuple
    base_seed: int
    init_pulls: int = 1
    prior: object = None
    mc_draws: int = 10_000

    def __post_init__(self):
        if self.horizon < 1 or self.replicates < 1 or self.init_pulls < 1:
            raise ValueError("horizon, replicates and init_pulls must all be >= 1")
        if not self.policies:
            raise ValueError("at least one policy entry is required")
        object.__setattr__(self, "policies", tuple(self.policies))
        keys = [(p.kind, p.alpha) for p in self.policies]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (kind, alpha) policy entries are ambiguous")


def default_prior(arm) -> post_mod.PriorSpec:
    """Family-matched uninformative prior for one reward arm."""
    if isinstance(arm, rewards.Bernoulli):
        return post_mod.BetaPrior(1.0, 1.0)
    if isinstance(arm, rewards.Categorical):
        return post_mod.DirichletPrior((1.0,) * len(arm.probs), arm.values)
    if isinstance(arm, rewards.GaussianKnownVar):
        return post_mod.GaussianPrior(0.0, 1.0, arm.var)
    if isinstance(arm, rewards.Poisson):
        return post_mod.GammaPrior(1.0, 1.0)
    raise TypeError(f"no default prior for {arm!r}")


def build_policy(spec: PolicySpec, config: ExperimentConfig):
    """Fresh policy state for one replicate."""
    k = config.instance.n_arms
    if spec.kind in ("alpha_ts", "ts"):
        posts = tuple(
            post_mod.init_posterior(config.prior or default_prior(arm), spec.alpha)
            for arm in config.instance.arms
        )
        return AlphaTS(posts)
    if spec.kind == "ucb1":
        return UCB1.fresh(k)
    if spec.kind == "ucbv":
        return UCBV.fresh(k, spec.ucbv_var_coef, spec.ucbv_bias_coef)
    return MOSS.fresh(k, config.horizon)


def run_replicate(config: ExperimentConfig, policy_index: int, replicate_id: int) -> RegretTrace:
    """One seeded replicate of one policy entry."""
    spec = config.policies[policy_index]
    seed = derive_seed(config.base_seed, policy_index, replicate_id)
    rng = make_rng(seed)
    arms = config.instance.arms
    gaps = config.instance.gaps
    policy = build_policy(spec, config)

    pulls = np.zeros(len(arms), dtype=np.int64)
    for k, arm in enumerate(arms):
        for _ in range(config.init_pulls):
            policy = policy.record_reward(k, arm.sample(rng))
        pulls[k] = config.init_pulls
    warm_start_regret = config.init_pulls * float(gaps.sum())

    horizon = config.horizon
    cum_regret = np.empty(horizon)
    running = 0.0
    for t in range(horizon):
        arm = policy.choose_arm(rng).arm_index
        policy = policy.record_reward(arm, arms[arm].sample(rng))
        running += gaps[arm]
        cum_regret[t] = running
        pulls[arm] += 1

    return RegretTrace(
        replicate_id=replicate_id,
        algorithm_label=spec.label,
        alpha=spec.alpha,
        cum_regret=cum_regret,
        pulls=pulls,
        seed=seed,
        warm_start_regret=warm_start_regret,
    )


def run_experiment(config: ExperimentConfig, n_jobs: int = 1) -> list:
    """All replicates of all policy entries, sorted by (policy, replicate).

    ``n_jobs`` only changes the wall clock, never the outputs: every
    replicate owns a seed derived from its (policy, replicate) position.
    """
    tasks = [
        (pi, r) for pi in range(len(config.policies)) for r in range(config.replicates)
    ]
    if n_jobs == 1:
        return [run_replicate(config, pi, r) for pi, r in tasks]
    # Parallel returns results in submission order, which is already
    # (policy, replicate) sorted, so scheduling cannot reorder the output.
    return Parallel(n_jobs=n_jobs)(delayed(run_replicate)(config, pi, r) for pi, r in tasks)


def nearest_rank(sorted_values: np.ndarray, pct: float) -> np.ndarray:
    """Nearest-rank percentile along the first axis of presorted values."""
    n = sorted_values.shape[0]
    idx = max(int(math.ceil(pct / 100.0 * n)), 1) - 1
    return sorted_values[idx]


@dataclass(frozen=True)
class PercentileSummary:
    """Per-timestep percentile curves for one (algorithm, alpha) group."""

    algorithm_label: str
    alpha: float
    percentiles: tuple
    curves: np.ndarray  # shape (len(percentiles), horizon)
    n_traces: int


def aggregate(traces, percentiles=(10.0, 50.0, 90.0)) -> list:
    """Nearest-rank percentile curves per (algorithm, alpha) group.

    All traces must share one horizon; groups keep first-seen order.
    """
    traces = list(traces)
    if not traces:
        return []
    horizon = len(traces[0].cum_regret)
    if any(len(tr.cum_regret) != horizon for tr in traces):
        raise MixedHorizons("all traces must share the same horizon")

    groups = {}
    for tr in traces:
        groups.setdefault((tr.algorithm_label, tr.alpha), []).append(tr)

    out = []
    for (label, alpha), members in groups.items():
        stacked = np.sort(np.stack([tr.cum_regret for tr in members]), axis=0)
        curves = np.stack([nearest_rank(stacked, p) for p in percentiles])
        out.append(
            PercentileSummary(
                algorithm_label=label,
                alpha=alpha,
                percentiles=tuple(percentiles),
                curves=curves,
                n_traces=len(members),
            )
        )
    return out
