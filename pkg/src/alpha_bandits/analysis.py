"""Theoretical-quantity calculators and empirical verifiers.

Covers the concentration-rate constant C(alpha), three regret upper
bounds, the asymptotic log(T) lower-bound coefficient, the prior-mass
condition on order-2 divergence balls, and a Monte Carlo check of the
tempered-posterior concentration inequality.

The constant ``r0`` that appears in the upper bounds is not computable
from first principles here; it is a configuration input (default 1) and
results quoting it should be read as shapes, not certified constants.
All logarithms are natural.
"""

import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from scipy import integrate, stats

from . import posteriors as post_mod
from . import rewards
from .errors import BallUnresolvable, InvalidAlpha, UnsupportedFamily
from .rng import derive_seed, make_rng


def c_alpha(alpha: float, D: float = 1.0) -> float:
    """Concentration-rate constant: D * (1 - alpha) * min(2 alpha, 1 - alpha) / 16.

    ``D`` is 1 for sub-Gaussian rewards and m / C_g**2 for a
    one-dimensional exponential family whose log-partition curvature lies
    in [m, C_g] over the parameter range of interest.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha must be in (0, 1), got {alpha!r}")
    if not D > 0.0:
        raise ValueError(f"D must be positive, got {D!r}")
    return D * (1.0 - alpha) * min(2.0 * alpha, 1.0 - alpha) / 16.0


@dataclass(frozen=True)
class BoundInputs:
    """Inputs shared by the regret-bound calculators.

    ``gaps`` lists the suboptimal arms' mean gaps only (so K counts one
    more arm than gaps).  Each gap must lie in (0, 1].
    """

    gaps: tuple
    horizon: int
    alpha: float
    D: float = 1.0
    r0: float = 1.0

    def __post_init__(self):
        gaps = tuple(float(g) for g in self.gaps)
        if not gaps or any(not 0.0 < g <= 1.0 for g in gaps):
            raise ValueError("gaps must be nonempty with every gap in (0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not self.r0 > 0.0:
            raise ValueError("r0 must be positive")
        c_alpha(self.alpha, self.D)  # validates alpha and D
        object.__setattr__(self, "gaps", gaps)

    @property
    def n_arms(self) -> int:
        return len(self.gaps) + 1

    @property
    def c(self) -> float:
        return c_alpha(self.alpha, self.D)


def _thm1_term(gap: float, inputs: BoundInputs) -> dict:
    c = inputs.c
    log_arg = inputs.horizon * c * gap * gap / 9.0
    log_active = math.log(log_arg) > 0.0
    term = inputs.r0 * gap + 27.0 / (2.0 * c * gap)
    if log_active:
        term += 9.0 * (inputs.r0 + 1.0) * math.log(log_arg) / (c * gap)
    return {"gap": gap, "log_argument": log_arg, "log_active": log_active, "value": term}


def thm1_instance_bound(inputs: BoundInputs) -> float:
    """Tight instance-dependent bound, summed over suboptimal arms.

    Per arm: 9 (r0 + 1) log(T C Delta^2 / 9) / (C Delta) + r0 Delta
    + 27 / (2 C Delta).  When the log argument is <= 1 the log term is
    dropped; the r0 Delta term is conservatively retained on that branch.
    """
    return float(sum(_thm1_term(g, inputs)["value"] for g in inputs.gaps))


def thm3_instance_bound(inputs: BoundInputs) -> float:
    """Lower-bound-matching form: sum of
    Delta * (9 (r0 + 1) log(T) / (C Delta^2) + (2 r0 + 3) / 2)."""
    c = inputs.c
    log_t = math.log(inputs.horizon)
    return float(
        sum(
            g * (9.0 * (inputs.r0 + 1.0) * log_t / (c * g * g) + (2.0 * inputs.r0 + 3.0) / 2.0)
            for g in inputs.gaps
        )
    )


@dataclass(frozen=True)
class Thm2Bound:
    """Instance-independent bound: simplified envelope plus the
    constant-carrying per-arm form from the case-split argument."""

    envelope: float
    sqrt_term: float
    detailed: float
    gap_threshold: float

    def __float__(self):
        return self.envelope


def thm2_independent_bound(inputs: BoundInputs) -> Thm2Bound:
    """Instance-independent bound O(K + sqrt(K T log K / C)).

    ``sqrt_term`` is sqrt(K T log K / C); ``envelope`` adds K.
    ``detailed`` sums, per suboptimal arm, the smaller of the small-gap
    cap e sqrt(T K log K / C) and the large-gap cap
    19 (r0 + 1) sqrt(T log K / (C K)) + r0, with the case split falling at
    ``gap_threshold`` = e sqrt(K log K) / sqrt(T C).
    """
    if inputs.n_arms < 2:
        raise ValueError("need at least 2 arms")
    k, t, c = inputs.n_arms, inputs.horizon, inputs.c
    log_k = math.log(k)
    sqrt_term = math.sqrt(k * t * log_k / c)
    small_gap_cap = math.e * sqrt_term
    large_gap_cap = 19.0 * (inputs.r0 + 1.0) * math.sqrt(t * log_k / (c * k)) + inputs.r0
    per_arm = min(small_gap_cap, large_gap_cap)
    return Thm2Bound(
        envelope=k + sqrt_term,
        sqrt_term=sqrt_term,
        detailed=(k - 1) * per_arm,
        gap_threshold=math.e * math.sqrt(k * log_k) / math.sqrt(t * c),
    )


def _bernoulli_kl(p: float, q: float) -> float:
    if p == q:
        return 0.0
    if q <= 0.0 or q >= 1.0:
        return math.inf
    d = 0.0
    if p > 0.0:
        d += p * math.log(p / q)
    if p < 1.0:
        d += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return d


def asymptotic_lower_bound(instance) -> float:
    """Coefficient of log(T) in the asymptotic regret lower bound.

    Per suboptimal arm: gap divided by the smallest KL from that arm's
    distribution to any same-family distribution whose mean exceeds the
    best mean.  KL to a fixed reference grows with the mean distance past
    the best mean for these families, so the infimum sits at mean equal to
    the best mean (closed form per family).
    """
    means = instance.true_means
    if instance.allow_ties:
        n_best = int(np.sum(means >= means.max() - 1e-12))
        if n_best != 1:
            raise ValueError("lower bound needs a unique best arm")
    best_mean = float(means.max())
    total = 0.0
    for k, arm in enumerate(instance.arms):
        gap = best_mean - float(means[k])
        if gap <= 0.0:
            continue
        if isinstance(arm, rewards.Categorical):
            raise UnsupportedFamily(
                "lower bound over the categorical simplex is not implemented"
            )
        if isinstance(arm, rewards.Bernoulli):
            kl = _bernoulli_kl(arm.p, best_mean) if best_mean < 1.0 else math.inf
        elif isinstance(arm, rewards.GaussianKnownVar):
            kl = gap * gap / (2.0 * arm.var)
        else:  # Poisson
            kl = arm.rate * math.log(arm.rate / best_mean) - arm.rate + best_mean
        if math.isfinite(kl) and kl > 0.0:
            total += gap / kl
    return total


@dataclass(frozen=True)
class BoundReport:
    """Every calculator output for one instance, JSON-friendly."""

    alpha: float
    D: float
    r0: float
    horizon: int
    n_arms: int
    c_alpha: float
    thm1_bound: float
    thm2_bound: float
    thm2_sqrt_term: float
    thm2_detailed: float
    thm2_gap_threshold: float
    thm3_bound: float
    lb_coefficient: float
    per_arm: tuple

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["per_arm"] = [dict(t) for t in self.per_arm]
        return d


def bound_report(inputs: BoundInputs, instance=None) -> BoundReport:
    """Evaluate all calculators; the lower bound needs the reward instance."""
    thm2 = thm2_independent_bound(inputs)
    c = inputs.c
    log_t = math.log(inputs.horizon)
    per_arm = []
    for g in inputs.gaps:
        entry = _thm1_term(g, inputs)
        entry["thm3_value"] = g * (
            9.0 * (inputs.r0 + 1.0) * log_t / (c * g * g) + (2.0 * inputs.r0 + 3.0) / 2.0
        )
        per_arm.append(entry)
    lb = asymptotic_lower_bound(instance) if instance is not None else None
    return BoundReport(
        alpha=inputs.alpha,
        D=inputs.D,
        r0=inputs.r0,
        horizon=inputs.horizon,
        n_arms=inputs.n_arms,
        c_alpha=c,
        thm1_bound=thm1_instance_bound(inputs),
        thm2_bound=thm2.envelope,
        thm2_sqrt_term=thm2.sqrt_term,
        thm2_detailed=thm2.detailed,
        thm2_gap_threshold=thm2.gap_threshold,
        thm3_bound=thm3_instance_bound(inputs),
        lb_coefficient=lb,
        per_arm=tuple(per_arm),
    )


# ---------------------------------------------------------------------------
# Prior-mass condition on order-2 divergence balls
# ---------------------------------------------------------------------------


def epsilon_n(M: float, n: int) -> float:
    """Shrinking-radius schedule sqrt(log(M n) / n) for the prior-mass check.

    ``M`` in (0, 1] only rescales which (n, radius) pairs the check covers;
    it plays no role in simulation.  Requires M n > 1 so the radius is real.
    """
    if not 0.0 < M <= 1.0:
        raise ValueError(f"M must be in (0, 1], got {M!r}")
    if n < 1 or M * n <= 1.0:
        raise ValueError(f"need M * n > 1 for a real radius, got M={M!r}, n={n}")
    return math.sqrt(math.log(M * n) / n)


def _d2_and_support(prior, theta0: float):
    """Order-2 divergence around theta0, with prior pdf and support."""
    if isinstance(prior, post_mod.BetaPrior):
        if not 0.0 < theta0 < 1.0:
            raise ValueError("Bernoulli theta0 must be in (0, 1)")

        def d2(theta):
            return math.log(theta0**2 / theta + (1.0 - theta0) ** 2 / (1.0 - theta))

        return d2, stats.beta(prior.a0, prior.b0).pdf, (0.0, 1.0)
    if isinstance(prior, post_mod.GaussianPrior):
        lik_var = prior.likelihood_var

        def d2(theta):
            return (theta - theta0) ** 2 / lik_var

        pdf = stats.norm(prior.mean0, prior.precision0**-0.5).pdf
        return d2, pdf, (-math.inf, math.inf)
    if isinstance(prior, post_mod.GammaPrior):
        if not theta0 > 0.0:
            raise ValueError("Poisson theta0 must be positive")

        def d2(theta):
            return (theta - theta0) ** 2 / theta

        pdf = stats.gamma(prior.shape0, scale=1.0 / prior.rate0).pdf
        return d2, pdf, (0.0, math.inf)
    raise UnsupportedFamily(f"prior-mass check has no 1-d divergence for {prior!r}")


def _ball_edge(d2, theta0: float, eps_sq: float, bound: float, scale: float) -> float:
    """Boundary of {d2 <= eps_sq} between theta0 and ``bound`` by bisection."""
    direction = 1.0 if bound > theta0 else -1.0
    step = scale
    inside = theta0
    for _ in range(400):
        cand = theta0 + direction * step
        if (direction > 0 and cand >= bound) or (direction < 0 and cand <= bound):
            # Finite support edge reached; the divergence may stay bounded
            # up to it, in which case the ball extends to the edge itself.
            edge_probe = inside + 0.999999 * (bound - inside)
            if d2(edge_probe) <= eps_sq:
                return bound
            return _bisect(d2, inside, edge_probe, eps_sq)
        if d2(cand) > eps_sq:
            return _bisect(d2, inside, cand, eps_sq)
        inside = cand
        step *= 2.0
    raise BallUnresolvable("could not bracket the divergence-ball boundary")


def _bisect(d2, inside: float, outside: float, eps_sq: float) -> float:
    for _ in range(200):
        mid = 0.5 * (inside + outside)
        if d2(mid) <= eps_sq:
            inside = mid
        else:
            outside = mid
        if abs(outside - inside) <= 1e-14 * max(1.0, abs(inside)):
            break
    return inside


@dataclass(frozen=True)
class PriorMassResult:
    holds: bool
    lhs: float
    rhs: float
    ball: tuple


def check_prior_mass_b1(
    prior, theta0: float, alpha: float, eps: float, n: int
) -> PriorMassResult:
    """Check that the prior puts mass >= 4**(1+alpha) exp(-n eps^2) on the
    order-2 divergence ball of squared radius eps^2 around theta0.

    The ball endpoints come from bisection on the divergence, which grows
    monotonically away from theta0 in each direction for these families;
    the mass is adaptive quadrature of the prior density over the ball.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha must be in (0, 1), got {alpha!r}")
    if not eps > 0.0 or n < 1:
        raise ValueError("need eps > 0 and n >= 1")
    d2, pdf, (lo_support, hi_support) = _d2_and_support(prior, theta0)
    eps_sq = eps * eps

    if isinstance(prior, post_mod.GaussianPrior):
        scale = prior.precision0**-0.5
    elif isinstance(prior, post_mod.GammaPrior):
        scale = max(math.sqrt(prior.shape0) / prior.rate0, 1e-3)
    else:
        scale = 0.25
    lo = _ball_edge(d2, theta0, eps_sq, lo_support, scale)
    hi = _ball_edge(d2, theta0, eps_sq, hi_support, scale)

    lhs, abserr = integrate.quad(pdf, lo, hi, epsabs=1e-10, epsrel=1e-10, limit=200)
    rhs = 4.0 ** (1.0 + alpha) * math.exp(-n * eps_sq)
    return PriorMassResult(holds=bool(lhs >= rhs), lhs=float(lhs), rhs=float(rhs), ball=(lo, hi))


# ---------------------------------------------------------------------------
# Posterior-concentration verifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloSettings:
    """Outer datasets x inner posterior draws, with its own seed."""

    outer: int = 500
    inner: int = 5000
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.outer < 100 or self.inner < 1000:
            raise ValueError("need outer >= 100 and inner >= 1000 for stable estimates")


@dataclass(frozen=True)
class ConcentrationResult:
    empirical: float
    bound: float
    mc_se: float
    holds: bool


def _one_dataset(prior, true_model, alpha, nabla, n, seed, inner) -> float:
    rng = make_rng(seed)
    post = post_mod.init_posterior(prior, alpha)
    for _ in range(n):
        post = post.update(true_model.sample(rng))
    draws = post_mod.sample_means(post, rng, inner)
    return float(np.mean(np.abs(draws - true_model.mean) >= nabla))


def verify_concentration(
    prior,
    true_model,
    alpha: float,
    nabla: float,
    n: int,
    mc: MonteCarloSettings,
    D: float = 1.0,
) -> ConcentrationResult:
    """Monte Carlo check of the tempered-posterior tail inequality.

    Estimates the expected posterior probability that the sampled mean
    deviates from the true mean by at least ``nabla`` after ``n``
    observations, and compares it against 0.5 exp(-C(alpha) n nabla^2).
    Holds when the estimate is below the bound plus 3 combined Monte Carlo
    standard errors.  Outer datasets use derived per-dataset streams, so
    the result does not depend on ``mc.n_jobs``.
    """
    if not nabla > 0.0:
        raise ValueError("nabla must be positive")
    if n < 0:
        raise ValueError("n must be >= 0")
    seeds = [derive_seed(mc.seed, i) for i in range(mc.outer)]
    if mc.n_jobs == 1:
        probs = [
            _one_dataset(prior, true_model, alpha, nabla, n, s, mc.inner) for s in seeds
        ]
    else:
        probs = Parallel(n_jobs=mc.n_jobs)(
            delayed(_one_dataset)(prior, true_model, alpha, nabla, n, s, mc.inner)
            for s in seeds
        )
    probs = np.asarray(probs)
    empirical = float(probs.mean())
    mc_se = float(probs.std(ddof=1) / math.sqrt(mc.outer))
    bound = 0.5 * math.exp(-c_alpha(alpha, D) * n * nabla * nabla)
    return ConcentrationResult(
        empirical=empirical,
        bound=bound,
        mc_se=mc_se,
        holds=bool(empirical <= bound + 3.0 * mc_se),
    )
