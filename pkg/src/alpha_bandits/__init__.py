"""Tempered-posterior Thompson sampling: simulator, divergences, bound calculators."""

from .analysis import (
    BoundInputs,
    BoundReport,
    MonteCarloSettings,
    asymptotic_lower_bound,
    bound_report,
    c_alpha,
    check_prior_mass_b1,
    epsilon_n,
    thm1_instance_bound,
    thm2_independent_bound,
    thm3_instance_bound,
    verify_concentration,
)
from .policies import MOSS, UCB1, UCBV, AlphaTS, ArmChoice
from .posteriors import (
    BetaPrior,
    DirichletPrior,
    GammaPrior,
    GaussianPrior,
    batch_update,
    init_posterior,
    sample_mean,
    update,
)
from .rewards import (
    Bernoulli,
    Categorical,
    DivergenceOrder,
    GaussianKnownVar,
    Poisson,
    kl_divergence,
    renyi_divergence,
    renyi_quadrature_oracle,
)
from .simulate import (
    BanditInstance,
    ExperimentConfig,
    PolicySpec,
    RegretTrace,
    aggregate,
    run_experiment,
    run_replicate,
)

__version__ = "0.1.0"
