"""Multi-armed bandits with symmetric alpha-stable rewards.

Exact stable sampling and distributional diagnostics, scale-mixture posterior
inference, five bandit policies behind one interface, and a seeded,
replication-paired experiment harness with a CLI front end.
"""

__version__ = "0.1.0"

from .gof import GoodnessOfFit, ks_statistic, ks_two_sample
from .policies import (
    AlphaTS,
    EpsilonGreedy,
    GaussianTS,
    Policy,
    PolicyConfig,
    PolicyKind,
    RobustAlphaTS,
    RobustUCB,
    epsilon_schedule,
    make_policy,
    robust_threshold,
    truncation_moment_bound,
    ucb_index,
)
from .simulate import (
    BanditInstance,
    BatchResult,
    ExperimentConfig,
    RegretTrace,
    make_instance,
    pull,
    run_batch,
    run_experiment,
)
from .smin import (
    LambdaDraw,
    PosteriorState,
    commit,
    gibbs_refine,
    likelihood_envelope,
    posterior_params,
    rejection_sample_lambda,
)
from .stable import (
    MomentSpec,
    StableParams,
    abs_moment,
    char_fn,
    mean_params,
    sample,
    sample_standard,
    scale_params,
    sum_params,
    tail_density_asymptote,
    validate_params,
)

__all__ = [
    "AlphaTS",
    "BanditInstance",
    "BatchResult",
    "EpsilonGreedy",
    "ExperimentConfig",
    "GaussianTS",
    "GoodnessOfFit",
    "LambdaDraw",
    "MomentSpec",
    "Policy",
    "PolicyConfig",
    "PolicyKind",
    "PosteriorState",
    "RegretTrace",
    "RobustAlphaTS",
    "RobustUCB",
    "StableParams",
    "abs_moment",
    "char_fn",
    "commit",
    "epsilon_schedule",
    "gibbs_refine",
    "ks_statistic",
    "ks_two_sample",
    "likelihood_envelope",
    "make_instance",
    "make_policy",
    "mean_params",
    "posterior_params",
    "pull",
    "rejection_sample_lambda",
    "robust_threshold",
    "run_batch",
    "run_experiment",
    "sample",
    "sample_standard",
    "scale_params",
    "sum_params",
    "tail_density_asymptote",
    "truncation_moment_bound",
    "ucb_index",
    "validate_params",
]
