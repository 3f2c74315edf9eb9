"""Exponential-Lomax mixture estimation under type-I right censoring."""
from .bayes import (
    ExpansionTerm,
    PosteriorExpansion,
    bayes_estimate,
    bayes_gelf,
    bayes_self,
    build_expansion,
    posterior_variance,
)
from .datafile import DataFileError, format_datafile, parse_datafile, read_datafile, write_datafile
from .distributions import (
    Params,
    exp_cdf,
    exp_pdf,
    lomax_cdf,
    lomax_pdf,
    mixture_cdf,
    mixture_pdf,
    mixture_sample,
    mixture_sf,
)
from .estimators import BayesMixture, ImportanceSamplingMixture, MixtureMLE
from .exceptions import (
    DegenerateWeights,
    DomainError,
    GelfDomainError,
    ImproperPosterior,
    ImproperProposal,
    InvalidLoss,
    NoFailures,
    NonConvergence,
    PredictiveBracketError,
    SingularInformation,
)
from .importance import ISDraws, ProposalSpec, is_draws, is_estimate, is_standard_error, proposal_for
from .likelihood import (
    CensoredSample,
    ConvergenceReport,
    SuffStats,
    hessian,
    log_likelihood_direct,
    log_likelihood_expanded,
    ml_fit,
    ml_variances,
    observed_information,
    score,
)
from .losses import PRIORS, LossSpec
from .predictive import (
    PredictiveSummary,
    predictive_cdf,
    predictive_interval,
    predictive_pdf,
    predictive_quantile,
    predictive_sf,
)
from .simulation import (
    EstimatorSpec,
    StudyConfig,
    StudyReport,
    estimated_risk,
    generate_censored_sample,
    standard_estimators,
    run_study,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
