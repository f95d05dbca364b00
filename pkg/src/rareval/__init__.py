"""Rareness-weighted retrieval evaluation.

A toolkit for scoring evaluation-campaign runs with precision and average
precision variants that reward retrieval of relevant documents few other
systems find, plus the campaign-level statistics used to study such metrics:
rank-correlation sweeps, discriminative power (Tukey HSD), topic-subsampling
stability, system-subset robustness, and synthetic campaign generation with
hypothetical probe systems.
"""

from .campaign import (
    RankEntry,
    ScoreMatrix,
    SystemRanking,
    evaluate_campaign,
    mean_scores,
    rank_systems,
)
from .errors import (
    ConfigError,
    DataError,
    FormatError,
    ParseError,
    RarevalError,
    UndefinedRarityError,
)
from .metrics import (
    MetricConfig,
    MetricSpec,
    ap_rareness,
    average_precision,
    p_at_k_mixture,
    p_at_k_rareness,
    precision_at_k,
)
from .rarity import (
    RarityIndex,
    build_rarity_index,
    extend_index,
    rareness,
    rareness_revised,
    rarity_report,
)
from .rng import DEFAULT_SEED, substream
from .stats import (
    StabilityConfig,
    StabilityResult,
    SubsetExperimentConfig,
    SubsetResult,
    discriminative_power,
    kendall_tau,
    stability,
    studentized_range_cdf,
    studentized_range_quantile,
    subset_experiment,
)
from .synth import (
    SynthSpec,
    TrajectoryResult,
    generate_campaign,
    make_common_system,
    make_rare_system,
    rank_trajectory,
)
from .trec_io import (
    Campaign,
    Qrels,
    Run,
    RunEntry,
    format_qrels,
    format_run,
    load_campaign,
    parse_qrels,
    parse_run_file,
    write_qrels_file,
    write_run_file,
)

__version__ = "0.1.0"

__all__ = [
    "Campaign",
    "ConfigError",
    "DataError",
    "DEFAULT_SEED",
    "FormatError",
    "MetricConfig",
    "MetricSpec",
    "ParseError",
    "Qrels",
    "RankEntry",
    "RarevalError",
    "RarityIndex",
    "Run",
    "RunEntry",
    "ScoreMatrix",
    "StabilityConfig",
    "StabilityResult",
    "SubsetExperimentConfig",
    "SubsetResult",
    "SynthSpec",
    "SystemRanking",
    "TrajectoryResult",
    "UndefinedRarityError",
    "ap_rareness",
    "average_precision",
    "build_rarity_index",
    "discriminative_power",
    "evaluate_campaign",
    "extend_index",
    "format_qrels",
    "format_run",
    "generate_campaign",
    "kendall_tau",
    "load_campaign",
    "make_common_system",
    "make_rare_system",
    "mean_scores",
    "p_at_k_mixture",
    "p_at_k_rareness",
    "parse_qrels",
    "parse_run_file",
    "precision_at_k",
    "rank_systems",
    "rank_trajectory",
    "rareness",
    "rareness_revised",
    "rarity_report",
    "stability",
    "studentized_range_cdf",
    "studentized_range_quantile",
    "subset_experiment",
    "substream",
    "write_qrels_file",
    "write_run_file",
]
