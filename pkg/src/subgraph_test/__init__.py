"""Erdos-Renyi goodness-of-fit tests from 3-node subgraph frequencies."""

__version__ = "0.1.0"

from .census import TripleCensus, census_brute, census_full
from .errors import (
    BadFeatureFunction,
    BadParameter,
    BadPartition,
    BadProbability,
    BadSampleSize,
    BadTheta,
    ConfigError,
    DegenerateGraph,
    EmptyVector,
    GraphTooSmall,
    NodeOutOfRange,
    ParseError,
    SelfLoop,
    SubgraphTestError,
)
from .graph import Graph, graph_from_edges, read_edge_list, write_edge_list
from .models import (
    ER,
    SBM2,
    Config,
    ConfigBeta,
    Latent,
    SBMk,
    SBMLabels,
    StepFunction,
    gen_config,
    gen_er,
    gen_latent,
    gen_sbm,
    model_from_dict,
    sample_beta_theta,
    snr_diagnostics,
    v_g,
    v_theta,
)
from .powerlab import ExperimentConfig, derive_seed, run_calibration, run_power
from .sampling import (
    FULL,
    SamplingPlan,
    effective_n,
    f_norm,
    node_sample_census,
    triple_sample_census,
)
from .statistics import (
    RelationStats,
    SigmaP,
    TestResult,
    chi_squared,
    divergent_threshold_test,
    p_value_chi2_df2,
    relation_stats,
    run_test,
    sigma_p,
)
