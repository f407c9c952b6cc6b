"""Simulation-based inference of directed ER connectivity from spike trains.

Simulates networks of Galves-Löcherbach neurons on directed Erdős-Rényi
graphs, tabulates sampling distributions of scalar spike-train statistics
over a grid of connection probabilities, and estimates the connection
probability of an observed network from a handful of recorded trains.
"""

from .diagnostics import PairSampleMode, QqData, chi2_quantile
from .distfit import (
    GaussianFit,
    HistogramFit,
    SamplingDistributionTable,
    build_table,
    fit_gaussian,
    fit_histogram,
    log_density,
    read_table,
    tv_distance,
    wasserstein_distance,
    write_table,
)
from .dynamics import (
    NetworkState,
    SimConfig,
    SpikeTrainRecord,
    TrainSummaries,
    phi,
    sample_neurons,
    simulate,
    simulate_summaries,
    step,
)
from .graph import (
    DirectedGraph,
    GraphParams,
    edge_count,
    generate_er,
    in_degree,
    out_degree,
    remove_reciprocal,
)
from .inference import (
    Estimate,
    Observation,
    confidence_interval,
    estimate_p,
    grid_argmax,
    log_likelihood,
    optimal_reconstruction_mae,
    optimal_reconstruction_se,
    quadratic_peak,
)
from .rng import RngState, jump, next_u64, next_uniform, seed_from_u64
from .stats import (
    GammaMoments,
    IsiSample,
    StatisticKind,
    compute_statistic,
    extract_isis,
    gamma_moments,
    spike_frequency,
)

__version__ = "0.1.0"
