"""degseq: samplers, coupling, and exact verification for degree-constrained random graphs."""

from .graphs import (
    DegenerateSequenceError,
    DegreeSequence,
    DegreeStats,
    NonGraphicalError,
    SimpleGraph,
    SymmetricProbMatrix,
    chung_lu_matrix,
    degree_stats,
    f_c_transform,
    hadamard,
    is_graphical,
    p_matrix,
    q_matrix,
    remaining_degrees,
)
from .oracle import (
    GraphFamily,
    OracleCapError,
    enumerate_graphs,
    exact_conditional_edge_prob,
    exact_edge_marginals,
    exact_subgraph_law,
    exact_uniform_sample,
    oracle_cap,
)
from .randomness import AliasTable, RandomSource, sample_poisson
from .samplers import (
    SamplerDiagnostics,
    SeqSampleMode,
    sample_gnw,
    sample_weighted_edge,
    seq_approx_p,
    seq_sample_d,
)
from .coupling import (
    CouplingParams,
    CouplingTrace,
    EtaDenominatorMode,
    default_params,
    eta_denominator,
    ind_sample,
    lambda_matrix,
    rho,
    run_coupling,
)
from .stats import (
    THRESHOLDS,
    VerifyThresholds,
    chi_square_gof,
    compare_w_to_fcp,
    degree_concentration_check,
    empirical_marginals,
    pairwise_covariance,
    pearson_chi_square,
    subgraph_check,
)

__version__ = "0.1.0"
