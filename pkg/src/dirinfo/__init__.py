"""dirinfo: directed-information causality measures for multivariate
time series.

The package estimates conditional transfer entropy, instantaneous
information exchange (both side-information conventions), the DeltaI
decomposition term and Geweke's linear measures with k-nearest-neighbor
estimators, validates them against an exact Gaussian VAR oracle, and
infers causality graphs through block-permutation surrogate tests.
"""

__version__ = "0.1.0"

from .errors import DataError, DirinfoError, EstimationError, ModelError
from .series import (
    LagSpec,
    MeasureKind,
    PointCloud,
    SampleMatrix,
    SideHorizon,
    embed_measure,
    read_csv,
    split_blocks,
    write_csv,
)
from .estimators import (
    CmiMode,
    Estimate,
    EstimatorConfig,
    cmi_knn,
    digamma,
    entropy_knn,
    mutual_information_knn,
)
from .measures import (
    MeasureSpec,
    MeasureValue,
    delta_i,
    evaluate,
    geweke,
    instantaneous_exchange,
    transfer_entropy,
)
from .gaussian import (
    GaussianVarModel,
    JointCovariance,
    gaussian_cmi,
    gaussian_entropy,
    joint_covariance,
    oracle_measure,
    random_stable_model,
    run_identity_suite,
    stationary_covariance,
)
from .inference import (
    CausalityGraph,
    InstantMode,
    PairTestResult,
    SurrogatePolicy,
    infer_graph,
    make_surrogate,
    test_battery,
    test_pair,
)
from .synth import (
    ChainParams,
    FourDParams,
    GroundTruth,
    chain_truth,
    fourd_truth,
    gen_4d,
    gen_chain,
    gen_var1,
    noise_covariance,
    noise_precision,
    var1_truth,
)

__all__ = [
    "__version__",
    "DirinfoError",
    "DataError",
    "ModelError",
    "EstimationError",
    "SampleMatrix",
    "PointCloud",
    "LagSpec",
    "SideHorizon",
    "MeasureKind",
    "embed_measure",
    "split_blocks",
    "read_csv",
    "write_csv",
    "EstimatorConfig",
    "CmiMode",
    "Estimate",
    "digamma",
    "entropy_knn",
    "mutual_information_knn",
    "cmi_knn",
    "MeasureSpec",
    "MeasureValue",
    "evaluate",
    "transfer_entropy",
    "instantaneous_exchange",
    "delta_i",
    "geweke",
    "GaussianVarModel",
    "JointCovariance",
    "stationary_covariance",
    "joint_covariance",
    "gaussian_entropy",
    "gaussian_cmi",
    "oracle_measure",
    "random_stable_model",
    "run_identity_suite",
    "SurrogatePolicy",
    "PairTestResult",
    "CausalityGraph",
    "InstantMode",
    "make_surrogate",
    "test_pair",
    "test_battery",
    "infer_graph",
    "ChainParams",
    "FourDParams",
    "GroundTruth",
    "noise_covariance",
    "noise_precision",
    "gen_chain",
    "chain_truth",
    "gen_4d",
    "fourd_truth",
    "gen_var1",
    "var1_truth",
]
