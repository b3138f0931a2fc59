"""gramentropy: matrix-based Renyi entropy and kernel independence testing.

Entropy functionals are evaluated on the spectrum of unit-trace Gram
matrices built from infinitely divisible kernels; joint quantities come
from Hadamard products, and the independence test thresholds the resulting
mutual-information gap against a permutation null.
"""

__version__ = "0.1.0"

from .errors import InputError, NumericError, PsdViolationError
from .linalg import (
    DensityState,
    Spectrum,
    SymMatrix,
    eigh,
    entrywise_power,
    hadamard,
    kronecker,
    majorizes,
    trace_power,
)
from .kernels import (
    GaussianKernel,
    GramMatrix,
    ProductKernel,
    gram,
    kernel_from_distance,
    median_heuristic,
    neg_log_transform,
    normalize_diagonal,
    semi_metric_sq,
    to_density,
)
from .entropy import (
    EntropyOrder,
    conditional_entropy,
    gram_entropy,
    joint_entropy,
    mutual_information,
    parzen_h2,
    parzen_h2_trace,
    renyi_entropy,
    von_neumann_entropy,
)
from .baselines import EdgeList, MstConfig, euclidean_mst, mst_entropy, mst_gap_stat, quadratic_stat
from .benchmark_data import (
    DENSITY_IDS,
    BenchmarkScenario,
    PairedSample,
    augment,
    density_params,
    draw_paired_sample,
    mix_rotate,
    sample_density,
    sample_kurtosis,
)
from .independence import (
    TestConfig,
    TestResult,
    acceptance_rate,
    decide,
    gap_statistic,
    permutation_null,
    run_test,
)

__all__ = [
    "__version__",
    "InputError",
    "NumericError",
    "PsdViolationError",
    "SymMatrix",
    "Spectrum",
    "DensityState",
    "eigh",
    "trace_power",
    "hadamard",
    "kronecker",
    "entrywise_power",
    "majorizes",
    "GaussianKernel",
    "ProductKernel",
    "GramMatrix",
    "gram",
    "median_heuristic",
    "normalize_diagonal",
    "to_density",
    "semi_metric_sq",
    "neg_log_transform",
    "kernel_from_distance",
    "EntropyOrder",
    "renyi_entropy",
    "gram_entropy",
    "joint_entropy",
    "conditional_entropy",
    "mutual_information",
    "parzen_h2",
    "parzen_h2_trace",
    "von_neumann_entropy",
    "MstConfig",
    "EdgeList",
    "quadratic_stat",
    "euclidean_mst",
    "mst_entropy",
    "mst_gap_stat",
    "DENSITY_IDS",
    "BenchmarkScenario",
    "PairedSample",
    "sample_density",
    "sample_kurtosis",
    "density_params",
    "mix_rotate",
    "augment",
    "draw_paired_sample",
    "TestConfig",
    "TestResult",
    "gap_statistic",
    "permutation_null",
    "decide",
    "run_test",
    "acceptance_rate",
]
