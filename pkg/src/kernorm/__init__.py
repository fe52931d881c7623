"""L-MMD normality test in reproducing kernel Hilbert spaces."""

from .errors import (
    ConfigurationError,
    DomainError,
    IngestionError,
    InputError,
    KernormError,
    NumericError,
)
from .linalg import KernelKind, KernelSpec, center_gram, eval_kernel, gram_matrix, sym_eigendecompose
from .lmmd import (
    TestResult,
    Type2BoundInputs,
    estimate_quantile,
    lmmd_statistic,
    order_index,
    run_test,
    simulate_null_statistic,
    type1_bounds,
    type2_bound,
)
from .null import (
    CovarianceSpec,
    NullModel,
    Origin,
    covariance_matrix,
    diagonal_covariance,
    estimate_null_from_sample,
    null_norm_sq,
    rescale,
)

__version__ = "0.1.0"
