"""Piecewise rational interpolation kernels and image resampling experiments."""

__version__ = "0.1.0"

from .exceptions import (
    DegenerateRange,
    DenominatorRoot,
    DimMismatch,
    DimsNotDivisible,
    EmptyRow,
    MissingInput,
    NoSuchTarget,
    ParameterOutOfDomain,
    ParseError,
    QuadratureNonconvergence,
    RankDeficient,
    RatkernError,
    RootNotBracketed,
    TooSmall,
    UnsupportedFamily,
)
from .kernels import (
    Family,
    KernelSpec,
    PiecewiseRationalKernel,
    build_kernel,
    degenerate,
    derivative,
    evaluate,
    kernel_catalog,
    special_params,
)
from .metrics import MetricReport, fsim, normalize_unity, psnr, ssim
from .resample import (
    ImageF,
    KernelResizer,
    ReduceMagnify,
    ResizeWeights,
    compute_weights,
    experiment_pipeline,
    naive_resize,
    quantize,
    resize,
)
from .sweep import (
    PlaneFit,
    PlaneRegressor,
    SweepRecord,
    best_cubic_search,
    better_than_baselines,
    fit_plane,
    grid_sweep,
    plane_point,
)
from .verify import (
    approximation_order,
    check_continuity,
    check_integral,
    check_partition_of_unity,
    check_symmetry,
    constraint_residuals,
    property_report,
    sinc_residuals,
)
