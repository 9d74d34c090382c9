"""Exposure-aware hyperspectral/multispectral fusion by block proximal gradient descent.

The package simulates exposure-degraded LR-HSI / HR-MSI observation pairs,
solves the joint exposure-correction + fusion objective with pluggable
proximal regularizers, and scores reconstructions with the standard HSI
quality metrics.
"""

from .cube import HsiCube, hadamard, mode1_fold, mode1_unfold
from .degradation import (
    EXPOSURE_CASES,
    GammaParams,
    SimulationOutput,
    SpatialOperator,
    SpectralResponse,
    build_spatial_operator,
    default_spectral_response,
    exposure_case,
    gamma_correct,
    load_spectral_response,
    make_blur_kernel,
    random_gamma_params,
    simulate_observations,
)
from .errors import (
    BadMagicError,
    CubeFormatError,
    DataError,
    DimensionMismatchError,
    DimOverflowError,
    ExpofuseError,
    MetricError,
    ParameterError,
    SolverDivergedError,
    TruncatedPayloadError,
)
from .initialize import bilinear_upsample, init_fused, init_naive, init_objective
from .io import (
    export_false_color,
    default_false_color_bands,
    import_band_pngs,
    read_cube,
    write_cube,
)
from .metrics import MetricReport, ergas, evaluate, fusion_l1_loss, psnr, sam, ssim
from .prox import ProxSpec, prox_apply, regularizer_value, total_variation
from .solver import (
    LineSearch,
    SolverConfig,
    SolverState,
    grad_exp_hsi,
    grad_exp_msi,
    grad_image,
    objective,
    pgd_iterate,
    solve,
)
from .synth import synthetic_scene

__version__ = "0.1.0"

__all__ = [
    "HsiCube",
    "hadamard",
    "mode1_fold",
    "mode1_unfold",
    "GammaParams",
    "EXPOSURE_CASES",
    "exposure_case",
    "random_gamma_params",
    "gamma_correct",
    "make_blur_kernel",
    "SpatialOperator",
    "build_spatial_operator",
    "SpectralResponse",
    "default_spectral_response",
    "load_spectral_response",
    "SimulationOutput",
    "simulate_observations",
    "ProxSpec",
    "prox_apply",
    "regularizer_value",
    "total_variation",
    "LineSearch",
    "SolverConfig",
    "SolverState",
    "objective",
    "grad_exp_hsi",
    "grad_exp_msi",
    "grad_image",
    "pgd_iterate",
    "solve",
    "bilinear_upsample",
    "init_naive",
    "init_fused",
    "init_objective",
    "MetricReport",
    "psnr",
    "ssim",
    "sam",
    "ergas",
    "evaluate",
    "fusion_l1_loss",
    "read_cube",
    "write_cube",
    "import_band_pngs",
    "export_false_color",
    "default_false_color_bands",
    "synthetic_scene",
    "ExpofuseError",
    "DimensionMismatchError",
    "ParameterError",
    "DataError",
    "CubeFormatError",
    "BadMagicError",
    "TruncatedPayloadError",
    "DimOverflowError",
    "MetricError",
    "SolverDivergedError",
]
