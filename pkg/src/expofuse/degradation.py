"""Observation model: exposure change, blur + decimation, spectral mixing.

A reference cube Z is degraded along two branches.  The HSI branch applies a
gamma-style exposure change followed by Gaussian blur and K-fold decimation;
the MSI branch applies a different exposure change followed by a spectral
response matrix that integrates the C bands down to a few sensor channels.
Both linear operators come with exact adjoints so gradient-based solvers can
use them directly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .cube import HsiCube, mode1_fold, mode1_unfold
from .errors import DimensionMismatchError, ParameterError

BOUNDARY_MODES = ("symmetric", "periodic", "zero")

# (alpha, gamma) pairs for the HSI and MSI branches of the two benchmark
# exposure scenarios.
EXPOSURE_CASES = {
    "1": ((0.5, 0.7), (1.3, 1.5)),
    "2": ((0.5, 2.0), (0.8, 1.5)),
}

# Ranges the exposure parameters are drawn from when randomized.
ALPHA_RANGE = (0.2, 2.0)
GAMMA_RANGE = (0.5, 3.0)


@dataclass(frozen=True)
class GammaParams:
    """Gain/exponent pair for the exposure curve out = clip(alpha * in**gamma, 0, 1)."""

    alpha: float
    gamma: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ParameterError(f"alpha must be positive and finite, got {self.alpha}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ParameterError(f"gamma must be positive and finite, got {self.gamma}")


def exposure_case(name: str) -> tuple[GammaParams, GammaParams]:
    """Return the (HSI, MSI) gamma parameters of benchmark case "1" or "2"."""
    try:
        (a1, g1), (a2, g2) = EXPOSURE_CASES[name]
    except KeyError:
        raise ParameterError(f"unknown exposure case {name!r}, expected one of {sorted(EXPOSURE_CASES)}")
    return GammaParams(a1, g1), GammaParams(a2, g2)


def random_gamma_params(rng: np.random.Generator) -> GammaParams:
    """Draw exposure parameters uniformly from the documented ranges."""
    return GammaParams(rng.uniform(*ALPHA_RANGE), rng.uniform(*GAMMA_RANGE))


def gamma_correct(cube: HsiCube, params: GammaParams) -> HsiCube:
    """Apply out = clip(alpha * in**gamma, 0, 1) elementwise.

    Monotone nondecreasing in the input for any fixed parameters.
    """
    out = np.clip(params.alpha * np.power(cube.data, params.gamma), 0.0, 1.0)
    return HsiCube(out)


def make_blur_kernel(size: int, sigma: float) -> np.ndarray:
    """Sampled isotropic zero-mean Gaussian, normalized to sum 1.

    Taps sit at offsets i - (size-1)/2, so even sizes are phase-centered on a
    half-pixel (size 8 spans -3.5 .. +3.5).
    """
    if size < 1:
        raise ParameterError(f"kernel size must be >= 1, got {size}")
    if not (sigma > 0 and math.isfinite(sigma)):
        raise ParameterError(f"sigma must be positive and finite, got {sigma}")
    t = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    w = np.exp(-(t**2) / (2.0 * sigma**2))
    kernel = np.outer(w, w)
    return kernel / kernel.sum()


def _pad_geometry(n_in: int, n_out: int, taps: int, ratio: int):
    """Padding and base offset so out[u] = sum_i k[i] * padded[u*ratio + base + i].

    The kernel anchor (taps-1)//2 and the decimation phase (ratio-1)//2 are
    chosen so that for the even-kernel / even-ratio case the taps are exactly
    centered on each output sample's footprint.
    """
    anchor = (taps - 1) // 2
    phase = (ratio - 1) // 2
    start = phase - anchor
    pad_left = max(0, -start)
    last = (n_out - 1) * ratio + start + taps - 1
    pad_right = max(0, last - (n_in - 1))
    return pad_left, pad_right, start + pad_left


def _index_map(n: int, pad_left: int, pad_right: int, boundary: str) -> np.ndarray:
    """Map padded positions back to source indices; -1 marks zero-padding cells."""
    idx = np.arange(n, dtype=np.int64)
    if boundary == "symmetric":
        return np.pad(idx, (pad_left, pad_right), mode="symmetric")
    if boundary == "periodic":
        return np.pad(idx, (pad_left, pad_right), mode="wrap")
    return np.pad(idx, (pad_left, pad_right), mode="constant", constant_values=-1)


@dataclass(frozen=True)
class SpatialOperator:
    """Blur-plus-decimation operator acting row-wise on band matrices.

    forward() convolves each band with the kernel (under the configured
    boundary extension) and keeps every ratio-th sample; adjoint() is the
    exact transpose: weighted scatter of the samples followed by folding the
    padded contributions back onto their source pixels.  Use
    build_spatial_operator() to construct one.
    """

    kernel: np.ndarray
    ratio: int
    boundary: str
    in_dims: tuple[int, int]
    out_dims: tuple[int, int]
    _geom: tuple = field(repr=False, default=None)

    @property
    def n_in(self) -> int:
        return self.in_dims[0] * self.in_dims[1]

    @property
    def n_out(self) -> int:
        return self.out_dims[0] * self.out_dims[1]

    def _check_cols(self, mat: np.ndarray, cols: int, what: str) -> np.ndarray:
        mat = np.asarray(mat, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[1] != cols:
            raise DimensionMismatchError(
                f"{what} expects a (bands, {cols}) matrix, got shape {mat.shape}"
            )
        return mat

    def forward(self, mat: np.ndarray) -> np.ndarray:
        """Blur and decimate: (C, W*H) -> (C, W_out*H_out)."""
        mat = self._check_cols(mat, self.n_in, "forward")
        (plw, prw, bw), (plh, prh, bh), map_w, map_h = self._geom
        c = mat.shape[0]
        w, h = self.in_dims
        wo, ho = self.out_dims
        img = mat.reshape(c, w, h)
        padded = _pad_image(img, (plw, prw), (plh, prh), self.boundary)
        out = np.zeros((c, wo, ho))
        sw, sh = self.kernel.shape
        for i in range(sw):
            rows = slice(bw + i, bw + i + (wo - 1) * self.ratio + 1, self.ratio)
            for j in range(sh):
                cols = slice(bh + j, bh + j + (ho - 1) * self.ratio + 1, self.ratio)
                out += self.kernel[i, j] * padded[:, rows, cols]
        return out.reshape(c, wo * ho)

    def adjoint(self, mat: np.ndarray) -> np.ndarray:
        """Exact transpose of forward: (C, W_out*H_out) -> (C, W*H)."""
        mat = self._check_cols(mat, self.n_out, "adjoint")
        (plw, prw, bw), (plh, prh, bh), map_w, map_h = self._geom
        c = mat.shape[0]
        w, h = self.in_dims
        wo, ho = self.out_dims
        x = mat.reshape(c, wo, ho)
        acc = np.zeros((c, w + plw + prw, h + plh + prh))
        sw, sh = self.kernel.shape
        for i in range(sw):
            rows = slice(bw + i, bw + i + (wo - 1) * self.ratio + 1, self.ratio)
            for j in range(sh):
                cols = slice(bh + j, bh + j + (ho - 1) * self.ratio + 1, self.ratio)
                acc[:, rows, cols] += self.kernel[i, j] * x
        folded_rows = _fold_axis(acc.transpose(1, 0, 2), map_w, w)
        folded = _fold_axis(folded_rows.transpose(2, 1, 0), map_h, h)
        return folded.transpose(1, 2, 0).reshape(c, w * h)


def _pad_image(img: np.ndarray, pads_w, pads_h, boundary: str) -> np.ndarray:
    mode = {"symmetric": "symmetric", "periodic": "wrap", "zero": "constant"}[boundary]
    return np.pad(img, ((0, 0), pads_w, pads_h), mode=mode)


def _fold_axis(arr: np.ndarray, index_map: np.ndarray, n: int) -> np.ndarray:
    """Sum padded slabs (first axis) back onto their n source positions."""
    out = np.zeros((n,) + arr.shape[1:])
    valid = index_map >= 0
    np.add.at(out, index_map[valid], arr[valid])
    return out


def build_spatial_operator(
    kernel: np.ndarray,
    ratio: int,
    dims: tuple[int, int],
    boundary: str = "symmetric",
) -> SpatialOperator:
    """Validate parameters and precompute the padding geometry.

    dims is the high-resolution (W, H); both must be divisible by ratio.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 2:
        raise ParameterError(f"kernel must be 2-D, got ndim={kernel.ndim}")
    if np.any(kernel < 0):
        raise ParameterError("kernel entries must be nonnegative")
    if abs(kernel.sum() - 1.0) > 1e-12:
        raise ParameterError(f"kernel must sum to 1 within 1e-12, got {kernel.sum()!r}")
    if boundary not in BOUNDARY_MODES:
        raise ParameterError(f"boundary must be one of {BOUNDARY_MODES}, got {boundary!r}")
    if ratio < 1:
        raise ParameterError(f"ratio must be >= 1, got {ratio}")
    w, h = dims
    if w % ratio or h % ratio:
        raise DimensionMismatchError(
            f"dims {dims} must be divisible by ratio {ratio}"
        )
    wo, ho = w // ratio, h // ratio
    gw = _pad_geometry(w, wo, kernel.shape[0], ratio)
    gh = _pad_geometry(h, ho, kernel.shape[1], ratio)
    if max(gw[0], gw[1]) > w or max(gh[0], gh[1]) > h:
        raise DimensionMismatchError(
            f"kernel {kernel.shape} needs more padding than dims {dims} allow"
        )
    map_w = _index_map(w, gw[0], gw[1], boundary)
    map_h = _index_map(h, gh[0], gh[1], boundary)
    return SpatialOperator(
        kernel=kernel,
        ratio=ratio,
        boundary=boundary,
        in_dims=(w, h),
        out_dims=(wo, ho),
        _geom=((gw[0], gw[1], gw[2]), (gh[0], gh[1], gh[2]), map_w, map_h),
    )


@dataclass(frozen=True)
class SpectralResponse:
    """Nonnegative (C_MSI, C) matrix with rows summing to 1."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.float64)
        if mat.ndim != 2:
            raise ParameterError("spectral response must be a 2-D matrix")
        if np.any(mat < 0):
            raise ParameterError("spectral response entries must be nonnegative")
        # C_MSI == C is tolerated so identity responses can be used in
        # degenerate checks; real sensor responses always have C_MSI < C.
        if mat.shape[0] > mat.shape[1]:
            raise ParameterError(
                f"response must have no more channels than bands, got {mat.shape}"
            )
        rowsum = mat.sum(axis=1)
        if np.any(np.abs(rowsum - 1.0) > 1e-12):
            raise ParameterError("spectral response rows must sum to 1 within 1e-12")
        object.__setattr__(self, "matrix", mat)

    @property
    def channels(self) -> int:
        return self.matrix.shape[0]

    @property
    def bands(self) -> int:
        return self.matrix.shape[1]

    def forward(self, mat: np.ndarray) -> np.ndarray:
        """Integrate bands into sensor channels: (C, N) -> (C_MSI, N)."""
        mat = np.asarray(mat, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] != self.bands:
            raise DimensionMismatchError(
                f"forward expects a ({self.bands}, N) matrix, got shape {mat.shape}"
            )
        return self.matrix @ mat

    def adjoint(self, mat: np.ndarray) -> np.ndarray:
        """Transpose action: (C_MSI, N) -> (C, N)."""
        mat = np.asarray(mat, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] != self.channels:
            raise DimensionMismatchError(
                f"adjoint expects a ({self.channels}, N) matrix, got shape {mat.shape}"
            )
        return self.matrix.T @ mat


def default_spectral_response(bands: int) -> SpectralResponse:
    """Synthetic 3-channel RGB-style response over `bands` bands.

    Channel r (0 = blue, 1 = green, 2 = red) weights band k as

        w[r, k] = exp(-(u_k - c_r)^2 / (2 * (1/6)^2)),  u_k = k / (bands - 1),

    with centers c = (1/6, 1/2, 5/6), rows normalized to sum 1.  This is a
    clearly synthetic stand-in for a measured camera curve; use
    load_spectral_response() to supply real data.
    """
    if bands < 4:
        raise ParameterError(f"need at least 4 bands, got {bands}")
    u = np.arange(bands, dtype=np.float64) / (bands - 1)
    centers = np.array([1.0 / 6.0, 0.5, 5.0 / 6.0])
    sig = 1.0 / 6.0
    mat = np.exp(-((u[None, :] - centers[:, None]) ** 2) / (2.0 * sig**2))
    mat /= mat.sum(axis=1, keepdims=True)
    return SpectralResponse(mat)


def load_spectral_response(path) -> SpectralResponse:
    """Load a response matrix from CSV (one row per channel) and row-normalize."""
    mat = np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64))
    if np.any(mat < 0):
        raise ParameterError(f"negative entries in spectral response file {path}")
    rowsum = mat.sum(axis=1, keepdims=True)
    if np.any(rowsum <= 0):
        raise ParameterError(f"all-zero row in spectral response file {path}")
    if mat.shape[0] >= mat.shape[1]:
        raise ParameterError(
            f"response file must have fewer channels than bands, got {mat.shape}"
        )
    return SpectralResponse(mat / rowsum)


@dataclass(frozen=True)
class SimulationOutput:
    """Observation pair plus the ground-truth quantities that generated it.

    lr_hsi has dims (C, W/K, H/K) and hr_msi (C_MSI, W, H); the exposure
    fields are (C, W*H) band matrices with truth_exposed_* = truth * field
    wherever the truth is above the division guard.
    """

    lr_hsi: HsiCube
    hr_msi: HsiCube
    truth: HsiCube
    truth_exposed_hsi: HsiCube
    truth_exposed_msi: HsiCube
    exposure_hsi: np.ndarray
    exposure_msi: np.ndarray


def _exposure_field(exposed: HsiCube, reference: HsiCube, eps: float) -> np.ndarray:
    ref = mode1_unfold(reference)
    exp = mode1_unfold(exposed)
    field = np.ones_like(ref)
    ok = ref > eps
    field[ok] = exp[ok] / ref[ok]
    return field


def simulate_observations(
    z: HsiCube,
    gamma_hsi: GammaParams,
    gamma_msi: GammaParams,
    op: SpatialOperator,
    response: SpectralResponse,
    eps: float = 1e-6,
) -> SimulationOutput:
    """Manufacture an (LR-HSI, HR-MSI) pair from a reference cube.

    The HSI branch exposes with gamma_hsi then blurs and decimates; the MSI
    branch exposes with gamma_msi then applies the spectral response.  The
    returned exposure fields are exposed/reference ratios with a safe
    fallback of 1 where the reference is <= eps.
    """
    c, w, h = z.dims
    if (w, h) != op.in_dims:
        raise DimensionMismatchError(
            f"cube spatial dims {(w, h)} do not match operator dims {op.in_dims}"
        )
    if c != response.bands:
        raise DimensionMismatchError(
            f"cube has {c} bands but response expects {response.bands}"
        )
    exposed_hsi = gamma_correct(z, gamma_hsi)
    exposed_msi = gamma_correct(z, gamma_msi)
    lr = op.forward(mode1_unfold(exposed_hsi))
    msi = response.forward(mode1_unfold(exposed_msi))
    return SimulationOutput(
        lr_hsi=mode1_fold(lr, (c,) + op.out_dims),
        hr_msi=mode1_fold(msi, (response.channels, w, h)),
        truth=z,
        truth_exposed_hsi=exposed_hsi,
        truth_exposed_msi=exposed_msi,
        exposure_hsi=_exposure_field(exposed_hsi, z, eps),
        exposure_msi=_exposure_field(exposed_msi, z, eps),
    )
