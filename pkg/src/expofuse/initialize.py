"""Deterministic starting points for the fusion solver.

Two classical initializers replace any learned scheme: "naive" bilinearly
upsamples the LR-HSI and sets both exposure fields to one; "fused"
additionally back-projects the MSI residual through the spectral response.
init_objective scores a candidate start against ground truth with the same
weighted-L1 functional used to assess initialization quality.
"""

import numpy as np

from .degradation import SpatialOperator, SpectralResponse
from .errors import DimensionMismatchError, ParameterError

DEFAULT_INIT_LAMBDA = 0.5
INIT_STRATEGIES = ("naive", "fused", "oracle")


def bilinear_upsample(mat: np.ndarray, dims_in: tuple[int, int], ratio: int) -> np.ndarray:
    """Upsample each band by `ratio` with half-pixel-centered bilinear weights.

    Output coordinate u samples the input at (u + 0.5)/ratio - 0.5, clamped
    to the input grid; ratio 1 is the exact identity.
    """
    w_in, h_in = dims_in
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[1] != w_in * h_in:
        raise DimensionMismatchError(
            f"expected a (bands, {w_in * h_in}) matrix for dims {dims_in}, got {mat.shape}"
        )
    img = mat.reshape(mat.shape[0], w_in, h_in)
    for axis, n_in in ((1, w_in), (2, h_in)):
        n_out = n_in * ratio
        src = np.clip((np.arange(n_out) + 0.5) / ratio - 0.5, 0.0, n_in - 1.0)
        i0 = np.floor(src).astype(np.int64)
        i1 = np.minimum(i0 + 1, n_in - 1)
        t = src - i0
        lo = np.take(img, i0, axis=axis)
        hi = np.take(img, i1, axis=axis)
        shape = [1, 1, 1]
        shape[axis] = n_out
        t = t.reshape(shape)
        img = lo * (1.0 - t) + hi * t
    return img.reshape(mat.shape[0], w_in * h_in * ratio * ratio)


def _check_obs(hsi, msi, op, response):
    hsi = np.asarray(hsi, dtype=np.float64)
    msi = np.asarray(msi, dtype=np.float64)
    if hsi.ndim != 2 or hsi.shape[1] != op.n_out:
        raise DimensionMismatchError(
            f"LR-HSI must have {op.n_out} columns, got shape {hsi.shape}"
        )
    if hsi.shape[0] != response.bands:
        raise DimensionMismatchError(
            f"LR-HSI has {hsi.shape[0]} bands but response expects {response.bands}"
        )
    if msi.shape != (response.channels, op.n_in):
        raise DimensionMismatchError(
            f"HR-MSI must have shape {(response.channels, op.n_in)}, got {msi.shape}"
        )
    return hsi, msi


def init_naive(hsi, msi, op: SpatialOperator, response: SpectralResponse):
    """All-ones exposure fields; image = bilinear upsampling of the LR-HSI."""
    hsi, msi = _check_obs(hsi, msi, op, response)
    image = bilinear_upsample(hsi, op.out_dims, op.ratio)
    ones = np.ones_like(image)
    return ones, ones.copy(), image


def init_fused(hsi, msi, op: SpatialOperator, response: SpectralResponse, ridge: float = 1e-6):
    """Naive image plus a ridge-regularized spectral back-projection of the MSI residual.

    image = up(X) + P^T (P P^T + ridge*I)^(-1) (Y - P up(X)); larger ridge
    shrinks the correction toward the naive start.
    """
    if ridge < 0:
        raise ParameterError(f"ridge must be >= 0, got {ridge}")
    hsi, msi = _check_obs(hsi, msi, op, response)
    up = bilinear_upsample(hsi, op.out_dims, op.ratio)
    residual = msi - response.forward(up)
    gram = response.matrix @ response.matrix.T + ridge * np.eye(response.channels)
    try:
        coef = np.linalg.solve(gram, residual)
    except np.linalg.LinAlgError as exc:
        raise ParameterError(
            "response gram matrix is singular; pass ridge > 0"
        ) from exc
    image = up + response.adjoint(coef)
    ones = np.ones_like(image)
    return ones, ones.copy(), image


def init_objective(
    image0,
    exp_hsi0,
    exp_msi0,
    truth,
    truth_exposed_hsi,
    truth_exposed_msi,
    lam: float = DEFAULT_INIT_LAMBDA,
) -> float:
    """Weighted L1 distance of a start (Z0, E1, E2) from the ground truth triple.

    ||truth - Z0||_1 + lam*||truth_x - Z0.E1||_1 + lam*||truth_y - Z0.E2||_1,
    all norms entrywise.  Zero iff every term matches exactly.
    """
    if lam < 0:
        raise ParameterError(f"lambda must be >= 0, got {lam}")
    arrays = [np.asarray(a, dtype=np.float64) for a in
              (image0, exp_hsi0, exp_msi0, truth, truth_exposed_hsi, truth_exposed_msi)]
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        raise DimensionMismatchError(f"all arguments must share one shape, got {shapes}")
    z0, e1, e2, z, zx, zy = arrays
    value = np.abs(z - z0).sum()
    value += lam * np.abs(zx - z0 * e1).sum()
    value += lam * np.abs(zy - z0 * e2).sum()
    return float(value)
