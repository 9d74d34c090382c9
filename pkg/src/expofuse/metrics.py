"""Reconstruction quality metrics: PSNR, SSIM, SAM, ERGAS, plus a robust
L1 consistency loss over the full degradation chain.

Formula conventions are frozen here since the literature varies: PSNR uses
peak 1 over all entries with a 300 dB cap; SSIM uses an 11x11 Gaussian
window (sigma 1.5, K1=0.01, K2=0.03, peak 1) averaged over the valid
interior and over bands; SAM is the mean per-pixel spectral angle in
degrees; ERGAS is (100/K) * sqrt(mean_b(RMSE_b^2 / mean_b^2)).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .cube import HsiCube, hadamard
from .errors import DimensionMismatchError, MetricError

PSNR_CAP_DB = 300.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _check_pair(ref: HsiCube, est: HsiCube):
    if ref.dims != est.dims:
        raise DimensionMismatchError(
            f"reference dims {ref.dims} != estimate dims {est.dims}"
        )
    return ref.data, est.data


def psnr(ref: HsiCube, est: HsiCube) -> float:
    """Peak signal-to-noise ratio in dB, peak 1, capped at 300 dB."""
    r, e = _check_pair(ref, est)
    mse = float(np.mean((r - e) ** 2))
    if mse < 1e-30:
        return PSNR_CAP_DB
    return 10.0 * math.log10(1.0 / mse)


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    t = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    w = np.exp(-(t**2) / (2.0 * sigma**2))
    return w / w.sum()


def _ssim_band(x: np.ndarray, y: np.ndarray, win: np.ndarray) -> float:
    pad = (win.size - 1) // 2

    def smooth(img):
        out = correlate1d(img, win, axis=0, mode="constant")
        out = correlate1d(out, win, axis=1, mode="constant")
        if pad:
            out = out[pad:-pad, pad:-pad]
        return out

    mu_x = smooth(x)
    mu_y = smooth(y)
    xx = smooth(x * x) - mu_x * mu_x
    yy = smooth(y * y) - mu_y * mu_y
    xy = smooth(x * y) - mu_x * mu_y
    c1 = SSIM_K1**2
    c2 = SSIM_K2**2
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * xy + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (xx + yy + c2)
    return float(np.mean(num / den))


def ssim(ref: HsiCube, est: HsiCube) -> float:
    """Mean over bands of the windowed structural similarity index.

    Statistics are taken over the interior where the window fits entirely;
    images smaller than 11 pixels along a spatial axis fall back to the
    largest odd window that fits, renormalized.
    """
    r, e = _check_pair(ref, est)
    size = min(SSIM_WINDOW, r.shape[1], r.shape[2])
    if size % 2 == 0:
        size -= 1
    win = _gaussian_window(size, SSIM_SIGMA)
    return float(np.mean([_ssim_band(r[b], e[b], win) for b in range(r.shape[0])]))


def sam(ref: HsiCube, est: HsiCube, eps: float = 1e-12) -> float:
    """Mean spectral angle in degrees; pixels whose reference norm is < eps are skipped."""
    r, e = _check_pair(ref, est)
    c = r.shape[0]
    rv = r.reshape(c, -1)
    ev = e.reshape(c, -1)
    rn = np.sqrt(np.sum(rv * rv, axis=0))
    en = np.sqrt(np.sum(ev * ev, axis=0))
    keep = rn >= eps
    if not np.any(keep):
        raise MetricError("all pixels have near-zero reference spectra")
    dots = np.sum(rv[:, keep] * ev[:, keep], axis=0)
    cos = np.clip(dots / (rn[keep] * en[keep] + eps), -1.0, 1.0)
    return float(np.degrees(np.mean(np.arccos(cos))))


def ergas(ref: HsiCube, est: HsiCube, ratio: int) -> float:
    """Relative dimensionless global error, scaled by 100/ratio.

    Bands whose reference mean is below 1e-12 in magnitude are skipped with
    a warning; if every band is skipped a MetricError is raised.
    """
    r, e = _check_pair(ref, est)
    c = r.shape[0]
    means = r.reshape(c, -1).mean(axis=1)
    mses = ((r - e) ** 2).reshape(c, -1).mean(axis=1)
    keep = np.abs(means) >= 1e-12
    if not np.all(keep):
        warnings.warn(
            f"ergas: skipping {int((~keep).sum())} band(s) with near-zero reference mean",
            stacklevel=2,
        )
    if not np.any(keep):
        raise MetricError("ergas undefined: every band has near-zero reference mean")
    return float(100.0 / ratio * np.sqrt(np.mean(mses[keep] / means[keep] ** 2)))


def fusion_l1_loss(
    image,
    exp_hsi,
    exp_msi,
    truth,
    truth_exposed_hsi,
    truth_exposed_msi,
    hsi_obs,
    msi_obs,
    op,
    response,
    eta1: float = 0.3,
    eta2: float = 0.1,
) -> float:
    """Outlier-robust L1 consistency of a solution with truth and observations.

    ||truth - Z||_1 + eta1*||truth_x - Z.E1||_1 + eta1*||truth_y - Z.E2||_1
      + eta2*||X - (Z.E1) H||_1 + eta2*||Y - P (Z.E2)||_1
    """
    image = np.asarray(image, dtype=np.float64)
    lit_hsi = hadamard(image, np.asarray(exp_hsi, dtype=np.float64))
    lit_msi = hadamard(image, np.asarray(exp_msi, dtype=np.float64))
    for name, arr in (
        ("truth", truth),
        ("truth_exposed_hsi", truth_exposed_hsi),
        ("truth_exposed_msi", truth_exposed_msi),
    ):
        if np.asarray(arr).shape != image.shape:
            raise DimensionMismatchError(
                f"{name} must have shape {image.shape}, got {np.asarray(arr).shape}"
            )
    value = np.abs(np.asarray(truth) - image).sum()
    value += eta1 * np.abs(np.asarray(truth_exposed_hsi) - lit_hsi).sum()
    value += eta1 * np.abs(np.asarray(truth_exposed_msi) - lit_msi).sum()
    value += eta2 * np.abs(np.asarray(hsi_obs) - op.forward(lit_hsi)).sum()
    value += eta2 * np.abs(np.asarray(msi_obs) - response.forward(lit_msi)).sum()
    return float(value)


@dataclass(frozen=True)
class MetricReport:
    """One evaluation: PSNR (dB), SSIM, SAM (degrees), ERGAS, optional L1 loss."""

    psnr: float
    ssim: float
    sam: float
    ergas: float
    loss: float | None = None

    FIELDS = ("psnr", "ssim", "sam", "ergas", "loss")

    def to_dict(self) -> dict:
        return {
            "psnr": self.psnr,
            "ssim": self.ssim,
            "sam": self.sam,
            "ergas": self.ergas,
            "loss": self.loss,
        }

    def csv_row(self) -> str:
        vals = [self.psnr, self.ssim, self.sam, self.ergas]
        cells = [repr(v) for v in vals]
        cells.append("" if self.loss is None else repr(self.loss))
        return ",".join(cells)

    @staticmethod
    def csv_header() -> str:
        return ",".join(MetricReport.FIELDS)


def evaluate(ref: HsiCube, est: HsiCube, ratio: int, loss: float | None = None) -> MetricReport:
    """Convenience bundle of all four metrics for one cube pair."""
    return MetricReport(
        psnr=psnr(ref, est),
        ssim=ssim(ref, est),
        sam=sam(ref, est),
        ergas=ergas(ref, est, ratio),
        loss=loss,
    )
