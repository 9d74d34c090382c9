"""Explicit proximal operators and matching regularizer values.

Each ProxSpec describes a convex regularizer Phi; prox_apply(spec, a, scale)
evaluates argmin_m 0.5*||a - m||^2 + scale*Phi(m) and regularizer_value
evaluates Phi itself, so solvers can combine both consistently.  Infeasible
box points report math.inf; that sentinel is for display only and is never
fed back into arithmetic.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

PROX_KINDS = ("identity", "soft_threshold", "box", "tv2d")


@dataclass(frozen=True)
class ProxSpec:
    """Tagged description of one regularizer.

    kind          tau    lo/hi    inner_iters
    identity       -       -          -        Phi = 0
    soft_threshold tau     -          -        Phi = tau * ||.||_1
    box            -      lo<hi       -        Phi = indicator of [lo, hi]
    tv2d           tau     -        >= 1       Phi = tau * isotropic TV
    """

    kind: str
    tau: float = 0.0
    lo: float = 0.0
    hi: float = 1.0
    inner_iters: int = 20

    def __post_init__(self):
        if self.kind not in PROX_KINDS:
            raise ParameterError(f"unknown prox kind {self.kind!r}, expected one of {PROX_KINDS}")
        if not (math.isfinite(self.tau) and self.tau >= 0):
            raise ParameterError(f"tau must be finite and >= 0, got {self.tau}")
        if self.kind == "box" and not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ParameterError(f"box requires finite lo < hi, got ({self.lo}, {self.hi})")
        if self.inner_iters < 1:
            raise ParameterError(f"inner_iters must be >= 1, got {self.inner_iters}")

    @classmethod
    def identity(cls) -> "ProxSpec":
        return cls(kind="identity")

    @classmethod
    def soft_threshold(cls, tau: float) -> "ProxSpec":
        return cls(kind="soft_threshold", tau=tau)

    @classmethod
    def box(cls, lo: float, hi: float) -> "ProxSpec":
        return cls(kind="box", lo=lo, hi=hi)

    @classmethod
    def tv2d(cls, tau: float, inner_iters: int = 20) -> "ProxSpec":
        return cls(kind="tv2d", tau=tau, inner_iters=inner_iters)

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "soft_threshold":
            d["tau"] = self.tau
        elif self.kind == "box":
            d["lo"] = self.lo
            d["hi"] = self.hi
        elif self.kind == "tv2d":
            d["tau"] = self.tau
            d["inner_iters"] = self.inner_iters
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProxSpec":
        kind = d.get("kind")
        if kind not in PROX_KINDS:
            raise ParameterError(f"unknown prox kind {kind!r} in config")
        kwargs = {k: d[k] for k in ("tau", "lo", "hi", "inner_iters") if k in d}
        return cls(kind=kind, **kwargs)


def _grad2d(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Forward differences with Neumann boundary (zero at the far edge).
    gw = np.zeros_like(u)
    gh = np.zeros_like(u)
    gw[:, :-1, :] = u[:, 1:, :] - u[:, :-1, :]
    gh[:, :, :-1] = u[:, :, 1:] - u[:, :, :-1]
    return gw, gh


def _div2d(pw: np.ndarray, ph: np.ndarray) -> np.ndarray:
    # Negative adjoint of _grad2d: <grad u, p> = -<u, div p>.
    dw = np.zeros_like(pw)
    dw[:, 0, :] = pw[:, 0, :]
    dw[:, 1:-1, :] = pw[:, 1:-1, :] - pw[:, :-2, :]
    dw[:, -1, :] = -pw[:, -2, :] if pw.shape[1] > 1 else pw[:, -1, :] * 0.0
    dh = np.zeros_like(ph)
    dh[:, :, 0] = ph[:, :, 0]
    dh[:, :, 1:-1] = ph[:, :, 1:-1] - ph[:, :, :-2]
    dh[:, :, -1] = -ph[:, :, -2] if ph.shape[2] > 1 else ph[:, :, -1] * 0.0
    return dw + dh


def total_variation(mat: np.ndarray, dims: tuple[int, int]) -> float:
    """Isotropic TV of each band, summed: sum sqrt(gw^2 + gh^2)."""
    img = _as_images(mat, dims)
    gw, gh = _grad2d(img)
    return float(np.sqrt(gw**2 + gh**2).sum())


def _as_images(mat: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    mat = np.asarray(mat, dtype=np.float64)
    w, h = dims
    if mat.ndim != 2 or mat.shape[1] != w * h:
        raise ParameterError(
            f"expected a (bands, {w * h}) matrix for spatial dims {dims}, got {mat.shape}"
        )
    return mat.reshape(mat.shape[0], w, h)


def _tv_prox(mat: np.ndarray, weight: float, dims: tuple[int, int], iters: int) -> np.ndarray:
    """Dual projection scheme for argmin 0.5*||a-m||^2 + weight*TV(m).

    Fixed iteration count, step 0.25; the result is an approximation whose
    quality grows with iters (20 is plenty for solver-scale weights).
    """
    if weight == 0.0:
        return np.array(mat, dtype=np.float64, copy=True)
    a = _as_images(mat, dims)
    pw = np.zeros_like(a)
    ph = np.zeros_like(a)
    tau = 0.25
    for _ in range(iters):
        gw, gh = _grad2d(_div2d(pw, ph) - a / weight)
        norm = np.sqrt(gw**2 + gh**2)
        denom = 1.0 + tau * norm
        pw = (pw + tau * gw) / denom
        ph = (ph + tau * gh) / denom
    out = a - weight * _div2d(pw, ph)
    return out.reshape(mat.shape)


def prox_apply(
    spec: ProxSpec,
    a: np.ndarray,
    scale: float = 1.0,
    dims: tuple[int, int] | None = None,
) -> np.ndarray:
    """Evaluate prox_{scale * Phi}(a) for the regularizer described by spec.

    dims (W, H) is required for tv2d, whose prox acts on each band as a 2-D
    image.  Box ignores scale (projection is scale-invariant); identity and
    zero-scale thresholds return a unchanged.
    """
    a = np.asarray(a, dtype=np.float64)
    if not (math.isfinite(scale) and scale >= 0):
        raise ParameterError(f"prox scale must be finite and >= 0, got {scale}")
    if spec.kind == "identity":
        return a
    if spec.kind == "soft_threshold":
        t = scale * spec.tau
        return np.sign(a) * np.maximum(np.abs(a) - t, 0.0)
    if spec.kind == "box":
        return np.clip(a, spec.lo, spec.hi)
    if dims is None:
        raise ParameterError("tv2d prox needs the spatial dims (W, H)")
    return _tv_prox(a, scale * spec.tau, dims, spec.inner_iters)


def regularizer_value(
    spec: ProxSpec,
    a: np.ndarray,
    dims: tuple[int, int] | None = None,
) -> float:
    """Evaluate Phi(a); box returns math.inf outside its bounds."""
    a = np.asarray(a, dtype=np.float64)
    if spec.kind == "identity":
        return 0.0
    if spec.kind == "soft_threshold":
        return float(spec.tau * np.abs(a).sum())
    if spec.kind == "box":
        if a.size and (a.min() < spec.lo or a.max() > spec.hi):
            return math.inf
        return 0.0
    if dims is None:
        raise ParameterError("tv2d value needs the spatial dims (W, H)")
    return spec.tau * total_variation(a, dims)
