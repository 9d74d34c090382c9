"""Block proximal gradient descent for exposure-aware fusion.

The objective couples an LR-HSI observation, an HR-MSI observation, a latent
high-resolution image Z and two per-band per-pixel exposure fields:

    0.5*||X - (Z . E1) H||_F^2 + 0.5*||Y - P (Z . E2)||_F^2
      + b1*Phi1(E1) + b2*Phi2(E2) + b3*Phi3(Z)

with "." the elementwise product, H the blur+decimation operator and P the
spectral response.  One outer iteration updates the blocks in the fixed
order E1, E2, Z; the Z step always consumes the freshly updated exposure
fields.  Each block step is prox(var + s*g) where g is the descent direction
of that block's quadratic fit term and the prox scale is s*b.
"""

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .cube import hadamard
from .degradation import SpatialOperator, SpectralResponse
from .errors import DimensionMismatchError, ParameterError, SolverDivergedError
from .prox import ProxSpec, prox_apply, regularizer_value

BLOCKS = ("exposure_hsi", "exposure_msi", "image")

DEFAULT_REG_WEIGHTS = (0.001, 0.001, 0.005)
DEFAULT_PROX = (
    ProxSpec.box(0.01, 10.0),
    ProxSpec.box(0.01, 10.0),
    ProxSpec.tv2d(1.0),
)


@dataclass(frozen=True)
class LineSearch:
    """Backtracking control: halve the step until the block objective stops increasing."""

    enabled: bool = False
    backtrack: float = 0.5
    max_trials: int = 20

    def __post_init__(self):
        if not (0.0 < self.backtrack < 1.0):
            raise ParameterError(f"backtrack factor must be in (0, 1), got {self.backtrack}")
        if self.max_trials < 1:
            raise ParameterError(f"max_trials must be >= 1, got {self.max_trials}")


@dataclass(frozen=True)
class SolverConfig:
    """Step sizes, regularizer weights/specs and stopping controls.

    steps defaults to reg_weights, so out of the box a single constant per
    block serves as both the gradient step and the prox weight; separating
    them is what makes backtracking line search possible.  tol is a relative
    objective-change threshold; 0 disables it so exactly outer_iters
    iterations run.
    """

    reg_weights: tuple[float, float, float] = DEFAULT_REG_WEIGHTS
    steps: tuple[float, float, float] | None = None
    prox: tuple[ProxSpec, ProxSpec, ProxSpec] = DEFAULT_PROX
    outer_iters: int = 3
    tol: float = 0.0
    line_search: LineSearch = field(default_factory=LineSearch)

    def __post_init__(self):
        if len(self.reg_weights) != 3 or any(
            not (math.isfinite(b) and b >= 0) for b in self.reg_weights
        ):
            raise ParameterError(f"reg_weights must be 3 nonnegative reals, got {self.reg_weights}")
        if self.steps is not None and (
            len(self.steps) != 3
            or any(not (math.isfinite(s) and s >= 0) for s in self.steps)
        ):
            raise ParameterError(f"steps must be 3 nonnegative reals, got {self.steps}")
        if len(self.prox) != 3:
            raise ParameterError("prox must be a triple of ProxSpec")
        if self.outer_iters < 1:
            raise ParameterError(f"outer_iters must be >= 1, got {self.outer_iters}")
        if not (math.isfinite(self.tol) and self.tol >= 0):
            raise ParameterError(f"tol must be finite and >= 0, got {self.tol}")

    @property
    def effective_steps(self) -> tuple[float, float, float]:
        return self.steps if self.steps is not None else self.reg_weights

    def to_dict(self) -> dict:
        return {
            "reg_weights": list(self.reg_weights),
            "steps": None if self.steps is None else list(self.steps),
            "prox": [p.to_dict() for p in self.prox],
            "outer_iters": self.outer_iters,
            "tol": self.tol,
            "line_search": {
                "enabled": self.line_search.enabled,
                "backtrack": self.line_search.backtrack,
                "max_trials": self.line_search.max_trials,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolverConfig":
        kwargs = {}
        if "reg_weights" in d:
            kwargs["reg_weights"] = tuple(d["reg_weights"])
        if d.get("steps") is not None:
            kwargs["steps"] = tuple(d["steps"])
        if "prox" in d:
            kwargs["prox"] = tuple(ProxSpec.from_dict(p) for p in d["prox"])
        if "outer_iters" in d:
            kwargs["outer_iters"] = int(d["outer_iters"])
        if "tol" in d:
            kwargs["tol"] = float(d["tol"])
        if "line_search" in d:
            kwargs["line_search"] = LineSearch(**d["line_search"])
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SolverConfig":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SolverState:
    """Current iterates: two (C, N) exposure fields, the (C, N) image, and history."""

    exposure_hsi: np.ndarray
    exposure_msi: np.ndarray
    image: np.ndarray
    iteration: int = 0
    objective_history: tuple[float, ...] = ()


def _check_problem(hsi, msi, image, exp_hsi, exp_msi, op, response):
    hsi = np.asarray(hsi, dtype=np.float64)
    msi = np.asarray(msi, dtype=np.float64)
    image = np.asarray(image, dtype=np.float64)
    exp_hsi = np.asarray(exp_hsi, dtype=np.float64)
    exp_msi = np.asarray(exp_msi, dtype=np.float64)
    c, n = image.shape
    if n != op.n_in:
        raise DimensionMismatchError(
            f"image has {n} pixels but operator expects {op.n_in}"
        )
    if hsi.shape != (c, op.n_out):
        raise DimensionMismatchError(
            f"LR-HSI must have shape {(c, op.n_out)}, got {hsi.shape}"
        )
    if msi.shape != (response.channels, n):
        raise DimensionMismatchError(
            f"HR-MSI must have shape {(response.channels, n)}, got {msi.shape}"
        )
    if response.bands != c:
        raise DimensionMismatchError(
            f"response expects {response.bands} bands but image has {c}"
        )
    if exp_hsi.shape != (c, n) or exp_msi.shape != (c, n):
        raise DimensionMismatchError(
            f"exposure fields must have shape {(c, n)}, got {exp_hsi.shape} and {exp_msi.shape}"
        )
    return hsi, msi, image, exp_hsi, exp_msi


def _fit_hsi(hsi, image, exp_hsi, op) -> float:
    r = hsi - op.forward(hadamard(image, exp_hsi))
    return 0.5 * float(np.sum(r * r))


def _fit_msi(msi, image, exp_msi, response) -> float:
    r = msi - response.forward(hadamard(image, exp_msi))
    return 0.5 * float(np.sum(r * r))


def objective(hsi, msi, image, exp_hsi, exp_msi, op, response, config: SolverConfig) -> float:
    """Full objective: both quadratic fit terms plus the weighted regularizers."""
    hsi, msi, image, exp_hsi, exp_msi = _check_problem(
        hsi, msi, image, exp_hsi, exp_msi, op, response
    )
    b1, b2, b3 = config.reg_weights
    p1, p2, p3 = config.prox
    dims = op.in_dims
    value = _fit_hsi(hsi, image, exp_hsi, op) + _fit_msi(msi, image, exp_msi, response)
    for b, p, var in ((b1, p1, exp_hsi), (b2, p2, exp_msi), (b3, p3, image)):
        if b != 0.0:
            reg = regularizer_value(p, var, dims)
            if math.isinf(reg):
                return math.inf
            value += b * reg
    return value


def grad_exp_hsi(hsi, image, exp_hsi, op: SpatialOperator) -> np.ndarray:
    """Descent direction of the HSI fit term w.r.t. the exposure field.

    Equals Z . ((X - (Z . E1) H) H^T), the negative gradient of
    0.5*||X - (Z . E1) H||^2; blocks update as var + step * direction.
    """
    residual = hsi - op.forward(hadamard(image, exp_hsi))
    return hadamard(image, op.adjoint(residual))


def grad_exp_msi(msi, image, exp_msi, response: SpectralResponse) -> np.ndarray:
    """Descent direction of the MSI fit term w.r.t. the exposure field."""
    residual = msi - response.forward(hadamard(image, exp_msi))
    return hadamard(image, response.adjoint(residual))


def grad_image(hsi, msi, image, exp_hsi, exp_msi, op, response) -> np.ndarray:
    """Descent direction of the summed fit terms w.r.t. the image."""
    r1 = hsi - op.forward(hadamard(image, exp_hsi))
    r2 = msi - response.forward(hadamard(image, exp_msi))
    return hadamard(op.adjoint(r1), exp_hsi) + hadamard(response.adjoint(r2), exp_msi)


def _block_objective(block, hsi, msi, image, exp_hsi, exp_msi, op, response, weight, spec):
    # Only the terms the block's variable appears in.
    dims = op.in_dims
    if block == "exposure_hsi":
        fit = _fit_hsi(hsi, image, exp_hsi, op)
        var = exp_hsi
    elif block == "exposure_msi":
        fit = _fit_msi(msi, image, exp_msi, response)
        var = exp_msi
    else:
        fit = _fit_hsi(hsi, image, exp_hsi, op) + _fit_msi(msi, image, exp_msi, response)
        var = image
    reg = regularizer_value(spec, var, dims) if weight != 0.0 else 0.0
    return fit + (weight * reg if not math.isinf(reg) else math.inf)


def pgd_iterate(
    state: SolverState,
    hsi,
    msi,
    op: SpatialOperator,
    response: SpectralResponse,
    config: SolverConfig,
    on_block=None,
) -> SolverState:
    """One outer iteration over the blocks exposure_hsi, exposure_msi, image.

    Without line search each block performs exactly one prox step at its
    configured step size.  With line search the step is halved (up to
    max_trials times) until the block objective does not increase; if every
    trial increases it, the block keeps its current value.  on_block, when
    given, is called with the block name after each block update.
    """
    hsi, msi, image, exp_hsi, exp_msi = _check_problem(
        hsi, msi, state.image, state.exposure_hsi, state.exposure_msi, op, response
    )
    steps = config.effective_steps
    weights = config.reg_weights
    dims = op.in_dims
    ls = config.line_search

    def update(block, idx, var, direction_fn):
        spec = config.prox[idx]
        weight = weights[idx]
        g = direction_fn(var)
        if not ls.enabled:
            s = steps[idx]
            return prox_apply(spec, var + s * g, scale=s * weight, dims=dims)
        current = _block_objective(
            block, hsi, msi, image, exp_hsi, exp_msi, op, response, weight, spec
        )
        s = steps[idx]
        for _ in range(ls.max_trials):
            candidate = prox_apply(spec, var + s * g, scale=s * weight, dims=dims)
            if block == "exposure_hsi":
                trial = _block_objective(block, hsi, msi, image, candidate, exp_msi, op, response, weight, spec)
            elif block == "exposure_msi":
                trial = _block_objective(block, hsi, msi, image, exp_hsi, candidate, op, response, weight, spec)
            else:
                trial = _block_objective(block, hsi, msi, candidate, exp_hsi, exp_msi, op, response, weight, spec)
            if trial <= current:
                return candidate
            s *= ls.backtrack
        return var

    exp_hsi = update(
        "exposure_hsi", 0, exp_hsi, lambda v: grad_exp_hsi(hsi, image, v, op)
    )
    if on_block:
        on_block("exposure_hsi")
    exp_msi = update(
        "exposure_msi", 1, exp_msi, lambda v: grad_exp_msi(msi, image, v, response)
    )
    if on_block:
        on_block("exposure_msi")
    image = update(
        "image", 2, image,
        lambda v: grad_image(hsi, msi, v, exp_hsi, exp_msi, op, response),
    )
    if on_block:
        on_block("image")
    return replace(
        state,
        exposure_hsi=exp_hsi,
        exposure_msi=exp_msi,
        image=image,
        iteration=state.iteration + 1,
    )


def _diverged_block(state: SolverState) -> str:
    for name, var in zip(BLOCKS, (state.exposure_hsi, state.exposure_msi, state.image)):
        if not np.all(np.isfinite(var)):
            return name
    return "image"


def solve(
    hsi,
    msi,
    op: SpatialOperator,
    response: SpectralResponse,
    config: SolverConfig,
    init: tuple[np.ndarray, np.ndarray, np.ndarray],
    on_block=None,
) -> SolverState:
    """Run pgd_iterate for outer_iters iterations (or until tol triggers).

    init is (exposure_hsi, exposure_msi, image).  objective_history holds the
    initial objective followed by one value per completed iteration; a
    non-finite objective aborts with SolverDivergedError naming the block.
    """
    e1, e2, z = init
    state = SolverState(
        exposure_hsi=np.asarray(e1, dtype=np.float64),
        exposure_msi=np.asarray(e2, dtype=np.float64),
        image=np.asarray(z, dtype=np.float64),
    )
    current = objective(
        hsi, msi, state.image, state.exposure_hsi, state.exposure_msi, op, response, config
    )
    history = [current]
    for _ in range(config.outer_iters):
        state = pgd_iterate(state, hsi, msi, op, response, config, on_block=on_block)
        value = objective(
            hsi, msi, state.image, state.exposure_hsi, state.exposure_msi, op, response, config
        )
        if not math.isfinite(value):
            raise SolverDivergedError(
                f"objective became non-finite at iteration {state.iteration}"
                f" (block {_diverged_block(state)})",
                block=_diverged_block(state),
            )
        history.append(value)
        previous, current = current, value
        if config.tol > 0.0:
            change = abs(previous - current) / max(abs(previous), 1e-30)
            if change < config.tol:
                break
    return replace(state, objective_history=tuple(history))
