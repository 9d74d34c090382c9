"""Finite-difference verification of the analytic solver gradients.

Central differences of the quadratic fit terms on seeded tiny instances,
compared against the descent directions returned by the solver module.
"""

import numpy as np

from .cube import hadamard
from .degradation import SpectralResponse, build_spatial_operator, make_blur_kernel
from .solver import grad_exp_hsi, grad_exp_msi, grad_image

GRADCHECK_TOL = 1e-5


def _fit_terms(hsi, msi, image, e1, e2, op, response):
    r1 = hsi - op.forward(hadamard(image, e1))
    r2 = msi - response.forward(hadamard(image, e2))
    return 0.5 * np.sum(r1 * r1), 0.5 * np.sum(r2 * r2)


def _central_diff(fun, var, h=1e-6):
    grad = np.zeros_like(var)
    it = np.nditer(var, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        bumped = var.copy()
        bumped[idx] = var[idx] + h
        hi = fun(bumped)
        bumped[idx] = var[idx] - h
        lo = fun(bumped)
        grad[idx] = (hi - lo) / (2.0 * h)
    return grad


def _rel_error(analytic, reference):
    scale = max(np.abs(reference).max(), 1e-12)
    return float(np.abs(analytic - reference).max() / scale)


def random_instance(rng: np.random.Generator):
    """One tiny fusion problem: 3 bands, 4x4 grid, ratio 2, 2 MSI channels."""
    c, w, h, ratio = 3, 4, 4, 2
    op = build_spatial_operator(make_blur_kernel(3, 1.0), ratio, (w, h))
    mat = rng.uniform(0.1, 1.0, size=(2, c))
    response = SpectralResponse(mat / mat.sum(axis=1, keepdims=True))
    image = rng.uniform(0.1, 1.0, size=(c, w * h))
    e1 = rng.uniform(0.5, 1.5, size=(c, w * h))
    e2 = rng.uniform(0.5, 1.5, size=(c, w * h))
    hsi = rng.uniform(0.0, 1.0, size=(c, op.n_out))
    msi = rng.uniform(0.0, 1.0, size=(response.channels, w * h))
    return hsi, msi, image, e1, e2, op, response


def check_instance(rng: np.random.Generator) -> dict[str, float]:
    """Max relative errors of the three analytic directions on one instance."""
    hsi, msi, image, e1, e2, op, response = random_instance(rng)

    fd_e1 = _central_diff(
        lambda v: _fit_terms(hsi, msi, image, v, e2, op, response)[0], e1
    )
    fd_e2 = _central_diff(
        lambda v: _fit_terms(hsi, msi, image, e1, v, op, response)[1], e2
    )
    fd_z = _central_diff(
        lambda v: sum(_fit_terms(hsi, msi, v, e1, e2, op, response)), image
    )
    # Analytic directions are descent directions, i.e. negative gradients.
    return {
        "exposure_hsi": _rel_error(grad_exp_hsi(hsi, image, e1, op), -fd_e1),
        "exposure_msi": _rel_error(grad_exp_msi(msi, image, e2, response), -fd_e2),
        "image": _rel_error(grad_image(hsi, msi, image, e1, e2, op, response), -fd_z),
    }


def run_gradient_check(seed: int, instances: int = 5) -> dict[str, float]:
    """Worst-case relative errors over several seeded instances."""
    rng = np.random.default_rng(seed)
    worst = {"exposure_hsi": 0.0, "exposure_msi": 0.0, "image": 0.0}
    for _ in range(instances):
        errs = check_instance(rng)
        for k, v in errs.items():
            worst[k] = max(worst[k], v)
    return worst
