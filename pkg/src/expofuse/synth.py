"""Seeded synthetic scenes for benchmarks and numerical checks."""

import numpy as np

from .cube import HsiCube


def _signature(bands: int, rng: np.random.Generator) -> np.ndarray:
    # Smooth random spectrum in [0.15, 0.95]: two passes of a 3-tap average.
    s = rng.uniform(0.0, 1.0, bands)
    for _ in range(2):
        s = np.convolve(np.pad(s, 1, mode="edge"), [0.25, 0.5, 0.25], mode="valid")
    return 0.15 + 0.8 * (s - s.min()) / max(s.max() - s.min(), 1e-9)


def synthetic_scene(
    bands: int,
    width: int,
    height: int,
    rng: np.random.Generator,
    n_shapes: int = 10,
    value_range: tuple[float, float] = (0.05, 0.95),
) -> HsiCube:
    """Piecewise-constant "materials" cube: shapes with distinct smooth spectra.

    Rectangles and disks with their own spectral signatures are stacked over a
    background material, giving sharp spatial edges between spectrally
    distinct regions.  Values are rescaled into value_range, strictly inside
    (0, 1) by default so exposure ratios stay well defined everywhere.
    """
    cube = np.tile(_signature(bands, rng)[:, None, None], (1, width, height))
    ww, hh = np.meshgrid(np.arange(width), np.arange(height), indexing="ij")
    for _ in range(n_shapes):
        sig = _signature(bands, rng)
        if rng.uniform() < 0.5:
            w0 = int(rng.integers(0, max(width - 4, 1)))
            h0 = int(rng.integers(0, max(height - 4, 1)))
            w1 = w0 + int(rng.integers(4, max(width // 2, 5)))
            h1 = h0 + int(rng.integers(4, max(height // 2, 5)))
            mask = (ww >= w0) & (ww < w1) & (hh >= h0) & (hh < h1)
        else:
            cw = rng.uniform(0, width)
            ch = rng.uniform(0, height)
            radius = rng.uniform(3.0, max(width, height) / 4.0)
            mask = (ww - cw) ** 2 + (hh - ch) ** 2 < radius**2
        cube[:, mask] = sig[:, None]
    lo, hi = value_range
    cmin, cmax = cube.min(), cube.max()
    cube = lo + (hi - lo) * (cube - cmin) / max(cmax - cmin, 1e-12)
    return HsiCube(cube)
