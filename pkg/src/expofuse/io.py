"""Binary cube format, band-image import, and false-color export.

Cube files are a minimal container: an 8-byte magic tag "HSICUBE1", then
bands / width / height / dtype-code as little-endian uint32 (dtype 0 is the
only defined code: 32-bit little-endian float), then the payload in
band-major order with row-major pixels, matching the unfolding layout.
"""

import struct
import warnings
from pathlib import Path

import numpy as np
from PIL import Image

from .cube import HsiCube
from .errors import (
    BadMagicError,
    DataError,
    DimensionMismatchError,
    DimOverflowError,
    ParameterError,
    TruncatedPayloadError,
)

CUBE_MAGIC = b"HSICUBE1"
CUBE_DTYPE_F32 = 0
_HEADER = struct.Struct("<8sIIII")
_MAX_ELEMENTS = 1 << 36  # 256 GiB of float32, clearly a corrupt header


def write_cube(path, cube: HsiCube) -> None:
    """Write a cube as 32-bit floats; values are stored as-is."""
    c, w, h = cube.dims
    payload = np.ascontiguousarray(cube.data, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(CUBE_MAGIC, c, w, h, CUBE_DTYPE_F32))
        fh.write(payload)


def read_cube(path) -> HsiCube:
    """Read a cube file; non-finite values are an error, out-of-[0,1] a warning."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise TruncatedPayloadError(f"{path}: file shorter than the header")
        magic, c, w, h, dtype = _HEADER.unpack(header)
        if magic != CUBE_MAGIC:
            raise BadMagicError(f"{path}: bad magic {magic!r}, expected {CUBE_MAGIC!r}")
        if dtype != CUBE_DTYPE_F32:
            raise DataError(f"{path}: unsupported dtype code {dtype}")
        if min(c, w, h) < 1 or c * w * h > _MAX_ELEMENTS:
            raise DimOverflowError(f"{path}: implausible dims ({c}, {w}, {h})")
        payload = fh.read()
    expected = c * w * h * 4
    if len(payload) != expected:
        raise TruncatedPayloadError(
            f"{path}: payload has {len(payload)} bytes, header implies {expected}"
        )
    data = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(c, w, h)
    if not np.all(np.isfinite(data)):
        raise DataError(f"{path}: payload contains non-finite values")
    if data.min() < 0.0 or data.max() > 1.0:
        warnings.warn(f"{path}: values outside [0, 1] (min={data.min()}, max={data.max()})",
                      stacklevel=2)
    return HsiCube(data)


def _grayscale_array(path: Path) -> np.ndarray:
    with Image.open(path) as img:
        mode = img.mode
        arr = np.asarray(img)
    if mode == "L":
        return arr.astype(np.float64) / 255.0
    if mode.startswith("I;16") or mode == "I":
        return arr.astype(np.float64) / 65535.0
    raise DataError(f"{path}: unsupported image mode {mode!r}, expected 8/16-bit grayscale")


def import_band_pngs(directory, pattern: str = "*.png") -> HsiCube:
    """Stack per-band grayscale images, lexicographic filename order = band order.

    Values are scaled by the bit-depth maximum (255 or 65535), never by the
    per-image maximum, so relative exposure between bands is preserved.
    """
    directory = Path(directory)
    paths = sorted(directory.glob(pattern))
    if not paths:
        raise DataError(f"no files matching {pattern!r} in {directory}")
    bands = []
    bad = []
    for p in paths:
        try:
            arr = _grayscale_array(p)
        except DataError:
            raise
        except Exception as exc:
            bad.append(f"{p.name}: {exc}")
            continue
        bands.append((p.name, arr))
    if bad:
        raise DataError(f"unreadable band files: {', '.join(bad)}")
    shapes = {arr.shape for _, arr in bands}
    if len(shapes) != 1:
        offenders = ", ".join(f"{name}={arr.shape}" for name, arr in bands)
        raise DimensionMismatchError(f"band images disagree in size: {offenders}")
    return HsiCube(np.stack([arr for _, arr in bands], axis=0))


def default_false_color_bands(bands: int) -> tuple[int, int, int]:
    """(red, green, blue) band indices following the [30, 15, 10]-at-31-bands convention."""
    top = bands - 1
    return (top, int(round(top / 2.0)), int(round(top / 3.0)))


def export_false_color(cube: HsiCube, bands: tuple[int, int, int], path) -> None:
    """Write an 8-bit RGB image from three selected bands.

    Each band is clipped to [0, 1] independently and scaled to 0..255 with
    half-up rounding.
    """
    for b in bands:
        if not (0 <= b < cube.bands):
            raise ParameterError(
                f"band index {b} out of range for a {cube.bands}-band cube"
            )
    stack = np.stack([cube.data[b] for b in bands], axis=-1)
    rgb = np.floor(np.clip(stack, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    Image.fromarray(rgb, mode="RGB").save(path)
