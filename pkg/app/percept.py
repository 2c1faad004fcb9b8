"""Perceptual color differencing.

Colors are compared in CIE L*a*b* (D65), where Euclidean distance (CIE76 delta-E)
approximates perceived difference. Region comparisons mark every pixel whose
delta-E exceeds the just-noticeable difference.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from app.errors import EmptyHistogram, EmptyRegion
from app.model import RGB, ScreenImage

logger = logging.getLogger(__name__)

DEFAULT_JND = 2.3

# Linear sRGB -> XYZ, D65
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# Reference white is the image of sRGB white, so every gray maps to a = b = 0.
_WHITE = _SRGB_TO_XYZ.sum(axis=1)
_EPSILON = (6.0 / 29.0) ** 3
_KAPPA = 3.0 * (6.0 / 29.0) ** 2

QUANT_BITS = 4
BIN_COUNT = 1 << (3 * QUANT_BITS)


class LabColor(NamedTuple):
    L: float
    a: float
    b: float


def _linearize(channel: np.ndarray) -> np.ndarray:
    c = channel / 255.0
    return np.where(c > 0.04045, ((c + 0.055) / 1.055) ** 2.4, c / 12.92)


def _f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _EPSILON, np.cbrt(t), t / _KAPPA + 4.0 / 29.0)


def rgb_array_to_lab(rgb: np.ndarray) -> np.ndarray:
    """Convert an ``(..., 3)`` array of 8-bit sRGB values to L*a*b*."""
    linear = _linearize(np.asarray(rgb, dtype=np.float64))
    xyz = linear @ _SRGB_TO_XYZ.T
    f = _f(xyz / _WHITE)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def srgb_to_lab(rgb: Sequence[int]) -> LabColor:
    L, a, b = rgb_array_to_lab(np.array(rgb, dtype=np.float64))
    return LabColor(float(L), float(a), float(b))


def delta_e(c1: LabColor, c2: LabColor) -> float:
    """CIE76 color difference."""
    return math.sqrt((c1[0] - c2[0]) ** 2 + (c1[1] - c2[1]) ** 2 + (c1[2] - c2[2]) ** 2)


def delta_e_array(lab1: np.ndarray, lab2: np.ndarray, formula: str = "cie76") -> np.ndarray:
    """Per-element delta-E between two Lab arrays of the same shape."""
    if formula == "ciede2000":
        from skimage.color import deltaE_ciede2000

        return deltaE_ciede2000(lab1, lab2)
    return np.sqrt(np.sum((lab1 - lab2) ** 2, axis=-1))


def rgb_delta_e(rgb1: Sequence[int], rgb2: Sequence[int], formula: str = "cie76") -> float:
    """Delta-E between two 8-bit RGB colors."""
    if formula == "cie76":
        return delta_e(srgb_to_lab(rgb1), srgb_to_lab(rgb2))
    lab1 = rgb_array_to_lab(np.array([rgb1], dtype=np.float64))
    lab2 = rgb_array_to_lab(np.array([rgb2], dtype=np.float64))
    return float(delta_e_array(lab1, lab2, formula)[0])


@dataclass(frozen=True, eq=False)
class PerceptualDiff:
    differing_fraction: float
    mean_delta_e: float
    mask: np.ndarray
    resampled: bool = False

    @property
    def differing_pixels(self) -> int:
        return int(np.count_nonzero(self.mask))


def resample_nearest(image: ScreenImage, width: int, height: int) -> ScreenImage:
    """Nearest-neighbor resize; never introduces colors absent from the source."""
    rows = (np.arange(height) * image.height) // height
    cols = (np.arange(width) * image.width) // width
    return ScreenImage.from_array(image.pixels[rows][:, cols])


def perceptual_region_diff(
    a: ScreenImage, b: ScreenImage, jnd: float = DEFAULT_JND, formula: str = "cie76"
) -> PerceptualDiff:
    """Compare two regions pixel by pixel in Lab space.

    ``b`` is resampled to ``a``'s size when they differ.
    """
    if a.width == 0 or a.height == 0:
        raise EmptyRegion("reference region is empty")
    resampled = False
    if b.size != a.size:
        if b.width == 0 or b.height == 0:
            raise EmptyRegion("compared region is empty")
        logger.debug(f"Resampling {b.width}x{b.height} region to {a.width}x{a.height}")
        b = resample_nearest(b, a.width, a.height)
        resampled = True

    distances = delta_e_array(rgb_array_to_lab(a.pixels), rgb_array_to_lab(b.pixels), formula)
    mask = distances > jnd
    mask.setflags(write=False)
    return PerceptualDiff(
        differing_fraction=float(np.count_nonzero(mask)) / mask.size,
        mean_delta_e=float(distances.mean()),
        mask=mask,
        resampled=resampled,
    )


@dataclass(frozen=True, eq=False)
class ColorHistogram:
    """Pixel counts over RGB quantized to 4 bits per channel (4096 bins)."""

    bins: np.ndarray
    total: int

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColorHistogram):
            return NotImplemented
        return self.total == other.total and bool(np.array_equal(self.bins, other.bins))

    def __hash__(self) -> int:
        return hash((self.total, self.bins.tobytes()))


def bin_indices(pixels: np.ndarray) -> np.ndarray:
    shift = 8 - QUANT_BITS
    q = np.asarray(pixels, dtype=np.int64) >> shift
    return (q[..., 0] << (2 * QUANT_BITS)) | (q[..., 1] << QUANT_BITS) | q[..., 2]


def bin_index(rgb: Sequence[int]) -> int:
    return int(bin_indices(np.array(rgb, dtype=np.int64)))


def bin_centroid(index: int) -> RGB:
    """Center color of a bin: channel index * 16 + 8."""
    mask = (1 << QUANT_BITS) - 1
    step = 1 << (8 - QUANT_BITS)
    r = (index >> (2 * QUANT_BITS)) & mask
    g = (index >> QUANT_BITS) & mask
    b = index & mask
    return (r * step + step // 2, g * step + step // 2, b * step + step // 2)


def color_histogram(image: ScreenImage) -> ColorHistogram:
    if image.width == 0 or image.height == 0:
        raise EmptyRegion("cannot build a histogram of an empty image")
    bins = np.bincount(bin_indices(image.pixels).ravel(), minlength=BIN_COUNT).astype(np.int64)
    bins.setflags(write=False)
    return ColorHistogram(bins=bins, total=int(image.width * image.height))


def ranked_colors(histogram: ColorHistogram, k: int) -> List[RGB]:
    """Centroids of the ``k`` most populated bins, count descending then bin index ascending."""
    if histogram.total < 1:
        raise EmptyHistogram("histogram is empty")
    populated = np.flatnonzero(histogram.bins)
    order = sorted(populated.tolist(), key=lambda i: (-int(histogram.bins[i]), i))
    return [bin_centroid(i) for i in order[:k]]


def dominant_color(histogram: ColorHistogram) -> RGB:
    if histogram.total < 1:
        raise EmptyHistogram("histogram is empty")
    # argmax returns the first maximum, i.e. the lowest bin index on ties
    return bin_centroid(int(np.argmax(histogram.bins)))


def histogram_intersection(h1: ColorHistogram, h2: ColorHistogram) -> float:
    if h1.total < 1 or h2.total < 1:
        raise EmptyHistogram("histogram intersection needs two non-empty histograms")
    return float(np.minimum(h1.bins / h1.total, h2.bins / h2.total).sum())


def foreground_background(histogram: ColorHistogram) -> Tuple[RGB, RGB]:
    """(foreground, background) proxy: second-dominant and dominant bin centroids.

    A single-color region reports its only color for both.
    """
    ranked = ranked_colors(histogram, 2)
    return (ranked[1] if len(ranked) > 1 else ranked[0], ranked[0])
