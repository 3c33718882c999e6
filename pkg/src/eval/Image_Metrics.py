# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence

import numpy as np
from skimage.metrics import structural_similarity

from src.transforms import DimensionMismatchError, InvalidParameterError

logger = logging.getLogger(__name__)

PIXEL_MAX = 255.0
MIN_RD_POINTS = 4
GLNU_DIRECTIONS = ('horizontal', 'vertical')


class InsufficientPointsError(ValueError):
    """An RD curve has too few usable points for the cubic fit."""


@dataclass(frozen=True)
class RdPoint:
    rate: float
    psnr: float
    ssim: float = float('nan')

    def __post_init__(self):
        if not self.rate > 0.0:
            raise InvalidParameterError(f"Rate must be positive, got {self.rate}")
        if not math.isnan(self.ssim) and not -1.0 <= self.ssim <= 1.0:
            raise InvalidParameterError(f"SSIM must lie in [-1, 1], got {self.ssim}")


def _pair(a: np.ndarray, b: np.ndarray):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """8-bit PSNR in dB; identical images give inf."""
    a, b = _pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PIXEL_MAX ** 2 / mse)


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """
    Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, L=255.

    Args:
        a: Reference image
        b: Distorted image

    Returns:
        Mean over valid windows
    """
    a, b = _pair(a, b)
    return float(structural_similarity(
        a, b,
        data_range=PIXEL_MAX,
        gaussian_weights=True,
        sigma=1.5,
        use_sample_covariance=False,
        K1=0.01,
        K2=0.03,
    ))


def _curve(points: Sequence[RdPoint], name: str):
    usable = [p for p in points if math.isfinite(p.psnr)]
    if len(usable) < len(points):
        logger.warning("Dropping %d %s points with non-finite PSNR", len(points) - len(usable), name)
    if len(usable) < MIN_RD_POINTS:
        raise InsufficientPointsError(
            f"{name} curve needs at least {MIN_RD_POINTS} finite points, got {len(usable)}"
        )
    rate = np.array([p.rate for p in usable], dtype=np.float64)
    quality = np.array([p.psnr for p in usable], dtype=np.float64)
    return np.log(rate), quality


def bd_rate(anchor: Sequence[RdPoint], test: Sequence[RdPoint]) -> float:
    """
    Bjontegaard delta rate of test against anchor, in percent.

    Fits a cubic polynomial of log-rate against PSNR to each curve and
    integrates both over the overlapping PSNR interval. Negative values
    mean the test curve needs fewer bits for the same quality.

    Args:
        anchor: At least four anchor RD points
        test: At least four test RD points

    Returns:
        BD-rate in percent, nan when the PSNR ranges do not overlap
    """
    anchor_log_rate, anchor_quality = _curve(anchor, 'anchor')
    test_log_rate, test_quality = _curve(test, 'test')

    poly_anchor = np.polyfit(anchor_quality, anchor_log_rate, 3)
    poly_test = np.polyfit(test_quality, test_log_rate, 3)

    min_int = max(anchor_quality.min(), test_quality.min())
    max_int = min(anchor_quality.max(), test_quality.max())
    if max_int <= min_int:
        logger.warning("RD curves do not overlap in PSNR (%.3f..%.3f)", min_int, max_int)
        return math.nan

    int_anchor = np.polyint(poly_anchor)
    int_test = np.polyint(poly_test)
    area_anchor = np.polyval(int_anchor, max_int) - np.polyval(int_anchor, min_int)
    area_test = np.polyval(int_test, max_int) - np.polyval(int_test, min_int)

    avg_diff = (area_test - area_anchor) / (max_int - min_int)
    return float((np.exp(avg_diff) - 1.0) * 100.0)


def glnu(image: np.ndarray, levels: int = 16, direction: str = 'horizontal') -> float:
    """
    Gray-level non-uniformity of the run-length matrix.

    Pixels are quantized to `levels` equal bins over 0..255, maximal runs
    are counted along `direction`, and GLNU = sum_g (runs of level g)^2 /
    total runs.
    """
    image = np.asarray(image)
    if image.ndim != 2 or image.size == 0:
        raise DimensionMismatchError(f"Expected a non-empty 2D image, got shape {image.shape}")
    if not 1 <= levels <= 256:
        raise InvalidParameterError(f"levels must be in [1, 256], got {levels}")
    if direction not in GLNU_DIRECTIONS:
        raise InvalidParameterError(f"direction must be one of {GLNU_DIRECTIONS}, got '{direction}'")

    values = np.clip(image.astype(np.float64), 0, 255)
    quantized = np.minimum((values * levels / 256.0).astype(np.int64), levels - 1)
    if direction == 'vertical':
        quantized = quantized.T

    # inicio de cada run: primera columna o cambio de nivel
    starts = np.ones(quantized.shape, dtype=bool)
    starts[:, 1:] = quantized[:, 1:] != quantized[:, :-1]
    runs_per_level = np.bincount(quantized[starts], minlength=levels).astype(np.float64)
    return float(np.sum(runs_per_level ** 2) / runs_per_level.sum())


def per_image_bd_rate(anchor_by_image: Mapping[str, Sequence[RdPoint]],
                      test_by_image: Mapping[str, Sequence[RdPoint]]) -> Dict[str, float]:
    """BD-rate per image name present in both mappings, sorted by name."""
    common = sorted(set(anchor_by_image) & set(test_by_image))
    missing = sorted(set(anchor_by_image) ^ set(test_by_image))
    if missing:
        logger.warning("Images without a matching curve are skipped: %s", ', '.join(missing))
    return {name: bd_rate(anchor_by_image[name], test_by_image[name]) for name in common}


def _mean(values: List[float]) -> float:
    finite = [v for v in values if math.isfinite(v)]
    return float(np.mean(finite)) if finite else math.nan


def bd_rate_by_uniformity(anchor_by_image: Mapping[str, Sequence[RdPoint]],
                          test_by_image: Mapping[str, Sequence[RdPoint]],
                          glnu_by_image: Mapping[str, float]) -> Dict[str, float]:
    """
    Mean per-image BD-rate split by texture uniformity.

    Images with GLNU at or below the median are 'uniform', the rest
    'non_uniform'; 'all' averages every image.

    Returns:
        Dict with keys 'uniform', 'non_uniform', 'all' (nan for empty groups)
    """
    per_image = per_image_bd_rate(anchor_by_image, test_by_image)
    names = [name for name in per_image if name in glnu_by_image]
    if not names:
        return {'uniform': math.nan, 'non_uniform': math.nan, 'all': _mean(list(per_image.values()))}

    median = float(np.median([glnu_by_image[name] for name in names]))
    uniform = [per_image[name] for name in names if glnu_by_image[name] <= median]
    non_uniform = [per_image[name] for name in names if glnu_by_image[name] > median]
    return {
        'uniform': _mean(uniform),
        'non_uniform': _mean(non_uniform),
        'all': _mean(list(per_image.values())),
    }
