# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import logging
import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from src.transforms import InvalidParameterError

logger = logging.getLogger(__name__)

NOISE_SIGMA = 2.0

TextureFn = Callable[[int, np.random.Generator], np.ndarray]


def _coords(size: int) -> Tuple[np.ndarray, np.ndarray]:
    y, x = np.mgrid[0:size, 0:size]
    return y.astype(np.float64), x.astype(np.float64)


def _levels(rng: np.random.Generator) -> Tuple[float, float]:
    low = float(rng.integers(30, 90))
    high = float(rng.integers(160, 230))
    return low, high


def _stripes(axis: int) -> TextureFn:
    def make(size: int, rng: np.random.Generator) -> np.ndarray:
        y, x = _coords(size)
        period = int(rng.choice([8, 16]))
        duty = int(rng.integers(2, period // 2 + 1))
        phase = int(rng.integers(0, period))
        low, high = _levels(rng)
        coord = y if axis == 0 else x
        return np.where((coord + phase) % period < duty, high, low)
    return make


def _grid(size: int, rng: np.random.Generator) -> np.ndarray:
    y, x = _coords(size)
    period = int(rng.choice([6, 8, 16]))
    width = int(rng.integers(1, 3))
    phase = int(rng.integers(0, period))
    low, high = _levels(rng)
    lines = ((y + phase) % period < width) | ((x + phase) % period < width)
    return np.where(lines, low, high)


def _checkerboard(size: int, rng: np.random.Generator) -> np.ndarray:
    y, x = _coords(size)
    square = int(rng.choice([4, 8]))
    low, high = _levels(rng)
    parity = (np.floor(y / square) + np.floor(x / square)) % 2
    return np.where(parity == 0, low, high)


def _grating(size: int, rng: np.random.Generator) -> np.ndarray:
    y, x = _coords(size)
    period = float(rng.integers(6, 17))
    angle = math.radians(float(rng.choice([0.0, 30.0, 45.0, 60.0, 90.0, 135.0])))
    phase = float(rng.uniform(0.0, 2.0 * math.pi))
    amplitude = float(rng.uniform(50.0, 90.0))
    ramp = x * math.cos(angle) + y * math.sin(angle)
    return 128.0 + amplitude * np.cos(2.0 * math.pi * ramp / period + phase)


def _bricks(size: int, rng: np.random.Generator) -> np.ndarray:
    y, x = _coords(size)
    height = int(rng.choice([8, 16]))
    width = 2 * height
    low, high = _levels(rng)
    course = np.floor(y / height)
    shifted = x + (course % 2) * (width // 2)
    mortar = (y % height < 2) | (shifted % width < 2)
    return np.where(mortar, low, high)


TEXTURE_KINDS: Dict[str, TextureFn] = {
    'stripes_h': _stripes(0),
    'stripes_v': _stripes(1),
    'grid': _grid,
    'checkerboard': _checkerboard,
    'grating': _grating,
    'bricks': _bricks,
}


def generate_texture_suite(size: int = 320, count: int = 10,
                           seed: Optional[int] = None) -> List[Tuple[str, np.ndarray]]:
    """
    Synthetic periodic and directional textures for RD experiments.

    Kinds cycle through TEXTURE_KINDS; periods, phases, orientations and
    gray levels are drawn from the seeded generator, then Gaussian noise of
    standard deviation NOISE_SIGMA is added.

    Args:
        size: Image side in pixels
        count: Number of images
        seed: Generator seed

    Returns:
        (name, uint8 image) pairs in generation order
    """
    if size < 1 or count < 1:
        raise InvalidParameterError(f"size and count must be >= 1, got {size}, {count}")
    rng = np.random.default_rng(seed)
    kinds = list(TEXTURE_KINDS)
    suite = []
    for index in range(count):
        kind = kinds[index % len(kinds)]
        pattern = TEXTURE_KINDS[kind](size, rng)
        noisy = pattern + rng.normal(0.0, NOISE_SIGMA, pattern.shape)
        image = np.clip(np.rint(noisy), 0, 255).astype(np.uint8)
        suite.append((f"texture_{index:02d}_{kind}", image))
    logger.info("Generated %d textures of %dx%d", count, size, size)
    return suite
