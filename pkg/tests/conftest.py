# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import numpy as np
import pytest


def make_test_image(size: int, seed: int) -> np.ndarray:
    """Smooth gradient plus stripes and noise, so every block has some residual."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    angle = rng.uniform(0.0, np.pi)
    period = rng.uniform(5.0, 14.0)
    base = 60.0 + 100.0 * (x + y) / (2.0 * size)
    stripes = 40.0 * np.sin(2.0 * np.pi * (x * np.cos(angle) + y * np.sin(angle)) / period)
    noisy = base + stripes + rng.normal(0.0, 4.0, (size, size))
    return np.clip(np.rint(noisy), 0, 255).astype(np.uint8)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def small_image():
    return make_test_image(64, seed=7)


@pytest.fixture
def pgm_file(tmp_path, small_image):
    from src.codec import write_pgm

    path = tmp_path / "image.pgm"
    write_pgm(path, small_image)
    return path


@pytest.fixture
def image_factory():
    return make_test_image
