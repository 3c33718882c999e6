# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError


PGM_MAGIC = b'P5'


class PgmFormatError(ValueError):
    """File is not an 8-bit grayscale PGM."""


def round_half_away(values: np.ndarray) -> np.ndarray:
    """Redondeo a enteros, mitades alejándose de cero"""
    values = np.asarray(values, dtype=np.float64)
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def to_pixels(values: np.ndarray) -> np.ndarray:
    """Redondea y recorta al rango de 8 bits"""
    return np.clip(round_half_away(values), 0, 255).astype(np.uint8)


def read_pgm(path: Union[str, Path]) -> np.ndarray:
    """
    Reads a binary (P5) 8-bit PGM file.

    Args:
        path: File to read

    Returns:
        uint8 array of shape (height, width)
    """
    with open(path, 'rb') as f:
        magic = f.read(2)
    if magic != PGM_MAGIC:
        raise PgmFormatError(f"{path} is not a binary PGM (magic {magic!r})")
    try:
        img = Image.open(path)
    except UnidentifiedImageError as e:
        raise PgmFormatError(f"{path} is not an image file") from e
    with img:
        if img.format != 'PPM' or img.mode != 'L':
            raise PgmFormatError(f"{path} is not an 8-bit grayscale PGM (format={img.format}, mode={img.mode})")
        return np.array(img, dtype=np.uint8)


def write_pgm(path: Union[str, Path], image: np.ndarray):
    """Escribe una imagen uint8 como PGM binario"""
    image = np.asarray(image)
    if image.ndim != 2:
        raise PgmFormatError(f"Expected a 2D grayscale image, got shape {image.shape}")
    Image.fromarray(image.astype(np.uint8)).save(path, format='PPM')
