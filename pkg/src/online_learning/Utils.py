# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np


class TemplateUnavailableError(ValueError):
    """The block sits in the first block row or column; no template exists."""


@dataclass(frozen=True)
class Template:
    z: np.ndarray
    position: Tuple[int, int]

    def __post_init__(self):
        z = np.asarray(self.z, dtype=np.float64)
        if z.ndim != 1:
            raise ValueError(f"Template must be a vector, got shape {z.shape}")
        if np.any(z < 0.0) or np.any(z > 255.0):
            raise ValueError("Template values must lie in the 0..255 pixel range")
        object.__setattr__(self, 'z', z)


def template_vector(z: Union[Template, np.ndarray]) -> np.ndarray:
    """Devuelve el vector de la plantilla como float64"""
    if isinstance(z, Template):
        return z.z
    return np.asarray(z, dtype=np.float64)


def template_available(pos: Tuple[int, int], n: int) -> bool:
    """Un bloque tiene plantilla si no está en la primera fila/columna de bloques"""
    row, col = pos
    return row >= n and col >= n


def extract_template(recon: np.ndarray, pos: Tuple[int, int], n: int) -> Template:
    """
    Builds the L-shaped template of a block from reconstructed pixels.

    The template is the 2n x 2n square whose bottom-right quadrant is the
    current block, minus that quadrant, read in raster order: n rows of 2n
    pixels (top-left and top regions) then n rows of n pixels (left region).

    Args:
        recon: Reconstructed image (rows x cols)
        pos: Top-left pixel (row, col) of the current block
        n: Block size

    Returns:
        Template holding 3n^2 pixel values as float64

    Raises:
        TemplateUnavailableError: if the block is in the first block row/column
    """
    row, col = pos
    if not template_available(pos, n):
        raise TemplateUnavailableError(
            f"No template for block at {pos}: first block row or column"
        )
    upper = recon[row - n:row, col - n:col + n]
    left = recon[row:row + n, col - n:col]
    z = np.concatenate([upper.ravel(), left.ravel()]).astype(np.float64)
    return Template(z=z, position=(row, col))


def block_ssd_sums(block: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sums of squared neighbour differences inside a block.

    Args:
        block: n x n reconstructed pixels

    Returns:
        (vert_sums, horiz_sums), each of length n-1; vert_sums[u] sums over
        the columns the squared difference between rows u and u+1, and
        horiz_sums[u] sums over the rows between columns u and u+1
    """
    block = np.asarray(block, dtype=np.float64)
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise ValueError(f"Expected a square block, got shape {block.shape}")
    vert_sums = np.sum(np.diff(block, axis=0) ** 2, axis=1)
    horiz_sums = np.sum(np.diff(block, axis=1) ** 2, axis=0)
    return vert_sums, horiz_sums
