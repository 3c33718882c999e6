# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

from enum import IntEnum
from typing import List, Tuple

import numpy as np


class PredMode(IntEnum):
    VERT = 0
    HORIZ = 1
    DC = 2
    PLANE = 3


class ModeUnavailableError(ValueError):
    """The prediction mode needs neighbours the block does not have."""


def available_modes(pos: Tuple[int, int]) -> List[PredMode]:
    """Modos utilizables según los vecinos reconstruidos disponibles"""
    row, col = pos
    modes = []
    if row > 0:
        modes.append(PredMode.VERT)
    if col > 0:
        modes.append(PredMode.HORIZ)
    modes.append(PredMode.DC)
    if row > 0 and col > 0:
        modes.append(PredMode.PLANE)
    return modes


def _plane_multiplier(n: int) -> int:
    # 5 for 16x16 luma and 34 for 8x8 chroma, as in H.264
    half = n // 2
    weight_sum = half * (half + 1) * (2 * half + 1) // 3
    return int(np.floor(2048 / weight_sum + 0.5))


def _predict_plane(recon: np.ndarray, row: int, col: int, n: int) -> np.ndarray:
    top = [int(v) for v in recon[row - 1, col:col + n]]
    left = [int(v) for v in recon[row:row + n, col - 1]]
    corner = int(recon[row - 1, col - 1])
    half = n // 2

    def top_at(i: int) -> int:
        return corner if i < 0 else top[i]

    def left_at(i: int) -> int:
        return corner if i < 0 else left[i]

    H = sum((k + 1) * (top_at(half + k) - top_at(half - 2 - k)) for k in range(half))
    V = sum((k + 1) * (left_at(half + k) - left_at(half - 2 - k)) for k in range(half))
    multiplier = _plane_multiplier(n)
    a = 16 * (top[n - 1] + left[n - 1])
    b = (multiplier * H + 32) >> 6
    c = (multiplier * V + 32) >> 6

    x = np.arange(n, dtype=np.int64)[None, :]
    y = np.arange(n, dtype=np.int64)[:, None]
    values = (a + b * (x - (half - 1)) + c * (y - (half - 1)) + 16) >> 5
    return np.clip(values, 0, 255)


def predict_block(recon: np.ndarray, pos: Tuple[int, int], mode: PredMode, n: int) -> np.ndarray:
    """
    Intra 16x16-style prediction from reconstructed neighbours.

    Args:
        recon: Reconstructed image so far
        pos: Top-left pixel (row, col) of the block
        mode: Prediction mode
        n: Block size

    Returns:
        n x n int64 prediction

    Raises:
        ModeUnavailableError: when the mode needs missing neighbours
    """
    row, col = pos
    mode = PredMode(mode)
    if mode not in available_modes(pos):
        raise ModeUnavailableError(f"Mode {mode.name} unavailable for block at {pos}")

    if mode == PredMode.VERT:
        top = recon[row - 1, col:col + n].astype(np.int64)
        return np.tile(top, (n, 1))

    if mode == PredMode.HORIZ:
        left = recon[row:row + n, col - 1].astype(np.int64)
        return np.tile(left[:, None], (1, n))

    if mode == PredMode.DC:
        # H.264: promedio de los vecinos disponibles, 128 si no hay ninguno
        total = 0
        count = 0
        if row > 0:
            total += int(recon[row - 1, col:col + n].astype(np.int64).sum())
            count += n
        if col > 0:
            total += int(recon[row:row + n, col - 1].astype(np.int64).sum())
            count += n
        dc = (total + count // 2) // count if count else 128
        return np.full((n, n), dc, dtype=np.int64)

    return _predict_plane(recon, row, col, n)


def select_mode(recon: np.ndarray, pos: Tuple[int, int], original_block: np.ndarray,
                n: int) -> PredMode:
    """
    Mode with the lowest SAD against the original block.

    Ties go to the lowest mode number. The choice ignores the transform.
    """
    original = np.asarray(original_block, dtype=np.int64)
    best_mode = PredMode.DC
    best_sad = None
    for mode in available_modes(pos):
        sad = int(np.abs(original - predict_block(recon, pos, mode, n)).sum())
        if best_sad is None or sad < best_sad:
            best_mode, best_sad = mode, sad
    return best_mode
