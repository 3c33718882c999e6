# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from src.codec.Bitstream import (
    BitReader,
    BitWriter,
    CorruptStreamError,
    se_to_ue,
    ue_length,
)

# Largest level magnitude the stream accepts
MAX_LEVEL = 2 ** 31 - 1


@lru_cache(maxsize=None)
def zigzag_order(n: int) -> Tuple[Tuple[int, int], ...]:
    """
    JPEG zigzag scan generalized to n x n.

    Anti-diagonals are visited in order; odd diagonals run top-right to
    bottom-left, even ones bottom-left to top-right.
    """
    order: List[Tuple[int, int]] = []
    for s in range(2 * n - 1):
        rows = range(max(0, s - n + 1), min(s, n - 1) + 1)
        if s % 2 == 0:
            rows = reversed(rows)
        order.extend((r, s - r) for r in rows)
    return tuple(order)


@lru_cache(maxsize=None)
def _zigzag_indices(n: int) -> Tuple[np.ndarray, np.ndarray]:
    order = np.array(zigzag_order(n), dtype=np.intp)
    return order[:, 0], order[:, 1]


def _run_level_pairs(levels: np.ndarray) -> List[Tuple[int, int]]:
    rows, cols = _zigzag_indices(levels.shape[0])
    scan = levels[rows, cols].astype(np.int64)
    nonzero = np.flatnonzero(scan)
    if nonzero.size and np.abs(scan[nonzero]).max() > MAX_LEVEL:
        raise ValueError("Level exceeds the entropy code range")
    previous = np.concatenate(([-1], nonzero[:-1]))
    runs = nonzero - previous - 1
    return [(int(run), int(scan[idx])) for run, idx in zip(runs, nonzero)]


def entropy_encode_block(levels: np.ndarray, writer: Optional[BitWriter] = None) -> BitWriter:
    """
    Run-level codes an n x n block of quantized coefficients.

    Each nonzero level in zigzag order is written as ue(run) followed by
    se(level); the block ends with ue(n^2), a run that can never occur.

    Args:
        levels: n x n integer levels
        writer: Writer to append to (a new one when omitted)

    Returns:
        The writer holding the coded block
    """
    levels = np.asarray(levels)
    if levels.ndim != 2 or levels.shape[0] != levels.shape[1]:
        raise ValueError(f"Expected a square level block, got shape {levels.shape}")
    if writer is None:
        writer = BitWriter()
    for run, level in _run_level_pairs(levels):
        writer.write_ue(run)
        writer.write_se(level)
    writer.write_ue(levels.shape[0] ** 2)
    return writer


def block_bit_cost(levels: np.ndarray) -> int:
    """Bits entropy_encode_block would spend on levels."""
    levels = np.asarray(levels)
    bits = sum(ue_length(run) + ue_length(se_to_ue(level))
               for run, level in _run_level_pairs(levels))
    return bits + ue_length(levels.shape[0] ** 2)


def entropy_decode_block(reader: BitReader, n: int) -> np.ndarray:
    """
    Reads one run-level coded block.

    Args:
        reader: Bit reader positioned at the block
        n: Block size

    Returns:
        n x n int64 levels

    Raises:
        CorruptStreamError: on runs past the block end, zero levels, or
            a truncated stream
    """
    order = zigzag_order(n)
    eob = n * n
    levels = np.zeros((n, n), dtype=np.int64)
    position = 0
    while True:
        offset = reader.bit_offset
        run = reader.read_ue()
        if run == eob:
            return levels
        position += run
        if position >= eob:
            raise CorruptStreamError(f"Run of {run} overflows the {n}x{n} block", offset)
        offset = reader.bit_offset
        level = reader.read_se()
        if level == 0 or abs(level) > MAX_LEVEL:
            raise CorruptStreamError(f"Invalid level {level}", offset)
        r, c = order[position]
        levels[r, c] = level
        position += 1
