# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

from typing import Sequence, Union

import numpy as np


class EmptyTrainingSetError(ValueError):
    """No training vectors were given."""


def as_sample_matrix(samples: Union[np.ndarray, Sequence[Sequence[float]]]) -> np.ndarray:
    """Apila los vectores de entrenamiento como filas (N, n)"""
    X = np.asarray(samples, dtype=np.float64)
    if X.size == 0:
        raise EmptyTrainingSetError("At least one training vector is required")
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"Training vectors must form a 2D array, got shape {X.shape}")
    return X


def column_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Angle in radians between matching columns of two bases, ignoring sign.

    Args:
        a: n x n basis
        b: n x n basis

    Returns:
        n angles in [0, pi/2]
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    cosines = np.abs(np.sum(a * b, axis=0))
    cosines /= np.linalg.norm(a, axis=0) * np.linalg.norm(b, axis=0)
    return np.arccos(np.clip(cosines, 0.0, 1.0))
