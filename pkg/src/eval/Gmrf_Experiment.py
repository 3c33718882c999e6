# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.eval.Utils import as_sample_matrix
from src.transforms import (
    DEFAULT_ALPHA,
    AsymmetricMatrixError,
    InvalidParameterError,
    OrthonormalBasis,
    PathGraphWeights,
    build_cgl,
    dct_basis,
    eigendecompose_cgl,
    klt_from_covariance,
    weights_from_msd,
)
from src.transforms.Utils import jacobi_eigen

logger = logging.getLogger(__name__)

# Eigenvalues at or below this are treated as the null space of the precision
NULL_EIGENVALUE_TOL = 1e-12

DEFAULT_TEST_SIZE = 1000
DEFAULT_TRIALS = 20

# Grid of training sizes, powers of two from 2 to 16384
DEFAULT_TRAINING_SIZES = tuple(2 ** k for k in range(1, 15))

TRANSFORM_KINDS = ('dct', 'gbt', 'klt')

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]


class UndefinedSpectrumError(ValueError):
    """Power spectrum of an all-zero vector."""


@dataclass(frozen=True)
class GmrfModel:
    """
    Zero-mean Gaussian with precision P, sampled with covariance pinv(P).

    U and eigenvalues hold the eigendecomposition of P; directions with
    eigenvalue <= NULL_EIGENVALUE_TOL get zero variance.
    """
    n: int
    P: np.ndarray
    U: np.ndarray
    eigenvalues: np.ndarray

    @classmethod
    def from_path_weights(cls, weights: Union[PathGraphWeights, Sequence[float]]) -> 'GmrfModel':
        if not isinstance(weights, PathGraphWeights):
            weights = PathGraphWeights.from_sequence(weights)
        laplacian = build_cgl(weights)
        basis = eigendecompose_cgl(laplacian)
        return cls(n=laplacian.n, P=laplacian.L, U=basis.U, eigenvalues=basis.eigenvalues)

    @classmethod
    def from_precision(cls, precision: np.ndarray) -> 'GmrfModel':
        P = np.asarray(precision, dtype=np.float64)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError(f"Precision must be square, got shape {P.shape}")
        if np.max(np.abs(P - P.T)) > 1e-9:
            raise AsymmetricMatrixError("Precision matrix is not symmetric")
        eigenvalues, U = jacobi_eigen(P)
        if eigenvalues.min() < -1e-9 * max(1.0, float(np.abs(eigenvalues).max())):
            raise InvalidParameterError("Precision matrix is not positive semidefinite")
        return cls(n=P.shape[0], P=P, U=U, eigenvalues=eigenvalues)

    @property
    def scales(self) -> np.ndarray:
        """Per-direction standard deviations g_i = lambda_i^(-1/2), 0 on the null space."""
        g = np.zeros_like(self.eigenvalues)
        mask = self.eigenvalues > NULL_EIGENVALUE_TOL
        g[mask] = 1.0 / np.sqrt(self.eigenvalues[mask])
        return g

    @property
    def covariance(self) -> np.ndarray:
        """Pseudo-inverse of the precision."""
        return (self.U * self.scales ** 2) @ self.U.T


def uniform_path_model(n: int = 8) -> GmrfModel:
    """Path GMRF with unit edge weights (its GBT is the DCT)."""
    return GmrfModel.from_path_weights(np.ones(n - 1))


def nonuniform_path_model(n: int = 8) -> GmrfModel:
    """Path GMRF with edge weights equally spaced from 0.1 to 1.0 along the path."""
    return GmrfModel.from_path_weights(np.linspace(0.1, 1.0, n - 1))


def sample_gmrf(model: GmrfModel, count: int, seed: SeedLike = None) -> np.ndarray:
    """
    Draws samples x = U diag(g) z with z standard normal.

    Args:
        model: GMRF to sample
        count: Number of samples
        seed: Integer seed, SeedSequence, or an existing Generator

    Returns:
        (count, n) array, one sample per row
    """
    if count < 0:
        raise InvalidParameterError(f"count must be non-negative, got {count}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, model.n))
    return (z * model.scales) @ model.U.T


def pse(coeffs: np.ndarray) -> float:
    """
    Power spectral entropy in nats, -sum s ln s with s the normalized power.

    Args:
        coeffs: Transform coefficients of one vector

    Returns:
        Entropy in [0, ln n]
    """
    coeffs = np.asarray(coeffs, dtype=np.float64).ravel()
    power = coeffs ** 2
    total = power.sum()
    if total == 0.0:
        raise UndefinedSpectrumError("Power spectrum of an all-zero vector is undefined")
    s = power[power > 0.0] / total
    entropy = float(-np.sum(s * np.log(s)))
    return min(max(entropy, 0.0), math.log(coeffs.size))


def pse_batch(coeffs: np.ndarray) -> np.ndarray:
    """PSE of every row of a (m, n) coefficient array."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.ndim != 2:
        raise ValueError(f"Expected a 2D coefficient array, got shape {coeffs.shape}")
    power = coeffs ** 2
    total = power.sum(axis=1, keepdims=True)
    if np.any(total == 0.0):
        raise UndefinedSpectrumError("Power spectrum of an all-zero vector is undefined")
    s = power / total
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = np.where(s > 0.0, s * np.log(s), 0.0)
    return np.clip(-terms.sum(axis=1), 0.0, math.log(coeffs.shape[1]))


def learn_nonseparable_path_gbt(train: np.ndarray, alpha: float = DEFAULT_ALPHA) -> OrthonormalBasis:
    """
    GBT of a path graph whose weights come from the training MSDs.

    Args:
        train: (N, n) training vectors
        alpha: Weight regularizer

    Returns:
        GBT basis
    """
    X = as_sample_matrix(train)
    msd = np.mean((X[:, :-1] - X[:, 1:]) ** 2, axis=0)
    return eigendecompose_cgl(build_cgl(weights_from_msd(msd, alpha)))


def learn_klt(train: np.ndarray) -> OrthonormalBasis:
    """KLT of the empirical covariance sum x x^T / N, without mean removal."""
    X = as_sample_matrix(train)
    S = X.T @ X / X.shape[0]
    return klt_from_covariance(0.5 * (S + S.T))


@dataclass
class PseResult:
    training_size: int
    dct: float
    gbt: float
    klt: float

    @property
    def mean_pse(self) -> dict:
        return {'dct': self.dct, 'gbt': self.gbt, 'klt': self.klt}

    def as_row(self) -> Tuple[int, float, float, float]:
        return self.training_size, self.dct, self.gbt, self.klt


def _trial_pse(model: GmrfModel, sizes: Sequence[int], n_test: int, alpha: float,
               rng: np.random.Generator, dct: OrthonormalBasis) -> np.ndarray:
    test = sample_gmrf(model, n_test, rng)
    dct_pse = float(pse_batch(test @ dct.U).mean())
    out = np.empty((len(sizes), len(TRANSFORM_KINDS)))
    for i, size in enumerate(sizes):
        train = sample_gmrf(model, size, rng)
        gbt = learn_nonseparable_path_gbt(train, alpha)
        klt = learn_klt(train)
        out[i] = (dct_pse,
                  float(pse_batch(test @ gbt.U).mean()),
                  float(pse_batch(test @ klt.U).mean()))
    return out


def run_pse_experiment(model: GmrfModel,
                       training_sizes: Sequence[int] = DEFAULT_TRAINING_SIZES,
                       n_test: int = DEFAULT_TEST_SIZE,
                       trials: int = DEFAULT_TRIALS,
                       seed: Optional[int] = None,
                       alpha: float = DEFAULT_ALPHA) -> List[PseResult]:
    """
    Average PSE of DCT, learned GBT and KLT against the training size.

    Each trial draws its own held-out test set, then for every training
    size N draws N training vectors, learns the GBT and the KLT, and
    averages the PSE of the test set under each transform. Trials use
    independent child streams of one SeedSequence, so results are
    reproducible per seed.

    Args:
        model: Source GMRF
        training_sizes: Values of N
        n_test: Test vectors per trial
        trials: Independent repetitions
        seed: Root seed
        alpha: Weight regularizer of the GBT

    Returns:
        One PseResult per training size, in input order
    """
    sizes = [int(size) for size in training_sizes]
    if not sizes or min(sizes) < 1:
        raise InvalidParameterError(f"Training sizes must be >= 1, got {sizes}")
    if trials < 1 or n_test < 1:
        raise InvalidParameterError(f"trials and n_test must be >= 1, got {trials}, {n_test}")

    dct = dct_basis(model.n)
    children = np.random.SeedSequence(seed).spawn(trials)
    totals = np.zeros((len(sizes), len(TRANSFORM_KINDS)))
    for trial, child in enumerate(children):
        totals += _trial_pse(model, sizes, n_test, alpha, np.random.default_rng(child), dct)
        logger.debug("PSE trial %d/%d done", trial + 1, trials)
    means = totals / trials

    results = [PseResult(size, *map(float, row)) for size, row in zip(sizes, means)]
    for result in results:
        logger.info("N=%d  PSE dct=%.5f gbt=%.5f klt=%.5f", *result.as_row())
    return results
