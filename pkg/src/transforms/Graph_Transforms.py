# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from src.transforms.Utils import (
    apply_sign_convention,
    jacobi_eigen,
    tridiagonal_ql,
)

# Default regularizer of the closed-form tree weights (pixels in 0..255)
DEFAULT_ALPHA = 1e-2

# Tolerance of the symmetry check on covariance inputs
SYMMETRY_TOL = 1e-9

# QL iteration cap per matrix dimension
QL_ITERATIONS_PER_DIM = 64

BASIS_KINDS = ('DCT', 'DST', 'GBT', 'KLT')


class InvalidWeightsError(ValueError):
    """Non-positive, non-finite, or wrongly sized path weights."""


class InvalidSizeError(ValueError):
    """Requested transform size is too small."""


class InvalidParameterError(ValueError):
    """A scalar parameter is outside its valid range."""


class DimensionMismatchError(ValueError):
    """Block and basis shapes disagree."""


class AsymmetricMatrixError(ValueError):
    """Input matrix is not symmetric."""


@dataclass(frozen=True)
class PathGraphWeights:
    n: int
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] != self.n - 1:
            raise InvalidWeightsError(
                f"Expected {self.n - 1} edge weights for n={self.n}, got shape {w.shape}"
            )
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise InvalidWeightsError(f"Edge weights must be finite and positive: {w.tolist()}")
        object.__setattr__(self, 'w', w)

    @classmethod
    def from_sequence(cls, weights: Sequence[float]) -> 'PathGraphWeights':
        weights = np.asarray(weights, dtype=np.float64)
        return cls(n=weights.shape[0] + 1, w=weights)


@dataclass(frozen=True)
class LaplacianMatrix:
    L: np.ndarray

    @property
    def n(self) -> int:
        return self.L.shape[0]


@dataclass(frozen=True)
class OrthonormalBasis:
    U: np.ndarray
    kind: str
    eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"Unknown basis kind: {self.kind}")

    @property
    def n(self) -> int:
        return self.U.shape[0]


def build_cgl(weights: PathGraphWeights) -> LaplacianMatrix:
    """
    Builds the combinatorial graph Laplacian L = D - W of a weighted path.

    Args:
        weights: Edge weights, w[i] for edge (i, i+1)

    Returns:
        Tridiagonal Laplacian with zero row sums
    """
    w = weights.w
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise InvalidWeightsError(f"Edge weights must be finite and positive: {w.tolist()}")

    n = weights.n
    degree = np.zeros(n)
    degree[:-1] += w
    degree[1:] += w

    L = np.diag(degree)
    idx = np.arange(n - 1)
    L[idx, idx + 1] = -w
    L[idx + 1, idx] = -w
    return LaplacianMatrix(L=L)


def eigendecompose_cgl(laplacian: LaplacianMatrix) -> OrthonormalBasis:
    """
    Graph Fourier basis of a path-graph Laplacian.

    Runs the tridiagonal QL solver, orders the eigenpairs by ascending
    eigenvalue (stable on ties) and applies the sign convention. The result
    depends only on the bits of the input matrix.

    Args:
        laplacian: Path CGL (tridiagonal)

    Returns:
        GBT basis with its ascending spectrum
    """
    L = laplacian.L
    n = laplacian.n
    eigenvalues, vectors = tridiagonal_ql(
        np.diag(L), np.diag(L, k=-1), max_iterations=QL_ITERATIONS_PER_DIM * n
    )
    order = np.argsort(eigenvalues, kind='stable')
    U = apply_sign_convention(vectors[:, order])
    return OrthonormalBasis(U=U, kind='GBT', eigenvalues=eigenvalues[order])


def dct_basis(n: int) -> OrthonormalBasis:
    """
    Orthonormal DCT-II basis, U[j][k] = c_k cos(pi (2j+1) k / (2n)).

    Columns follow the shared sign convention, which can flip a column of
    the textbook closed form.
    """
    if n < 2:
        raise InvalidSizeError(f"Transform size must be at least 2, got {n}")
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    U = np.cos(math.pi * (2 * j + 1) * k / (2 * n)) * math.sqrt(2.0 / n)
    U[:, 0] = math.sqrt(1.0 / n)
    return OrthonormalBasis(U=apply_sign_convention(U), kind='DCT')


def dst_basis(n: int) -> OrthonormalBasis:
    """Orthonormal DST-VII (ADST) basis."""
    if n < 2:
        raise InvalidSizeError(f"Transform size must be at least 2, got {n}")
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    U = (2.0 / math.sqrt(2 * n + 1)) * np.sin(math.pi * (2 * j + 1) * (k + 1) / (2 * n + 1))
    return OrthonormalBasis(U=apply_sign_convention(U), kind='DST')


def weights_from_msd(msd: np.ndarray, alpha: float = DEFAULT_ALPHA) -> PathGraphWeights:
    """
    Closed-form tree edge weights w = 1 / (msd + 2 alpha).

    Args:
        msd: n-1 mean squared differences between neighbouring positions
        alpha: Positive regularizer

    Returns:
        Path weights
    """
    if not (alpha > 0.0) or not math.isfinite(alpha):
        raise InvalidParameterError(f"alpha must be positive, got {alpha}")
    msd = np.asarray(msd, dtype=np.float64)
    if np.any(msd < 0.0) or not np.all(np.isfinite(msd)):
        raise InvalidParameterError(f"MSD entries must be finite and non-negative: {msd.tolist()}")
    return PathGraphWeights(n=msd.shape[0] + 1, w=1.0 / (msd + 2.0 * alpha))


def _check_dims(block: np.ndarray, u_vert: OrthonormalBasis, u_horiz: OrthonormalBasis):
    if block.ndim != 2:
        raise DimensionMismatchError(f"Expected a 2D block, got shape {block.shape}")
    rows, cols = block.shape
    if u_vert.U.shape != (rows, rows) or u_horiz.U.shape != (cols, cols):
        raise DimensionMismatchError(
            f"Block {block.shape} does not match bases {u_vert.U.shape} / {u_horiz.U.shape}"
        )


def forward_separable(block: np.ndarray, u_vert: OrthonormalBasis,
                      u_horiz: OrthonormalBasis) -> np.ndarray:
    """Separable 2D transform U_vert^T B U_horiz."""
    block = np.asarray(block, dtype=np.float64)
    _check_dims(block, u_vert, u_horiz)
    return u_vert.U.T @ block @ u_horiz.U


def inverse_separable(coeffs: np.ndarray, u_vert: OrthonormalBasis,
                      u_horiz: OrthonormalBasis) -> np.ndarray:
    """Inverse of forward_separable, U_vert C U_horiz^T."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    _check_dims(coeffs, u_vert, u_horiz)
    return u_vert.U @ coeffs @ u_horiz.U.T


def klt_from_covariance(covariance: np.ndarray) -> OrthonormalBasis:
    """
    KLT basis of a symmetric PSD covariance.

    Args:
        covariance: n x n symmetric matrix

    Returns:
        Eigenbasis ordered by descending eigenvalue (lowest index first on
        ties), sign convention applied
    """
    S = np.asarray(covariance, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatchError(f"Covariance must be square, got shape {S.shape}")
    if np.max(np.abs(S - S.T)) > SYMMETRY_TOL:
        raise AsymmetricMatrixError("Covariance matrix is not symmetric")

    eigenvalues, vectors = jacobi_eigen(S)
    order = np.argsort(-eigenvalues, kind='stable')
    U = apply_sign_convention(vectors[:, order])
    return OrthonormalBasis(U=U, kind='KLT', eigenvalues=eigenvalues[order])
