# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple, Union

import numpy as np

from src.online_learning.Utils import Template, block_ssd_sums, template_vector
from src.transforms import (
    DEFAULT_ALPHA,
    InvalidParameterError,
    OrthonormalBasis,
    build_cgl,
    eigendecompose_cgl,
    weights_from_msd,
)

logger = logging.getLogger(__name__)

DEFAULT_RHO = 0.1
DEFAULT_M_MIN = 4


class GbtUnavailableError(ValueError):
    """The cluster has too few samples to derive a GBT."""


class BankNotInitializedError(ValueError):
    """Nearest-cluster search before all K clusters were initialized."""


TemplateLike = Union[Template, np.ndarray]


@dataclass(frozen=True)
class ClusterState:
    M: int
    c: np.ndarray
    msd_vert: np.ndarray
    msd_horiz: np.ndarray

    @classmethod
    def empty(cls, z: TemplateLike, n: int) -> 'ClusterState':
        return cls(M=0, c=template_vector(z).copy(),
                   msd_vert=np.zeros(n - 1), msd_horiz=np.zeros(n - 1))


def update_centroid(cluster: ClusterState, z: TemplateLike, rho: float = DEFAULT_RHO) -> ClusterState:
    """
    Sequential K-means centroid step c <- c + rho (z - c).

    Args:
        cluster: Current cluster state
        z: Template assigned to the cluster
        rho: Learning rate in (0, 1]

    Returns:
        Cluster with the moved centroid
    """
    if not (0.0 < rho <= 1.0):
        raise InvalidParameterError(f"rho must lie in (0, 1], got {rho}")
    z = template_vector(z)
    return replace(cluster, c=cluster.c + rho * (z - cluster.c))


def update_msd(cluster: ClusterState, block: np.ndarray) -> ClusterState:
    """
    Folds one reconstructed block into the vertical and horizontal MSDs.

    With M blocks seen so far each MSD averages n*M squared differences;
    the new block adds n more, after which M is incremented.
    """
    block = np.asarray(block, dtype=np.float64)
    n = block.shape[0]
    vert_sums, horiz_sums = block_ssd_sums(block)
    M = cluster.M
    msd_vert = (n * M * cluster.msd_vert + vert_sums) / (n * (M + 1))
    msd_horiz = (n * M * cluster.msd_horiz + horiz_sums) / (n * (M + 1))
    return replace(cluster, M=M + 1, msd_vert=msd_vert, msd_horiz=msd_horiz)


def gbt_available(cluster: ClusterState, m_min: int = DEFAULT_M_MIN) -> bool:
    return cluster.M >= m_min


def derive_gbt(cluster: ClusterState, alpha: float = DEFAULT_ALPHA,
               m_min: int = DEFAULT_M_MIN) -> Tuple[OrthonormalBasis, OrthonormalBasis]:
    """
    Separable path GBT of a cluster from its MSD statistics.

    Args:
        cluster: Cluster state
        alpha: Regularizer of the closed-form weights
        m_min: Sample count required for availability

    Returns:
        (u_vert, u_horiz)

    Raises:
        GbtUnavailableError: if the cluster holds fewer than m_min blocks
    """
    if not gbt_available(cluster, m_min):
        raise GbtUnavailableError(
            f"Cluster has {cluster.M} block samples, {m_min} required"
        )
    u_vert = eigendecompose_cgl(build_cgl(weights_from_msd(cluster.msd_vert, alpha)))
    if np.array_equal(cluster.msd_vert, cluster.msd_horiz):
        return u_vert, u_vert
    u_horiz = eigendecompose_cgl(build_cgl(weights_from_msd(cluster.msd_horiz, alpha)))
    return u_vert, u_horiz


def nearest_cluster(bank: 'ClusterBank', z: TemplateLike) -> int:
    """
    Index of the centroid closest to z in squared Euclidean distance.

    Ties resolve to the lowest index.

    Raises:
        BankNotInitializedError: while the bank is still warming up
    """
    if not bank.is_initialized:
        raise BankNotInitializedError(
            f"Only {bank.init_count} of {bank.K} clusters are initialized"
        )
    centroids = np.stack([cluster.c for cluster in bank.clusters])
    distances = np.sum((centroids - template_vector(z)) ** 2, axis=1)
    return int(np.argmin(distances))


def process_block(bank: 'ClusterBank', z: TemplateLike, recon_block: np.ndarray) -> int:
    """
    Learns from one coded block: initializes the next cluster during
    warm-up, otherwise updates the nearest cluster's centroid and MSDs.

    Args:
        bank: Cluster bank (mutated in place)
        z: Template of the block
        recon_block: Reconstructed n x n pixels of the block

    Returns:
        Index of the cluster that absorbed the block
    """
    if not bank.is_initialized:
        index = bank.init_count
        cluster = update_msd(ClusterState.empty(z, bank.n), recon_block)
        bank.clusters.append(cluster)
        logger.debug("Initialized cluster %d from block template", index)
        return index

    index = nearest_cluster(bank, z)
    cluster = update_centroid(bank.clusters[index], z, bank.rho)
    bank.clusters[index] = update_msd(cluster, recon_block)
    return index


class ClusterBank:
    def __init__(self, K: int, n: int, rho: float = DEFAULT_RHO,
                 alpha: float = DEFAULT_ALPHA, m_min: int = DEFAULT_M_MIN):
        """
        Initializes an empty bank of K clusters over n x n blocks.

        Args:
            K: Number of clusters
            n: Block size
            rho: Centroid learning rate
            alpha: Regularizer of the GBT weights
            m_min: Samples needed before a cluster offers its GBT
        """
        if K < 1:
            raise InvalidParameterError(f"K must be at least 1, got {K}")
        if not (0.0 < rho <= 1.0):
            raise InvalidParameterError(f"rho must lie in (0, 1], got {rho}")
        self.K = K
        self.n = n
        self.rho = rho
        self.alpha = alpha
        self.m_min = m_min
        self.clusters: List[ClusterState] = []

    @property
    def init_count(self) -> int:
        return len(self.clusters)

    @property
    def is_initialized(self) -> bool:
        return self.init_count >= self.K

    def nearest_cluster(self, z: TemplateLike) -> int:
        return nearest_cluster(self, z)

    def process_block(self, z: TemplateLike, recon_block: np.ndarray) -> int:
        return process_block(self, z, recon_block)

    def gbt_available(self, index: int) -> bool:
        return gbt_available(self.clusters[index], self.m_min)

    def derive_gbt(self, index: int) -> Tuple[OrthonormalBasis, OrthonormalBasis]:
        return derive_gbt(self.clusters[index], self.alpha, self.m_min)

    def lookup_gbt(self, z: TemplateLike) -> Optional[Tuple[OrthonormalBasis, OrthonormalBasis]]:
        """
        GBT pair for a template, or None while warming up or when the
        nearest cluster lacks samples.
        """
        if not self.is_initialized:
            return None
        index = self.nearest_cluster(z)
        if not self.gbt_available(index):
            return None
        return self.derive_gbt(index)

    def total_samples(self) -> int:
        return sum(cluster.M for cluster in self.clusters)

    def dump(self) -> str:
        """
        Plain-text listing of the bank state.

        Floats are written with repr, so two dumps are byte-identical
        exactly when the underlying states are bitwise equal.
        """
        def fmt(values: np.ndarray) -> str:
            return ' '.join(repr(float(v)) for v in values)

        lines = [
            f"K {self.K}",
            f"n {self.n}",
            f"rho {self.rho!r}",
            f"alpha {self.alpha!r}",
            f"m_min {self.m_min}",
            f"init_count {self.init_count}",
        ]
        for index, cluster in enumerate(self.clusters):
            lines.append(f"cluster {index}")
            lines.append(f"M {cluster.M}")
            lines.append(f"c {fmt(cluster.c)}")
            lines.append(f"msd_vert {fmt(cluster.msd_vert)}")
            lines.append(f"msd_horiz {fmt(cluster.msd_horiz)}")
        return '\n'.join(lines) + '\n'
