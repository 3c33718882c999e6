# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import logging
import math
import struct
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from src.codec.Bitstream import BitReader, BitWriter, CorruptStreamError, ue_length
from src.codec.Entropy_Coding import block_bit_cost, entropy_decode_block, entropy_encode_block
from src.codec.Intra_Prediction import PredMode, available_modes, predict_block, select_mode
from src.codec.Utils import to_pixels
from src.online_learning import ClusterBank, Template, extract_template, template_available
from src.transforms import (
    DEFAULT_ALPHA,
    OrthonormalBasis,
    dct_basis,
    dst_basis,
    forward_separable,
    inverse_separable,
)

logger = logging.getLogger(__name__)

MAGIC = b'GBTC'
VERSION = 1
# magic, version, width, height, n, qp, K, m_min, rho, alpha, scenario
HEADER_FORMAT = '>4sBHHBBBBddB'
HEADER_SIZE = struct.calcsize(HEADER_FORMAT)

DEADZONE = 1.0 / 3.0
MODE_BITS = 2

SCENARIOS: Dict[str, int] = {
    'dct': 0,
    'dct+gbt': 1,
    'dct+dst': 2,
    'dst': 3,
}

BasisPair = Tuple[OrthonormalBasis, OrthonormalBasis]


class InvalidConfigError(ValueError):
    """Codec parameters violate their ranges."""


class ConfigMismatchError(ValueError):
    """Stream or image does not match the codec configuration."""


@dataclass(frozen=True)
class CodecConfig:
    width: int
    height: int
    n: int = 16
    qp: int = 27
    K: int = 8
    rho: float = 0.1
    alpha: float = DEFAULT_ALPHA
    m_min: int = 4
    lambda_scale: float = 0.85
    transforms: str = 'dct+gbt'

    def __post_init__(self):
        if not 2 <= self.n <= 255:
            raise InvalidConfigError(f"Block size must be in [2, 255], got {self.n}")
        for name, value in (('width', self.width), ('height', self.height)):
            if value <= 0 or value > 0xFFFF:
                raise InvalidConfigError(f"{name} must be in [1, 65535], got {value}")
            if value % self.n:
                raise InvalidConfigError(f"{name} {value} is not a multiple of the block size {self.n}")
        if not 0 <= self.qp <= 51:
            raise InvalidConfigError(f"qp must be in [0, 51], got {self.qp}")
        if not 1 <= self.K <= 255:
            raise InvalidConfigError(f"K must be in [1, 255], got {self.K}")
        if not 1 <= self.m_min <= 255:
            raise InvalidConfigError(f"m_min must be in [1, 255], got {self.m_min}")
        if not (0.0 < self.rho <= 1.0):
            raise InvalidConfigError(f"rho must be in (0, 1], got {self.rho}")
        if not (self.alpha > 0.0) or not math.isfinite(self.alpha):
            raise InvalidConfigError(f"alpha must be positive, got {self.alpha}")
        if not (self.lambda_scale > 0.0):
            raise InvalidConfigError(f"lambda_scale must be positive, got {self.lambda_scale}")
        if self.transforms not in SCENARIOS:
            raise InvalidConfigError(
                f"Unknown transforms scenario '{self.transforms}', expected one of {sorted(SCENARIOS)}"
            )

    @property
    def learns_gbt(self) -> bool:
        return self.transforms == 'dct+gbt'

    def pack_header(self) -> bytes:
        return struct.pack(
            HEADER_FORMAT, MAGIC, VERSION, self.width, self.height, self.n, self.qp,
            self.K, self.m_min, self.rho, self.alpha, SCENARIOS[self.transforms],
        )

    @classmethod
    def from_header(cls, data: bytes) -> 'CodecConfig':
        """
        Parses the fixed-size stream header.

        Raises:
            CorruptStreamError: on a short header or wrong magic
            ConfigMismatchError: on an unknown version, scenario, or
                out-of-range parameters
        """
        if len(data) < HEADER_SIZE:
            raise CorruptStreamError("Truncated header", len(data) * 8)
        (magic, version, width, height, n, qp, K, m_min,
         rho, alpha, scenario) = struct.unpack(HEADER_FORMAT, data[:HEADER_SIZE])
        if magic != MAGIC:
            raise CorruptStreamError(f"Bad magic {magic!r}", 0)
        if version != VERSION:
            raise ConfigMismatchError(f"Unsupported stream version {version}")
        names = {code: name for name, code in SCENARIOS.items()}
        if scenario not in names:
            raise ConfigMismatchError(f"Unknown transforms scenario code {scenario}")
        try:
            return cls(width=width, height=height, n=n, qp=qp, K=K, rho=rho,
                       alpha=alpha, m_min=m_min, transforms=names[scenario])
        except InvalidConfigError as e:
            raise ConfigMismatchError(f"Invalid header parameters: {e}") from e


def qstep(qp: int) -> float:
    """Quantizer step size, doubling every 6 QP."""
    return 0.625 * 2.0 ** (qp / 6.0)


def quantize_with_step(coeffs: np.ndarray, step: float) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    return (np.sign(coeffs) * np.floor(np.abs(coeffs) / step + DEADZONE)).astype(np.int64)


def quantize(coeffs: np.ndarray, qp: int) -> np.ndarray:
    """Deadzone quantizer, level = sign(c) floor(|c| / Qstep + 1/3)."""
    return quantize_with_step(coeffs, qstep(qp))


def dequantize(levels: np.ndarray, qp: int) -> np.ndarray:
    return np.asarray(levels, dtype=np.float64) * qstep(qp)


def rd_lambda(qp: int, lambda_scale: float = 0.85) -> float:
    return lambda_scale * 2.0 ** ((qp - 12) / 3.0)


def reconstruct_residual(levels: np.ndarray, bases: BasisPair, qp: int) -> np.ndarray:
    """Dequantizes and inverse-transforms; shared by encoder and decoder."""
    return inverse_separable(dequantize(levels, qp), bases[0], bases[1])


@dataclass
class RdChoice:
    flag: Optional[int]
    levels: np.ndarray
    distortion: float
    bits: int
    cost: float
    cost_dct: float
    recon_residual: np.ndarray


def rd_select_transform(residual: np.ndarray, dct_bases: BasisPair,
                        alt_bases: Optional[BasisPair], qp: int, lam: float) -> RdChoice:
    """
    Picks the transform with the lower cost J = SSD + lambda * bits.

    Args:
        residual: n x n prediction residual
        dct_bases: Default (vertical, horizontal) bases
        alt_bases: Alternative bases, or None when unavailable
        qp: Quantization parameter
        lam: Lagrange multiplier

    Returns:
        RdChoice; flag is None without an alternative, 0 for the default
        and 1 for the alternative. Equal costs keep the default.
    """
    residual = np.asarray(residual, dtype=np.float64)
    flag_bits = 0 if alt_bases is None else 1

    def evaluate(bases: BasisPair) -> Tuple[np.ndarray, float, int, float, np.ndarray]:
        levels = quantize(forward_separable(residual, bases[0], bases[1]), qp)
        recon_residual = reconstruct_residual(levels, bases, qp)
        distortion = float(np.sum((residual - recon_residual) ** 2))
        bits = block_bit_cost(levels) + flag_bits
        return levels, distortion, bits, distortion + lam * bits, recon_residual

    levels, distortion, bits, cost, recon_residual = evaluate(dct_bases)
    cost_dct = cost
    if alt_bases is None:
        return RdChoice(None, levels, distortion, bits, cost, cost_dct, recon_residual)

    alt = evaluate(alt_bases)
    if alt[3] < cost_dct:
        return RdChoice(1, alt[0], alt[1], alt[2], alt[3], cost_dct, alt[4])
    return RdChoice(0, levels, distortion, bits, cost, cost_dct, recon_residual)


@dataclass
class BlockStats:
    position: Tuple[int, int]
    mode: PredMode
    eligible: bool
    flag: Optional[int]
    cost_dct: float
    cost_chosen: float
    bits: int


@dataclass
class EncodeResult:
    config: CodecConfig
    bitstream: bytes
    reconstruction: np.ndarray
    bank: ClusterBank
    blocks: List[BlockStats] = field(default_factory=list)

    @property
    def num_bits(self) -> int:
        return len(self.bitstream) * 8

    @property
    def rate_bpp(self) -> float:
        return self.num_bits / (self.config.width * self.config.height)

    @property
    def flag_count(self) -> int:
        return sum(1 for block in self.blocks if block.flag is not None)

    @property
    def gbt_usage(self) -> float:
        """Percentage of eligible blocks whose flag picked the alternative transform."""
        eligible = sum(1 for block in self.blocks if block.eligible)
        if not eligible:
            return 0.0
        return 100.0 * sum(1 for block in self.blocks if block.flag == 1) / eligible


@dataclass
class DecodeResult:
    config: CodecConfig
    reconstruction: np.ndarray
    bank: ClusterBank


class _CodingLoop:
    """
    State shared by the encoder and the decoder: the reconstructed image,
    the cluster bank, and the per-block transform candidates. Both sides
    drive it with identical calls, which keeps them bit-exact.
    """

    def __init__(self, config: CodecConfig):
        self.config = config
        self.n = config.n
        self.recon = np.zeros((config.height, config.width), dtype=np.uint8)
        self.bank = ClusterBank(config.K, config.n, config.rho, config.alpha, config.m_min)
        dct = dct_basis(config.n)
        self.dct_pair: BasisPair = (dct, dct)
        self.dst_pair: Optional[BasisPair] = None
        if config.transforms in ('dct+dst', 'dst'):
            dst = dst_basis(config.n)
            self.dst_pair = (dst, dst)

    def positions(self) -> Iterator[Tuple[int, int]]:
        for row in range(0, self.config.height, self.n):
            for col in range(0, self.config.width, self.n):
                yield row, col

    @property
    def primary(self) -> BasisPair:
        return self.dst_pair if self.config.transforms == 'dst' else self.dct_pair

    def eligible(self, pos: Tuple[int, int]) -> bool:
        scenario = self.config.transforms
        if scenario == 'dct+gbt':
            return template_available(pos, self.n)
        return scenario == 'dct+dst'

    def candidates(self, pos: Tuple[int, int]) -> Tuple[Optional[Template], Optional[BasisPair]]:
        """Template (for learning) and alternative bases for a block."""
        scenario = self.config.transforms
        if scenario == 'dct+dst':
            return None, self.dst_pair
        if scenario != 'dct+gbt' or not template_available(pos, self.n):
            return None, None
        template = extract_template(self.recon, pos, self.n)
        return template, self.bank.lookup_gbt(template)

    def reconstruct(self, pos: Tuple[int, int], prediction: np.ndarray,
                    recon_residual: np.ndarray) -> np.ndarray:
        row, col = pos
        block = to_pixels(prediction + recon_residual)
        self.recon[row:row + self.n, col:col + self.n] = block
        return block

    def learn(self, template: Optional[Template], block: np.ndarray):
        if template is not None:
            self.bank.process_block(template, block)


def encode_image(image: np.ndarray, config: CodecConfig) -> EncodeResult:
    """
    Encodes a grayscale image block by block in raster order.

    Per block: pick the intra mode by SAD, take the residual, choose
    between the default transform and the alternative (learned GBT or DST)
    by RD cost, write mode, optional flag and levels, reconstruct, and feed
    the reconstructed block to the cluster bank.

    Args:
        image: uint8 array of shape (height, width)
        config: Codec configuration

    Returns:
        EncodeResult with the stream, reconstruction, bank and block stats
    """
    image = np.asarray(image)
    if image.shape != (config.height, config.width):
        raise ConfigMismatchError(
            f"Image shape {image.shape} does not match config {config.height}x{config.width}"
        )
    if image.min() < 0 or image.max() > 255:
        raise ConfigMismatchError("Image values must lie in 0..255")
    image = image.astype(np.int64)

    n = config.n
    lam = rd_lambda(config.qp, config.lambda_scale)
    loop = _CodingLoop(config)
    writer = BitWriter()
    blocks: List[BlockStats] = []

    for pos in loop.positions():
        row, col = pos
        original = image[row:row + n, col:col + n]
        mode = select_mode(loop.recon, pos, original, n)
        prediction = predict_block(loop.recon, pos, mode, n)
        residual = (original - prediction).astype(np.float64)

        template, alt_bases = loop.candidates(pos)
        choice = rd_select_transform(residual, loop.primary, alt_bases, config.qp, lam)

        start = writer.bit_length
        writer.write_bits(int(mode), MODE_BITS)
        if choice.flag is not None:
            writer.write_bit(choice.flag)
        entropy_encode_block(choice.levels, writer)

        block = loop.reconstruct(pos, prediction, choice.recon_residual)
        loop.learn(template, block)

        blocks.append(BlockStats(
            position=pos, mode=mode, eligible=loop.eligible(pos), flag=choice.flag,
            cost_dct=choice.cost_dct, cost_chosen=choice.cost,
            bits=writer.bit_length - start,
        ))
        logger.debug("block %s mode=%s flag=%s J=%.2f J_dct=%.2f",
                     pos, mode.name, choice.flag, choice.cost, choice.cost_dct)

    result = EncodeResult(
        config=config,
        bitstream=config.pack_header() + writer.to_bytes(),
        reconstruction=loop.recon,
        bank=loop.bank,
        blocks=blocks,
    )
    logger.info("Encoded %dx%d qp=%d transforms=%s: %d bits (%.4f bpp), usage %.1f%%",
                config.width, config.height, config.qp, config.transforms,
                result.num_bits, result.rate_bpp, result.gbt_usage)
    return result


def min_payload_bits(config: CodecConfig) -> int:
    """Smallest payload a valid stream can have: every block is a mode plus an EOB."""
    blocks = (config.width // config.n) * (config.height // config.n)
    return blocks * (MODE_BITS + ue_length(config.n ** 2))


def check_payload_size(config: CodecConfig, payload_bits: int):
    """Rejects a payload too short for the header's image before anything is allocated."""
    needed = min_payload_bits(config)
    if payload_bits < needed:
        raise CorruptStreamError(
            f"Payload of {payload_bits} bits is shorter than the {needed} bits a "
            f"{config.width}x{config.height} image needs",
            HEADER_SIZE * 8 + payload_bits,
        )


def decode_image(bitstream: bytes) -> DecodeResult:
    """
    Decodes a stream produced by encode_image.

    Mirrors the encoder loop exactly (same templates, same cluster
    updates, same bases), reading mode, flag and levels instead of
    choosing them.

    Raises:
        CorruptStreamError: on malformed payload, with the bit offset
        ConfigMismatchError: on an unsupported header
    """
    config = CodecConfig.from_header(bitstream)
    n = config.n
    check_payload_size(config, len(bitstream) * 8 - HEADER_SIZE * 8)
    loop = _CodingLoop(config)
    reader = BitReader(bitstream, start_bit=HEADER_SIZE * 8)

    for pos in loop.positions():
        offset = reader.bit_offset
        mode_code = reader.read_bits(MODE_BITS)
        mode = PredMode(mode_code)
        if mode not in available_modes(pos):
            raise CorruptStreamError(f"Mode {mode.name} unavailable for block at {pos}", offset)
        prediction = predict_block(loop.recon, pos, mode, n)

        template, alt_bases = loop.candidates(pos)
        flag = reader.read_bit() if alt_bases is not None else None
        levels = entropy_decode_block(reader, n)
        bases = alt_bases if flag else loop.primary

        block = loop.reconstruct(pos, prediction, reconstruct_residual(levels, bases, config.qp))
        loop.learn(template, block)

    remaining = len(bitstream) * 8 - reader.bit_offset
    if remaining >= 8 or (remaining and reader.read_bits(remaining)):
        raise CorruptStreamError("Unexpected data after the last block", len(bitstream) * 8 - remaining)

    logger.info("Decoded %dx%d qp=%d transforms=%s", config.width, config.height,
                config.qp, config.transforms)
    return DecodeResult(config=config, reconstruction=loop.recon, bank=loop.bank)
