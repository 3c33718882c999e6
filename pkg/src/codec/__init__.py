__version__ = '0.1.0'

from .Bitstream import BitReader, BitWriter, CorruptStreamError
from .Codec import (
    SCENARIOS,
    BlockStats,
    CodecConfig,
    ConfigMismatchError,
    DecodeResult,
    EncodeResult,
    InvalidConfigError,
    RdChoice,
    decode_image,
    dequantize,
    encode_image,
    qstep,
    quantize,
    rd_lambda,
    rd_select_transform,
    reconstruct_residual,
)
from .Entropy_Coding import block_bit_cost, entropy_decode_block, entropy_encode_block, zigzag_order
from .Intra_Prediction import ModeUnavailableError, PredMode, available_modes, predict_block, select_mode
from .Utils import PgmFormatError, read_pgm, write_pgm
