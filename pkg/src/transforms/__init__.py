__version__ = '0.1.0'

from .Graph_Transforms import (
    DEFAULT_ALPHA,
    AsymmetricMatrixError,
    DimensionMismatchError,
    InvalidParameterError,
    InvalidSizeError,
    InvalidWeightsError,
    LaplacianMatrix,
    OrthonormalBasis,
    PathGraphWeights,
    build_cgl,
    dct_basis,
    dst_basis,
    eigendecompose_cgl,
    forward_separable,
    inverse_separable,
    klt_from_covariance,
    weights_from_msd,
)
from .Utils import NumericFailureError, apply_sign_convention