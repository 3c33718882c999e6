__version__ = '0.1.0'

from .Gmrf_Experiment import (
    DEFAULT_TRAINING_SIZES,
    GmrfModel,
    PseResult,
    UndefinedSpectrumError,
    learn_klt,
    learn_nonseparable_path_gbt,
    nonuniform_path_model,
    pse,
    pse_batch,
    run_pse_experiment,
    sample_gmrf,
    uniform_path_model,
)
from .Image_Metrics import (
    InsufficientPointsError,
    RdPoint,
    bd_rate,
    bd_rate_by_uniformity,
    glnu,
    per_image_bd_rate,
    psnr,
    ssim,
)
from .Textures import TEXTURE_KINDS, generate_texture_suite
from .Utils import EmptyTrainingSetError, column_angles
