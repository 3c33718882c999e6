__version__ = '0.1.0'

from .Command_Line import EXIT_INVALID, EXIT_IO, EXIT_OK, build_parser, main
from .Commands import (
    cmd_bd_rate,
    cmd_decode,
    cmd_encode,
    cmd_metrics,
    cmd_pse_experiment,
    cmd_rd_sweep,
    cmd_textures,
)
from .Utils import parse_int_list, read_rd_csv, resolve_seed
