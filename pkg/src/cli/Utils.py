# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import csv
import math
import os
import sys
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from src.eval import RdPoint

# Variable de entorno con la semilla por defecto
SEED_ENV_VAR = 'GBTC_SEED'
DEFAULT_SEED = 0

PSE_COLUMNS = ('training_size', 'dct', 'gbt', 'klt')
RD_COLUMNS = ('image', 'qp', 'rate_bpp', 'psnr', 'ssim', 'gbt_usage', 'glnu')

PathLike = Union[str, Path]


def parse_int_list(text: str) -> List[int]:
    """Convierte '23,27,31' en [23, 27, 31]"""
    try:
        values = [int(item) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise ValueError(f"Expected a comma-separated list of integers, got '{text}'") from e
    if not values:
        raise ValueError("Expected at least one integer")
    return values


def resolve_seed(seed: Optional[int]) -> int:
    """Explicit seed, else GBTC_SEED, else DEFAULT_SEED."""
    if seed is not None:
        return seed
    value = os.environ.get(SEED_ENV_VAR)
    if value is None or not value.strip():
        return DEFAULT_SEED
    try:
        return int(value)
    except ValueError as e:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got '{value}'") from e


def format_value(value) -> str:
    """Formatea números para CSV de forma estable"""
    if isinstance(value, float):
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return f"{value:.10g}"
    return str(value)


def write_csv(path: Optional[PathLike], header: Sequence[str], rows: Iterable[Sequence]):
    """Writes rows to path, or to stdout when path is None."""
    formatted = [[format_value(v) for v in row] for row in rows]
    if path is None:
        writer = csv.writer(sys.stdout, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(formatted)
        return
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(formatted)


def read_rd_csv(path: PathLike) -> Tuple[Dict[str, List[RdPoint]], Dict[str, float]]:
    """
    Reads an rd-sweep CSV.

    Args:
        path: CSV with the RD_COLUMNS header

    Returns:
        (RD points per image sorted by rate, GLNU per image when present)
    """
    curves: Dict[str, List[RdPoint]] = {}
    glnu_by_image: Dict[str, float] = {}
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.DictReader(f)
        missing = {'image', 'rate_bpp', 'psnr'} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path} lacks the columns {sorted(missing)}")
        for row in reader:
            name = row['image']
            ssim_text = row.get('ssim') or 'nan'
            curves.setdefault(name, []).append(
                RdPoint(rate=float(row['rate_bpp']), psnr=float(row['psnr']), ssim=float(ssim_text))
            )
            if row.get('glnu'):
                glnu_by_image[name] = float(row['glnu'])
    for points in curves.values():
        points.sort(key=lambda p: p.rate)
    return curves, glnu_by_image


def list_pgm_files(directory: PathLike) -> List[Path]:
    """PGM files of a directory in name order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Directory not found: {directory}")
    return sorted(p for p in directory.iterdir() if p.suffix.lower() == '.pgm' and p.is_file())
