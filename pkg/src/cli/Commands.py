# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.cli.Utils import (
    PSE_COLUMNS,
    RD_COLUMNS,
    PathLike,
    list_pgm_files,
    read_rd_csv,
    resolve_seed,
    write_csv,
)
from src.codec import CodecConfig, decode_image, encode_image, read_pgm, write_pgm
from src.eval import (
    DEFAULT_TRAINING_SIZES,
    bd_rate_by_uniformity,
    generate_texture_suite,
    glnu,
    nonuniform_path_model,
    per_image_bd_rate,
    psnr,
    run_pse_experiment,
    ssim,
    uniform_path_model,
)

logger = logging.getLogger(__name__)

DEFAULT_QPS = (23, 27, 31, 35, 39)
PSE_MODELS = ('uniform', 'nonuniform')


def _write_text(path: PathLike, text: str):
    Path(path).write_text(text, encoding='utf-8')


def cmd_encode(input_path: PathLike, output_path: PathLike, qp: int = 27, block_size: int = 16,
               clusters: int = 8, rho: float = 0.1, alpha: float = 1e-2, m_min: int = 4,
               transforms: str = 'dct+gbt', dump_state: Optional[PathLike] = None) -> Dict[str, Any]:
    """
    Encodes a PGM file into a GBTC stream.

    Args:
        input_path: 8-bit PGM to encode
        output_path: Destination of the stream
        qp: Quantization parameter
        block_size: Block size n
        clusters: Number of clusters K
        rho: Centroid learning rate
        alpha: Weight regularizer
        m_min: Samples a cluster needs before its GBT is used
        transforms: Transform scenario
        dump_state: Optional file for the final cluster-state dump

    Returns:
        Rate, PSNR of the reconstruction and GBT usage
    """
    image = read_pgm(input_path)
    height, width = image.shape
    config = CodecConfig(width=width, height=height, n=block_size, qp=qp, K=clusters,
                         rho=rho, alpha=alpha, m_min=m_min, transforms=transforms)
    result = encode_image(image, config)
    Path(output_path).write_bytes(result.bitstream)
    if dump_state is not None:
        _write_text(dump_state, result.bank.dump())

    return {
        'input': str(input_path),
        'output': str(output_path),
        'num_bits': result.num_bits,
        'rate_bpp': result.rate_bpp,
        'psnr': psnr(image, result.reconstruction),
        'gbt_usage': result.gbt_usage,
        'flag_bits': result.flag_count,
    }


def cmd_decode(input_path: PathLike, output_path: PathLike,
               dump_state: Optional[PathLike] = None) -> Dict[str, Any]:
    """Decodes a GBTC stream into a PGM file."""
    result = decode_image(Path(input_path).read_bytes())
    write_pgm(output_path, result.reconstruction)
    if dump_state is not None:
        _write_text(dump_state, result.bank.dump())
    return {
        'input': str(input_path),
        'output': str(output_path),
        'width': result.config.width,
        'height': result.config.height,
        'qp': result.config.qp,
        'transforms': result.config.transforms,
    }


def cmd_pse_experiment(model: str = 'uniform', sizes: Sequence[int] = DEFAULT_TRAINING_SIZES,
                       trials: int = 20, seed: Optional[int] = None, n_test: int = 1000,
                       out: Optional[PathLike] = None) -> Dict[str, Any]:
    """
    Runs the PSE experiment and writes training_size,dct,gbt,klt rows.

    Args:
        model: 'uniform' or 'nonuniform' path GMRF
        sizes: Training sizes
        trials: Independent repetitions
        seed: Root seed (GBTC_SEED when omitted)
        n_test: Test vectors per trial
        out: Optional CSV path

    Returns:
        The rows written
    """
    if model not in PSE_MODELS:
        raise ValueError(f"Unknown model '{model}', expected one of {PSE_MODELS}")
    gmrf = uniform_path_model() if model == 'uniform' else nonuniform_path_model()
    results = run_pse_experiment(gmrf, sizes, n_test=n_test, trials=trials, seed=resolve_seed(seed))
    rows = [result.as_row() for result in results]
    if out is not None:
        write_csv(out, PSE_COLUMNS, rows)
    return {'model': model, 'columns': list(PSE_COLUMNS), 'rows': [list(row) for row in rows]}


def cmd_metrics(path_a: PathLike, path_b: PathLike) -> Dict[str, Any]:
    """PSNR, SSIM and the GLNU of both images."""
    a = read_pgm(path_a)
    b = read_pgm(path_b)
    return {
        'psnr': psnr(a, b),
        'ssim': ssim(a, b),
        'glnu_a': glnu(a),
        'glnu_b': glnu(b),
    }


def _sweep_job(job: Tuple[str, int, Dict[str, Any]]) -> Tuple[str, int, float, float, float, float]:
    path, qp, params = job
    image = read_pgm(path)
    height, width = image.shape
    config = CodecConfig(width=width, height=height, qp=qp, **params)
    result = encode_image(image, config)
    return (Path(path).stem, qp, result.rate_bpp,
            psnr(image, result.reconstruction), ssim(image, result.reconstruction),
            result.gbt_usage)


def cmd_rd_sweep(input_dir: PathLike, qps: Sequence[int] = DEFAULT_QPS, transforms: str = 'dct+gbt',
                 out: Optional[PathLike] = None, workers: int = 1, block_size: int = 16,
                 clusters: int = 8, rho: float = 0.1, alpha: float = 1e-2,
                 m_min: int = 4) -> Dict[str, Any]:
    """
    Encodes every PGM of a directory at each QP.

    Jobs may run in parallel; rows are sorted by (image, qp) before writing.

    Args:
        input_dir: Directory with PGM images
        qps: Quantization parameters
        transforms: Transform scenario
        out: Optional CSV path
        workers: Parallel encoder processes

    Returns:
        The rows written, in RD_COLUMNS order
    """
    paths = list_pgm_files(input_dir)
    if not paths:
        raise FileNotFoundError(f"No PGM images in {input_dir}")
    params = {'n': block_size, 'K': clusters, 'rho': rho, 'alpha': alpha,
              'm_min': m_min, 'transforms': transforms}
    # valida los parámetros antes de lanzar trabajos
    for qp in qps:
        CodecConfig(width=block_size, height=block_size, qp=qp, **params)

    jobs = [(str(path), qp, params) for path in paths for qp in qps]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_sweep_job, jobs))
    else:
        outcomes = [_sweep_job(job) for job in jobs]

    glnu_by_image = {path.stem: glnu(read_pgm(path)) for path in paths}
    rows = sorted(
        (name, qp, rate, p, s, usage, glnu_by_image[name])
        for name, qp, rate, p, s, usage in outcomes
    )
    if out is not None:
        write_csv(out, RD_COLUMNS, rows)
    logger.info("RD sweep: %d images x %d QPs (%s)", len(paths), len(qps), transforms)
    return {'columns': list(RD_COLUMNS), 'rows': [list(row) for row in rows]}


def cmd_bd_rate(anchor_csv: PathLike, test_csv: PathLike) -> Dict[str, Any]:
    """
    BD-rate of a test sweep against an anchor sweep.

    Returns:
        Suite mean, per-image values, and the uniformity split when GLNU is
        known for at least two images
    """
    anchor, anchor_glnu = read_rd_csv(anchor_csv)
    test, _ = read_rd_csv(test_csv)
    per_image = per_image_bd_rate(anchor, test)
    if not per_image:
        raise ValueError("The two sweeps share no image")

    split = bd_rate_by_uniformity(anchor, test, anchor_glnu)
    summary: Dict[str, Any] = {'bd_rate': split['all'], 'per_image': per_image}
    if len([name for name in per_image if name in anchor_glnu]) >= 2:
        summary['uniform'] = split['uniform']
        summary['non_uniform'] = split['non_uniform']
    return summary


def cmd_textures(output_dir: PathLike, count: int = 10, size: int = 320,
                 seed: Optional[int] = None) -> Dict[str, Any]:
    """Writes the synthetic texture suite as PGM files."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    files: List[str] = []
    for name, image in generate_texture_suite(size=size, count=count, seed=resolve_seed(seed)):
        path = output_dir / f"{name}.pgm"
        write_pgm(path, image)
        files.append(str(path))
    return {'output_dir': str(output_dir), 'files': files, 'count': len(files)}
