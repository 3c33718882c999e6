# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

# Libraries
import logging

from mcp.server.fastmcp import FastMCP

from typing import Optional, Dict, Any, List

# Importing the commands
from src.cli import (
    cmd_bd_rate,
    cmd_decode,
    cmd_encode,
    cmd_metrics,
    cmd_pse_experiment,
    cmd_textures,
)

logger = logging.getLogger(__name__)

# --- MCP Server Object

# Creating the MCP Server
mcp = FastMCP("Path GBT Codec MCP")

@mcp.tool()
def encode_image_file(input_path: str, output_path: str, qp: int = 27,
                      transforms: str = "dct+gbt", block_size: int = 16,
                      clusters: int = 8) -> Dict[str, Any]:
    """
    Encodes a grayscale PGM image.

    Args:
        input_path: Path to the 8-bit PGM image
        output_path: Where to write the compressed stream
        qp: Quantization parameter (0..51)
        transforms: Transform scenario ('dct', 'dct+gbt', 'dct+dst' or 'dst')
        block_size: Block size in pixels
        clusters: Number of template clusters

    Returns:
        Rate in bits per pixel, PSNR of the reconstruction and the
        percentage of eligible blocks coded with the alternative transform
    """
    try:
        return cmd_encode(input_path, output_path, qp=qp, block_size=block_size,
                          clusters=clusters, transforms=transforms)
    except Exception as e:
        logger.warning("encode_image_file failed: %s", e)
        return {"error": str(e)}

@mcp.tool()
def decode_image_file(input_path: str, output_path: str) -> Dict[str, Any]:
    """
    Decodes a compressed stream back to a PGM image.

    Args:
        input_path: Path to the stream
        output_path: Where to write the reconstructed PGM

    Returns:
        Image size and the coding parameters read from the stream header
    """
    try:
        return cmd_decode(input_path, output_path)
    except Exception as e:
        logger.warning("decode_image_file failed: %s", e)
        return {"error": str(e)}

@mcp.tool()
def compare_images(reference_path: str, distorted_path: str) -> Dict[str, Any]:
    """
    Compares two PGM images.

    Args:
        reference_path: Reference image
        distorted_path: Image to compare against the reference

    Returns:
        PSNR (dB), SSIM and the GLNU texture measure of both images
    """
    try:
        return cmd_metrics(reference_path, distorted_path)
    except Exception as e:
        return {"error": str(e)}

@mcp.tool()
def run_pse_experiment(model: str = "uniform", sizes: Optional[List[int]] = None,
                       trials: int = 20, seed: Optional[int] = None,
                       out: Optional[str] = None) -> Dict[str, Any]:
    """
    Runs the power spectral entropy experiment on a path GMRF.

    Args:
        model: 'uniform' or 'nonuniform' edge weights
        sizes: Training sizes (powers of two up to 16384 when omitted)
        trials: Independent repetitions to average
        seed: Root seed
        out: Optional CSV path

    Returns:
        Rows of (training_size, dct, gbt, klt) mean PSE values
    """
    try:
        kwargs: Dict[str, Any] = {'model': model, 'trials': trials, 'seed': seed, 'out': out}
        if sizes:
            kwargs['sizes'] = sizes
        return cmd_pse_experiment(**kwargs)
    except Exception as e:
        return {"error": str(e)}

@mcp.tool()
def compute_bd_rate(anchor_csv: str, test_csv: str) -> Dict[str, Any]:
    """
    Computes the BD-rate between two rd-sweep CSV files.

    Args:
        anchor_csv: Sweep of the anchor scenario
        test_csv: Sweep of the tested scenario

    Returns:
        Mean BD-rate (percent), per-image values and the uniform /
        non-uniform split when GLNU is available
    """
    try:
        return cmd_bd_rate(anchor_csv, test_csv)
    except Exception as e:
        return {"error": str(e)}

@mcp.tool()
def generate_textures(output_dir: str, count: int = 10, size: int = 320,
                      seed: Optional[int] = None) -> Dict[str, Any]:
    """
    Writes synthetic periodic textures as PGM files.

    Args:
        output_dir: Destination directory
        count: Number of images
        size: Image side in pixels
        seed: Generator seed

    Returns:
        List of written files
    """
    try:
        return cmd_textures(output_dir, count=count, size=size, seed=seed)
    except Exception as e:
        return {"error": str(e)}