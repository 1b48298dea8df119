"""
Estimator tools: closed-form MMD, SMMD and kernel widths
"""

from typing import List, Optional, Sequence, Union

from mcp.types import TextContent, Tool

from ..mmd.estimators import mmd_b_closed, mmd_u_closed, null_variance, smmd
from ..mmd.experiments import parse_scale
from ..mmd.kernels import gamma_to_scale, resolve_gamma
from ..mmd.normalization import code_normalize
from ..utils.error_handler import validate_positive_int
from .helpers import json_reply, kernel_from_arguments, load_points, run_blocking

SAMPLE_PROPERTIES = {
    "points": {
        "type": "array",
        "description": "Sample as a list of rows (each row is a d-dimensional point)",
        "items": {"type": "array", "items": {"type": "number"}},
        "examples": [[[0.1, -0.3], [1.2, 0.4], [-0.7, 0.9]]]
    },
    "csv_path": {
        "type": "string",
        "description": "CSV file with one point per row (optional header row)",
        "examples": ["~/codes/batch-001.csv"]
    }
}

KERNEL_PROPERTIES = {
    "gamma": {
        "type": "number",
        "description": "Gaussian kernel width gamma (exclusive with scale)",
        "exclusiveMinimum": 0
    },
    "scale": {
        "type": "string",
        "description": "Kernel scale s = gamma^2 / d, e.g. '1', '1/8', or 'hz' for the Henze-Zirkler width",
        "examples": ["1", "1/8", "hz"]
    }
}


class EstimatorTools:
    """Closed-form estimator tools class"""

    def get_tools(self) -> List[Tool]:
        """Get all estimator tools"""
        return [
            Tool(
                name="compute_mmd",
                description="📐 CLOSED-FORM MMD: Compute the unbiased and biased MMD^2 between a sample and the standard normal N_d, the null variance of the unbiased estimator, and the standardized SMMD (zero mean, unit variance when the sample really is N_d).",
                inputSchema={
                    "type": "object",
                    "properties": {
                        **SAMPLE_PROPERTIES,
                        **KERNEL_PROPERTIES,
                        "normalize": {
                            "type": "boolean",
                            "description": "Center each column and scale it to unit variance first",
                            "default": False
                        }
                    },
                    "additionalProperties": False
                }
            ),
            Tool(
                name="kernel_width",
                description="📏 KERNEL WIDTH: Convert a kernel scale s (or 'hz') into the Gaussian width gamma for a given dimension and batch size.",
                inputSchema={
                    "type": "object",
                    "properties": {
                        "d": {"type": "integer", "description": "Dimension", "minimum": 1},
                        "n": {"type": "integer", "description": "Batch size (used by 'hz')", "minimum": 1},
                        "scale": KERNEL_PROPERTIES["scale"]
                    },
                    "required": ["d", "n", "scale"],
                    "additionalProperties": False
                }
            )
        ]

    async def compute_mmd(self, points: Optional[Sequence[Sequence[float]]] = None, csv_path: Optional[str] = None,
                          gamma: Optional[float] = None, scale: Optional[str] = None,
                          normalize: bool = False) -> List[TextContent]:
        """Estimators for one sample"""
        sample = await load_points(points, csv_path)
        n, d = sample.shape
        kernel = kernel_from_arguments(gamma, scale, d, n)

        def compute() -> dict:
            z = code_normalize(sample) if normalize else sample
            return {
                "mmd_u": mmd_u_closed(z, kernel.gamma),
                "mmd_b": mmd_b_closed(z, kernel.gamma),
                "smmd": smmd(z, kernel.gamma),
                "variance": null_variance(kernel.gamma, d, n),
                "gamma": kernel.gamma,
                "s": kernel.scale(d),
            }

        result = await run_blocking(compute)
        return json_reply(f"MMD for n={n}, d={d}", result)

    async def kernel_width(self, d: int, n: int, scale: Union[str, float]) -> List[TextContent]:
        """Resolve a kernel scale to gamma"""
        d = validate_positive_int(d, "d")
        n = validate_positive_int(n, "n")
        gamma = resolve_gamma(parse_scale(scale), d, n)
        return json_reply("Kernel width", {"d": d, "n": n, "gamma": gamma, "s": gamma_to_scale(gamma, d)})
