"""
Shared argument handling for the MCP tools
"""

import asyncio
from typing import Any, Callable, List, Optional, Sequence, TypeVar, Union

import numpy as np
from mcp.types import TextContent

from ..mmd.experiments import parse_scale
from ..mmd.kernels import KernelFamily, KernelSpec
from ..utils.csv_io import read_sample_async
from ..utils.error_handler import ParameterError, validate_sample
from ..utils.tables import dumps_fixed, rows_to_json

T = TypeVar("T")


async def load_points(points: Optional[Sequence[Sequence[float]]], csv_path: Optional[str]) -> np.ndarray:
    """Sample from inline points or a CSV file (exactly one of them)"""
    if (points is None) == (csv_path is None):
        raise ParameterError("Provide exactly one of 'points' or 'csv_path'")
    if csv_path is not None:
        return await read_sample_async(csv_path)
    return validate_sample(points, name="points")


def kernel_from_arguments(gamma: Optional[float], scale: Union[str, float, None], d: int, n: int,
                          family: KernelFamily = KernelFamily.RBF) -> KernelSpec:
    if (gamma is None) == (scale is None):
        raise ParameterError("Provide exactly one of 'gamma' or 'scale'")
    if gamma is not None:
        return KernelSpec(family, gamma)
    return KernelSpec.from_scale(parse_scale(scale), d, n, family)


async def run_blocking(func: Callable[..., T], *args: Any, **kwargs: Any) -> T:
    """Run CPU-bound library code off the event loop"""
    return await asyncio.to_thread(func, *args, **kwargs)


def json_reply(title: str, payload: dict) -> List[TextContent]:
    return [TextContent(type="text", text=f"✅ {title}\n{dumps_fixed(payload)}")]


def table_reply(title: str, rows: Sequence[Any]) -> List[TextContent]:
    return [TextContent(type="text", text=f"✅ {title}\n{rows_to_json(rows)}")]
