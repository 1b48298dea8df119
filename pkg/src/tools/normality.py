"""
Normality test tool
"""

from typing import List, Optional, Sequence

from mcp.types import TextContent, Tool

from ..mmd import testing
from ..mmd.testing import CompositeNull, NullCache, NullSpec
from ..utils.error_handler import CacheError, ParameterError
from ..utils.tables import row_dict
from .estimators import KERNEL_PROPERTIES, SAMPLE_PROPERTIES
from .helpers import json_reply, kernel_from_arguments, load_points, run_blocking


class NormalityTestTools:
    """SMMD normality test tools class"""

    def __init__(self, cache: Optional[NullCache] = None):
        self.cache = cache or NullCache()

    def get_tools(self) -> List[Tool]:
        """Get all normality test tools"""
        return [
            Tool(
                name="test_normality",
                description="🧪 NORMALITY TEST: Test whether a sample comes from N_d (simple), a normal with diagonal covariance, or any normal (full covariance). The sample is transformed to match the chosen null and its SMMD is compared with a Monte-Carlo threshold. Null distributions are cached; pass replicates and seed to build a missing one.",
                inputSchema={
                    "type": "object",
                    "properties": {
                        **SAMPLE_PROPERTIES,
                        **KERNEL_PROPERTIES,
                        "composite": {
                            "type": "string",
                            "description": "Null hypothesis",
                            "enum": [c.value for c in CompositeNull],
                            "default": "simple"
                        },
                        "alpha": {
                            "type": "number",
                            "description": "Test size",
                            "exclusiveMinimum": 0,
                            "exclusiveMaximum": 1,
                            "default": 0.05
                        },
                        "replicates": {
                            "type": "integer",
                            "description": "Monte-Carlo replicates when the null must be simulated",
                            "minimum": 1
                        },
                        "seed": {
                            "type": "integer",
                            "description": "Root seed for the simulation",
                            "minimum": 0
                        },
                        "liberal": {
                            "type": "boolean",
                            "description": "Simple null against the fixed threshold 2.0, no simulated null",
                            "default": False
                        }
                    },
                    "additionalProperties": False
                }
            )
        ]

    async def test_normality(self, points: Optional[Sequence[Sequence[float]]] = None,
                             csv_path: Optional[str] = None, gamma: Optional[float] = None,
                             scale: Optional[str] = None, composite: str = "simple", alpha: float = 0.05,
                             replicates: Optional[int] = None, seed: Optional[int] = None,
                             liberal: bool = False) -> List[TextContent]:
        """Run the test, simulating the null if needed"""
        sample = await load_points(points, csv_path)
        n, d = sample.shape
        kernel = kernel_from_arguments(gamma, scale, d, n)
        try:
            composite = CompositeNull(composite)
        except ValueError:
            raise ParameterError(f"Unknown composite null {composite!r}; use simple, diagonal or full")
        if liberal and (composite is not CompositeNull.SIMPLE_STANDARD or replicates is not None):
            raise ParameterError("liberal tests the simple null without a simulated distribution")

        def run():
            if liberal:
                return testing.liberal_test(sample, kernel)
            if replicates is not None:
                spec = NullSpec(d=d, n=n, kernel=kernel, sample_type=composite.sample_type,
                                replicates=replicates, seed=seed)
                dist = self.cache.get_or_simulate(spec)
            else:
                dist = self.cache.find(d, n, kernel, composite.sample_type)
                if dist is None:
                    raise CacheError("No cached null distribution matches; pass replicates and seed")
            return testing.test_normality(sample, kernel, composite, alpha, dist)

        result = await run_blocking(run)
        verdict = "rejected" if result.reject else "not rejected"
        return json_reply(f"Normality {verdict}", row_dict(result))
