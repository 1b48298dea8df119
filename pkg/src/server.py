#!/usr/bin/env python3
"""
SMMD MCP Server
A Model Context Protocol server exposing closed-form MMD estimators, normality tests,
convergence monitors and the synthetic experiment harness.
"""

import asyncio
import logging
from typing import Any, Dict, List, Optional

from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from .mmd.testing import NullCache
from .tools import EstimatorTools, ExperimentTools, MonitorTools, NormalityTestTools
from .utils import CacheError, FileOperationError, NumericalError, ParameterError, SampleError, SmmdError
from .utils.config import Settings, configure_logging, load_settings

logger = logging.getLogger(__name__)


class SmmdMCPServer:
    """SMMD MCP Server"""

    def __init__(self, cache_dir: Optional[str] = None, threads: Optional[int] = None):
        self.server = Server("smmd-mcp")
        self.estimator_tools = EstimatorTools()
        self.normality_tools = NormalityTestTools(NullCache(cache_dir))
        self.monitor_tools = MonitorTools()
        self.experiment_tools = ExperimentTools(threads)

        self._register_handlers()

    def list_tools(self) -> List[Tool]:
        """Estimators first, then tests, monitors and experiments"""
        tools = []
        tools.extend(self.estimator_tools.get_tools())
        tools.extend(self.normality_tools.get_tools())
        tools.extend(self.monitor_tools.get_tools())
        tools.extend(self.experiment_tools.get_tools())
        return tools

    async def dispatch(self, name: str, arguments: Optional[Dict[str, Any]]) -> List[TextContent]:
        """Route one tool call and turn library errors into text replies"""
        arguments = arguments or {}
        try:
            # Estimators
            if name == "compute_mmd":
                return await self.estimator_tools.compute_mmd(
                    points=arguments.get("points"),
                    csv_path=arguments.get("csv_path"),
                    gamma=arguments.get("gamma"),
                    scale=arguments.get("scale"),
                    normalize=arguments.get("normalize", False)
                )
            elif name == "kernel_width":
                return await self.estimator_tools.kernel_width(
                    d=arguments["d"],
                    n=arguments["n"],
                    scale=arguments["scale"]
                )

            # Normality test
            elif name == "test_normality":
                return await self.normality_tools.test_normality(
                    points=arguments.get("points"),
                    csv_path=arguments.get("csv_path"),
                    gamma=arguments.get("gamma"),
                    scale=arguments.get("scale"),
                    composite=arguments.get("composite", "simple"),
                    alpha=arguments.get("alpha", 0.05),
                    replicates=arguments.get("replicates"),
                    seed=arguments.get("seed"),
                    liberal=arguments.get("liberal", False)
                )

            # Monitor
            elif name == "monitor_batches":
                return await self.monitor_tools.monitor_batches(
                    csv_path=arguments["csv_path"],
                    batch_size=arguments["batch_size"],
                    monitor=arguments.get("monitor", "b"),
                    momentum=arguments.get("momentum", 0.99),
                    min_batches=arguments.get("min_batches", 30),
                    gamma=arguments.get("gamma"),
                    scale=arguments.get("scale")
                )

            # Experiments
            elif name in ("discrimination_tau", "outlier_experiment", "validate_null", "threshold_table"):
                if "seed" not in arguments:
                    raise ParameterError("An explicit seed is required for stochastic computations")
                options = {k: v for k, v in arguments.items() if k != "seed"}
                handler = getattr(self.experiment_tools, name)
                return await handler(arguments["seed"], **options)

            else:
                return [TextContent(
                    type="text",
                    text=f"❌ Unknown tool: {name}"
                )]

        except KeyError as e:
            return [TextContent(
                type="text",
                text=f"❌ Parameter error: missing argument {e}"
            )]
        except TypeError as e:
            return [TextContent(
                type="text",
                text=f"❌ Parameter error: {str(e)}"
            )]
        except ParameterError as e:
            return [TextContent(
                type="text",
                text=f"❌ Parameter error: {str(e)}"
            )]
        except SampleError as e:
            return [TextContent(
                type="text",
                text=f"❌ Sample error: {str(e)}"
            )]
        except NumericalError as e:
            return [TextContent(
                type="text",
                text=f"❌ Numerical error: {str(e)}"
            )]
        except CacheError as e:
            return [TextContent(
                type="text",
                text=f"❌ Cache error: {str(e)}"
            )]
        except FileOperationError as e:
            return [TextContent(
                type="text",
                text=f"❌ File operation error: {str(e)}"
            )]
        except SmmdError as e:
            return [TextContent(
                type="text",
                text=f"❌ SMMD error: {str(e)}"
            )]
        except Exception as e:
            logger.exception("Tool %s failed", name)
            return [TextContent(
                type="text",
                text=f"❌ Unknown error: {str(e)}"
            )]

    def _register_handlers(self):
        """Register MCP handlers"""

        @self.server.list_tools()
        async def list_tools() -> list[Tool]:
            return self.list_tools()

        @self.server.call_tool()
        async def call_tool(name: str, arguments: Optional[Dict[str, Any]]) -> list[TextContent]:
            return await self.dispatch(name, arguments)

    async def run(self):
        """Start the server"""
        async with stdio_server() as (read_stream, write_stream):
            await self.server.run(
                read_stream,
                write_stream,
                self.server.create_initialization_options()
            )


async def main(settings: Optional[Settings] = None):
    """Serve over stdio with the given (or environment) settings"""
    settings = settings or load_settings()
    configure_logging(settings.log_level)
    server = SmmdMCPServer(cache_dir=str(settings.cache_dir), threads=settings.threads)
    logger.info("Serving SMMD tools over stdio, cache at %s", settings.cache_dir)
    await server.run()


if __name__ == "__main__":
    asyncio.run(main())
