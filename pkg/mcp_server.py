#!/usr/bin/env python3
"""
stdio launcher for the SMMD MCP server

Configuration comes from SMMD_CACHE_DIR, SMMD_LOG_LEVEL and SMMD_THREADS,
optionally set in a .env file next to this script.
"""

import asyncio
import sys
from pathlib import Path

project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from src.server import main as serve
from src.utils.config import load_env, load_settings
from src.utils.error_handler import SmmdError

EXIT_CONFIG = 2


def main() -> int:
    load_env(project_root)
    try:
        settings = load_settings()
    except SmmdError as e:
        sys.stderr.write(f"❌ Configuration error: {e}\n")
        return EXIT_CONFIG

    try:
        asyncio.run(serve(settings))
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    sys.exit(main())
