#!/usr/bin/env python3
"""
SMMD command line
"""

import sys
from pathlib import Path

project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from src.cli import main
from src.utils.config import load_env

if __name__ == "__main__":
    load_env(project_root)
    sys.exit(main())
