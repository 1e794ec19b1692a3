#!/usr/bin/env python3
"""UNN command-line entry: python unn.py <subcommand> [flags]"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
