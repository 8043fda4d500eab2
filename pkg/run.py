"""
Run script for the conelab harness.

Usage: python run.py identities --algebra sym:3 --trials 100 --out report.csv
"""

import sys

from conelab.config import get_settings
from conelab.main import main

if __name__ == "__main__":
    settings = get_settings()

    print("🔺 Starting conelab...", file=sys.stderr)
    print(f"🧮 Eigen backend: {settings.eigen_backend}", file=sys.stderr)
    print(f"🎯 op_norm restarts: {settings.op_norm_restarts}", file=sys.stderr)
    print(f"📈 RK4 steps: {settings.rk4_steps}", file=sys.stderr)
    print("", file=sys.stderr)

    sys.exit(main())
