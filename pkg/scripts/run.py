# scripts/run.py
#
# perfweld entrypoint for a source checkout.
#
# Usage:
#   python scripts/run.py recipe --list
#   python scripts/run.py recipe smoke --out-dir ./runs
#   python scripts/run.py curve --config experiments/curve.json

import sys
from pathlib import Path

# Add project root to path so we can import perfweld without pip install
sys.path.insert(0, str(Path(__file__).parent.parent))

from perfweld.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
