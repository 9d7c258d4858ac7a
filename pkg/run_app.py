# run_app.py
"""
Launcher for the aging CTRW command line from a source checkout.

    python run_app.py verify --config scenarios/brownian.env
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent / "src"))

from aging_ctrw.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
