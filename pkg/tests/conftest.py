"""Keeps the tests directory importable so suites can share helpers
(random tree generators, hand-built fixtures) across files."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
