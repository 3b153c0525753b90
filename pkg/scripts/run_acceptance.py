#!/usr/bin/env python3
"""Run the acceptance criteria outside pytest and print one line per criterion.

Usage: python scripts/run_acceptance.py [N ...]
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from test_acceptance import CRITERIA, _record  # noqa: E402


def main(argv):
    chosen = [int(a) for a in argv] or sorted(CRITERIA)
    failed = 0
    for n in chosen:
        ok, detail = CRITERIA[n]()
        _record(n, ok, detail)
        failed += not ok
    print(f"{len(chosen) - failed}/{len(chosen)} criteria pass")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
