#!/usr/bin/env python3
"""Run the full street-A demo pipeline and print the resulting report.

Usage (from the repository root):

    python3 scripts/run_pipeline.py [OUT_DIR]

OUT_DIR defaults to out/street_a.  The directory is left in place so the
intermediate artifacts (scans, dictionary, windows, predictions) can be
inspected afterwards.
"""

from __future__ import annotations

import sys
from pathlib import Path

# Sibling script; resolvable because python puts the script's directory on
# sys.path when invoked as a file.
from make_golden import run_pipeline


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out") / "street_a"
    out.mkdir(parents=True, exist_ok=True)
    run_pipeline(out)
    report = out / "report" / "report.txt"
    print(report.read_text(encoding="utf-8"))
    print(f"artifacts left in {out.resolve()}")


if __name__ == "__main__":
    main()
