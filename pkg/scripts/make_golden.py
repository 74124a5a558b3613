#!/usr/bin/env python3
"""Rebuild the committed golden outputs of the street-A fixture pipeline.

The golden directory (tests/golden/street_a/) pins the end-to-end behavior of
the command-line pipeline: small artifacts are stored verbatim, the large ones
as SHA-256 checksums.  The regression test replays the same steps into a
scratch directory and compares against what is committed here.

Run from the repository root after an intentional behavior change:

    python3 scripts/make_golden.py

and commit the refreshed files together with the change that motivated them.
"""

from __future__ import annotations

import json
import shutil
import tempfile
from pathlib import Path

from blockcast.cli import main as blockcast_main
from blockcast.fileformats import file_sha256

REPO_ROOT = Path(__file__).resolve().parents[1]
CONFIG = REPO_ROOT / "configs" / "street_a.json"
BACKGROUND_CONFIG = REPO_ROOT / "configs" / "street_a_background.json"
GOLDEN_DIR = REPO_ROOT / "tests" / "golden" / "street_a"

# (path inside the build dir, name inside the golden dir) for files small
# enough to commit byte-for-byte.
VERBATIM_FILES = [
    ("traj/config.json", "config.json"),
    ("traj/objects.json", "objects.json"),
    ("traj/link.csv", "link.csv"),
    ("dict/dict.csv", "dict.csv"),
    ("dict/dict_meta.json", "dict_meta.json"),
    ("wins/manifest.json", "manifest.json"),
    ("params_p1.json", "params_p1.json"),
    ("params_p2.json", "params_p2.json"),
    ("params_p3.json", "params_p3.json"),
    ("params_p4.json", "params_p4.json"),
    ("preds_p1.csv", "preds_p1.csv"),
    ("preds_p2.csv", "preds_p2.csv"),
    ("preds_p3.csv", "preds_p3.csv"),
    ("preds_p4.csv", "preds_p4.csv"),
    ("report/report.json", "report.json"),
    ("report/report.txt", "report.txt"),
    ("report/curves.csv", "curves.csv"),
]

# Large artifacts pinned by checksum only.
CHECKSUMMED_FILES = [
    "traj/scans.csv",
    "traj/powers.csv",
    "prep/preprocessed.csv",
    "wins/windows.jsonl",
]


def run_pipeline(work: Path, config: Path = CONFIG, bg_config: Path = BACKGROUND_CONFIG) -> None:
    """Run every stage of the fixture pipeline into ``work``.

    Directory names below are load-bearing: the trajectory directory basename
    becomes the source id recorded inside windows.jsonl, so the regression
    replay must use the same names to get identical bytes.
    """
    steps: list[list[object]] = [
        ["simulate", "--config", config, "--out", work / "traj"],
        ["simulate", "--config", bg_config, "--out", work / "bg"],
        ["build-dict", "--config", config, "--traj", work / "bg", "--out", work / "dict"],
        [
            "preprocess",
            "--config", config,
            "--traj", work / "traj",
            "--dict", work / "dict",
            "--out", work / "prep",
        ],
        [
            "windows",
            "--config", config,
            "--traj", work / "traj",
            "--prep", work / "prep",
            "--scr", "on",
            "--out", work / "wins",
        ],
    ]
    for problem in (1, 2, 3, 4):
        steps.append(
            [
                "fit",
                "--config", config,
                "--windows", work / "wins",
                "--problem", problem,
                "--out", work / f"params_p{problem}.json",
            ]
        )
        steps.append(
            [
                "predict",
                "--config", config,
                "--windows", work / "wins",
                "--params", work / f"params_p{problem}.json",
                "--out", work / f"preds_p{problem}.csv",
            ]
        )
    steps.append(
        [
            "eval",
            "--windows", work / "wins",
            "--preds",
            work / "preds_p1.csv",
            work / "preds_p2.csv",
            work / "preds_p3.csv",
            work / "preds_p4.csv",
            "--out", work / "report",
        ]
    )
    for step in steps:
        argv = [str(part) for part in step]
        rc = blockcast_main(argv)
        if rc != 0:
            raise RuntimeError(f"pipeline step {argv[0]!r} failed with exit code {rc}")


def main() -> None:
    with tempfile.TemporaryDirectory(prefix="street_a_golden_") as tmp:
        work = Path(tmp)
        run_pipeline(work)

        GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
        for rel_src, dst_name in VERBATIM_FILES:
            shutil.copyfile(work / rel_src, GOLDEN_DIR / dst_name)
        checksums = {rel: file_sha256(work / rel) for rel in CHECKSUMMED_FILES}
        with open(GOLDEN_DIR / "checksums.json", "w", encoding="utf-8") as fh:
            json.dump(checksums, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(f"golden files written to {GOLDEN_DIR}")


if __name__ == "__main__":
    main()
