"""Regenerate tests/golden/stats/*.tsv from the bundled corpus.

The expected files are computed by the brute-force counting in
tests/oracles.py, not by the package, so they act as an independent check
on the ``stats`` command.
"""

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import golden_stats  # noqa: E402

if __name__ == "__main__":
    src = ROOT / "data" / "synthetic_corpus.jsonl"
    records = [json.loads(line) for line in src.read_text().splitlines() if line.strip()]
    out = ROOT / "tests" / "golden" / "stats"
    out.mkdir(parents=True, exist_ok=True)
    for name, body in golden_stats(records).items():
        (out / name).write_text(body, newline="\n")
        print(out / name)
