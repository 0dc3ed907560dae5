"""Write the bundled planted-topic corpus to data/synthetic_corpus.jsonl."""

import argparse
from pathlib import Path

from meaningspace.corpus import ingest, write_jsonl
from meaningspace.synthetic import PlantedConfig, planted_records

ROOT = Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=ROOT / "data" / "synthetic_corpus.jsonl", type=Path)
    ap.add_argument("--seed", type=int, default=PlantedConfig.seed)
    args = ap.parse_args()
    corpus = ingest(planted_records(PlantedConfig(seed=args.seed)))
    write_jsonl(corpus, args.out)
    print(f"{args.out}: {corpus.n_texts} texts, {len(corpus.categories)} categories, "
          f"{len(corpus.vocabulary)} words")
