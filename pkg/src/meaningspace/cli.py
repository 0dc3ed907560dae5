"""Command line front end: ``meaningspace <stage> --out DIR [options]``.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from meaningspace import pipeline
from meaningspace.errors import NumericalError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--input", help="input file (required for stats and rig)")
    shared.add_argument("--format", dest="fmt", default="jsonl-corpus", choices=pipeline.FORMATS)
    shared.add_argument("--sidecar", help="marginals JSON for tsv-matrix input "
                                          "(default: input path with .json suffix)")
    shared.add_argument("--out", required=True, help="output directory")
    shared.add_argument("--lexicon", help="file with one word per line; restricts the vocabulary")
    shared.add_argument("--force", action="store_true", help="recompute even if cached")
    shared.add_argument("-v", "--verbose", action="store_true")

    pcs = argparse.ArgumentParser(add_help=False)
    pcs.add_argument("--pcs", type=int, help="number of leading PCs (default: PCA-CN count)")
    pcs.add_argument("--pc", type=int, help="a single PC (1-based)")
    pcs.add_argument("--condition-number", type=float, default=10.0)

    p = argparse.ArgumentParser(prog="meaningspace", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("stats", parents=[shared], help="corpus statistics")
    r = sub.add_parser("rig", parents=[shared], help="word-category RIG matrix")
    r.add_argument("--top-words", type=int, help="also export the N most informative words per category")
    sub.add_parser("pca", parents=[shared], help="correlation PCA of the RIG matrix")
    s = sub.add_parser("select", parents=[shared], help="Kaiser / Broken Stick / PCA-CN / Double Kaiser")
    s.add_argument("--condition-number", type=float, default=10.0)
    g = sub.add_parser("group", parents=[shared, pcs], help="positive/zero/negative groups per PC")
    g.add_argument("--method", choices=pipeline.METHODS, default="threshold")
    g.add_argument("--zero-halfwidth", type=float, help="default 1/(2 sqrt(n))")
    e = sub.add_parser("extremes", parents=[shared, pcs], help="extreme-topic report per PC")
    e.add_argument("--n-categories", type=int, default=10)
    e.add_argument("--n-words", type=int, default=150)
    sub.add_parser("scores", parents=[shared, pcs], help="word scores and dual category coordinates")
    return p


def _config(args) -> pipeline.RunConfig:
    fields = {k: getattr(args, k) for k in (
        "input", "fmt", "sidecar", "out", "lexicon", "force", "condition_number",
        "zero_halfwidth", "pcs", "pc", "method", "top_words", "n_categories", "n_words")
        if getattr(args, k, None) is not None}
    return pipeline.RunConfig(**fields)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = _config(args)
        if args.command == "stats":
            summary = pipeline.cmd_stats(cfg)
            print(json.dumps(summary, indent=2))
        elif args.command == "rig":
            rm = pipeline.cmd_rig(cfg)
            print(f"rig\t{len(rm.words)} words x {len(rm.categories)} categories")
        elif args.command == "pca":
            model = pipeline.cmd_pca(cfg)
            print(f"pca\t{model.n_attributes} components\tPC1 explains "
                  f"{model.variance_fraction[0]:.4f}")
        elif args.command == "select":
            rep = pipeline.cmd_select(cfg)
            print(f"kaiser\t{rep['kaiser']['m']}\nbroken_stick\t{rep['broken_stick']['m']}\n"
                  f"pca_cn\t{rep['pca_cn']['m']}\n"
                  f"double_kaiser\t{len(rep['double_kaiser']['informative_attributes'])} "
                  f"attributes kept, {len(rep['double_kaiser']['dropped'])} dropped")
        elif args.command == "group":
            summary = pipeline.cmd_group(cfg)
            for row in summary["pcs"]:
                print(f"PC{row['pc']}\t{row['positive']}\t{row['zero']}\t{row['negative']}")
        elif args.command == "extremes":
            for rep in pipeline.cmd_extremes(cfg):
                print(f"PC{rep['pc']}\t+{len(rep['positive']['common_words'])} common words"
                      f"\t-{len(rep['negative']['common_words'])} common words")
        elif args.command == "scores":
            res = pipeline.cmd_scores(cfg)
            print(f"scores\tfirst {res['m']} PCs written")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
