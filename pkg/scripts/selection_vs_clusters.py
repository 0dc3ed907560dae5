"""How many PCs does each retention rule keep as the number of planted
topic clusters grows?

Prints one TSV row per (clusters, seed) with the Kaiser, Broken Stick and
PCA-CN counts and the Double Kaiser survivor count.
"""

import argparse
import sys

from meaningspace.corpus import build_frequency_matrix, ingest
from meaningspace.pca import fit
from meaningspace.rig import build_rig_matrix
from meaningspace.selection import SelectionParams, double_kaiser, select_all
from meaningspace.synthetic import PlantedConfig, planted_records


def run(clusters: int, seed: int, condition_number: float) -> list:
    cfg = PlantedConfig(n_clusters=clusters, seed=seed,
                        n_texts=max(500, 40 * clusters * PlantedConfig.cats_per_cluster))
    rm = build_rig_matrix(build_frequency_matrix(ingest(planted_records(cfg))))
    model = fit(rm.values, rm.categories)
    k, b, c = select_all(model, SelectionParams(condition_number))
    dk = double_kaiser(rm.values, rm.categories)
    return [clusters, seed, len(rm.categories), k.m, b.m, c.m, len(dk.informative_attributes),
            f"{model.variance_fraction[0]:.4f}"]


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--clusters", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--condition-number", type=float, default=10.0)
    args = ap.parse_args()
    print("clusters\tseed\tcategories\tkaiser\tbroken_stick\tpca_cn\tdouble_kaiser_kept\tpc1_fraction")
    for g in args.clusters:
        for seed in range(args.seeds):
            print("\t".join(map(str, run(g, seed, args.condition_number))))
            sys.stdout.flush()
