"""Synthetic labeled corpus with planted topic clusters.

Categories come in groups that share one word distribution, so their RIG
columns differ only by sampling noise. Used by the tests, the bundled data
file and the example scripts.
"""

from __future__ import annotations

from dataclasses import dataclass
from string import ascii_uppercase

import numpy as np

from meaningspace.corpus import Corpus, ingest


@dataclass(frozen=True)
class PlantedConfig:
    n_texts: int = 500
    n_clusters: int = 3
    cats_per_cluster: int = 4
    topic_words_per_cluster: int = 60
    n_general_words: int = 120
    own_topic_rate: tuple[float, float] = (0.30, 0.80)
    general_rate: tuple[float, float] = (0.05, 0.30)
    cross_topic_rate: float = 0.002
    seed: int = 20200607


def cluster_of(category: str) -> str:
    return category[0]


def planted_records(cfg: PlantedConfig = PlantedConfig()) -> list[dict]:
    rng = np.random.default_rng(cfg.seed)
    clusters = ascii_uppercase[:cfg.n_clusters]
    cats = [f"{g}{i + 1}" for g in clusters for i in range(cfg.cats_per_cluster)]
    topic = {g: [f"{g.lower()}{i:03d}" for i in range(cfg.topic_words_per_cluster)]
             for g in clusters}
    general = [f"g{i:03d}" for i in range(cfg.n_general_words)]
    topic_rate = {g: rng.uniform(*cfg.own_topic_rate, size=len(topic[g])) for g in clusters}
    general_rate = rng.uniform(*cfg.general_rate, size=len(general))

    labels = np.arange(cfg.n_texts) % len(cats)
    rng.shuffle(labels)
    records = []
    for t in range(cfg.n_texts):
        cat = cats[labels[t]]
        g = cluster_of(cat)
        toks = [w for w, p in zip(general, general_rate) if rng.random() < p]
        for h in clusters:
            if h == g:
                toks += [w for w, p in zip(topic[h], topic_rate[h]) if rng.random() < p]
            else:
                toks += [w for w in topic[h] if rng.random() < cfg.cross_topic_rate]
        if not toks:
            toks = [general[int(rng.integers(len(general)))]]
        records.append({"id": f"t{t + 1:04d}", "categories": [cat], "tokens": sorted(toks)})
    return records


def planted_corpus(cfg: PlantedConfig = PlantedConfig()) -> Corpus:
    return ingest(planted_records(cfg))
