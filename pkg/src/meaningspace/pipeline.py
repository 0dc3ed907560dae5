"""Pipeline stages behind the command line.

Every stage writes its artifacts into the output directory and records
them in ``manifest.json`` together with the checksums of the artifacts it
consumed and the parameters it ran with. A stage whose record still matches
is skipped (unless ``force``); a stage reading an artifact whose checksum
disagrees with the manifest, or that was built from a different input,
fails.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from meaningspace import corpus as _corpus
from meaningspace import grouping, io, pca, rig, selection
from meaningspace.errors import ValidationError

log = logging.getLogger(__name__)

FORMATS = ("jsonl-corpus", "tsv-matrix", "tsv-rig")
METHODS = ("threshold", "step-fit")

RIG_FILE = "rig.tsv"
PCA_FILE = "pca.json"
PRODUCER = {RIG_FILE: "rig", PCA_FILE: "pca"}


@dataclass
class RunConfig:
    out: Path
    input: Path | None = None
    fmt: str = "jsonl-corpus"
    sidecar: Path | None = None
    lexicon: Path | None = None
    force: bool = False
    condition_number: float = 10.0
    zero_halfwidth: float | None = None
    pcs: int | None = None
    pc: int | None = None
    method: str = "threshold"
    top_words: int | None = None
    n_categories: int = 10
    n_words: int = 150
    random_free: bool = True  # no stage draws random numbers

    def __post_init__(self):
        self.out = Path(self.out)
        self.input = Path(self.input) if self.input is not None else None
        self.sidecar = Path(self.sidecar) if self.sidecar is not None else None
        self.lexicon = Path(self.lexicon) if self.lexicon is not None else None
        if self.fmt not in FORMATS:
            raise ValidationError(f"unknown format {self.fmt!r}; choose from {', '.join(FORMATS)}")
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if not self.condition_number > 1:
            raise ValidationError("--condition-number must exceed 1")
        if self.zero_halfwidth is not None and not self.zero_halfwidth > 0:
            raise ValidationError("--zero-halfwidth must be positive")
        for name in ("pcs", "pc", "top_words", "n_categories", "n_words"):
            val = getattr(self, name)
            if val is not None and val < 1:
                raise ValidationError(f"--{name.replace('_', '-')} must be at least 1")
        for p in (self.input, self.sidecar, self.lexicon):
            if p is not None and not p.is_file():
                raise ValidationError(f"no such file: {p}")


class Manifest:
    def __init__(self, out: Path):
        self.path = out / "manifest.json"
        if self.path.exists():
            data = io.read_json(self.path)
            self.input = data.get("input")
            self.stages = data.get("stages", {})
        else:
            self.input = None
            self.stages = {}

    def save(self) -> None:
        io.write_json(self.path, {"input": self.input, "stages": self.stages})


def _fingerprint(cfg: RunConfig) -> dict:
    fp = {"format": cfg.fmt, "sha256": io.sha256_file(cfg.input)}
    if cfg.fmt == "tsv-matrix":
        side = cfg.sidecar or cfg.input.with_suffix(".json")
        if not side.is_file():
            raise ValidationError(f"missing sidecar JSON {side} for tsv-matrix input")
        fp["sidecar_sha256"] = io.sha256_file(side)
    fp["lexicon_sha256"] = io.sha256_file(cfg.lexicon) if cfg.lexicon else None
    return fp


def _open(cfg: RunConfig, needs_input: bool) -> Manifest:
    cfg.out.mkdir(parents=True, exist_ok=True)
    man = Manifest(cfg.out)
    if cfg.input is None:
        if needs_input:
            raise ValidationError("--input is required for this command")
        if man.input is None:
            raise ValidationError(f"{cfg.out} holds no artifacts; run `meaningspace rig` first")
        return man
    fp = _fingerprint(cfg)
    if man.input is not None and man.input != fp:
        if not (cfg.force and needs_input):
            raise ValidationError(
                f"{cfg.out} holds artifacts built from a different input or lexicon; "
                "use another --out, or re-run `rig`/`stats` with --force")
        log.info("input changed; discarding artifacts in %s", cfg.out)
        for stage in list(man.stages):
            for rel in man.stages[stage]["outputs"]:
                (cfg.out / rel).unlink(missing_ok=True)
        man.stages = {}
    man.input = fp
    return man


def _artifact(cfg: RunConfig, man: Manifest, rel: str) -> Path:
    """Path of an upstream artifact after checking it against the manifest chain."""
    producer = PRODUCER[rel]
    path = cfg.out / rel
    rec = man.stages.get(producer)
    if not path.exists() or rec is None or rel not in rec["outputs"]:
        raise ValidationError(f"missing {path}; run `meaningspace {producer} --out {cfg.out}` first")
    if io.sha256_file(path) != rec["outputs"][rel]:
        raise ValidationError(
            f"{path} does not match the checksum recorded in the manifest; "
            f"re-run `meaningspace {producer} --force`")
    for up, sha in rec["upstream"].items():
        if up in PRODUCER:
            upath = _artifact(cfg, man, up)
            if io.sha256_file(upath) != sha:
                raise ValidationError(
                    f"{path} was built from a different {up}; "
                    f"re-run `meaningspace {producer} --force`")
    return path


def _up_to_date(cfg: RunConfig, man: Manifest, stage: str, upstream: dict, params: dict) -> bool:
    if cfg.force:
        return False
    rec = man.stages.get(stage)
    if rec is None or rec["upstream"] != upstream or rec["params"] != params:
        return False
    for rel, sha in rec["outputs"].items():
        p = cfg.out / rel
        if not p.exists() or io.sha256_file(p) != sha:
            return False
    log.info("%s: up to date", stage)
    return True


def _record(cfg: RunConfig, man: Manifest, stage: str, upstream: dict, params: dict,
            outputs: list[str]) -> None:
    old = man.stages.get(stage)
    if old is not None:
        for rel in old["outputs"]:
            if rel not in outputs:
                (cfg.out / rel).unlink(missing_ok=True)
    man.stages[stage] = {
        "upstream": upstream,
        "params": params,
        "outputs": {rel: io.sha256_file(cfg.out / rel) for rel in sorted(outputs)},
    }
    man.save()


def _lexicon(cfg: RunConfig):
    return io.read_lexicon(cfg.lexicon) if cfg.lexicon else None


def _input_upstream(man: Manifest) -> dict:
    return {"input": man.input["sha256"], "lexicon": man.input["lexicon_sha256"]}


# ---------------------------------------------------------------- stats

def cmd_stats(cfg: RunConfig) -> dict:
    """Words-per-text, words-per-category and categories-per-word statistics."""
    man = _open(cfg, needs_input=True)
    upstream = _input_upstream(man)
    params: dict = {}
    if _up_to_date(cfg, man, "stats", upstream, params):
        return io.read_json(cfg.out / "stats" / "stats.json")
    lex = _lexicon(cfg)
    outputs = []
    summary: dict = {}
    if cfg.fmt == "jsonl-corpus":
        corp = _corpus.read_jsonl(cfg.input)
        freq = _corpus.build_frequency_matrix(corp)
        wpt = _corpus.words_per_text_histogram(corp, lex)
        io.write_tsv(cfg.out / "stats/words_per_text.tsv", ["words_in_text", "num_texts"],
                     sorted(wpt.histogram.items()))
        outputs.append("stats/words_per_text.tsv")
        summary["n_texts"] = corp.n_texts
        summary["words_per_text"] = {"min": wpt.minimum, "max": wpt.maximum,
                                     "mean": round(wpt.mean, 6)}
    elif cfg.fmt == "tsv-matrix":
        freq = io.read_frequency_tsv(cfg.input, cfg.sidecar)
        summary["n_texts"] = freq.total_texts
        log.info("stats: tsv-matrix input carries no per-text data; skipping words-per-text")
    else:
        raise ValidationError("stats needs a jsonl-corpus or tsv-matrix input")
    if lex is not None:
        freq = freq.restrict(lex)

    wpc, bands = _corpus.words_per_category(freq)
    cpw, cpw_hist = _corpus.categories_per_word(freq)
    io.write_tsv(cfg.out / "stats/words_per_category.tsv", ["category", "num_words"],
                 zip(freq.categories, map(int, wpc)))
    io.write_tsv(cfg.out / "stats/words_per_category_bands.tsv", ["band", "num_categories"],
                 ((b.label, b.count) for b in bands))
    io.write_tsv(cfg.out / "stats/categories_per_word.tsv", ["word", "num_categories"],
                 zip(freq.words, map(int, cpw)))
    io.write_tsv(cfg.out / "stats/categories_per_word_histogram.tsv",
                 ["num_categories", "num_words"], sorted(cpw_hist.items()))
    outputs += ["stats/words_per_category.tsv", "stats/words_per_category_bands.tsv",
                "stats/categories_per_word.tsv", "stats/categories_per_word_histogram.tsv"]
    summary.update({
        "n_categories": len(freq.categories),
        "n_words": len(freq.words),
        "words_per_category": {"min": int(wpc.min()), "max": int(wpc.max()),
                               "bands": {b.label: b.count for b in bands}},
        "categories_per_word": {"min": int(cpw.min()), "max": int(cpw.max())},
    })
    io.write_json(cfg.out / "stats/stats.json", summary)
    outputs.append("stats/stats.json")
    _record(cfg, man, "stats", upstream, params, outputs)
    return summary


# ---------------------------------------------------------------- rig

def cmd_rig(cfg: RunConfig) -> rig.RigMatrix:
    man = _open(cfg, needs_input=True)
    upstream = _input_upstream(man)
    params = {"top_words": cfg.top_words}
    if _up_to_date(cfg, man, "rig", upstream, params):
        return io.read_rig_tsv(cfg.out / RIG_FILE)
    lex = _lexicon(cfg)
    if cfg.fmt == "tsv-rig":
        rm = io.read_rig_tsv(cfg.input)
        if lex is not None:
            keep = [i for i, w in enumerate(rm.words) if w in set(lex)]
            if not keep:
                raise ValidationError("lexicon shares no words with the RIG matrix")
            rm = rig.RigMatrix(tuple(rm.words[i] for i in keep), rm.categories,
                               rm.values[keep].copy())
    else:
        if cfg.fmt == "jsonl-corpus":
            freq = _corpus.build_frequency_matrix(_corpus.read_jsonl(cfg.input))
        else:
            freq = io.read_frequency_tsv(cfg.input, cfg.sidecar)
        if lex is not None:
            freq = freq.restrict(lex)
        rm = rig.build_rig_matrix(freq)
    io.write_rig_tsv(rm, cfg.out / RIG_FILE)
    outputs = [RIG_FILE]
    if cfg.top_words:
        io.write_json(cfg.out / "top_words.json", io.top_words_json(rm, cfg.top_words))
        outputs.append("top_words.json")
    _record(cfg, man, "rig", upstream, params, outputs)
    # downstream stages always see the rounded on-disk values
    return io.read_rig_tsv(cfg.out / RIG_FILE)


# ---------------------------------------------------------------- pca

def _load_rig(cfg: RunConfig, man: Manifest) -> tuple[rig.RigMatrix, str]:
    path = _artifact(cfg, man, RIG_FILE)
    return io.read_rig_tsv(path), io.sha256_file(path)


def _load_model(cfg: RunConfig, man: Manifest) -> tuple[pca.PcaModel, str]:
    path = _artifact(cfg, man, PCA_FILE)
    return io.model_from_json(io.read_json(path)), io.sha256_file(path)


def cmd_pca(cfg: RunConfig) -> pca.PcaModel:
    man = _open(cfg, needs_input=False)
    rm, rig_sha = _load_rig(cfg, man)
    upstream = {RIG_FILE: rig_sha}
    if _up_to_date(cfg, man, "pca", upstream, {}):
        return io.model_from_json(io.read_json(cfg.out / PCA_FILE))
    model = pca.fit(rm.values, rm.categories)
    io.write_json(cfg.out / PCA_FILE, io.model_to_json(model))
    cum = np.cumsum(model.eigenvalues) / np.sum(model.eigenvalues)
    io.write_tsv(cfg.out / "pca/variance.tsv",
                 ["pc", "eigenvalue", "variance_fraction", "cumulative_fraction"],
                 ((k + 1, float(model.eigenvalues[k]), float(model.variance_fraction[k]),
                   float(cum[k])) for k in range(model.n_attributes)))
    outputs = [PCA_FILE, "pca/variance.tsv"]
    loadings = model.loadings()
    for k in range(model.n_attributes):
        rel = f"pca/coefficients/pc{k + 1:03d}.tsv"
        io.write_coefficients_tsv(cfg.out / rel, model.attribute_names,
                                  model.components[:, k], loadings[:, k])
        outputs.append(rel)
    _record(cfg, man, "pca", upstream, {}, outputs)
    return model


# ---------------------------------------------------------------- select

def cmd_select(cfg: RunConfig) -> dict:
    man = _open(cfg, needs_input=False)
    model, pca_sha = _load_model(cfg, man)
    rm, rig_sha = _load_rig(cfg, man)
    upstream = {PCA_FILE: pca_sha, RIG_FILE: rig_sha}
    params = {"condition_number": cfg.condition_number}
    if _up_to_date(cfg, man, "select", upstream, params):
        return io.read_json(cfg.out / "selection.json")
    sp = selection.SelectionParams(condition_number=cfg.condition_number)
    k, b, c = selection.select_all(model, sp)
    dk = selection.double_kaiser(rm.values, rm.categories)
    report = {"kaiser": k.to_dict(), "broken_stick": b.to_dict(), "pca_cn": c.to_dict(),
              "double_kaiser": dk.to_dict()}
    io.write_json(cfg.out / "selection.json", report)
    _record(cfg, man, "select", upstream, params, ["selection.json"])
    return report


def _pc_list(cfg: RunConfig, model: pca.PcaModel) -> list[int]:
    n = model.n_attributes
    if cfg.pc is not None:
        if cfg.pc > n:
            raise ValidationError(f"--pc {cfg.pc} exceeds the {n} available components")
        return [cfg.pc]
    m = cfg.pcs if cfg.pcs is not None else selection.pca_cn(
        model.eigenvalues, selection.SelectionParams(cfg.condition_number)).m
    if m > n:
        raise ValidationError(f"--pcs {m} exceeds the {n} available components")
    return list(range(1, m + 1))


# ---------------------------------------------------------------- group

def cmd_group(cfg: RunConfig) -> dict:
    man = _open(cfg, needs_input=False)
    model, pca_sha = _load_model(cfg, man)
    pcs = _pc_list(cfg, model)
    upstream = {PCA_FILE: pca_sha}
    stage = f"group-{cfg.method}"
    params = {"pcs": pcs, "zero_halfwidth": cfg.zero_halfwidth}
    base = f"groups/{cfg.method}"
    if _up_to_date(cfg, man, stage, upstream, params):
        return io.read_json(cfg.out / base / "summary.json")
    gp = grouping.GroupingParams(cfg.zero_halfwidth)
    summary = {"method": cfg.method, "pcs": []}
    if cfg.method == "threshold":
        summary["zero_halfwidth"] = gp.halfwidth(model.n_attributes)
    outputs = []
    for k in pcs:
        comp = model.components[:, k - 1]
        if cfg.method == "threshold":
            res = grouping.threshold_groups(comp, model.attribute_names, gp, k)
        else:
            res = grouping.step_groups(comp, model.attribute_names, k)
        for group in ("positive", "zero", "negative"):
            rel = f"{base}/pc{k:03d}_{group}.tsv"
            io.write_tsv(cfg.out / rel, ["No.", "Attribute", "Component Coefficient"],
                         ((i + 1, name, val) for i, (name, val) in enumerate(getattr(res, group))))
            outputs.append(rel)
        summary["pcs"].append({"pc": k, **res.sizes(), "flags": list(res.flags)})
    io.write_json(cfg.out / base / "summary.json", summary)
    outputs.append(f"{base}/summary.json")
    _record(cfg, man, stage, upstream, params, outputs)
    return summary


# ---------------------------------------------------------------- extremes

def cmd_extremes(cfg: RunConfig) -> list[dict]:
    man = _open(cfg, needs_input=False)
    model, pca_sha = _load_model(cfg, man)
    rm, rig_sha = _load_rig(cfg, man)
    if rm.categories != model.attribute_names:
        raise ValidationError("RIG matrix and PCA model disagree on the category order")
    pcs = _pc_list(cfg, model)
    upstream = {PCA_FILE: pca_sha, RIG_FILE: rig_sha}
    params = {"pcs": pcs, "n_categories": cfg.n_categories, "n_words": cfg.n_words}
    if _up_to_date(cfg, man, "extremes", upstream, params):
        return [io.read_json(cfg.out / f"extremes/pc{k:03d}.json") for k in pcs]
    reports, outputs = [], []
    for k in pcs:
        rep = grouping.extreme_topic_report(rm, model.components[:, k - 1],
                                            cfg.n_categories, cfg.n_words, k).to_dict()
        rel = f"extremes/pc{k:03d}.json"
        io.write_json(cfg.out / rel, rep)
        outputs.append(rel)
        reports.append(rep)
    _record(cfg, man, "extremes", upstream, params, outputs)
    return reports


# ---------------------------------------------------------------- scores

def cmd_scores(cfg: RunConfig) -> dict:
    """Word coordinates on the first m PCs and category coordinates in the dual view."""
    man = _open(cfg, needs_input=False)
    model, pca_sha = _load_model(cfg, man)
    rm, rig_sha = _load_rig(cfg, man)
    if rm.categories != model.attribute_names:
        raise ValidationError("RIG matrix and PCA model disagree on the category order")
    m = max(_pc_list(cfg, model))
    upstream = {PCA_FILE: pca_sha, RIG_FILE: rig_sha}
    params = {"m": m}
    if _up_to_date(cfg, man, "scores", upstream, params):
        return {"m": m}
    sc = pca.scores(model, rm.values, m)
    io.write_tsv(cfg.out / "scores/word_scores.tsv", ["word", *[f"PC{k + 1}" for k in range(m)]],
                 ([w, *map(float, row)] for w, row in zip(rm.words, sc.scores)))
    dual = pca.dual_fit(rm.values, rm.categories, rm.words, model=model)
    md = min(m, dual.eigenvalues.size)
    io.write_tsv(cfg.out / "scores/category_coordinates.tsv",
                 ["category", *[f"PC{k + 1}" for k in range(md)]],
                 ([c, *map(float, row[:md])]
                  for c, row in zip(dual.category_names, dual.category_coordinates)))
    io.write_tsv(cfg.out / "scores/dual_eigenvalues.tsv", ["pc", "eigenvalue"],
                 ((k + 1, float(v)) for k, v in enumerate(dual.eigenvalues)))
    outputs = ["scores/word_scores.tsv", "scores/category_coordinates.tsv",
               "scores/dual_eigenvalues.tsv"]
    _record(cfg, man, "scores", upstream, params, outputs)
    return {"m": m}

