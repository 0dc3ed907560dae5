"""Readers and writers for the TSV / JSON artifacts.

All text output is UTF-8 with LF line endings. Floats in TSV files are
written with 12 significant digits; JSON keeps full ``repr`` precision.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from meaningspace.corpus import FrequencyMatrix
from meaningspace.errors import ValidationError
from meaningspace.pca import PcaModel
from meaningspace.rig import RigMatrix


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_json(path: str | Path, obj) -> None:
    write_text(path, json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def read_json(path: str | Path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}:{exc.lineno}: malformed JSON ({exc.msg})") from None


def write_tsv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(fmt(c) if isinstance(c, (float, np.floating)) else str(c)
                               for c in row))
    write_text(path, "\n".join(lines) + "\n")


def _read_matrix_tsv(path: str | Path, cast):
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        if len(header) < 2 or header[0] != "word":
            raise ValidationError(f"{path}:1: header must be 'word<TAB>cat1<TAB>...'")
        cats = header[1:]
        words, rows = [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or rec == [""]:
                continue
            if len(rec) != len(header):
                raise ValidationError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
            try:
                rows.append([cast(c) for c in rec[1:]])
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: non-numeric cell") from None
            words.append(rec[0])
    if not words:
        raise ValidationError(f"{path}: no data rows")
    return words, cats, rows


def _int_cell(s: str) -> int:
    v = int(s)
    if v < 0:
        raise ValueError(s)
    return v


def read_frequency_tsv(path: str | Path, sidecar: str | Path | None = None) -> FrequencyMatrix:
    """Read a precomputed word x category frequency matrix plus its sidecar JSON.

    The sidecar defaults to the TSV path with a ``.json`` suffix and holds
    ``texts_per_category`` (object keyed by category or list in column
    order), ``texts_with_word`` (likewise, keyed by word) and ``total_texts``.
    """
    path = Path(path)
    sidecar = Path(sidecar) if sidecar is not None else path.with_suffix(".json")
    words, cats, rows = _read_matrix_tsv(path, _int_cell)
    meta = read_json(sidecar)

    def marginal(key, names):
        val = meta.get(key)
        if isinstance(val, dict):
            missing = [n for n in names if n not in val]
            if missing:
                raise ValidationError(f"{sidecar}: {key} lacks entries for {missing[:3]}")
            val = [val[n] for n in names]
        if not isinstance(val, list) or len(val) != len(names):
            raise ValidationError(f"{sidecar}: {key} must have {len(names)} entries")
        return np.asarray(val, dtype=np.int64)

    total = meta.get("total_texts")
    if not isinstance(total, int) or total < 1:
        raise ValidationError(f"{sidecar}: total_texts must be a positive integer")
    return FrequencyMatrix(tuple(words), tuple(cats), np.asarray(rows, dtype=np.int64),
                           marginal("texts_per_category", cats),
                           marginal("texts_with_word", words), total)


def write_frequency_tsv(freq: FrequencyMatrix, path: str | Path) -> None:
    path = Path(path)
    write_tsv(path, ["word", *freq.categories],
              ([w, *map(int, row)] for w, row in zip(freq.words, freq.df)))
    write_json(path.with_suffix(".json"), {
        "texts_per_category": dict(zip(freq.categories, map(int, freq.texts_per_category))),
        "texts_with_word": dict(zip(freq.words, map(int, freq.texts_with_word))),
        "total_texts": int(freq.total_texts),
    })


def read_rig_tsv(path: str | Path) -> RigMatrix:
    words, cats, rows = _read_matrix_tsv(path, float)
    try:
        return RigMatrix(tuple(words), tuple(cats), np.asarray(rows, dtype=np.float64))
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def write_rig_tsv(rig_matrix: RigMatrix, path: str | Path) -> None:
    write_tsv(path, ["word", *rig_matrix.categories],
              ([w, *map(float, row)] for w, row in zip(rig_matrix.words, rig_matrix.values)))


def top_words_json(rig_matrix: RigMatrix, n: int) -> list[dict]:
    from meaningspace.rig import top_informative_words
    return [{"category": c,
             "words": [{"word": w, "rig": v} for w, v in top_informative_words(rig_matrix, j, n)]}
            for j, c in enumerate(rig_matrix.categories)]


def model_to_json(model: PcaModel) -> dict:
    return {
        "attributes": list(model.attribute_names),
        "n_observations": model.n_observations,
        "eigenvalues": model.eigenvalues.tolist(),
        "variance_fraction": model.variance_fraction.tolist(),
        # column-major: components[k] is the unit eigenvector of PC k+1
        "components": model.components.T.tolist(),
        "means": model.column_means.tolist(),
        "stds": model.column_stds.tolist(),
        "correlation": model.correlation.tolist(),
    }


def model_from_json(obj: dict) -> PcaModel:
    try:
        arr = {k: np.asarray(obj[k], dtype=np.float64)
               for k in ("eigenvalues", "variance_fraction", "components", "means", "stds",
                         "correlation")}
        names = tuple(obj["attributes"])
        n_obs = int(obj["n_observations"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed PCA model JSON ({exc})") from None
    n = len(names)
    if arr["components"].shape != (n, n) or arr["correlation"].shape != (n, n):
        raise ValidationError("PCA model JSON has inconsistent shapes")
    model = PcaModel(names, arr["means"], arr["stds"], arr["eigenvalues"],
                     np.ascontiguousarray(arr["components"].T), arr["variance_fraction"],
                     arr["correlation"], n_obs)
    for a in (model.column_means, model.column_stds, model.eigenvalues, model.components,
              model.variance_fraction, model.correlation):
        a.setflags(write=False)
    return model


def write_coefficients_tsv(path: str | Path, names: Sequence[str], coef, loading=None) -> None:
    """Coefficient table with columns No., Attribute, Component Coefficient and optionally Loading."""
    header = ["No.", "Attribute", "Component Coefficient"]
    if loading is not None:
        header.append("Loading")
    rows = []
    for i, name in enumerate(names):
        row = [i + 1, name, float(coef[i])]
        if loading is not None:
            row.append(float(loading[i]))
        rows.append(row)
    write_tsv(path, header, rows)


def read_lexicon(path: str | Path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        words = [line.strip() for line in fh]
    return [w for w in words if w]
