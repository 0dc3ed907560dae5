import json
import shutil

import pytest

from meaningspace import corpus, io, pipeline
from meaningspace.cli import main
from meaningspace.errors import NumericalError

from conftest import DATA, GOLDEN

STAGES = ("rig", "pca", "select", "group", "extremes", "scores")


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def built(tmp_path):
    """An output directory with every stage run on the bundled corpus."""
    out = tmp_path / "out"
    assert run("stats", "--input", DATA, "--out", out) == 0
    assert run("rig", "--input", DATA, "--out", out, "--top-words", 20) == 0
    for stage in STAGES[1:]:
        assert run(stage, "--out", out) == 0
    return out


def checksums(out):
    return {p.relative_to(out).as_posix(): io.sha256_file(p)
            for p in sorted(out.rglob("*")) if p.is_file()}


@pytest.mark.parametrize("name", sorted(p.name for p in (GOLDEN / "stats").glob("*.tsv")))
def test_stats_match_golden(built, name):
    assert (built / "stats" / name).read_bytes() == (GOLDEN / "stats" / name).read_bytes()


def test_pipeline_outputs(built):
    sel = io.read_json(built / "selection.json")
    assert (sel["kaiser"]["m"], sel["broken_stick"]["m"], sel["pca_cn"]["m"]) == (3, 1, 3)
    assert "informative_attributes" in sel["double_kaiser"]
    for k in (1, 2, 3):
        for g in ("positive", "zero", "negative"):
            assert (built / f"groups/threshold/pc{k:03d}_{g}.tsv").is_file()
        rep = io.read_json(built / f"extremes/pc{k:03d}.json")
        assert len(rep["positive"]["categories"]) == 10
    assert not (built / "groups/threshold/pc004_zero.tsv").exists()
    header = (built / "scores/category_coordinates.tsv").read_text().splitlines()[0]
    assert header == "category\tPC1\tPC2\tPC3"
    assert len(io.read_json(built / "top_words.json")) == 12
    model = io.model_from_json(io.read_json(built / "pca.json"))
    assert model.n_attributes == 12
    assert sum(1 for _ in (built / "pca/coefficients").glob("pc*.tsv")) == 12


def test_rerun_is_cached_and_force_recomputes(built, caplog):
    before = checksums(built)
    mtime = (built / "pca.json").stat().st_mtime_ns
    assert run("pca", "--out", built, "-v") == 0
    assert (built / "pca.json").stat().st_mtime_ns == mtime
    assert run("pca", "--out", built, "--force") == 0
    assert (built / "pca.json").stat().st_mtime_ns != mtime
    assert checksums(built) == before


def test_step_fit_grouping(built):
    assert run("group", "--out", built, "--method", "step-fit", "--pc", 2) == 0
    summary = io.read_json(built / "groups/step-fit/summary.json")
    assert [row["pc"] for row in summary["pcs"]] == [2]
    row = summary["pcs"][0]
    assert row["positive"] + row["zero"] + row["negative"] == 12


def test_parameter_change_reruns_stage(built):
    assert run("group", "--out", built, "--pcs", 1) == 0
    assert [r["pc"] for r in io.read_json(built / "groups/threshold/summary.json")["pcs"]] == [1]
    # outputs of the previous parameter set are removed
    assert not (built / "groups/threshold/pc002_zero.tsv").exists()


def test_different_input_is_rejected(built, tmp_path, capsys):
    other = tmp_path / "other.jsonl"
    lines = DATA.read_text().splitlines()
    other.write_text("\n".join(lines[:-1]) + "\n")
    assert run("rig", "--input", other, "--out", built) == 2
    assert "different input" in capsys.readouterr().err
    assert run("rig", "--input", other, "--out", built, "--force") == 0
    assert not (built / "pca.json").exists()


def test_tampered_artifact_is_rejected(built, capsys):
    rig_path = built / "rig.tsv"
    text = rig_path.read_text()
    rig_path.write_text(text.replace("0.1", "0.2", 1))
    assert rig_path.read_text() != text
    assert run("pca", "--out", built, "--force") == 2
    assert "checksum" in capsys.readouterr().err


def test_stale_downstream_is_rejected(built, capsys):
    # pca.json recorded against a rig.tsv that is no longer there
    man = json.loads((built / "manifest.json").read_text())
    man["stages"]["pca"]["upstream"]["rig.tsv"] = "0" * 64
    (built / "manifest.json").write_text(json.dumps(man))
    assert run("extremes", "--out", built, "--force") == 2
    assert "different rig.tsv" in capsys.readouterr().err


def test_missing_prerequisite(tmp_path, capsys):
    assert run("pca", "--out", tmp_path / "empty") == 2
    assert "run `meaningspace rig`" in capsys.readouterr().err
    out = tmp_path / "half"
    assert run("rig", "--input", DATA, "--out", out) == 0
    assert run("select", "--out", out) == 2
    assert "meaningspace pca" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["rig", "--out", "X"],                              # no input
    ["rig", "--input", "nope.jsonl", "--out", "X"],    # missing file
    ["group", "--out", "X", "--pcs", "0"],
    ["group", "--out", "X", "--zero-halfwidth", "-1"],
    ["select", "--out", "X", "--condition-number", "1"],
])
def test_validation_errors_exit_2(tmp_path, argv):
    argv = [str(tmp_path / "o") if a == "X" else a for a in argv]
    assert main(argv) == 2


def test_pc_out_of_range(built, capsys):
    assert run("group", "--out", built, "--pc", 13) == 2
    assert run("scores", "--out", built, "--pcs", 99) == 2


def test_numerical_failure_exit_3(built, monkeypatch, capsys):
    def boom(*a, **k):
        raise NumericalError("Jacobi did not converge (residual 1e-3)")
    monkeypatch.setattr(pipeline.pca, "fit", boom)
    assert run("pca", "--out", built, "--force") == 3
    assert "residual" in capsys.readouterr().err


def test_tsv_matrix_input_matches_corpus(built, tmp_path):
    freq = corpus.build_frequency_matrix(corpus.read_jsonl(DATA))
    mat = tmp_path / "freq.tsv"
    io.write_frequency_tsv(freq, mat)
    out = tmp_path / "m"
    assert run("rig", "--input", mat, "--format", "tsv-matrix", "--out", out) == 0
    assert (out / "rig.tsv").read_bytes() == (built / "rig.tsv").read_bytes()
    assert run("stats", "--input", mat, "--format", "tsv-matrix", "--out", out) == 0
    for name in ("words_per_category.tsv", "categories_per_word.tsv"):
        assert (out / "stats" / name).read_bytes() == (built / "stats" / name).read_bytes()
    assert not (out / "stats/words_per_text.tsv").exists()


def test_tsv_matrix_needs_sidecar(built, tmp_path, capsys):
    mat = tmp_path / "lonely.tsv"
    shutil.copy(built / "rig.tsv", mat)
    assert run("rig", "--input", mat, "--format", "tsv-matrix", "--out", tmp_path / "o") == 2
    assert "sidecar" in capsys.readouterr().err


def test_tsv_rig_input_round_trips(built, tmp_path):
    src = tmp_path / "given_rig.tsv"
    shutil.copy(built / "rig.tsv", src)
    out = tmp_path / "r"
    assert run("rig", "--input", src, "--format", "tsv-rig", "--out", out) == 0
    assert run("pca", "--out", out) == 0
    assert (out / "rig.tsv").read_bytes() == (built / "rig.tsv").read_bytes()
    assert (out / "pca.json").read_bytes() == (built / "pca.json").read_bytes()
    assert run("stats", "--input", src, "--format", "tsv-rig", "--out", out) == 2


def test_lexicon_restricts_vocabulary(tmp_path):
    lex = tmp_path / "lex.txt"
    words = [f"a{i:03d}" for i in range(60)] + [f"b{i:03d}" for i in range(60)] + ["zzz-absent"]
    lex.write_text("\n".join(words) + "\n")
    out = tmp_path / "lex"
    assert run("rig", "--input", DATA, "--out", out, "--lexicon", lex) == 0
    rm = io.read_rig_tsv(out / "rig.tsv")
    assert set(rm.words) <= set(words)
    assert len(rm.words) == 120
    assert run("stats", "--input", DATA, "--out", out, "--lexicon", lex) == 0
    assert io.read_json(out / "stats/stats.json")["n_words"] == 120
    # changing the lexicon is a different input
    assert run("rig", "--input", DATA, "--out", out) == 2
