import csv

import numpy as np
import pytest

from lus_dtcwt.cli import main
from lus_dtcwt.imaging import load_image
from lus_dtcwt.pipeline import read_feature_csv, write_feature_csv
from lus_dtcwt.synth import gaussian_table


@pytest.fixture(scope="module")
def small_synth(tmp_path_factory):
    """72 synthetic images (6 classes x 3 subjects x 4) and their features."""
    root = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--out", str(root / "data"), "--subjects-per-class", "3",
                 "--images-per-subject", "4", "--seed", "11"]) == 0
    feats = root / "features.csv"
    assert main(["extract", str(root / "data" / "manifest.csv"), "--out", str(feats)]) == 0
    return root / "data" / "manifest.csv", feats


@pytest.fixture
def gaussian_csv(tmp_path):
    path = tmp_path / "g.csv"
    write_feature_csv(gaussian_table(n_per_class=12, subjects_per_class=3, separation=4.0,
                                     seed=1), path)
    return path


class TestSynth:
    def test_counts_and_manifest(self, small_synth):
        manifest, _ = small_synth
        rows = list(csv.DictReader(open(manifest)))
        assert len(rows) == 72
        assert len({r["subject_id"] for r in rows}) == 18
        assert {r["label"] for r in rows} == {"Normal", "CLD", "CON", "PTX", "RDS", "TTN"}
        assert all(r["roi_bottom"] for r in rows)
        img = load_image(manifest.parent / rows[0]["image_path"])
        assert img.ndim == 2

    def test_clinical_ranges(self, small_synth):
        rows = list(csv.DictReader(open(small_synth[0])))
        dol = {c: [float(r["dol_days"]) for r in rows if r["label"] == c] for c in ("CLD", "RDS")}
        assert min(dol["CLD"]) > max(dol["RDS"])

    def test_same_seed_identical(self, tmp_path):
        for d in ("a", "b"):
            assert main(["synth", "--out", str(tmp_path / d), "--subjects-per-class", "1",
                         "--images-per-subject", "2", "--seed", "5"]) == 0
        files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*.*"))
        assert len(files) == 13
        for f in files:
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_different_seed_differs(self, tmp_path):
        for d, seed in (("a", "1"), ("b", "2")):
            main(["synth", "--out", str(tmp_path / d), "--subjects-per-class", "1",
                  "--images-per-subject", "1", "--seed", seed])
        a, b = (tmp_path / "a"), (tmp_path / "b")
        assert a.joinpath("manifest.csv").read_text().splitlines()[0] == \
            b.joinpath("manifest.csv").read_text().splitlines()[0]
        pa = sorted((a / "images").iterdir())[0]
        assert pa.read_bytes() != (b / "images" / pa.name).read_bytes()

    def test_bad_counts(self, tmp_path):
        assert main(["synth", "--out", str(tmp_path), "--subjects-per-class", "0"]) == 2

    def test_unwritable(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["synth", "--out", str(blocker / "sub")]) == 2


class TestExtract:
    def test_rows_and_header(self, small_synth):
        table = read_feature_csv(small_synth[1])
        assert len(table) == 72 and table.X.shape[1] == 1246

    def test_ten_rows_and_levels(self, small_synth, tmp_path):
        manifest = small_synth[0]
        lines = manifest.read_text().splitlines()
        short = manifest.parent / "short.csv"
        short.write_text("\n".join(lines[:11]) + "\n")
        out1, out2 = tmp_path / "l1.csv", tmp_path / "l2.csv"
        assert main(["extract", str(short), "--out", str(out1), "--families", "stat"]) == 0
        assert main(["extract", str(short), "--out", str(out2), "--families", "stat",
                     "--levels", "2"]) == 0
        h1 = out1.read_text().splitlines()[0].split(",")
        h2 = out2.read_text().splitlines()[0].split(",")
        assert len(out1.read_text().splitlines()) == 11
        assert len(h1) - 5 == 70 and len(h2) - 5 == 140

    def test_missing_manifest(self, tmp_path, capsys):
        missing = tmp_path / "nowhere.csv"
        assert main(["extract", str(missing), "--out", str(tmp_path / "o.csv")]) == 2
        assert str(missing) in capsys.readouterr().err

    def test_bad_row_nonzero(self, tmp_path, small_synth):
        manifest = small_synth[0]
        bad = manifest.parent / "bad.csv"
        lines = manifest.read_text().splitlines()
        lines[3] = lines[3].replace(".pgm", ".missing.pgm")
        bad.write_text("\n".join(lines[:6]) + "\n")
        assert main(["extract", str(bad), "--out", str(tmp_path / "o.csv")]) == 2

    def test_dump_subimages(self, tmp_path, small_synth):
        manifest = small_synth[0]
        one = manifest.parent / "one.csv"
        one.write_text("\n".join(manifest.read_text().splitlines()[:2]) + "\n")
        dump = tmp_path / "dump"
        assert main(["extract", str(one), "--out", str(tmp_path / "o.csv"), "--families", "stat",
                     "--dump-subimages", str(dump)]) == 0
        assert len(list(dump.rglob("*.pgm"))) == 7


class TestRun:
    def test_summary_and_reports(self, gaussian_csv, tmp_path, capsys):
        prefix = tmp_path / "rep"
        assert main(["run", str(gaussian_csv), "--cv", "loo", "--k", "5",
                     "--report", str(prefix)]) == 0
        out = capsys.readouterr().out
        assert "cv=loo k=5" in out and "accuracy=" in out
        assert (tmp_path / "rep.csv").exists() and (tmp_path / "rep.txt").exists()

    def test_rerun_identical(self, gaussian_csv, tmp_path):
        for name in ("a", "b"):
            assert main(["run", str(gaussian_csv), "--cv", "loso", "--k", "3",
                         "--priors", "proportional", "--report", str(tmp_path / name)]) == 0
        for ext in (".csv", ".txt"):
            assert (tmp_path / f"a{ext}").read_bytes() == (tmp_path / f"b{ext}").read_bytes()

    def test_manifest_input(self, small_synth, tmp_path, capsys):
        assert main(["run", str(small_synth[0]), "--cv", "loso", "--k", "15",
                     "--families", "stat,lbp", "--report", str(tmp_path / "m")]) == 0
        assert "n=72" in capsys.readouterr().out

    def test_single_subject_class(self, tmp_path, capsys):
        table = gaussian_table(n_per_class=6, subjects_per_class=2, seed=0)
        table.subject_ids[table.labels == "TTN"] = "TTN_only"
        path = tmp_path / "f.csv"
        write_feature_csv(table, path)
        assert main(["run", str(path), "--cv", "loso", "--report", str(tmp_path / "r")]) == 1
        assert "TTN" in capsys.readouterr().err

    def test_input_errors(self, tmp_path, gaussian_csv):
        assert main(["run", str(tmp_path / "none.csv")]) == 2
        assert main(["run", str(gaussian_csv), "--cv", "kfold"]) == 2
        junk = tmp_path / "junk.csv"
        junk.write_text("a,b\n1,2\n")
        assert main(["run", str(junk)]) == 2

    def test_config_file_and_override(self, gaussian_csv, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# experiment\ncv = loso\nk=4\npriors=proportional\n")
        assert main(["--config", str(cfg), "run", str(gaussian_csv),
                     "--report", str(tmp_path / "r")]) == 0
        assert "cv=loso k=4 priors=proportional" in capsys.readouterr().out
        assert main(["--config", str(cfg), "run", str(gaussian_csv), "--k", "2",
                     "--report", str(tmp_path / "r")]) == 0
        assert "cv=loso k=2" in capsys.readouterr().out

    def test_bad_config(self, gaussian_csv, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("colour=blue\n")
        assert main(["--config", str(cfg), "run", str(gaussian_csv)]) == 2
        cfg.write_text("cv=kfold\n")
        assert main(["--config", str(cfg), "run", str(gaussian_csv)]) == 2
        assert main(["--config", str(tmp_path / "none.cfg"), "run", str(gaussian_csv)]) == 2


class TestSweep:
    def test_curve_rows_and_max(self, gaussian_csv, tmp_path, capsys):
        out = tmp_path / "curve.csv"
        assert main(["sweep", str(gaussian_csv), "--k-max", "5", "--cv", "loso",
                     "--out", str(out)]) == 0
        rows = list(csv.reader(open(out)))[1:]
        assert [int(r[0]) for r in rows] == [1, 2, 3, 4, 5]
        best = max(float(r[1]) for r in rows)
        summary = capsys.readouterr().out
        best_k = int(summary.split("best_k=")[1].split()[0])
        assert main(["run", str(gaussian_csv), "--cv", "loso", "--k", str(best_k),
                     "--report", str(tmp_path / "r")]) == 0
        assert f"accuracy={best:.2f}%" in capsys.readouterr().out

    def test_synthetic_more_features_help(self, small_synth, tmp_path):
        out = tmp_path / "curve.csv"
        assert main(["sweep", str(small_synth[1]), "--k-max", "43", "--cv", "loso",
                     "--out", str(out)]) == 0
        acc = {int(k): float(a) for k, a in list(csv.reader(open(out)))[1:]}
        assert acc[43] >= acc[1]

    def test_eval_error_exit_code(self, tmp_path):
        table = gaussian_table(n_per_class=4, subjects_per_class=1, seed=0)
        path = tmp_path / "f.csv"
        write_feature_csv(table, path)
        assert main(["sweep", str(path), "--k-max", "2", "--cv", "loso",
                     "--out", str(tmp_path / "c.csv")]) == 1


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
    assert "synth" in capsys.readouterr().out


def test_no_command():
    assert main([]) == 2


def test_pixels_in_range(small_synth):
    rows = list(csv.DictReader(open(small_synth[0])))
    img = load_image(small_synth[0].parent / rows[-1]["image_path"])
    assert 0 <= img.min() and img.max() <= 1 and np.ptp(img) > 0
