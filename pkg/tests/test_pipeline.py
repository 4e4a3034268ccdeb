import csv
import itertools
import re

import numpy as np
import pytest
from sklearn.base import clone

from lus_dtcwt.imaging import save_pgm
from lus_dtcwt.pipeline import (FAMILIES, ClinicalFeatures, DtcwtFeatureExtractor, FeatureConfig,
                                FeatureTable, ManifestError, build_dataset, extract_features,
                                feature_names, read_feature_csv, read_manifest, write_feature_csv)

PER_FAMILY = {"stat": 5, "glcm": 30, "glrlm": 44, "lbp": 10}


def _expected_length(levels, lowpass, families):
    return levels * (7 if lowpass else 6) * 2 * sum(PER_FAMILY[f] for f in families)


class TestFeatureNames:
    def test_default_count(self):
        assert len(feature_names()) == 1246

    def test_without_lowpass(self):
        assert len(feature_names(FeatureConfig(include_lowpass=False))) == 1068

    def test_format_and_uniqueness(self):
        names = feature_names(FeatureConfig(levels=2))
        assert len(set(names)) == len(names) == 2492
        pat = re.compile(r"^L[12]_(lp|p15|p45|p75|m75|m45|m15)_(top|bot)_"
                         r"(stat_\w+|glcm\d\d_\w+|glrlm\d{3}_\w+|lbp_bin\d)$")
        assert all(pat.match(n) for n in names)
        assert names[0] == "L1_lp_top_stat_mean"
        assert names[1245] == "L1_m15_bot_lbp_bin9"

    @pytest.mark.parametrize("levels,lowpass", list(itertools.product([1, 2, 3], [True, False])))
    def test_all_toggle_combinations(self, levels, lowpass):
        for r in range(1, 5):
            for fams in itertools.combinations(FAMILIES, r):
                cfg = FeatureConfig(levels, lowpass, fams)
                assert len(feature_names(cfg)) == _expected_length(levels, lowpass, fams)

    def test_family_order_canonical(self):
        a = FeatureConfig(families=("lbp", "stat"))
        b = FeatureConfig(families=("stat", "lbp"))
        assert a == b and feature_names(a) == feature_names(b)

    def test_bad_config(self):
        for kw in ({"levels": 0}, {"families": ("fft",)}, {"families": ()},
                   {"entropy": "renyi"}):
            with pytest.raises(ValueError):
                FeatureConfig(**kw)


class TestExtractFeatures:
    def test_vector_matches_names(self):
        img = np.random.default_rng(0).random((64, 48))
        for cfg in (FeatureConfig(), FeatureConfig(levels=2, include_lowpass=False,
                                                   families=("glcm", "lbp"))):
            v = extract_features(img, cfg)
            assert v.names == feature_names(cfg)
            assert v.values.shape == (len(v.names),)
            assert np.all(np.isfinite(v.values))

    def test_deterministic(self):
        img = np.random.default_rng(1).random((64, 64))
        a = extract_features(img).values
        b = extract_features(img.copy()).values
        assert a.tobytes() == b.tobytes()

    def test_constant_image_zero_dispersion(self):
        v = extract_features(np.full((64, 64), 0.4), FeatureConfig(levels=2))
        for name, value in zip(v.names, v.values):
            if re.search(r"(stat_(sd|skewness|kurtosis)|glcm\d\d_(contrast|entropy))$", name):
                assert value == 0.0, name

    def test_dump_subimages(self, tmp_path):
        extract_features(np.random.default_rng(2).random((32, 32)), dump_dir=tmp_path / "d")
        assert len(list((tmp_path / "d").glob("L1_*.pgm"))) == 7

    def test_too_small(self):
        with pytest.raises(ValueError):
            extract_features(np.zeros((4, 4)), FeatureConfig(levels=3))


def _write_dataset(tmp_path, n=10, labels=("Normal", "CLD"), roi=True):
    rng = np.random.default_rng(7)
    rows = []
    for i in range(n):
        img = rng.random((60, 50)) * 0.5
        img[2:5, 2:6] = 1.0
        save_pgm(img, tmp_path / f"img{i}.pgm")
        row = [f"img{i}.pgm", f"s{i % 4}", f"v{i}", labels[i % len(labels)], 30 + i, 32 + i, i]
        rows.append(row + ([0, 0, 9, 9] if roi else ["", "", "", ""]))
    man = tmp_path / "manifest.csv"
    with open(man, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["image_path", "subject_id", "video_id", "label", "ga_weeks", "cgats_weeks",
                    "dol_days", "roi_top", "roi_left", "roi_bottom", "roi_right"])
        w.writerows(rows)
    return man


class TestManifest:
    def test_build_dataset(self, tmp_path):
        man = _write_dataset(tmp_path)
        cfg = FeatureConfig(families=("stat",))
        table = build_dataset(man, cfg)
        assert len(table) == 10 and table.X.shape == (10, len(feature_names(cfg)))
        assert list(table.labels) == ["Normal", "CLD"] * 5
        np.testing.assert_array_equal(table.clinical[:, 2], np.arange(10))
        assert table.classes == ("Normal", "CLD")

    def test_parallel_matches_sequential(self, tmp_path):
        man = _write_dataset(tmp_path, n=6)
        cfg = FeatureConfig(families=("stat", "lbp"))
        a = build_dataset(man, cfg)
        b = build_dataset(man, cfg, n_jobs=2)
        assert a.X.tobytes() == b.X.tobytes()
        assert list(a.subject_ids) == list(b.subject_ids)

    def test_one_bad_path(self, tmp_path):
        man = _write_dataset(tmp_path)
        (tmp_path / "img3.pgm").unlink()
        with pytest.raises(ManifestError) as exc:
            build_dataset(man, FeatureConfig(families=("stat",)))
        assert [row for row, _ in exc.value.problems] == [5]
        assert "img3.pgm" in str(exc.value)

    def test_all_bad_rows_listed(self, tmp_path):
        man = _write_dataset(tmp_path, n=4)
        lines = man.read_text().splitlines()
        lines[1] = lines[1].replace("Normal", "Pneumonia")
        lines[3] = lines[3].replace(",0,0,9,9", ",0,0,,")
        lines[4] = lines[4].replace(",33,", ",-1,")
        man.write_text("\n".join(lines) + "\n")
        with pytest.raises(ManifestError) as exc:
            read_manifest(man)
        assert [row for row, _ in exc.value.problems] == [2, 4, 5]

    def test_empty_manifest(self, tmp_path):
        man = tmp_path / "m.csv"
        man.write_text("image_path,subject_id,video_id,label,ga_weeks,cgats_weeks,dol_days\n")
        with pytest.raises(ValueError, match="no records"):
            read_manifest(man)

    def test_missing_columns(self, tmp_path):
        man = tmp_path / "m.csv"
        man.write_text("image_path,label\nx.pgm,Normal\n")
        with pytest.raises(ManifestError):
            read_manifest(man)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="nothere.csv"):
            read_manifest(tmp_path / "nothere.csv")

    def test_roi_optional(self, tmp_path):
        rows = read_manifest(_write_dataset(tmp_path, n=2, roi=False))
        assert all(r.roi is None for r in rows)
        assert rows[0].image_path == tmp_path / "img0.pgm"

    def test_roi_outside_image_is_row_error(self, tmp_path):
        man = _write_dataset(tmp_path, n=2)
        man.write_text(man.read_text().replace(",0,0,9,9", ",0,0,99,9"))
        with pytest.raises(ManifestError) as exc:
            build_dataset(man, FeatureConfig(families=("stat",)))
        assert [row for row, _ in exc.value.problems] == [2, 3]


class TestFeatureTable:
    def _table(self, n=6):
        rng = np.random.default_rng(0)
        return FeatureTable(("a", "b"), rng.random((n, 2)), rng.random((n, 3)) * 10,
                            ["Normal", "CLD", "CON"] * (n // 3), [f"s{i}" for i in range(n)])

    def test_csv_round_trip(self, tmp_path):
        t = self._table()
        write_feature_csv(t, tmp_path / "f.csv")
        header = (tmp_path / "f.csv").read_text().splitlines()[0].split(",")
        assert header == ["a", "b", "ga_weeks", "cgats_weeks", "dol_days", "label", "subject_id"]
        back = read_feature_csv(tmp_path / "f.csv")
        assert back.X.tobytes() == t.X.tobytes()
        assert back.clinical.tobytes() == t.clinical.tobytes()
        assert list(back.labels) == list(t.labels)

    def test_records_and_subset(self):
        t = self._table()
        back = FeatureTable.from_records(t.records())
        np.testing.assert_array_equal(back.X, t.X)
        sub = t.subset([0, 2])
        assert len(sub) == 2 and list(sub.labels) == ["Normal", "CON"]

    def test_validation(self):
        with pytest.raises(ValueError):
            FeatureTable(("a",), np.zeros((2, 1)), np.zeros((2, 3)), ["Normal", "Flu"], ["s", "t"])
        with pytest.raises(ValueError):
            FeatureTable(("a",), np.zeros((2, 1)), np.zeros((2, 3)), ["Normal", "CLD"], ["s", ""])
        with pytest.raises(ValueError):
            FeatureTable(("a", "b"), np.zeros((2, 1)), np.zeros((2, 3)), ["Normal"] * 2, ["s"] * 2)
        with pytest.raises(ValueError):
            FeatureTable.from_records([])
        with pytest.raises(ValueError):
            ClinicalFeatures(30.0, float("nan"), 1.0)

    def test_not_a_feature_csv(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_feature_csv(p)


class TestExtractorEstimator:
    def test_transform(self):
        rng = np.random.default_rng(0)
        imgs = [rng.random((32, 32)) for _ in range(3)]
        ext = DtcwtFeatureExtractor(families=("stat", "lbp"))
        X = ext.fit_transform(imgs)
        assert X.shape == (3, 7 * 2 * 15)
        assert list(ext.get_feature_names_out()) == list(feature_names(ext.config_))
        assert clone(ext).get_params()["families"] == ("stat", "lbp")
