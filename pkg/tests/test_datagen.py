import math

import numpy as np
import pytest

from marginloss.data import Dataset, read_csv, read_table, write_csv, write_table
from marginloss.datagen import Contamination, FeatureLaw, GenConfig, generate, load_config, streams
from marginloss.distributions import GAUSSIAN, LOGISTIC
from marginloss.errors import DomainError, EmptyDatasetError, LabelError, ParameterError


class TestGenerate:
    def test_null_model_balanced(self):
        # pooled over 20 seeds; a single seed is a 3-sigma event 0.3% of the time
        n, seeds = 20000, range(20)
        hits = sum(int(np.sum(generate(GenConfig(n=n, beta0=(0.0, 0.0), seed=s)).y == 1)) for s in seeds)
        total = n * len(seeds)
        assert abs(hits / total - 0.5) <= 3 * math.sqrt(0.25 / total)

    def test_same_seed_same_bytes(self):
        cfg = GenConfig(n=500, beta0=(1.0, -0.5), feature_law="two_cluster", seed=42,
                        contamination={"label_flip_rate": 0.1, "leverage_rate": 0.05, "leverage_scale": 5})
        a, b = generate(cfg), generate(cfg)
        assert a.X.tobytes() == b.X.tobytes()
        assert a.y.tobytes() == b.y.tobytes()

    def test_different_seed_differs(self):
        a = generate(GenConfig(n=50, beta0=(1.0,), seed=1))
        b = generate(GenConfig(n=50, beta0=(1.0,), seed=2))
        assert not np.array_equal(a.X, b.X)

    def test_flip_rate(self):
        n = 20000
        cfg = GenConfig(n=n, beta0=(0.5, -1, 0.25), seed=3, contamination=Contamination(label_flip_rate=0.1))
        d, info = generate(cfg, return_info=True)
        count = int(info.flipped.sum())
        assert abs(count - 0.1 * n) <= 3 * math.sqrt(0.1 * 0.9 * n)
        assert np.array_equal(d.y[info.flipped], -info.clean_y[info.flipped])
        assert np.array_equal(d.y[~info.flipped], info.clean_y[~info.flipped])

    def test_contamination_leaves_features_and_clean_labels(self):
        base = GenConfig(n=300, beta0=(1.0, 1.0), seed=8)
        dirty = GenConfig(n=300, beta0=(1.0, 1.0), seed=8,
                          contamination=Contamination(label_flip_rate=0.3, leverage_rate=0.0))
        a, ia = generate(base, return_info=True)
        b, ib = generate(dirty, return_info=True)
        assert np.array_equal(a.X, b.X)
        assert np.array_equal(ia.clean_y, ib.clean_y)

    def test_leverage(self):
        cfg = GenConfig(n=1000, beta0=(1.0,), seed=4,
                        contamination=Contamination(leverage_rate=0.2, leverage_scale=10.0))
        d, info = generate(cfg, return_info=True)
        clean = generate(GenConfig(n=1000, beta0=(1.0,), seed=4))
        assert np.allclose(d.X[info.leveraged], 10 * clean.X[info.leveraged])
        assert np.array_equal(d.X[~info.leveraged], clean.X[~info.leveraged])

    @pytest.mark.parametrize("law", list(FeatureLaw))
    def test_feature_laws(self, law):
        d = generate(GenConfig(n=20000, beta0=(0.0, 0.0), feature_law=law, seed=5))
        if law is FeatureLaw.UNIFORM_PM1:
            assert d.X.min() >= -1 and d.X.max() <= 1
            assert np.var(d.X) == pytest.approx(1 / 3, abs=0.02)
        elif law is FeatureLaw.TWO_CLUSTER:
            assert np.var(d.X) == pytest.approx(2.0, abs=0.1)
            assert np.mean(np.abs(d.X)) > 1.0
        else:
            assert np.var(d.X) == pytest.approx(1.0, abs=0.05)

    @pytest.mark.parametrize("link", [LOGISTIC, GAUSSIAN], ids=["logistic", "gaussian"])
    def test_conditional_probability_in_bins(self, link):
        n = 100000
        d, info = generate(GenConfig(n=n, beta0=(1.2,), feature_law="uniform_pm1", link=link, seed=6),
                           return_info=True)
        x = d.X[:, 0]
        edges = np.linspace(-1, 1, 11)
        for lo, hi in zip(edges[:-1], edges[1:]):
            inside = (x >= lo) & (x < hi)
            k = inside.sum()
            observed = np.mean(d.y[inside] == 1)
            expected = np.mean(info.prob[inside])
            # binomial 3-sigma plus the within-bin spread of G around its mean
            sigma = math.sqrt(expected * (1 - expected) / k)
            assert abs(observed - expected) <= 3 * sigma
            assert abs(expected - link.cdf(1.2 * (lo + hi) / 2)) < 0.01

    def test_streams_are_independent_generators(self):
        a, b, c = streams(0)
        assert a.random() != b.random()


class TestConfig:
    def test_round_trip(self, tmp_path):
        cfg = GenConfig(n=10, beta0=(1, 2), feature_law="uniform_pm1", link="gaussian", seed=3,
                        contamination={"label_flip_rate": 0.2})
        path = tmp_path / "gen.json"
        import json
        path.write_text(json.dumps(cfg.to_dict()))
        assert load_config(path) == cfg

    @pytest.mark.parametrize("bad", [
        {"n": 0, "beta0": [1]},
        {"n": 5, "beta0": []},
        {"n": 5, "beta0": [1], "feature_law": "cauchy"},
        {"n": 5, "beta0": [1], "contamination": {"label_flip_rate": 1.5}},
        {"n": 5, "beta0": [1], "seed": -1},
        {"n": 5, "beta0": [1], "colour": "red"},
    ])
    def test_invalid(self, bad):
        with pytest.raises((ParameterError, ValueError)):
            GenConfig.from_dict(bad)


class TestDataset:
    def test_read_only(self):
        d = Dataset(np.zeros((3, 2)), np.array([1, -1, 1]))
        with pytest.raises(ValueError):
            d.X[0, 0] = 1.0

    def test_validation(self):
        with pytest.raises(EmptyDatasetError):
            Dataset(np.zeros((0, 2)), np.zeros(0))
        with pytest.raises(LabelError):
            Dataset(np.zeros((2, 1)), np.array([0, 1]))
        with pytest.raises(DomainError):
            Dataset(np.array([[np.nan], [1.0]]), np.array([1, -1]))
        with pytest.raises(ParameterError):
            Dataset(np.zeros((2, 2)), np.array([1, -1, 1]))


class TestCsv:
    def test_round_trip(self, tmp_path):
        d = generate(GenConfig(n=40, beta0=(0.3, -0.7), seed=2))
        write_csv(tmp_path / "d.csv", d, comment={"seed": 2})
        back = read_csv(tmp_path / "d.csv")
        assert np.array_equal(back.X, d.X)
        assert np.array_equal(back.y, d.y)

    def test_zero_one_labels(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("x,y\n0.5,0\n-1,1\n")
        d = read_csv(p)
        assert d.y.tolist() == [-1, 1]
        assert d.feature_names == ("x",)

    def test_errors(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("y,x\n")
        with pytest.raises(EmptyDatasetError):
            read_csv(p)
        p.write_text("a,b\n1,2\n")
        with pytest.raises(ParameterError):
            read_csv(p)
        p.write_text("y,x\n2,1\n")
        with pytest.raises(LabelError):
            read_csv(p)

    def test_table_round_trip(self, tmp_path):
        v = np.array([0.1, 1 / 3, -2e-300])
        write_table(tmp_path / "t.tsv", ["a"], [v], comment={"k": 1}, delimiter="\t")
        header, arr = read_table(tmp_path / "t.tsv", delimiter="\t")
        assert header == ["a"]
        assert np.array_equal(arr[:, 0], v)
