import math

import numpy as np
import pytest

from quartermask.evaluation import (
    EvalRow,
    ExperimentReport,
    evaluate_mask,
    experiment_stepwise,
    experiment_table,
    load_corpus,
    psnr,
)
from quartermask.mask import make_random, make_regular
from quartermask.optimize import OptimizerConfig
from quartermask.pnm import write_pgm


class TestPsnr:
    def test_identical(self, rng):
        img = rng.uniform(0, 255, (8, 8))
        assert psnr(img, img) == math.inf

    def test_full_scale_difference(self):
        assert psnr(np.zeros((4, 4)), np.full((4, 4), 255.0)) == 0.0

    def test_unit_difference(self):
        # 10 * log10(255 ** 2)
        assert psnr(np.zeros((4, 4)), np.ones((4, 4))) == pytest.approx(48.1308, abs=1e-3)

    def test_symmetric(self, rng):
        a, b = rng.uniform(0, 255, (2, 10, 10))
        assert psnr(a, b) == psnr(b, a)

    def test_crop_invariant(self, rng):
        a = np.full((10, 10), 3.0)
        b = a + rng.choice([-2.0, 2.0], size=a.shape)
        assert psnr(a, b) == pytest.approx(psnr(a[2:8, 1:9], b[2:8, 1:9]))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            psnr(np.zeros((2, 2)), np.zeros((2, 3)))


def constant_corpus():
    return [("flat", np.full((16, 16), 80.0)), ("flat2", np.full((12, 20), 10.0))]


class TestEvaluateMask:
    @pytest.mark.parametrize("alg", ["nearest", "linear", "fsr"])
    def test_constant_corpus(self, alg):
        ev = evaluate_mask(make_random(4, 4, 0), constant_corpus(), alg)
        assert [r.psnr_db for r in ev.rows] == [math.inf, math.inf]

    def test_deterministic(self, small_corpus_path):
        corpus = load_corpus(small_corpus_path)
        a = evaluate_mask(make_random(8, 8, 1), corpus, "linear")
        b = evaluate_mask(make_random(8, 8, 1), corpus, "linear")
        assert a == b

    def test_mean_is_arithmetic(self, small_corpus_path):
        ev = evaluate_mask(make_random(8, 8, 1), load_corpus(small_corpus_path), "nearest")
        assert ev.mean == pytest.approx(sum(r.psnr_db for r in ev.rows) / len(ev.rows))

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            evaluate_mask(make_random(4, 4, 0), [], "nearest")

    def test_odd_images_are_cropped(self):
        corpus = [("odd", np.arange(7 * 9, dtype=float).reshape(7, 9))]
        ev = evaluate_mask(make_random(2, 2, 0), corpus, "nearest")
        assert np.isfinite(ev.rows[0].psnr_db)

    def test_threads_give_same_rows(self, small_corpus_path):
        corpus = load_corpus(small_corpus_path)
        a = evaluate_mask(make_random(8, 8, 2), corpus, "fsr", threads=1)
        b = evaluate_mask(make_random(8, 8, 2), corpus, "fsr", threads=3)
        assert a == b

    def test_label_does_not_change_numbers(self, small_corpus_path):
        corpus = load_corpus(small_corpus_path)
        m = make_random(8, 8, 2)
        a = evaluate_mask(m, corpus, "linear", mask_id="x")
        b = evaluate_mask(m.with_grid(m.grid, label="other"), corpus, "linear", mask_id="y")
        assert [r.psnr_db for r in a.rows] == [r.psnr_db for r in b.rows]


class TestCorpus:
    def test_sorted_and_limited(self, tmp_path):
        for name in ["c", "a", "b"]:
            write_pgm(tmp_path / f"{name}.pgm", np.zeros((4, 4)))
        (tmp_path / "notes.txt").write_text("x")
        assert [n for n, _ in load_corpus(tmp_path)] == ["a", "b", "c"]
        assert [n for n, _ in load_corpus(tmp_path, limit=2)] == ["a", "b"]

    def test_empty_dir(self, tmp_path):
        with pytest.raises(ValueError):
            load_corpus(tmp_path)

    def test_odd_crop(self, tmp_path):
        write_pgm(tmp_path / "o.pgm", np.zeros((5, 7)))
        assert load_corpus(tmp_path)[0][1].shape == (4, 6)


class TestReport:
    def report(self):
        rows = [
            EvalRow("random", "fsr", "a", 30.0),
            EvalRow("random", "fsr", "b", 32.0),
            EvalRow("free", "fsr", "a", 31.0),
            EvalRow("free", "fsr", "b", 34.0),
            EvalRow("free", "nearest", "a", 20.0),
        ]
        return ExperimentReport(rows, baseline="random")

    def test_aggregates(self):
        agg = self.report().aggregates()
        assert agg == [
            ("random", "fsr", 31.0, 0.0),
            ("free", "fsr", 32.5, 1.5),
            ("free", "nearest", 20.0, None),
        ]

    def test_csv(self):
        rep = self.report()
        assert rep.rows_csv().splitlines()[:2] == [
            "mask,algorithm,image,psnr_db",
            "random,fsr,a,30.000000",
        ]
        assert rep.aggregates_csv().splitlines() == [
            "mask,algorithm,mean_psnr_db,gain_vs_baseline_db",
            "random,fsr,31.000000,0.000000",
            "free,fsr,32.500000,1.500000",
            "free,nearest,20.000000,",
        ]

    def test_infinite_rows_formatted(self):
        rep = ExperimentReport([EvalRow("m", "fsr", "a", math.inf)])
        assert rep.rows_csv().splitlines()[1] == "m,fsr,a,inf"


class TestExperiments:
    def test_table_cross_product(self, small_corpus_path):
        corpus = load_corpus(small_corpus_path)
        masks = [("regular", make_regular(8, 8)), ("random", make_random(8, 8, 0))]
        rep = experiment_table(masks, corpus, ["nearest", "linear"])
        assert len(rep.rows) == 2 * 2 * 3
        assert rep.gain("random", "linear") == 0.0
        single = evaluate_mask(masks[0][1], corpus, "linear")
        assert rep.mean("regular", "linear") == single.mean

    def test_stepwise_shares_start(self, small_corpus_path):
        corpus = load_corpus(small_corpus_path)
        start = make_random(32, 32, 0)
        variants = {
            "all": OptimizerConfig(seed=0, mode="fractional"),
            "8void": OptimizerConfig(seed=0, mode="fractional", enabled_kinds="8void"),
        }
        res = experiment_stepwise(start, variants, corpus, "nearest", num_steps=3)
        base = evaluate_mask(start, corpus, "nearest").mean
        for name in variants:
            assert len(res.curves[name]) == 4
            assert res.curves[name][0] == base
            assert res.masks[name][0] == start
        lines = res.curves_csv().splitlines()
        assert lines[0] == "variant,step,mean_psnr_db"
        assert lines[1].startswith("all,0,")
        assert isinstance(res.slope("all"), float)

    def test_stepwise_independent_starts(self, small_corpus_path):
        corpus = load_corpus(small_corpus_path, limit=1)
        starts = {"a": make_random(16, 16, 1), "b": make_random(16, 16, 2)}
        variants = {k: dict(seed=0, mode="fractional") for k in starts}
        res = experiment_stepwise(starts, variants, corpus, "nearest", num_steps=1)
        assert res.masks["a"][0] == starts["a"] and res.masks["b"][0] == starts["b"]
