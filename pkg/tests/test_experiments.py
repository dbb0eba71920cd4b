import re

import numpy as np
import pytest

from circular_hrr import experiments as ex
from circular_hrr.codec import Algebra


def small_cfg(**kw):
    base = dict(dims=(8, 32), ks=(1, 5), n_labels=50, trials=3, seed=4)
    base.update(kw)
    return ex.SweepConfig(**base)


def test_trial_seed_is_stable_and_distinct():
    a = ex.trial_seed(0, "chrr", 64, 5, 3)
    assert a == ex.trial_seed(0, Algebra.CHRR, 64, 5, 3)
    assert 0 <= a < 2 ** 64
    others = {ex.trial_seed(0, "hrr", 64, 5, 3), ex.trial_seed(1, "chrr", 64, 5, 3),
              ex.trial_seed(0, "chrr", 64, 5, 4), ex.trial_seed(0, "chrr", 32, 5, 3)}
    assert a not in others


def test_default_grid():
    assert ex.DEFAULT_DIMS == (1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)
    assert ex.DEFAULT_KS == (1, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50)


@pytest.mark.parametrize("kw", [dict(dims=(0,)), dict(ks=(0,)), dict(trials=0),
                                dict(ks=(51,), n_labels=50)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        small_cfg(**kw)


def test_retrieval_sweep_is_deterministic():
    cfg = small_cfg(trials=1)
    assert ex.run_retrieval_sweep(cfg) == ex.run_retrieval_sweep(cfg)


def test_retrieval_sweep_independent_of_threads():
    cfg = small_cfg()
    assert ex.run_retrieval_sweep(cfg, threads=1) == ex.run_retrieval_sweep(cfg, threads=4)


def test_retrieval_cells_are_ordered_by_key():
    res = ex.run_retrieval_sweep(small_cfg(algebras=("chrr", "hrr"), dims=(32, 8), ks=(5, 1)))
    keys = [(c.algebra, c.d, c.k) for c in res.cells]
    assert keys == sorted(keys)
    assert len(keys) == 8
    for c in res.cells:
        assert 0.0 <= c.mean <= 1.0 and c.std >= 0.0 and c.trials == 3


def test_single_label_cells_are_perfect():
    res = ex.run_retrieval_sweep(small_cfg(ks=(1,)))
    assert all(c.mean == 1.0 for c in res.cells)


def test_chrr_high_dimension_small_k():
    cfg = ex.SweepConfig(algebras=("chrr",), dims=(1024,), ks=(1, 5, 10), trials=20)
    res = ex.run_retrieval_sweep(cfg)
    assert all(c.mean >= 0.99 for c in res.cells)


def test_variance_sweep_single_label():
    cfg = ex.SweepConfig(dims=(64,), ks=(1,), trials=10)
    res = ex.run_variance_sweep(cfg)
    chrr = res.row("chrr", 1)
    assert chrr.mean == 1.0 and chrr.variance == 0.0 and chrr.count == 10
    assert res.row("hrr", 1).mean == pytest.approx(1.0, abs=1e-6)


def test_variance_sweep_needs_one_dimension():
    with pytest.raises(ValueError):
        ex.run_variance_sweep(small_cfg())


def test_variance_sweep_shape_and_threads():
    cfg = ex.SweepConfig(dims=(50,), ks=(1, 3, 7), trials=4)
    res = ex.run_variance_sweep(cfg)
    assert [(r.algebra, r.k) for r in res.rows] == [
        (a, k) for a in (Algebra.HRR, Algebra.CHRR, Algebra.HRR_PLAIN) for k in (1, 3, 7)]
    assert res == ex.run_variance_sweep(cfg, threads=3)
    assert all(r.variance >= 0 for r in res.rows)


def test_empty_grid_csv_has_header_only(tmp_path):
    path = ex.retrieval_csv(ex.RetrievalResult(), tmp_path / "e.csv")
    assert path.read_text() == "algebra,d,k,mean,std,trials\n"


def test_csv_round_trip_is_exact(tmp_path):
    res = ex.run_retrieval_sweep(small_cfg())
    path = ex.retrieval_csv(res, tmp_path / "r.csv", header="test header")
    assert path.read_text().startswith("# test header\n")
    again = ex.read_retrieval_csv(path)
    assert again == res
    for alg in ("hrr", "chrr"):
        assert again.means(alg) == res.means(alg)


def test_csv_bytes_deterministic(tmp_path):
    cfg = small_cfg()
    a = ex.retrieval_csv(ex.run_retrieval_sweep(cfg), tmp_path / "a.csv").read_bytes()
    b = ex.retrieval_csv(ex.run_retrieval_sweep(cfg, threads=2), tmp_path / "b.csv").read_bytes()
    assert a == b


def test_variance_csv(tmp_path):
    res = ex.run_variance_sweep(ex.SweepConfig(dims=(16,), ks=(1, 2), trials=2))
    lines = ex.variance_csv(res, tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "algebra,k,mean,variance,count"
    assert len(lines) == 1 + 6


def test_colormap_endpoints():
    assert ex.accuracy_color(0.0) == "#313695"
    assert ex.accuracy_color(0.5) == "#ffffbf"
    assert ex.accuracy_color(1.0) == "#a50026"
    assert ex.accuracy_color(2.0) == "#a50026"
    assert ex.accuracy_color(-1.0) == "#313695"


def test_heatmap_two_by_two_grid(tmp_path):
    res = ex.run_retrieval_sweep(small_cfg())
    csv_path, svg_path = ex.emit_heatmap(res, tmp_path / "out", header="hdr")
    svg = svg_path.read_text()
    assert csv_path.exists()
    assert svg.count("<!-- hdr -->") == 1
    panels = re.split(r'<g class="panel"', svg)[1:]
    assert len(panels) == 2
    for panel in panels:
        assert panel.count('<rect class="cell"') == 4


def test_heatmap_empty_grid():
    svg = ex.heatmap_svg(ex.RetrievalResult())
    assert "<rect" not in svg and svg.rstrip().endswith("</svg>")
