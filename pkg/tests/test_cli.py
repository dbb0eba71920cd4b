import json

import pytest

from circular_hrr import cli, codec, datasets, neural


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def synth(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    train, test = d / "train.txt", d / "test.txt"
    assert run("data", "synth", "--examples", 120, "--test-examples", 40, "--features", 60,
               "--labels", 6, "--k", 2, "--noise", 0.02, "--out", train, "--test-out", test) == 0
    return train, test


def test_int_list():
    assert cli.int_list("1,5,10") == [1, 5, 10]
    assert cli.int_list("1..4") == [1, 2, 3, 4]
    assert cli.int_list("1,5..7") == [1, 5, 6, 7]


def test_usage_errors_exit_one(capsys, tmp_path):
    assert run() == 1
    assert run("bogus") == 1
    assert run("codebook", "gen", "--bogus", 1) == 1
    assert run("codebook", "gen") == 1
    assert run("exp", "retrieval", "--ks", "a,b", "--out-dir", tmp_path) == 1
    assert "circhrr" in capsys.readouterr().err


def test_chrr_half_odd_hidden_is_usage_error(synth, tmp_path):
    assert run("train", "--head", "chrr-half", "--hidden", 769, "--data", synth[0],
               "--out", tmp_path / "m.bin") == 1


def test_runtime_errors_exit_two(tmp_path, capsys):
    assert run("data", "stats", "--data", tmp_path / "missing.txt") == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 2\n7 0:1\n")
    assert run("data", "stats", "--data", bad) == 2
    assert "line 2" in capsys.readouterr().err


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"dims": [4, 8], "ks": "1,2", "labels": 20, "trials": 2}))
    assert run("exp", "retrieval", "--config", cfg, "--out-dir", tmp_path / "a") == 0
    lines = (tmp_path / "a" / "retrieval.csv").read_text().splitlines()
    assert len(lines) == 2 + 2 * 2 * 2
    # flags win over the file
    assert run("exp", "retrieval", "--config", cfg, "--dims", 4, "--out-dir", tmp_path / "b") == 0
    assert len((tmp_path / "b" / "retrieval.csv").read_text().splitlines()) == 2 + 2 * 2
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert run("exp", "retrieval", "--config", cfg, "--out-dir", tmp_path / "c") == 1


def test_resolved_config_logged(tmp_path, capsys):
    run("codebook", "gen", "--dim", 4, "--labels", 3, "--seed", 5, "--out", tmp_path / "b.bin")
    err = capsys.readouterr().err
    assert "seed=5" in err and '"dim": 4' in err


def test_codebook_gen_matches_library(tmp_path):
    out = tmp_path / "b.bin"
    assert run("codebook", "gen", "--algebra", "hrr", "--dim", 16, "--labels", 9,
               "--seed", 3, "--out", out) == 0
    assert codec.load_codebook(out) == codec.generate_codebook("hrr", 16, 9, 3)


def test_exp_retrieval_threads_do_not_change_bytes(tmp_path):
    args = ("exp", "retrieval", "--dims", "4,16", "--ks", "1,3", "--labels", 30, "--trials", 3)
    assert run(*args, "--out-dir", tmp_path / "t1") == 0
    assert run(*args, "--threads", 4, "--out-dir", tmp_path / "t4") == 0
    for name in ("retrieval.csv", "retrieval.svg"):
        a = (tmp_path / "t1" / name).read_bytes()
        assert a == (tmp_path / "t4" / name).read_bytes()
    assert (tmp_path / "t1" / "retrieval.csv").read_text().startswith(
        "# circhrr 0.1.0 exp retrieval seed=0\n")


def test_exp_variance_default_rows(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"trials": 1, "dim": 32}))
    assert run("exp", "variance", "--config", cfg, "--out-dir", tmp_path) == 0
    lines = (tmp_path / "variance.csv").read_text().splitlines()
    assert lines[0].startswith("# circhrr")
    assert len(lines) == 2 + 3 * 50


def test_train_eval_pipeline(synth, tmp_path, capsys):
    train, test = synth
    model = tmp_path / "m.bin"
    assert run("train", "--head", "chrr", "--data", train, "--dim", 16, "--hidden", 16,
               "--epochs", 3, "--out", model) == 0
    loaded = neural.load_model(model)
    assert loaded.head == "chrr" and loaded.dim == 16
    log = (tmp_path / "m.bin.loss.csv").read_text().splitlines()
    assert log[0].startswith("# circhrr 0.1.0 train seed=0") and len(log) == 2 + 3
    capsys.readouterr()
    report = tmp_path / "r.csv"
    assert run("eval", "--model", model, "--data", test, "--ks", "1,3", "--psp",
               "--train-data", train, "--out", report) == 0
    printed = capsys.readouterr().out
    assert printed.splitlines()[0] == "metric,k,value"
    assert [l.split(",")[:2] for l in printed.splitlines()[1:]] == [
        ["P", "1"], ["P", "3"], ["PSP", "1"], ["PSP", "3"]]
    assert report.read_text().startswith("# circhrr 0.1.0 eval seed=0\n")
    assert run("eval", "--model", model, "--data", test, "--psp") == 1
    assert run("eval", "--model", model, "--data", test, "--ks", 7) == 1


def test_data_stats_output(synth, capsys):
    assert run("data", "stats", "--data", synth[0]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["num_examples"] == 120 and stats["num_labels"] == 6
    assert stats["avg_samples_per_label"] == pytest.approx(120 * 2 / 6)


def test_synth_matches_library(synth):
    ds = datasets.generate_synthetic(160, 60, 6, 2, 0.02, seed=0)
    train, test = datasets.train_test_split(ds, 120)
    assert datasets.parse_xmc(synth[0]) == train
    assert datasets.parse_xmc(synth[1]) == test


def _all_outputs(root, synth):
    train, test = synth
    run("codebook", "gen", "--dim", 8, "--labels", 5, "--out", root / "book.bin")
    run("exp", "retrieval", "--dims", "4,8", "--ks", "1,2", "--labels", 10, "--trials", 2,
        "--out-dir", root / "ret")
    run("exp", "variance", "--dim", 8, "--ks", "1..3", "--trials", 2, "--out-dir", root / "var")
    run("train", "--head", "hrr", "--data", train, "--dim", 8, "--hidden", 8, "--epochs", 2,
        "--out", root / "m.bin")
    run("eval", "--model", root / "m.bin", "--data", test, "--ks", "1,2", "--out", root / "r.json")
    run("data", "stats", "--data", train, "--out", root / "stats.json")
    run("data", "synth", "--examples", 10, "--features", 12, "--labels", 3, "--k", 1,
        "--out", root / "s.txt")
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_every_command_is_byte_reproducible(synth, tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    a = _all_outputs(tmp_path / "a", synth)
    b = _all_outputs(tmp_path / "b", synth)
    assert len(a) == 9
    assert a == b
