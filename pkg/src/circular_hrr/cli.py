"""Command line interface: ``circhrr <command> [options]``.

Commands::

    codebook gen   --algebra {hrr,chrr} --dim D --labels N --out PATH
    exp retrieval  --dims LIST --ks LIST --labels N --trials T --out-dir DIR
    exp variance   --dim 400 --ks 1..50 --trials T --out-dir DIR
    train          --head HEAD --data PATH --dim D --hidden H --out MODEL
    eval           --model MODEL --data PATH --ks 1,5,10,20 [--psp --train-data PATH]
    data stats     --data PATH
    data synth     --examples N --features F --labels L --k K --noise P --out PATH

Every command accepts ``--seed`` (default 0), ``--threads`` (default 1)
and ``--config FILE``, a JSON object whose keys mirror the long flags;
flags given on the command line win. Lists accept ``1,5,10`` and ranges
``1..50``. Exit status: 0 on success, 1 on usage errors, 2 on runtime
errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path


from . import __version__, codec, datasets, experiments, metrics, neural
from .errors import DatasetFormatError, TrainingDivergedError

log = logging.getLogger("circhrr")
PROG = "circhrr"


class UsageError(Exception):
    pass


class _StderrHandler(logging.StreamHandler):
    """Writes to whatever ``sys.stderr`` is at emit time."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def int_list(text: str) -> list[int]:
    """Parse ``"1,5,10"``, ``"1..50"`` or a mix such as ``"1,5..8"``."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = part.split("..", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from None
    return out


def _list_value(value) -> list[int]:
    if isinstance(value, list):
        return [int(v) for v in value]
    return int_list(value)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--config", type=Path, default=None,
                   help="JSON file whose keys mirror the long flags")


def build_parser() -> dict:
    """Return ``{command path: parser}``; key ``()`` is the top-level parser."""
    top = _Parser(prog=PROG, description="Holographic label encodings for multi-label learning")
    top.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = top.add_subparsers(dest="command", parser_class=_Parser)
    parsers = {(): top}

    cb = sub.add_parser("codebook", help="codebook tools")
    cb_sub = cb.add_subparsers(dest="action", parser_class=_Parser)
    p = cb_sub.add_parser("gen", help="generate and save a codebook")
    p.add_argument("--algebra", choices=["hrr", "chrr", "hrr-plain"], default="chrr")
    p.add_argument("--dim", type=int, default=800)
    p.add_argument("--labels", type=int, default=1000)
    p.add_argument("--out", type=Path)
    _common(p)
    parsers[("codebook", "gen")] = p

    ex = sub.add_parser("exp", help="synthetic experiments")
    ex_sub = ex.add_subparsers(dest="action", parser_class=_Parser)
    p = ex_sub.add_parser("retrieval", help="retrieval accuracy over (d, k)")
    p.add_argument("--dims", type=int_list, default=list(experiments.DEFAULT_DIMS))
    p.add_argument("--ks", type=int_list, default=list(experiments.DEFAULT_KS))
    p.add_argument("--labels", type=int, default=1000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--algebras", default="hrr,chrr")
    p.add_argument("--full-grid", action="store_true",
                   help="every d in 1..1024 and every k in 1..50")
    p.add_argument("--out-dir", type=Path)
    _common(p)
    parsers[("exp", "retrieval")] = p

    p = ex_sub.add_parser("variance", help="similarity mean/variance over k")
    p.add_argument("--dim", type=int, default=400)
    p.add_argument("--ks", type=int_list, default=list(range(1, 51)))
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--out-dir", type=Path)
    _common(p)
    parsers[("exp", "variance")] = p

    p = sub.add_parser("train", help="train a network on an XMC-format dataset")
    p.add_argument("--head", choices=list(neural.HEADS), default="chrr")
    p.add_argument("--data", type=Path)
    p.add_argument("--dim", type=int, default=800)
    p.add_argument("--hidden", type=int, default=768)
    p.add_argument("--lr", type=float, default=1.0)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--normalize-features", action="store_true")
    p.add_argument("--out", type=Path)
    p.add_argument("--loss-log", type=Path, default=None,
                   help="CSV of per-epoch loss (default: MODEL.loss.csv)")
    _common(p)
    parsers[("train",)] = p

    p = sub.add_parser("eval", help="evaluate a trained model")
    p.add_argument("--model", type=Path)
    p.add_argument("--data", type=Path)
    p.add_argument("--ks", type=int_list, default=[1, 5, 10, 20])
    p.add_argument("--psp", action="store_true", help="also report PSP@k")
    p.add_argument("--train-data", type=Path, default=None,
                   help="training set used for label propensities (required with --psp)")
    p.add_argument("--normalized-psp", action="store_true")
    p.add_argument("--normalize-features", action="store_true")
    p.add_argument("--out", type=Path, default=None, help="report path (.csv or .json)")
    _common(p)
    parsers[("eval",)] = p

    da = sub.add_parser("data", help="dataset tools")
    da_sub = da.add_subparsers(dest="action", parser_class=_Parser)
    p = da_sub.add_parser("stats", help="dataset statistics as JSON")
    p.add_argument("--data", type=Path)
    p.add_argument("--out", type=Path, default=None)
    _common(p)
    parsers[("data", "stats")] = p

    p = da_sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--examples", type=int, default=2000)
    p.add_argument("--features", type=int, default=500)
    p.add_argument("--labels", type=int, default=50)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--out", type=Path)
    p.add_argument("--test-examples", type=int, default=0,
                   help="extra examples written to --test-out")
    p.add_argument("--test-out", type=Path, default=None)
    _common(p)
    parsers[("data", "synth")] = p
    return parsers


def _command_path(ns) -> tuple:
    if ns.command is None:
        return ()
    action = getattr(ns, "action", None)
    return (ns.command,) if action is None and ns.command in ("train", "eval") else (ns.command, action)


def parse_args(argv) -> tuple[tuple, argparse.Namespace]:
    parsers = build_parser()
    top = parsers[()]
    ns = top.parse_args(argv)
    path = _command_path(ns)
    if path not in parsers or path == ():
        raise UsageError(f"{PROG}: missing or incomplete command (try --help)")
    if ns.config is not None:
        try:
            cfg = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"{PROG}: cannot read config {ns.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError(f"{PROG}: config file must hold a JSON object")
        sub = parsers[path]
        known = {a.dest for a in sub._actions}
        defaults = {}
        for key, value in cfg.items():
            dest = key.lstrip("-").replace("-", "_")
            if dest not in known or dest in ("help", "config"):
                raise UsageError(f"{PROG}: unknown config key {key!r}")
            defaults[dest] = value
        sub.set_defaults(**defaults)
        ns = top.parse_args(argv)
        for key in ("dims", "ks"):
            if hasattr(ns, key):
                try:
                    setattr(ns, key, _list_value(getattr(ns, key)))
                except (argparse.ArgumentTypeError, TypeError, ValueError) as exc:
                    raise UsageError(f"{PROG}: bad config value for {key}: {exc}") from None
    return path, ns


def _require(ns, *names) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(ns, n) is None]
    if missing:
        raise UsageError(f"{PROG}: missing required option(s): {' '.join(missing)}")


def _header(path: tuple, ns) -> str:
    return f"{PROG} {__version__} {' '.join(path)} seed={ns.seed}"


def _resolved(ns) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(ns).items())}


# --- commands -----------------------------------------------------------------

def cmd_codebook_gen(path, ns) -> None:
    _require(ns, "out")
    book = codec.generate_codebook(ns.algebra, ns.dim, ns.labels, ns.seed)
    codec.save_codebook(book, ns.out)
    print(f"wrote {ns.out}")


def cmd_exp_retrieval(path, ns) -> None:
    _require(ns, "out_dir")
    dims, ks = ns.dims, ns.ks
    if ns.full_grid:
        dims, ks = list(range(1, 1025)), list(range(1, 51))
    try:
        algebras = [codec.Algebra.parse(a) for a in str(ns.algebras).split(",") if a]
        cfg = experiments.SweepConfig(algebras, dims, ks, ns.labels, ns.trials, ns.seed)
    except ValueError as exc:
        raise UsageError(f"{PROG}: {exc}") from None
    result = experiments.run_retrieval_sweep(cfg, threads=ns.threads)
    csv_path, svg_path = experiments.emit_heatmap(result, ns.out_dir, header=_header(path, ns))
    print(f"wrote {csv_path}\nwrote {svg_path}")


def cmd_exp_variance(path, ns) -> None:
    _require(ns, "out_dir")
    if not ns.ks:
        raise UsageError(f"{PROG}: --ks is empty")
    try:
        cfg = experiments.SweepConfig((), (ns.dim,), ns.ks, max(ns.ks), ns.trials, ns.seed)
    except ValueError as exc:
        raise UsageError(f"{PROG}: {exc}") from None
    result = experiments.run_variance_sweep(cfg, threads=ns.threads)
    ns.out_dir.mkdir(parents=True, exist_ok=True)
    out = experiments.variance_csv(result, ns.out_dir / "variance.csv", _header(path, ns))
    print(f"wrote {out}")


def cmd_train(path, ns) -> None:
    _require(ns, "data", "out")
    if ns.head == "chrr-half" and ns.hidden % 2:
        raise UsageError(f"{PROG}: --head chrr-half needs an even --hidden, got {ns.hidden}")
    if ns.hidden < 1 or ns.dim < 1 or ns.batch < 1 or ns.epochs < 0 or ns.lr < 0:
        raise UsageError(f"{PROG}: sizes must be positive and --lr non-negative")
    data = datasets.parse_xmc(ns.data)
    model = neural.MlpModel(ns.head, data.n_features, ns.hidden, data.n_labels,
                            dim=None if ns.head == "fc" else ns.dim, seed=ns.seed)
    cfg = neural.TrainConfig(ns.lr, ns.batch, ns.epochs, ns.seed, ns.normalize_features)
    model, history = neural.train(model, data, cfg)
    neural.save_model(model, ns.out)
    log_path = ns.loss_log or ns.out.with_name(ns.out.name + ".loss.csv")
    buf = io.StringIO()
    buf.write(f"# {_header(path, ns)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("epoch", "mean_loss"))
    w.writerows((i + 1, repr(v)) for i, v in enumerate(history))
    Path(log_path).write_text(buf.getvalue(), encoding="utf-8")
    print(f"wrote {ns.out}\nwrote {log_path}")


def cmd_eval(path, ns) -> None:
    _require(ns, "model", "data")
    if ns.psp and ns.train_data is None:
        raise UsageError(f"{PROG}: --psp needs --train-data for label propensities")
    if not ns.ks or min(ns.ks) < 1:
        raise UsageError(f"{PROG}: --ks must list positive integers")
    model = neural.load_model(ns.model)
    data = datasets.parse_xmc(ns.data)
    if data.n_features != model.n_features or data.n_labels != model.n_labels:
        raise ValueError(f"dataset shape ({data.n_features} features, {data.n_labels} labels) "
                         f"does not match the model ({model.n_features}, {model.n_labels})")
    if max(ns.ks) > model.n_labels:
        raise UsageError(f"{PROG}: k={max(ns.ks)} exceeds the {model.n_labels} labels")
    rankings = neural.predict_in_batches(model, data.features, max(ns.ks), normalize=ns.normalize_features)
    props = None
    if ns.psp:
        props = metrics.build_propensities(datasets.parse_xmc(ns.train_data))
    report = metrics.evaluate_rankings(rankings.tolist(), data.labels, ns.ks, props,
                                       ns.normalized_psp)
    text = metrics.report_csv(report)
    if ns.out is not None:
        metrics.write_report(report, ns.out, _header(path, ns))
    sys.stdout.write(text)


def cmd_data_stats(path, ns) -> None:
    _require(ns, "data")
    stats = datasets.dataset_stats(datasets.parse_xmc(ns.data))
    text = json.dumps(stats, indent=2) + "\n"
    if ns.out is not None:
        Path(ns.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def cmd_data_synth(path, ns) -> None:
    _require(ns, "out")
    if ns.test_examples and ns.test_out is None:
        raise UsageError(f"{PROG}: --test-examples needs --test-out")
    try:
        ds = datasets.generate_synthetic(ns.examples + ns.test_examples, ns.features,
                                         ns.labels, ns.k, ns.noise, ns.seed)
    except ValueError as exc:
        raise UsageError(f"{PROG}: {exc}") from None
    train, test = datasets.train_test_split(ds, ns.examples)
    datasets.emit_xmc(train, ns.out)
    print(f"wrote {ns.out}")
    if ns.test_examples:
        datasets.emit_xmc(test, ns.test_out)
        print(f"wrote {ns.test_out}")


COMMANDS = {
    ("codebook", "gen"): cmd_codebook_gen,
    ("exp", "retrieval"): cmd_exp_retrieval,
    ("exp", "variance"): cmd_exp_variance,
    ("train",): cmd_train,
    ("eval",): cmd_eval,
    ("data", "stats"): cmd_data_stats,
    ("data", "synth"): cmd_data_synth,
}


def main(argv=None) -> int:
    if not log.handlers:
        handler = _StderrHandler()
        handler.setFormatter(logging.Formatter(f"{PROG}: %(message)s"))
        log.addHandler(handler)
        log.setLevel(logging.INFO)
        log.propagate = False
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        path, ns = parse_args(argv)
        if ns.threads < 1:
            raise UsageError(f"{PROG}: --threads must be positive")
        log.info("command %s seed=%d config %s", " ".join(path), ns.seed,
                 json.dumps(_resolved(ns), sort_keys=True))
        COMMANDS[path](path, ns)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (ValueError, OSError, TrainingDivergedError, DatasetFormatError, IndexError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
