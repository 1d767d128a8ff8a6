"""Command-line harness: mine, bench, curve, noise, convert, synth.

Exit codes: 0 success, 2 input/data error, 3 configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from .baselines import ForestConfig, TreeConfig
from .errors import (AggregationError, ConfigError, GuardError, InputError, SvmfimError,
                     TrainingError)
from .miners import MiningConfig, apriori_mine, fpgrowth_mine
from .robustness import DEFAULT_LEVELS, aggregate_sweep, noise_sweep, summary_csv, sweep_csv
from .rules import RuleConfig, aggregate_topk, fmt6, generate_rules
from .svm import KernelSpec, SvmConfig
from .svmminer import (EncoderConfig, ForestClassifier, PipelineConfig, SvmClassifier,
                       TreeClassifier, build_training_set, fit_classifier,
                       guided_search, labelling_partition, labelling_stats, run_pipeline,
                       to_training_set)
from .txdb import SyntheticSpec, dump_fimi, gen_synthetic, load_categorical_csv, read_db

EXIT_OK, EXIT_INPUT, EXIT_CONFIG = 0, 2, 3
MODELS = ("apriori", "fpgrowth", "dt", "rf", "svm")
EXACT = {"apriori": apriori_mine, "fpgrowth": fpgrowth_mine}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _columns(text):
    if not text:
        return ()
    try:
        return tuple(int(c) for c in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid column list {text!r}")


def _levels(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid level list {text!r}")


def _fps(text):
    return text if text == "sqrt" else int(text)


def _add_input(p):
    p.add_argument("--input", required=True, help="transaction file")
    p.add_argument("--format", choices=("fimi", "csv"), default="fimi")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--drop-columns", type=_columns, default=(), help="comma-separated CSV column indices")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="machine-readable report")


def _add_pipeline(p):
    g = p.add_argument_group("pipeline")
    g.add_argument("--minsup", type=float, required=True)
    g.add_argument("--max-len", type=int, default=None)
    g.add_argument("--train-fraction", type=float, default=0.5)
    g.add_argument("--relax-factor", type=float, default=0.5)
    g.add_argument("--max-train-candidates", type=int, default=2000)
    g.add_argument("--no-verify", dest="verify", action="store_false")
    g.add_argument("--m-items", type=int, default=20, help="indicator slots for the top-M items")
    g.add_argument("--sample-fraction", type=float, default=0.2)
    g.add_argument("--no-stats", dest="include_stats", action="store_false")
    g = p.add_argument_group("svm")
    g.add_argument("--kernel", choices=("linear", "rbf", "polynomial"), default="rbf")
    g.add_argument("--gamma", type=float, default=None)
    g.add_argument("--degree", type=int, default=3)
    g.add_argument("--scale", type=float, default=1.0)
    g.add_argument("--coef0", type=float, default=1.0)
    g.add_argument("--C", type=float, default=10.0)
    g.add_argument("--kkt-tol", type=float, default=1e-3)
    g.add_argument("--max-passes", type=int, default=200)
    g.add_argument("--pass-size", type=int, default=None, help="SMO pair updates per pass (default: n)")
    g = p.add_argument_group("trees")
    g.add_argument("--max-depth", type=int, default=12)
    g.add_argument("--min-samples-split", type=int, default=2)
    g.add_argument("--n-trees", type=int, default=50)
    g.add_argument("--features-per-split", type=_fps, default="sqrt")
    g.add_argument("--no-bootstrap", dest="bootstrap", action="store_false")


def _add_rules(p):
    p.add_argument("--minconf", type=float, default=0.0)
    p.add_argument("--top-k", type=int, default=20)


def build_parser():
    parser = _Parser(prog="svmfim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mine", help="mine frequent itemsets")
    _add_input(p)
    _add_pipeline(p)
    p.add_argument("--algo", choices=("apriori", "fpgrowth", "svm", "dt", "rf"), default="fpgrowth")
    p.add_argument("--output", help="itemset file (default: stdout, report to stderr)")

    p = sub.add_parser("bench", help="five-model comparison table")
    _add_input(p)
    _add_pipeline(p)
    _add_rules(p)
    p.add_argument("--output")
    p.add_argument("--timing", action="store_true", help="fill wall_time_ms (makes output nondeterministic)")

    p = sub.add_parser("curve", help="aggregate confidence per training step")
    _add_input(p)
    _add_pipeline(p)
    _add_rules(p)
    p.add_argument("--output")

    p = sub.add_parser("noise", help="noise-level sweep")
    _add_input(p)
    _add_pipeline(p)
    _add_rules(p)
    p.add_argument("--levels", type=_levels, default=list(DEFAULT_LEVELS))
    p.add_argument("--n-seeds", type=int, default=10)
    p.add_argument("--no-label-noise", dest="label_noise", action="store_false")
    p.add_argument("--no-transaction-noise", dest="transaction_noise", action="store_false")
    p.add_argument("--output", help="per-cell CSV")
    p.add_argument("--summary", help="per-level CSV (default: stdout)")

    p = sub.add_parser("convert", help="categorical CSV to FIMI")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--delimiter", default=",")
    p.add_argument("--drop-columns", type=_columns, default=())

    p = sub.add_parser("synth", help="generate a synthetic FIMI database")
    p.add_argument("--output", required=True)
    p.add_argument("--n-transactions", type=int, default=1000)
    p.add_argument("--n-items", type=int, default=50)
    p.add_argument("--n-patterns", type=int, default=5)
    p.add_argument("--pattern-len", type=int, default=3)
    p.add_argument("--mean-len", type=float, default=5.0)
    p.add_argument("--injection-prob", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    return parser


def classifier_spec(args, name):
    tree = TreeConfig(args.max_depth, args.min_samples_split, args.seed)
    if name == "svm":
        kernel = KernelSpec(args.kernel, args.gamma, args.degree, args.scale, args.coef0)
        return SvmClassifier(kernel, SvmConfig(C=args.C, kkt_tol=args.kkt_tol,
                                               max_passes=args.max_passes, rng_seed=args.seed,
                                               pass_size=args.pass_size))
    if name == "dt":
        return TreeClassifier(tree)
    if name == "rf":
        return ForestClassifier(tree, ForestConfig(args.n_trees, args.bootstrap,
                                                   args.features_per_split, args.seed))
    raise ConfigError(f"no classifier named {name!r}")


def pipeline_configs(args, name="svm"):
    cfg = PipelineConfig(
        minsup=args.minsup,
        train_fraction=args.train_fraction,
        classifier=classifier_spec(args, name),
        verify=args.verify,
        max_len=args.max_len,
        rng_seed=args.seed,
        relax_factor=args.relax_factor,
        max_train_candidates=args.max_train_candidates,
    )
    enc = EncoderConfig(args.m_items, args.include_stats, args.sample_fraction, args.seed)
    return cfg, enc


def _load(args):
    return read_db(args.input, args.format, args.delimiter, args.drop_columns)


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _kv(d):
    def show(v):
        if isinstance(v, float):
            return fmt6(v)
        if isinstance(v, (list, tuple)):
            return ",".join(map(str, v))
        return v

    return "".join(f"{k}={show(v)}\n" for k, v in d.items())


def _agg(fi, db, rules_cfg):
    try:
        return aggregate_topk(generate_rules(fi, db, rules_cfg), rules_cfg.top_k)
    except AggregationError:
        return None


def cmd_mine(args):
    db = _load(args)
    if args.algo in EXACT:
        fi = EXACT[args.algo](db, MiningConfig(args.minsup, args.max_len))
        report = {"algo": args.algo, "minsup": args.minsup, "n_transactions": len(db),
                  "n_itemsets": len(fi)}
    else:
        cfg, enc = pipeline_configs(args, args.algo)
        res = run_pipeline(db, cfg, enc)
        fi, rep = res.itemsets, res.report
        report = {"algo": args.algo, "minsup": args.minsup, "n_transactions": len(db),
                  "n_itemsets": len(fi), **rep.as_dict()}
    _write(args.output, fi.to_fimi())
    text = json.dumps(report, sort_keys=True) + "\n" if args.json else _kv(report)
    (sys.stdout if args.output else sys.stderr).write(text)
    return EXIT_OK


def bench_rows(db, args, timing=False):
    """One (model, support, confidence, lift, wall_time_ms) row per model."""
    rules_cfg = RuleConfig(args.minconf, args.top_k)
    mcfg = MiningConfig(args.minsup, args.max_len)
    rows = []
    for name in MODELS:
        t0 = time.perf_counter()
        if name in EXACT:
            fi = EXACT[name](db, mcfg)
        else:
            cfg, enc = pipeline_configs(args, name)
            try:
                fi = run_pipeline(db, cfg, enc).itemsets
            except TrainingError:
                fi = None
        agg = None if fi is None else _agg(fi, db, rules_cfg)
        ms = int(round((time.perf_counter() - t0) * 1000)) if timing else None
        s, c, lift = agg if agg is not None else (None, None, None)
        rows.append({"model": name, "support": s, "confidence": c, "lift": lift, "wall_time_ms": ms})
    return rows


def _rows_csv(header, rows):
    out = [",".join(header)]
    for r in rows:
        out.append(",".join(fmt6(r[h]) if isinstance(r[h], float) else ("" if r[h] is None else str(r[h]))
                            for h in header))
    return "\n".join(out) + "\n"


def cmd_bench(args):
    db = _load(args)
    rows = bench_rows(db, args, args.timing)
    if args.json:
        _write(args.output, json.dumps(rows) + "\n")
    else:
        _write(args.output, _rows_csv(("model", "support", "confidence", "lift", "wall_time_ms"), rows))
    return EXIT_OK


def curve_rows(db, args):
    """Aggregate confidence after each training step of every model."""
    rules_cfg = RuleConfig(args.minconf, args.top_k)

    def confidence(fi):
        agg = _agg(fi, db, rules_cfg)
        return None if agg is None else agg[1]

    groups = {}
    for name in ("dt", "rf", "svm"):
        cfg, enc = pipeline_configs(args, name)
        try:
            train, _ = build_training_set(db, cfg, enc)
        except TrainingError:
            groups[name] = [None]
            continue
        data = to_training_set(train)
        top = labelling_stats(labelling_partition(db, cfg), enc).top_items

        def mine(predict):
            fi, _ = guided_search(db, cfg, enc, lambda _, X: predict(X), top)
            return confidence(fi)

        if name == "svm":
            snaps = []
            fit_classifier(cfg.classifier, data, cfg.rng_seed, on_pass=lambda k, m: snaps.append(m))
            groups[name] = [mine(m.predict) for m in snaps]
        elif name == "rf":
            forest = fit_classifier(cfg.classifier, data, cfg.rng_seed)
            groups[name] = [mine(lambda X, t=t: forest.predict(X, n_trees=t))
                            for t in range(1, len(forest.trees) + 1)]
        else:
            tree = fit_classifier(cfg.classifier, data, cfg.rng_seed)
            groups[name] = [mine(lambda X, d=d: tree.predict(X, max_depth=d))
                            for d in range(1, cfg.classifier.tree.max_depth + 1)]
    length = max(len(v) for v in groups.values())
    mcfg = MiningConfig(args.minsup, args.max_len)
    # exact miners have no training axis: a flat line of the same length
    for name, miner in EXACT.items():
        groups[name] = [confidence(miner(db, mcfg))] * length
    rows = []
    for name in MODELS:
        rows.extend({"model": name, "iteration": i, "confidence": c}
                    for i, c in enumerate(groups[name], start=1))
    return rows


def cmd_curve(args):
    db = _load(args)
    rows = curve_rows(db, args)
    if args.json:
        _write(args.output, json.dumps(rows) + "\n")
    else:
        _write(args.output, _rows_csv(("model", "iteration", "confidence"), rows))
    return EXIT_OK


def cmd_noise(args):
    levels = args.levels
    if not levels or levels[0] != 0.0 or any(b < a for a, b in zip(levels, levels[1:])):
        raise ConfigError("--levels must be sorted ascending and start at 0")
    db = _load(args)
    cfg, enc = pipeline_configs(args, "svm")
    rows = noise_sweep(db, cfg, enc, levels, args.n_seeds, RuleConfig(args.minconf, args.top_k),
                       args.label_noise, args.transaction_noise)
    summary = aggregate_sweep(rows)
    if args.json:
        as_dicts = lambda rs: [vars(r) for r in rs]  # noqa: E731
        if args.output:
            _write(args.output, json.dumps(as_dicts(rows)) + "\n")
        _write(args.summary, json.dumps(as_dicts(summary)) + "\n")
    else:
        if args.output:
            _write(args.output, sweep_csv(rows))
        _write(args.summary, summary_csv(summary))
    return EXIT_OK


def cmd_convert(args):
    with open(args.input, encoding="utf-8", newline="") as fh:
        db = load_categorical_csv(fh.read(), args.delimiter, args.drop_columns, source=args.input)
    _write(args.output, dump_fimi(db))
    _write(args.output + ".idmap", "".join(f"{i}\t{db.item_labels[i]}\n" for i in range(db.n_items)))
    return EXIT_OK


def cmd_synth(args):
    spec = SyntheticSpec(args.n_transactions, args.n_items, args.n_patterns, args.mean_len,
                         args.injection_prob, args.seed, args.pattern_len)
    db = gen_synthetic(spec)
    _write(args.output, dump_fimi(db))
    report = {"n_transactions": len(db), "n_items": db.n_items,
              "seed_patterns": [list(p) for p in db.seed_patterns]}
    if args.json:
        sys.stdout.write(json.dumps(report) + "\n")
    else:
        sys.stdout.write(_kv({**report, "seed_patterns": ";".join(" ".join(map(str, p))
                                                                 for p in db.seed_patterns)}))
    return EXIT_OK


COMMANDS = {
    "mine": cmd_mine,
    "bench": cmd_bench,
    "curve": cmd_curve,
    "noise": cmd_noise,
    "convert": cmd_convert,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, GuardError) as e:
        print(f"svmfim: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputError, OSError, UnicodeDecodeError) as e:
        print(f"svmfim: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SvmfimError as e:
        print(f"svmfim: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
