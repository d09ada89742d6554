"""Command-line interface: ``brf <command> ...``.

Exit codes: 0 ok, 2 usage error, 3 data error, 4 internal error.
"""
import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import replace

import numpy as np

from . import bench
from .coalition_game import FeatureGame, NodeContext, banzhaf_power_index
from .dataset import BUILTIN, discretize_array, load_builtin, load_csv, load_features
from .errors import BRFError
from .forest import VARIANTS, ForestConfig, ForestModel, train
from .tree import TIE_BREAKS, TreeConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 2, 3, 4

log = logging.getLogger("brforest")


def _int_list(text):
    return [int(t) for t in text.split(",") if t.strip()]


def _add_data_args(p):
    p.add_argument("csv", help="CSV path, or builtin:<name> for a bundled dataset")
    p.add_argument("--label", default="-1",
                   help="label column name or zero-based index (default: last)")
    p.add_argument("--no-header", action="store_true", help="first row is data")


def _add_model_args(p):
    g = p.add_argument_group("model")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--trees", type=int, default=None, help="default: round(log2(M) + 1)")
    g.add_argument("--trees-formula-arg", choices=("M", "h"), default="M")
    g.add_argument("--features", type=int, default=None, help="features per tree (h)")
    g.add_argument("--group-size", type=int, default=5)
    g.add_argument("--bins", type=int, default=10)
    g.add_argument("--tau", type=float, default=0.5)
    g.add_argument("--eps-dep", type=float, default=0.01)
    g.add_argument("--stop-d", type=float, default=None, help="default: classes / 100")
    g.add_argument("--max-depth", type=int, default=30)
    g.add_argument("--min-node-size", type=int, default=2)
    g.add_argument("--tie-break", choices=TIE_BREAKS, default="gain_ratio")
    g.add_argument("--root-criterion", choices=("gain_ratio", "info_gain"), default="gain_ratio")
    g.add_argument("--variant", choices=VARIANTS, default="brf")


def _config(args):
    tree = TreeConfig(stop_d=args.stop_d, group_size=args.group_size, max_depth=args.max_depth,
                      min_node_size=args.min_node_size, bins=args.bins, tau=args.tau,
                      epsilon_dep=args.eps_dep, root_criterion=args.root_criterion,
                      tie_break=args.tie_break)
    return ForestConfig(n_trees=args.trees, n_features=args.features, tree=tree,
                        variant=args.variant, seed=args.seed,
                        tree_formula_arg=args.trees_formula_arg)


def _load(args):
    if args.csv.startswith("builtin:"):
        name = args.csv.split(":", 1)[1]
        if name not in BUILTIN:
            raise FileNotFoundError(f"file not found: no bundled dataset {name!r}")
        return load_builtin(name)
    return load_csv(args.csv, label_column=args.label, header=not args.no_header)


def _write(path, text):
    """Write ``text`` to ``path`` atomically, or to stdout when ``path`` is None or '-'."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".brf-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_train(args):
    data = _load(args)
    model = train(data, _config(args))
    _write(args.output, model.to_json() + "\n")
    cfg = model.config
    print(f"trained {cfg.variant} forest: {cfg.n_trees} trees x {cfg.n_features} features "
          f"on {data.n_samples} rows, {data.n_classes} classes -> {args.output}")
    return EXIT_OK


def cmd_predict(args):
    with open(args.model, encoding="utf-8") as fh:
        model = ForestModel.from_json(fh.read())
    if args.csv.startswith("builtin:"):
        data = _load(args)
        X, truth = data.features, [data.class_names[c] for c in data.labels]
    else:
        X, truth = load_features(args.csv, model.n_features, args.label, not args.no_header)
    pred = model.predict(X)
    names = [model.class_names[p] for p in pred]
    if args.format == "json":
        text = json.dumps({"predictions": names,
                           "posteriors": model.predict_proba(X).tolist()}) + "\n"
    else:
        text = _csv_text(["row", "prediction"], list(enumerate(names)))
    _write(args.output, text)
    if args.score:
        if truth is None:
            raise ValueError("--score needs a label column")
        print(f"accuracy {np.mean([p == t for p, t in zip(names, truth)]):.4f}", file=sys.stderr)
    return EXIT_OK


def _table(doc):
    lines = [f"{'dataset':<14}{'variant':<10}{'mean acc':>10}{'train s':>10}  folds"]
    for r in doc["reports"]:
        folds = " ".join(f"{a:.3f}" for a in r["fold_accuracies"])
        lines.append(f"{r['dataset']:<14}{r['variant']:<10}{r['mean_accuracy']:>10.4f}"
                     f"{r['timing']['train_seconds']:>10.3f}  {folds}")
    return "\n".join(lines) + "\n"


def cmd_eval(args):
    data = _load(args)
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    for v in variants:
        if v not in VARIANTS:
            raise ValueError(f"unknown variant {v!r}")
    doc = bench.evaluate(data, _config(args), variants, args.folds, args.seed,
                         args.timing_repeats)
    if args.format == "json":
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    elif args.format == "csv":
        text = _csv_text(["dataset", "variant", "fold", "accuracy"],
                         [(r["dataset"], r["variant"], i, repr(a))
                          for r in doc["reports"] for i, a in enumerate(r["fold_accuracies"])])
    else:
        text = _table(doc)
    _write(args.output, text)
    if args.output not in (None, "-") and args.format != "table":
        sys.stdout.write(_table(doc))
    return EXIT_OK


def cmd_sweep_trees(args):
    data = _load(args)
    rows = bench.sweep_trees(data, _int_list(args.counts), _config(args), args.folds, args.seed)
    _write(args.output, _csv_text(["trees", "accuracy"], [(t, repr(a)) for t, a in rows]))
    return EXIT_OK


def cmd_consistency(args):
    base = _config(args)
    if args.trees is None:
        base = replace(base, n_trees=args.consistency_trees)
    seeds = range(args.seed, args.seed + args.seeds)
    rows = bench.consistency(_int_list(args.n), seeds, base, n_test=args.n_test)
    _write(args.output, _csv_text(["n", "median_error", "bayes_risk"],
                                  [(n, repr(e), repr(b)) for n, e, b in rows]))
    return EXIT_OK


def power_reports(snapshot, features=None, g_max=5):
    """Swing reports for a node snapshot (see ``inspect-power --help`` for the format)."""
    players = [int(p) for p in snapshot["players"]]
    tau = float(snapshot.get("tau", 0.5))
    eps = float(snapshot.get("epsilon_dep", 0.01))
    targets = players if features is None else [int(f) for f in features]
    if not targets:
        return []
    if "winning" in snapshot:
        table = {int(p): {frozenset(int(f) for f in c) for c in cs}
                 for p, cs in snapshot["winning"].items()}
        game = FeatureGame(players, tau=tau, epsilon_dep=eps, g_max=g_max,
                           delta=lambda p, c: int(c in table.get(p, ())))
    elif "delta" in snapshot:
        value = {"all": 1, "none": 0}[snapshot["delta"]]
        game = FeatureGame(players, tau=tau, epsilon_dep=eps, g_max=g_max,
                           delta=lambda p, c: value)
    else:
        codes = np.asarray(snapshot["codes"], dtype=np.int64)
        ids = snapshot.get("feature_ids", list(range(codes.shape[1])))
        ctx = NodeContext(codes, ids)
        game = FeatureGame(players, ctx, tau, eps, g_max)
    return [banzhaf_power_index(f, game).to_dict() for f in targets]


def cmd_inspect_power(args):
    features = None if args.features is None else _int_list(args.features)
    if args.snapshot:
        with open(args.snapshot, encoding="utf-8") as fh:
            snapshot = json.load(fh)
    else:
        data = _load(args)
        bins, tau, eps = args.bins, args.tau, args.eps_dep
        if args.model:
            with open(args.model, encoding="utf-8") as fh:
                cfg = ForestModel.from_json(fh.read(), data.n_features).config.tree
            bins, tau, eps = cfg.bins, cfg.tau, cfg.epsilon_dep
        players = features if features is not None else list(range(data.n_features))
        snapshot = {"players": players, "tau": tau, "epsilon_dep": eps,
                    "codes": discretize_array(data.features, bins).codes.tolist()}
    reports = power_reports(snapshot, features, args.g_max)
    _write(args.output, json.dumps(reports, indent=2) + "\n")
    return EXIT_OK


SNAPSHOT_HELP = """\
A node snapshot is a JSON object with "players" (feature ids), optional "tau"
and "epsilon_dep", and one of:
  "codes":   row-major matrix of bin codes (+ optional "feature_ids" per column)
  "winning": {"<player>": [[coalition members], ...]}  explicit winning coalitions
  "delta":   "all" | "none"                            constant predicate
"""


def build_parser():
    parser = argparse.ArgumentParser(prog="brf", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a forest and save it as JSON")
    _add_data_args(p)
    _add_model_args(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict classes for the rows of a CSV")
    p.add_argument("model")
    _add_data_args(p)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--score", action="store_true", help="print accuracy to stderr")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="k-fold cross-validation report")
    _add_data_args(p)
    _add_model_args(p)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--variants", default="brf,baseline")
    p.add_argument("--timing-repeats", type=int, default=3,
                   help="training runs per fold; the median time is reported")
    p.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep-trees", help="accuracy against the number of trees (CSV)")
    _add_data_args(p)
    _add_model_args(p)
    p.add_argument("--counts", default="1,5,10,50,100,150")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--format", choices=("csv",), default="csv")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_sweep_trees)

    p = sub.add_parser("consistency", help="error against training size on two Gaussians (CSV)")
    _add_model_args(p)
    p.add_argument("--n", default="100,400,1600,6400", help="increasing training sizes")
    p.add_argument("--seeds", type=int, default=10, help="number of seeds, starting at --seed")
    p.add_argument("--n-test", type=int, default=5000)
    p.add_argument("--consistency-trees", type=int, default=25,
                   help="trees per forest when --trees is not given")
    p.add_argument("--format", choices=("csv",), default="csv")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("inspect-power", help="Banzhaf swing reports as JSON",
                       epilog=SNAPSHOT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("snapshot", nargs="?", help="node snapshot JSON")
    p.add_argument("--csv", dest="csv", default=None, help="use a dataset's rows as the node")
    p.add_argument("--label", default="-1")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--model", default=None, help="take bins/tau/eps-dep from a saved model")
    p.add_argument("--features", default=None, help="comma-separated feature ids to report")
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--eps-dep", type=float, default=0.01)
    p.add_argument("--g-max", type=int, default=5)
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_inspect_power)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "inspect-power" and not args.snapshot and not args.csv:
        parser.error("inspect-power needs a snapshot file or --csv")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        msg = str(exc) if "file not found" in str(exc) else f"file not found: {exc.filename}"
        print(f"brf: error: {msg}", file=sys.stderr)
        return EXIT_DATA
    except (BRFError, ValueError, KeyError) as exc:
        print(f"brf: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - last-resort diagnostic
        log.debug("internal error", exc_info=True)
        print(f"brf: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
