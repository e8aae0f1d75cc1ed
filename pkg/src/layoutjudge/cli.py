"""Command line interface: batch subcommands over the text file formats.

Every subcommand records its resolved configuration into whatever it writes
(comment headers in text files, a metadata block in model files), so any
output can be reproduced byte for byte from its own header. Exit codes:
0 success, 1 usage error, 2 data error. Errors go to standard error as
"error: <ErrorClass>: <message>".

A --config FILE of key=value lines (keys are long flag names without the
leading dashes) supplies defaults; explicit flags win. Worker parallelism
is capped by the LAYOUTJUDGE_THREADS environment variable.
"""

import argparse
import json
import os
import sys
from dataclasses import replace

from .augment import WORSEN_KINDS, WorsenSpec, worsen
from .baselines import CombWeights, comb_discriminate, stress_discriminate
from .corpus import (
    CoinFlipMethod,
    CombMethod,
    CorpusConfig,
    ModelMethod,
    OracleMethod,
    StressMethod,
    ablation,
    build_corpus,
    cross_validate,
    eval_dataset,
    load_corpus,
    render_eval_csv,
    render_eval_text,
    save_corpus,
)
from .discriminator import TrainConfig, load_model, predict, save_model, train
from .engines import (
    LayoutParams,
    layout_force_directed,
    layout_phantom,
    layout_random,
    layout_stress_min,
    normalize_layout,
)
from .errors import DimensionMismatch, LayoutJudgeError, ParseError, UsageError
from .features import feature_vector, histogram, write_feature_file
from .generators import GENERATOR_KINDS, GeneratorSpec, generate
from .graph import read_graph, read_layout, write_graph, write_layout
from .syndromes import all_syndromes

# comb weights used by `compare --method comb` when no --weights file is
# given: fewer crossings, wider crossing angles, wider fan angles, and more
# uniform edge lengths are all treated as prettier
DEFAULT_COMB_WEIGHTS = CombWeights(1.0, -1.0, -1.0, 1.0)

_EVAL_METHODS = ("model", "stress", "comb", "oracle", "coin-flip")


def _err(exc):
    print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)


def _stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def _config_line(command, values):
    body = " ".join(f"{k}={values[k]}" for k in sorted(values))
    return f"command: {command} {body}"


def _opt(value):
    return "-" if value is None else value


def _write_text(path, text):
    with open(path, "w", encoding="utf8") as fh:
        fh.write(text)


def _read_layout_for(graph, path):
    lay = read_layout(path)
    if lay.positions.shape[0] != graph.n:
        raise DimensionMismatch(
            f"{path} holds {lay.positions.shape[0]} positions "
            f"for a graph with {graph.n} vertices"
        )
    return lay


# ------------------------------------------------------------------ handlers


def _cmd_gen(args):
    lattice = args.kind in ("grid", "torus1", "torus2")
    if lattice and (args.rows is None or args.cols is None):
        raise UsageError(f"kind {args.kind!r} needs --rows and --cols")
    if lattice and args.target_n is not None:
        raise UsageError(f"kind {args.kind!r} takes --rows/--cols, not --target-n")
    if not lattice and args.target_n is None:
        raise UsageError(f"kind {args.kind!r} needs --target-n")
    if not lattice and (args.rows is not None or args.cols is not None):
        raise UsageError(f"kind {args.kind!r} takes --target-n, not --rows/--cols")
    spec = GeneratorSpec(
        args.kind, seed=args.seed, target_n=args.target_n,
        rows=args.rows, cols=args.cols,
    )
    graph, native = generate(spec)
    if args.out_layout and native is None:
        raise UsageError(f"kind {args.kind!r} has no native layout")
    line = _config_line("gen", {
        "kind": args.kind, "seed": args.seed, "target-n": _opt(args.target_n),
        "rows": _opt(args.rows), "cols": _opt(args.cols),
    })
    write_graph(args.out_graph, graph, comments=[line])
    if args.out_layout:
        native = replace(native, graph_id=_stem(args.out_graph))
        write_layout(args.out_layout, native, comments=[line])
    print(f"{args.kind}: n={graph.n} m={graph.m}")
    return 0


def _cmd_layout(args):
    graph = read_graph(args.graph)
    seed = args.seed
    if args.algo == "fdp":
        params = LayoutParams(seed=seed) if args.iterations is None else \
            LayoutParams(seed=seed, iterations=args.iterations)
        lay = layout_force_directed(graph, params)
    elif args.algo == "stress":
        lay = layout_stress_min(
            graph,
            LayoutParams(seed=seed, iterations=args.iterations or 200),
        )
    elif args.algo == "phantom":
        lay = layout_phantom(graph, seed)
    else:
        lay = layout_random(graph, seed, dist=args.algo)
    line = _config_line("layout", {
        "algo": args.algo, "seed": seed, "graph": args.graph,
        "iterations": _opt(args.iterations),
    })
    write_layout(args.out, replace(lay, graph_id=_stem(args.graph)),
                 comments=[line])
    return 0


def _cmd_worsen(args):
    graph = read_graph(args.graph)
    lay = _read_layout_for(graph, args.layout)
    out = worsen(graph, lay, WorsenSpec(args.kind, args.r, args.seed))
    line = _config_line("worsen", {
        "kind": args.kind, "r": repr(args.r), "seed": args.seed,
        "graph": args.graph, "layout": args.layout,
    })
    write_layout(args.out, out, comments=[line])
    return 0


def _cmd_corpus_build(args):
    kinds = tuple(args.kinds.split(",")) if args.kinds else GENERATOR_KINDS
    config = CorpusConfig(
        kinds=kinds, graphs_per_kind=args.graphs_per_kind,
        n_min=args.n_min, n_max=args.n_max,
    )
    corpus = build_corpus(config, seed=args.seed, workers=args.workers)
    save_corpus(corpus, args.out)
    print(f"{len(corpus.graphs)} graphs, {len(corpus.pairs)} pairs -> {args.out}")
    return 0


def _cmd_features(args):
    graph = read_graph(args.graph)
    records = []
    for path in args.layouts:
        records.append((_stem(path), feature_vector(graph, _read_layout_for(graph, path))))
    line = _config_line("features", {
        "graph": args.graph, "layouts": ",".join(args.layouts),
    })
    write_feature_file(args.out, records, header_comments=[line])
    return 0


def _train_config(args):
    dropout = tuple(float(v) for v in args.dropout.split(","))
    if len(dropout) != 2:
        raise UsageError("--dropout takes two comma-separated rates")
    return TrainConfig(
        learning_rate=args.learning_rate, batch_size=args.batch_size,
        epochs=args.epochs, momentum=args.momentum, dropout=dropout,
        seed=args.seed,
    )


def _train_values(args):
    return {
        "epochs": args.epochs, "batch-size": args.batch_size,
        "learning-rate": repr(args.learning_rate),
        "momentum": repr(args.momentum), "dropout": args.dropout,
        "seed": args.seed,
    }


def _cmd_train(args):
    ds = eval_dataset(load_corpus(args.corpus))
    config = _train_config(args)
    result = train(ds.xg, ds.xa, ds.xb, ds.t, config)
    line = _config_line("train", {"corpus": args.corpus, **_train_values(args)})
    save_model(result.params, args.out, metadata={
        "command": line,
        "pairs": len(ds.t),
        "final_loss": result.epoch_losses[-1],
    })
    print(f"trained on {len(ds.t)} pairs; "
          f"final epoch loss {result.epoch_losses[-1]:.6f} -> {args.out}")
    return 0


def _method_from_name(name, train_config):
    if name == "model":
        return ModelMethod(train_config=train_config)
    if name == "stress":
        return StressMethod()
    if name == "comb":
        return CombMethod()
    if name == "oracle":
        return OracleMethod()
    if name == "coin-flip":
        return CoinFlipMethod()
    raise UsageError(f"unknown method {name!r}; known: {', '.join(_EVAL_METHODS)}")


def _emit_reports(reports, line, args):
    text = render_eval_text(reports)
    print(text, end="")
    if args.out:
        _write_text(args.out, f"# {line}\n{text}")
    if args.csv:
        _write_text(args.csv, f"# {line}\n{render_eval_csv(reports)}")


def _cmd_eval(args):
    corpus = load_corpus(args.corpus)
    train_config = _train_config(args)
    names = args.methods.split(",")
    reports = [
        cross_validate(
            corpus, _method_from_name(name, train_config), rounds=args.rounds,
            test_fraction=args.test_fraction, seed=args.seed,
            workers=args.workers,
        )
        for name in names
    ]
    line = _config_line("eval", {
        "corpus": args.corpus, "methods": args.methods, "rounds": args.rounds,
        "test-fraction": repr(args.test_fraction), **_train_values(args),
    })
    _emit_reports(reports, line, args)
    return 0


def _cmd_ablate(args):
    corpus = load_corpus(args.corpus)
    train_config = _train_config(args)
    reports = [
        cross_validate(
            corpus, ModelMethod(train_config=train_config), rounds=args.rounds,
            test_fraction=args.test_fraction, seed=args.seed,
            workers=args.workers,
        )
    ]
    for spec in args.groups:
        reports.append(ablation(
            corpus, args.mode, tuple(spec.split("+")), rounds=args.rounds,
            test_fraction=args.test_fraction, seed=args.seed,
            train_config=train_config, workers=args.workers,
        ))
    line = _config_line("ablate", {
        "corpus": args.corpus, "mode": args.mode,
        "groups": ",".join(args.groups), "rounds": args.rounds,
        "test-fraction": repr(args.test_fraction), **_train_values(args),
    })
    _emit_reports(reports, line, args)
    return 0


def _read_weights(path):
    with open(path, encoding="utf8") as fh:
        tokens = [
            tok
            for raw in fh
            if not raw.lstrip().startswith("#")
            for tok in raw.split()
        ]
    if len(tokens) != 4:
        raise ParseError(f"weights file must hold 4 numbers, found {len(tokens)}")
    try:
        return CombWeights(*(float(t) for t in tokens))
    except ValueError as exc:
        raise ParseError(f"bad weights file: {exc}") from None


def _cmd_compare(args):
    graph = read_graph(args.graph)
    lay_a = _read_layout_for(graph, args.layout_a)
    lay_b = _read_layout_for(graph, args.layout_b)
    if args.method == "model":
        if not args.model:
            raise UsageError("compare --method model needs --model FILE")
        pred = predict(load_model(args.model), graph, lay_a, lay_b)
    elif args.method == "stress":
        pred = stress_discriminate(graph, lay_a, lay_b)
    else:
        weights = _read_weights(args.weights) if args.weights \
            else DEFAULT_COMB_WEIGHTS
        pred = comb_discriminate(weights, graph, lay_a, lay_b)
    print(f"verdict: {pred.verdict}")
    print(f"score: {pred.t!r}")
    if pred.zero_confidence:
        print("note: tie, zero confidence")
    return 0


def _cmd_plot_rdf(args):
    graph = read_graph(args.graph)
    norm = normalize_layout(_read_layout_for(graph, args.layout), graph)
    named = all_syndromes(graph, norm, local_bounds=args.local or ())
    wanted = ["RDF_GLOBAL"] + [f"RDF_LOCAL_{d}" for d in (args.local or ())]
    if args.angular:
        wanted.append("ANGULAR")
    line = _config_line("plot-rdf", {
        "graph": args.graph, "layout": args.layout, "bins": args.bins,
        "local": ",".join(str(d) for d in (args.local or ())) or "-",
        "angular": args.angular,
    })
    out = [f"# {line}", "syndrome,bin_lo,bin_hi,mass"]
    for name in wanted:
        values = named[name]
        mass = histogram(values, args.bins)
        edges = [
            float(values.min())
            + (float(values.max()) - float(values.min())) * i / args.bins
            for i in range(args.bins + 1)
        ]
        out += [
            f"{name},{edges[i]!r},{edges[i + 1]!r},{float(mass[i])!r}"
            for i in range(args.bins)
        ]
    _write_text(args.out, "\n".join(out) + "\n")
    return 0


def _cmd_syndromes(args):
    graph = read_graph(args.graph)
    norm = normalize_layout(_read_layout_for(graph, args.layout), graph)
    named = all_syndromes(graph, norm, local_bounds=args.local or ())
    line = _config_line("syndromes", {
        "graph": args.graph, "layout": args.layout,
        "local": ",".join(str(d) for d in (args.local or ())) or "-",
    })
    payload = {"_config": line}
    payload.update({name: vals.tolist() for name, vals in named.items()})
    with open(args.out, "w", encoding="utf8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return 0


# -------------------------------------------------------------------- parser


def _add_train_flags(p):
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--dropout", default="0.5,0.25",
                   help="two comma-separated dropout rates")


def _add_eval_flags(p):
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", help="write the text table here too")
    p.add_argument("--csv", help="write the table as CSV here")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE",
                        help="key=value defaults; explicit flags win")

    top = argparse.ArgumentParser(
        prog="layoutjudge",
        description="Judge which of two layouts of a graph is prettier.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common],
                       help="generate a graph (and its native layout)")
    p.add_argument("--kind", required=True, choices=GENERATOR_KINDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target-n", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--out-graph", required=True)
    p.add_argument("--out-layout")
    p.set_defaults(handler=_cmd_gen)

    p = sub.add_parser("layout", parents=[common],
                       help="lay out a graph with one algorithm")
    p.add_argument("--algo", required=True,
                   choices=("fdp", "stress", "uniform", "normal", "phantom"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int)
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_layout)

    p = sub.add_parser("worsen", parents=[common],
                       help="degrade a layout by a controlled amount")
    p.add_argument("--kind", required=True, choices=WORSEN_KINDS)
    p.add_argument("--r", required=True, type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--graph", required=True)
    p.add_argument("--layout", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_worsen)

    p = sub.add_parser("corpus", help="corpus operations")
    csub = p.add_subparsers(dest="subcommand", required=True)
    p = csub.add_parser("build", parents=[common],
                        help="build and save a labeled corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kinds", help="comma-separated generator kinds (default all)")
    p.add_argument("--graphs-per-kind", type=int, default=11)
    p.add_argument("--n-min", type=int, default=16)
    p.add_argument("--n-max", type=int, default=400)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(handler=_cmd_corpus_build)

    p = sub.add_parser("features", parents=[common],
                       help="feature vectors for layouts of one graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--layout", dest="layouts", action="append", required=True,
                   help="repeatable")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_features)

    p = sub.add_parser("train", parents=[common],
                       help="train the model on every pair of a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_train_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("eval", parents=[common],
                       help="cross-validate judging methods on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--methods", default="model,stress,comb",
                   help=f"comma-separated from: {', '.join(_EVAL_METHODS)}")
    p.add_argument("--seed", type=int, default=0)
    _add_train_flags(p)
    _add_eval_flags(p)
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("ablate", parents=[common],
                       help="model accuracy with feature groups kept or removed")
    p.add_argument("--corpus", required=True)
    p.add_argument("--mode", required=True, choices=("only", "exclude"))
    p.add_argument("--groups", action="append", required=True,
                   help="feature groups joined by '+'; repeatable, one row each")
    p.add_argument("--seed", type=int, default=0)
    _add_train_flags(p)
    _add_eval_flags(p)
    p.set_defaults(handler=_cmd_ablate)

    p = sub.add_parser("compare", parents=[common],
                       help="judge two layouts of one graph")
    p.add_argument("--method", required=True,
                   choices=("model", "stress", "comb"))
    p.add_argument("--graph", required=True)
    p.add_argument("--layout-a", required=True)
    p.add_argument("--layout-b", required=True)
    p.add_argument("--model", help="model file (required for --method model)")
    p.add_argument("--weights",
                   help="comb weights file: 4 numbers (default +1 -1 -1 +1)")
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser("plot-rdf", parents=[common],
                       help="CSV histograms of distance distributions")
    p.add_argument("--graph", required=True)
    p.add_argument("--layout", required=True)
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--local", type=int, action="append",
                   help="hop bound for a local histogram; repeatable")
    p.add_argument("--angular", action="store_true",
                   help="include the angular-gap histogram")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_plot_rdf)

    p = sub.add_parser("syndromes", parents=[common],
                       help="dump every syndrome of a layout as JSON")
    p.add_argument("--graph", required=True)
    p.add_argument("--layout", required=True)
    p.add_argument("--local", type=int, action="append",
                   help="hop bound for a local distance set; repeatable")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_syndromes)

    return top


def _inject_config_file(argv):
    """Splice key=value lines from --config FILE in before explicit flags."""
    path = None
    if "--config" in argv:
        i = argv.index("--config")
        if i + 1 >= len(argv):
            raise UsageError("--config needs a file path")
        path = argv[i + 1]
    else:
        for arg in argv:
            if arg.startswith("--config="):
                path = arg.split("=", 1)[1]
    if path is None:
        return argv
    tokens = []
    with open(path, encoding="utf8") as fh:
        for number, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config file line {number}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("_", "-")
            if key == "config":
                raise UsageError("config file cannot set --config")
            tokens += [f"--{key}", value]
    insert_at = 2 if argv[:1] == ["corpus"] else 1
    return argv[:insert_at] + tokens + argv[insert_at:]


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_config_file(argv)
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return 0 if (exc.code or 0) == 0 else 1
        return args.handler(args)
    except UsageError as exc:
        _err(exc)
        return 1
    except ValueError as exc:
        _err(exc)
        return 1
    except (LayoutJudgeError, OSError) as exc:
        _err(exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
