"""Command-line surface: adapt, evaluate, simulate, experiment, preprocess.

Every file-producing subcommand writes a ``manifest.json`` recording its
resolved arguments and the SHA-256 digest of every output; ``replay``
re-executes a manifest and verifies the digests, so runs are reproducible
byte for byte. Exit codes: 0 success, 1 validation failure, 2 numerical
failure (including digest mismatches on replay).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, predictors, semlab
from .adapter import AdapterConfig, adapt_test, fit_and_adapt
from .data import emit, ingest, serialize_metadata, split
from .errors import FairadaptError, NumericError
from .experiments import run_experiment
from .forest import ForestParams
from .graph import CausalGraph, parse_graph, serialize
from .metrics import evaluate
from .preprocess import apply_recipe, builtin_recipe

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class _OutDir:
    """Collects written files and their digests for the manifest."""

    def __init__(self, path: str):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.outputs: dict[str, str] = {}

    def write(self, name: str, text: str) -> None:
        (self.path / name).write_text(text, encoding="utf-8")
        self.outputs[name] = _sha256(text)

    def manifest(self, subcommand: str, args: argparse.Namespace, inputs: dict[str, str]) -> None:
        doc = {
            "tool": "fairadapt",
            "version": __version__,
            "subcommand": subcommand,
            "args": {k: v for k, v in vars(args).items() if k != "func"},
            "inputs": inputs,
            "outputs": self.outputs,
        }
        (self.path / "manifest.json").write_text(json.dumps(doc, indent=2), encoding="utf-8")


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _forest_params(args: argparse.Namespace) -> ForestParams:
    return ForestParams(
        num_trees=args.num_trees,
        min_node_size=args.min_node_size,
        seed=args.seed,
    )


def _resolve_graph(args: argparse.Namespace) -> tuple[CausalGraph, dict[str, str]]:
    graph_text = _read(args.graph)
    inputs = {args.graph: _sha256(graph_text)}
    graph = parse_graph(graph_text)
    if args.resolving is not None:
        names = [s for s in args.resolving.split(",") if s]
        graph = graph.with_resolving(names)
    if args.aps:
        aps_text = _read(args.aps)
        inputs[args.aps] = _sha256(aps_text)
        overrides = {k: list(v) for k, v in dict(graph.aps_overrides).items()}
        overrides.update(json.loads(aps_text))
        graph = CausalGraph.build(
            graph.nodes, graph.edges, graph.protected, graph.outcome,
            resolving=graph.resolving, aps=overrides,
        )
    for warning in graph.validation_warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return graph, inputs


def _quantile_csv(order, quantiles) -> str:
    cols = [name for name in order if name in quantiles]
    lines = [",".join(cols)]
    mat = np.column_stack([quantiles[c] for c in cols])
    for row in mat:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _model_summary(model: predictors.TrainedModel, option: str, diagnostics=None) -> str:
    doc: dict = {"kind": model.kind, "training_option": option, "features": list(model.feature_cols)}
    inner = model.model
    if model.kind == "logistic":
        doc.update(
            coefficients=dict(zip(model.feature_cols, map(float, inner.coef))),
            intercept=inner.intercept,
            iterations=inner.n_iter,
            converged=inner.converged,
            final_loss=inner.final_loss,
        )
    elif model.kind == "linear":
        doc.update(
            coefficients=dict(zip(model.feature_cols, map(float, inner.coef))),
            intercept=inner.intercept,
        )
    else:
        doc.update(num_trees=inner.params.num_trees)
    if diagnostics:
        doc["cross_validation"] = diagnostics
    return json.dumps(doc, indent=2)


def cmd_adapt(args: argparse.Namespace) -> int:
    graph, inputs = _resolve_graph(args)
    meta_text = _read(args.meta)
    train_text = _read(args.train)
    inputs[args.meta] = _sha256(meta_text)
    inputs[args.train] = _sha256(train_text)
    train = ingest(train_text, meta_text, graph)
    baseline = args.baseline or train.baseline
    if baseline is None:
        levels = train.schema[graph.protected].levels
        if len(levels) > 2:
            raise FairadaptError(
                f"baseline required: {graph.protected!r} has {len(levels)} levels "
                "and none is declared baseline"
            )
        baseline = levels[0]
        print(f"warning: defaulting baseline to {baseline!r}", file=sys.stderr)
    config = AdapterConfig(
        baseline_level=baseline,
        forest_params=_forest_params(args),
        seed=args.seed,
        categorical_ordering=args.categorical_ordering,
        threads=args.threads,
    )
    adapter, adapted_train = fit_and_adapt(train, graph, config)
    out = _OutDir(args.out_dir)
    out.write("train_adapted.csv", emit(adapted_train))
    if args.emit_quantiles:
        out.write("train_quantiles.csv", _quantile_csv(adapter.adapt_order, adapter.train_quantiles))

    adapted_test = None
    test = None
    if args.test:
        test_text = _read(args.test)
        inputs[args.test] = _sha256(test_text)
        test = ingest(test_text, meta_text, graph)
        adapted_test = adapt_test(adapter, test)
        out.write("test_adapted.csv", emit(adapted_test))

    if args.training_option:
        if args.non_baseline:
            attr_levels = train.schema[graph.protected].levels
            if len(attr_levels) != 2:
                raise FairadaptError("--non-baseline needs a two-level attribute")
            other = [l for l in attr_levels if l != adapter.baseline_level][0]
            config1 = AdapterConfig(
                baseline_level=other,
                forest_params=config.forest_params,
                seed=config.seed,
                categorical_ordering=config.categorical_ordering,
                threads=config.threads,
            )
            adapter1, _ = fit_and_adapt(train, graph, config1)
            target = test if test is not None else train
            probs = predictors.non_baseline_predict(adapter, adapter1, train, target)
            out.write("predictions.csv", "".join(f"{repr(float(p))}\n" for p in probs))
        else:
            if args.training_option == "cv":
                option, model, diagnostics = predictors.train_cv(
                    adapter, train, adapted_train, args.model, seed=args.seed
                )
            else:
                option, diagnostics = args.training_option, None
                model = predictors.train(option, adapter, train, adapted_train, args.model)
            scored = adapted_test if adapted_test is not None else adapted_train
            probs = model.predict_proba(scored)
            out.write("predictions.csv", "".join(f"{repr(float(p))}\n" for p in probs))
            if args.emit_model:
                out.write("model_summary.json", _model_summary(model, option, diagnostics))
    if adapter.zero_mass_fallbacks:
        print(
            f"warning: {adapter.zero_mass_fallbacks} zero-mass transport rows "
            "fell back to the nearest positive-mass level",
            file=sys.stderr,
        )
    out.manifest("adapt", args, inputs)
    return 0


def _read_column(path: str) -> np.ndarray:
    vals = []
    for i, line in enumerate(_read(path).splitlines()):
        line = line.strip()
        if not line:
            continue
        try:
            vals.append(float(line))
        except ValueError:
            raise FairadaptError(f"{path}:{i + 1}: {line!r} is not numeric")
    return np.asarray(vals, np.float64)


def cmd_evaluate(args: argparse.Namespace) -> int:
    probs = _read_column(args.probs)
    labels = _read_column(args.labels)
    attr = _read_column(args.attr)
    if not (probs.size == labels.size == attr.size):
        raise FairadaptError(
            f"misaligned lengths: probs={probs.size} labels={labels.size} attr={attr.size}"
        )
    report = evaluate(probs, labels, attr.astype(np.int64), k=args.k)
    text = report.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.density_out:
        edges = np.linspace(0.0, 1.0, 41)
        lines = ["bin_lo,bin_hi,density_group0,density_group1"]
        d0, _ = np.histogram(probs[attr == 0], bins=edges, density=True)
        d1, _ = np.histogram(probs[attr == 1], bins=edges, density=True)
        for lo, hi, a, b in zip(edges[:-1], edges[1:], d0, d1):
            lines.append(f"{lo:.6f},{hi:.6f},{repr(float(a))},{repr(float(b))}")
        Path(args.density_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    sem = semlab.builtin(args.name)
    smp = semlab.sample(sem, args.n, args.seed)
    out = _OutDir(args.out_dir)
    out.write("data.csv", emit(smp.data))
    out.write("meta.json", serialize_metadata(smp.data))
    out.write("graph.json", serialize(sem.graph))
    lines = [",".join(sem.graph.nodes)]
    for row in smp.quantiles:
        lines.append(",".join(repr(float(v)) for v in row))
    out.write("quantiles.csv", "\n".join(lines) + "\n")
    if args.split is not None:
        train, test = split(smp.data, args.split, args.seed)
        out.write("train.csv", emit(train))
        out.write("test.csv", emit(test))
    out.manifest("simulate", args, inputs={})
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    kwargs: dict = {"seed": args.seed}
    if args.n is not None:
        kwargs["n"] = args.n
    if args.repeats is not None:
        kwargs["repeats"] = args.repeats
    if args.name in ("tradeoff_a", "tradeoff_b", "ripg_demo"):
        kwargs["forest_params"] = _forest_params(args)
        kwargs["threads"] = args.threads
    columns, rows = run_experiment(args.name, **kwargs)
    lines = [",".join(columns)]
    for row in rows:
        lines.append(
            ",".join(
                repr(float(row[c])) if isinstance(row[c], float) else str(row[c])
                for c in columns
            )
        )
    out = _OutDir(args.out_dir)
    out.write("results.csv", "\n".join(lines) + "\n")
    out.manifest("experiment", args, inputs={})
    return 0


def cmd_preprocess(args: argparse.Namespace) -> int:
    if args.recipe == "adult":
        recipe = builtin_recipe("adult")
        inputs = {}
    else:
        recipe_text = _read(args.recipe)
        recipe = json.loads(recipe_text)
        inputs = {args.recipe: _sha256(recipe_text)}
    csv_text = _read(args.data)
    meta_text = _read(args.meta)
    inputs[args.data] = _sha256(csv_text)
    inputs[args.meta] = _sha256(meta_text)
    new_csv, new_meta = apply_recipe(csv_text, meta_text, recipe)
    out = _OutDir(args.out_dir)
    out.write("preprocessed.csv", new_csv)
    out.write("preprocessed_meta.json", new_meta)
    out.manifest("preprocess", args, inputs)
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    doc = json.loads(_read(args.manifest))
    sub = doc["subcommand"]
    stored = dict(doc["args"])
    if args.out_dir:
        stored["out_dir"] = args.out_dir
    argv = [sub]
    for key, value in stored.items():
        if key == "subcommand":
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        elif value is not None:
            argv.extend([flag, str(value)])
    rc = main(argv)
    if rc != 0:
        return rc
    out_dir = Path(stored["out_dir"])
    for name, digest in doc["outputs"].items():
        actual = hashlib.sha256((out_dir / name).read_bytes()).hexdigest()
        if actual != digest:
            print(f"replay mismatch: {name} digest differs", file=sys.stderr)
            raise NumericError(f"replay produced different bytes for {name}")
    print(f"replay ok: {len(doc['outputs'])} outputs verified")
    return 0


def _add_forest_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--num-trees", type=int, default=100)
    p.add_argument("--min-node-size", type=int, default=5)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("FAIRADAPT_THREADS", "1")),
        help="worker threads for forest fitting (default: FAIRADAPT_THREADS or 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fairadapt", description=__doc__)
    parser.add_argument("--version", action="version", version=f"fairadapt {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("adapt", help="adapt training (and test) data on a causal graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--meta", required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--test")
    p.add_argument("--resolving", help="comma-separated resolving variables (overrides the graph file)")
    p.add_argument("--aps", help="JSON file of adaptation parent-set overrides")
    p.add_argument("--baseline", help="protected level adapted toward (default: metadata baseline)")
    p.add_argument("--categorical-ordering", choices=("auto", "declared", "none"), default="auto")
    p.add_argument("--emit-quantiles", action="store_true")
    p.add_argument("--training-option", choices=("a", "b", "cv"))
    p.add_argument("--model", choices=("logistic", "probability_forest", "linear"), default="logistic")
    p.add_argument("--non-baseline", action="store_true", help="two-world averaging predictor")
    p.add_argument("--emit-model", action="store_true")
    p.add_argument("--out-dir", required=True)
    _add_forest_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("evaluate", help="fairness/performance report for predictions")
    p.add_argument("--probs", required=True, help="file with one probability per line")
    p.add_argument("--labels", required=True)
    p.add_argument("--attr", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out")
    p.add_argument("--density-out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("simulate", help="draw data from a bundled simulator")
    p.add_argument("--name", required=True, choices=semlab.BUILTIN_NAMES)
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--split", type=float, help="also write train/test at this train fraction")
    p.add_argument("--out-dir", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="run a bundled experiment sweep")
    p.add_argument("--name", required=True, choices=("tradeoff_a", "tradeoff_b", "ripg_demo", "appendix_b_demo"))
    p.add_argument("--n", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--out-dir", required=True)
    _add_forest_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("preprocess", help="apply a documented ingestion recipe")
    p.add_argument("--data", required=True)
    p.add_argument("--meta", required=True)
    p.add_argument("--recipe", required=True, help="recipe JSON path, or 'adult'")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("replay", help="re-run a manifest and verify output digests")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", help="write outputs elsewhere (digests still verified)")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FairadaptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
