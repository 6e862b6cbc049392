"""Command-line front end: train, evaluate, curve, consistency, bench.

Exit codes: 0 success, 2 input/usage error, 3 numeric failure,
4 verification/benchmark failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .adaboost_ml import AdaBoostMLClassifier
from .data import (
    Dataset,
    error_standard_error,
    load_delimited,
    misclassification_error,
)
from .exceptions import InputError, NumericError
from .gentleboost import GentleBoostClassifier
from .losses import LOSSES, SMOOTH_FAMILIES, empirical_risk, get_loss
from .population import (
    check_fisher_consistency,
    exponential_minimizer_closed_form,
    least_squares_minimizer_closed_form,
    logit_minimizer,
    population_minimizer,
    random_simplex_point,
)
from .serialize import load_model, save_model

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

# expected (n_train, n_test, d, m) and published test-error targets (%)
BENCH_SHAPES = {
    "waveform": (300, 5000, 21, 3),
    "vowel": (528, 462, 10, 11),
    "optdigits": (3823, 1797, 64, 10),
    "segmentation": (210, 2100, 19, 7),
    "pendigits": (7494, 3498, 16, 10),
}
BENCH_TARGETS = {
    ("waveform", "gentle"): 17.74,
    ("waveform", "adaml"): 18.30,
    ("vowel", "gentle"): 45.67,
    ("vowel", "adaml"): 47.18,
    ("optdigits", "gentle"): 5.01,
    ("optdigits", "adaml"): 5.40,
    ("segmentation", "gentle"): 5.38,
    ("segmentation", "adaml"): 5.42,
    ("pendigits", "gentle"): 3.69,
    ("pendigits", "adaml"): 4.09,
}


def _delimiter(name: str):
    if name == "comma":
        return ","
    if name == "whitespace":
        return None
    raise InputError(f"unknown delimiter {name!r}; use comma or whitespace")


def _load(path, args) -> Dataset:
    label_column = args.label_column
    if label_column != "last":
        label_column = int(label_column)
    return load_delimited(path, delimiter=_delimiter(args.delimiter),
                          label_column=label_column,
                          skip_header=args.skip_header)


def _make_model(algorithm: str, rounds: int, tree_leaves):
    if algorithm == "gentle":
        return GentleBoostClassifier(n_rounds=rounds,
                                     max_leaves=tree_leaves or 8)
    if algorithm == "adaml":
        return AdaBoostMLClassifier(n_rounds=rounds, max_leaves=tree_leaves)
    raise InputError(f"unknown algorithm {algorithm!r}; use gentle or adaml")


def _encode_against_model(model, data: Dataset) -> np.ndarray:
    """Map a dataset's labels into the model's class indices."""
    if data.d != model.n_features_in_:
        raise InputError(
            f"schema mismatch: model expects {model.n_features_in_} features, "
            f"data has {data.d}"
        )
    names = [data.class_names[j - 1] for j in data.labels]
    unknown = sorted(set(names) - set(model.encoder_.class_names))
    if unknown:
        raise InputError(f"schema mismatch: labels not seen in training: {unknown}")
    return model.encoder_.encode(names)


def cmd_train(args) -> int:
    data = _load(args.data, args)
    model = _make_model(args.algorithm, args.rounds, args.tree_leaves)
    names = [data.class_names[j - 1] for j in data.labels]
    model.fit(data.features, names)
    pred = model.predict(data.features)
    err = misclassification_error(pred, np.asarray(names, dtype=object))
    print(f"n={data.n}")
    print(f"d={data.d}")
    print(f"m={data.m}")
    print(f"train_error={err:.6f}")
    print(f"empirical_risk={model.train_risk_:.10g}")
    if args.model_out:
        save_model(model, args.model_out)
        print(f"model={args.model_out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    data = _load(args.data, args)
    labels = _encode_against_model(model, data)
    f = model.decision_function(data.features)
    pred = np.argmax(f, axis=1) + 1
    err = misclassification_error(pred, labels)
    se = error_standard_error(err, data.n)
    proba = model.predict_proba(data.features)
    mean_true = float(np.mean(proba[np.arange(data.n), labels - 1]))
    print(f"test_error={err:.6f}")
    print(f"standard_error={se:.6f}")
    print(f"mean_true_class_proba={mean_true:.6f}")
    m = model.n_classes_
    counts = np.zeros((m, m), dtype=np.int64)
    for t, p in zip(labels, pred):
        counts[t - 1, p - 1] += 1
    for t in range(m):
        for p in range(m):
            if counts[t, p]:
                t_name = model.encoder_.class_names[t]
                p_name = model.encoder_.class_names[p]
                print(f"confusion true={t_name} pred={p_name} count={counts[t, p]}")
    return EXIT_OK


def cmd_curve(args) -> int:
    train = _load(args.train, args)
    test = _load(args.test, args)
    model = _make_model(args.algorithm, args.rounds, args.tree_leaves)
    names = [train.class_names[j - 1] for j in train.labels]
    model.fit(train.features, names)
    test_labels = _encode_against_model(model, test)
    loss = LOSSES["exponential" if args.algorithm == "gentle" else "logit"]
    train_labels = model.encoder_.encode(names)

    lines = ["round,train_error,test_error,empirical_risk"]
    stages = zip(model.staged_decision_function(train.features),
                 model.staged_decision_function(test.features))
    for k, (f_train, f_test) in enumerate(stages, start=1):
        tr_err = misclassification_error(np.argmax(f_train, axis=1) + 1, train_labels)
        te_err = misclassification_error(np.argmax(f_test, axis=1) + 1, test_labels)
        risk = empirical_risk(loss, f_train, train_labels)
        lines.append(f"{k},{tr_err:.6f},{te_err:.6f},{risk:.10g}")
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_consistency(args) -> int:
    families = list(LOSSES) if args.family == "all" else [get_loss(args.family).name]
    rng = np.random.default_rng(args.seed)
    any_fail = False
    for name in families:
        loss = LOSSES[name]
        passes = 0
        max_roundtrip = 0.0
        max_closed_dev = None
        for _ in range(args.trials):
            p = random_simplex_point(args.classes, rng)
            report = check_fisher_consistency(loss, p)
            max_roundtrip = max(max_roundtrip, report.roundtrip_error)
            # strict comparison so --tolerance 0 rejects every trial
            if report.argmax_match and report.roundtrip_error < args.tolerance:
                passes += 1
            if name in SMOOTH_FAMILIES:
                generic = population_minimizer(loss, p)
                if name == "exponential":
                    closed = exponential_minimizer_closed_form(p)
                elif name == "least_squares":
                    closed = least_squares_minimizer_closed_form(p)
                else:
                    closed = logit_minimizer(p)
                dev = float(np.max(np.abs(generic.values - closed.values)))
                max_closed_dev = dev if max_closed_dev is None else max(max_closed_dev, dev)
        line = (f"family={name} passes={passes}/{args.trials} "
                f"max_roundtrip_error={max_roundtrip:.3e}")
        if max_closed_dev is not None:
            line += f" max_closed_form_dev={max_closed_dev:.3e}"
        print(line)
        if passes < args.trials:
            any_fail = True
    return EXIT_VERIFY if any_fail else EXIT_OK


def cmd_bench(args) -> int:
    import os

    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for a in algorithms:
        if a not in ("gentle", "adaml"):
            raise InputError(f"unknown algorithm {a!r}")
    rows = []
    found_any = False
    for name, (n_train, n_test, d, m) in BENCH_SHAPES.items():
        train_path = os.path.join(args.data_dir, f"{name}.train")
        test_path = os.path.join(args.data_dir, f"{name}.test")
        if not (os.path.exists(train_path) and os.path.exists(test_path)):
            print(f"warning: {name}: missing {name}.train/{name}.test, skipped",
                  file=sys.stderr)
            continue
        found_any = True
        train = _load(train_path, args)
        test = _load(test_path, args)
        shape = (train.n, test.n, train.d, train.m)
        if shape != (n_train, n_test, d, m):
            print(f"warning: {name}: shape {shape} differs from expected "
                  f"{(n_train, n_test, d, m)}", file=sys.stderr)
        names = [train.class_names[j - 1] for j in train.labels]
        for algo in algorithms:
            model = _make_model(algo, args.rounds, args.tree_leaves)
            model.fit(train.features, names)
            labels = _encode_against_model(model, test)
            pred = np.argmax(model.decision_function(test.features), axis=1) + 1
            err = misclassification_error(pred, labels)
            se = error_standard_error(err, test.n)
            target = BENCH_TARGETS.get((name, algo))
            delta = err * 100 - target if target is not None else float("nan")
            rows.append((name, algo, err * 100, se * 100, target, delta))
    if not found_any:
        print("error: no benchmark datasets found", file=sys.stderr)
        return EXIT_INPUT
    print(f"{'dataset':<14}{'algorithm':<10}{'error%':>8}{'se%':>8}"
          f"{'target%':>8}{'delta%':>8}")
    for name, algo, err, se, target, delta in rows:
        tgt = f"{target:8.2f}" if target is not None else f"{'-':>8}"
        print(f"{name:<14}{algo:<10}{err:8.2f}{se:8.2f}{tgt}{delta:8.2f}")
    return EXIT_OK


def _add_io_flags(p):
    p.add_argument("--delimiter", choices=["comma", "whitespace"], default="comma")
    p.add_argument("--label-column", default="last",
                   help="0-based column index or 'last'")
    p.add_argument("--skip-header", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="marginboost")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model on a delimited dataset")
    p.add_argument("--algorithm", required=True, choices=["gentle", "adaml"])
    p.add_argument("--data", required=True)
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--tree-leaves", type=int, default=None)
    p.add_argument("--model-out", default=None)
    p.add_argument("--seed", type=int, default=0)
    _add_io_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a saved model on a test set")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    _add_io_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("curve", help="per-round train/test error table")
    p.add_argument("--algorithm", required=True, choices=["gentle", "adaml"])
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--tree-leaves", type=int, default=None)
    p.add_argument("--output", default=None)
    _add_io_flags(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("consistency", help="numerically verify loss consistency")
    p.add_argument("--family", default="all")
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("bench", help="reproduce the benchmark table")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--algorithms", default="gentle,adaml")
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--tree-leaves", type=int, default=None)
    _add_io_flags(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
