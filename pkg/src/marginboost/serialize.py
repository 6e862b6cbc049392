"""Flat text serialization of trained models.

Floats are written as C99 hex literals, so a save/load round trip is
bit-exact.  Trees are dumped pre-order, one node per line:

    n <feature> <threshold-hex>     internal node
    l <value>                       leaf (hex float or integer class)
"""

from __future__ import annotations

import numpy as np

from .adaboost_ml import AdaBoostMLClassifier
from .data import FirstAppearanceEncoder
from .exceptions import InputError
from .gentleboost import GentleBoostClassifier
from .tree import TreeNode

_MAGIC = "marginboost 1"


def _dump_tree(node: TreeNode, out: list[str], leaf_kind: str):
    if node.is_leaf:
        if leaf_kind == "int":
            out.append(f"l {int(node.value)}")
        else:
            out.append(f"l {float(node.value).hex()}")
    else:
        out.append(f"n {node.feature} {float(node.threshold).hex()}")
        _dump_tree(node.left, out, leaf_kind)
        _dump_tree(node.right, out, leaf_kind)


def _count_nodes(node: TreeNode) -> int:
    return 1 if node.is_leaf else 1 + _count_nodes(node.left) + _count_nodes(node.right)


def _parse_tree(lines, pos: int, leaf_kind: str):
    kind = lines[pos].split(" ", 1)[0]
    if kind == "l":
        raw = lines[pos].split(" ", 1)[1]
        value = int(raw) if leaf_kind == "int" else float.fromhex(raw)
        return TreeNode(value=value), pos + 1
    if kind != "n":
        raise InputError(f"bad tree record at line {pos + 1}: {lines[pos]!r}")
    _, feat, thr = lines[pos].split(" ")
    left, pos = _parse_tree(lines, pos + 1, leaf_kind)
    right, pos = _parse_tree(lines, pos, leaf_kind)
    return TreeNode(feature=int(feat), threshold=float.fromhex(thr),
                    left=left, right=right), pos


def save_model(model, path) -> None:
    out = [_MAGIC]
    if isinstance(model, GentleBoostClassifier):
        out.append("algorithm gentle")
    elif isinstance(model, AdaBoostMLClassifier):
        out.append("algorithm adaml")
    else:
        raise InputError(f"cannot serialize {type(model).__name__}")
    out.append(f"m {model.n_classes_}")
    out.append(f"features {model.n_features_in_}")
    for name in model.encoder_.class_names:
        out.append(f"class {name}")
    if isinstance(model, GentleBoostClassifier):
        out.append(f"learning_rate {float(model.learning_rate).hex()}")
        out.append(f"rounds {len(model.rounds_)}")
        for k, trees in enumerate(model.rounds_):
            out.append(f"round {k}")
            for j, tree in enumerate(trees):
                out.append(f"tree {j} {_count_nodes(tree)}")
                _dump_tree(tree, out, "float")
    else:
        out.append(f"stages {len(model.stages_)}")
        for k, (tree, gamma) in enumerate(model.stages_):
            out.append(f"stage {k} {float(gamma).hex()}")
            out.append(f"tree 0 {_count_nodes(tree)}")
            _dump_tree(tree, out, "int")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


def load_model(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read model file {path}: {exc}") from exc
    if not lines or lines[0] != _MAGIC:
        raise InputError(f"{path}: not a marginboost model file")

    def expect(pos, key):
        parts = lines[pos].split(" ", 1)
        if parts[0] != key:
            raise InputError(f"{path}:{pos + 1}: expected {key!r}, got {lines[pos]!r}")
        return parts[1]

    algorithm = expect(1, "algorithm")
    m = int(expect(2, "m"))
    n_features = int(expect(3, "features"))
    pos = 4
    class_names = []
    for _ in range(m):
        class_names.append(expect(pos, "class"))
        pos += 1
    enc = FirstAppearanceEncoder(class_names)

    if algorithm == "gentle":
        learning_rate = float.fromhex(expect(pos, "learning_rate"))
        pos += 1
        n_rounds = int(expect(pos, "rounds"))
        pos += 1
        rounds = []
        for _ in range(n_rounds):
            expect(pos, "round")
            pos += 1
            trees = []
            for _ in range(m):
                expect(pos, "tree")
                pos += 1
                tree, pos = _parse_tree(lines, pos, "float")
                trees.append(tree)
            rounds.append(trees)
        model = GentleBoostClassifier(n_rounds=max(n_rounds, 1),
                                      learning_rate=learning_rate)
        model.rounds_ = rounds
    elif algorithm == "adaml":
        n_stages = int(expect(pos, "stages"))
        pos += 1
        stages = []
        for _ in range(n_stages):
            gamma = float.fromhex(expect(pos, "stage").split(" ")[1])
            pos += 1
            expect(pos, "tree")
            pos += 1
            tree, pos = _parse_tree(lines, pos, "int")
            stages.append((tree, gamma))
        model = AdaBoostMLClassifier(n_rounds=max(n_stages, 1))
        model.stages_ = stages
        model.effective_rounds_ = n_stages
    else:
        raise InputError(f"{path}: unknown algorithm {algorithm!r}")

    model.encoder_ = enc
    model.classes_ = np.asarray(class_names, dtype=object)
    model.n_classes_ = m
    model.n_features_in_ = n_features
    return model
