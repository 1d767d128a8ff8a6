"""CART decision trees (Gini) and random forests used as alternative pruning classifiers."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import make_rng
from .errors import ConfigError, DomainError
from .svm import TrainingSet

TREE_FORMAT = "svmfim.tree"
FOREST_FORMAT = "svmfim.forest"
MODEL_VERSION = 1


@dataclass(frozen=True)
class TreeConfig:
    max_depth: int = 12
    min_samples_split: int = 2
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ConfigError("max_depth must be >= 1")
        if self.min_samples_split < 2:
            raise ConfigError("min_samples_split must be >= 2")


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 50
    bootstrap: bool = True
    features_per_split: int | str = "sqrt"
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ConfigError("n_trees must be >= 1")
        fps = self.features_per_split
        if fps != "sqrt" and not (isinstance(fps, int) and fps >= 1):
            raise ConfigError("features_per_split must be 'sqrt' or a positive integer")

    def n_features(self, dim: int) -> int:
        if self.features_per_split == "sqrt":
            return max(1, int(math.sqrt(dim)))
        if self.features_per_split > dim:
            raise ConfigError(f"features_per_split={self.features_per_split} exceeds dimension {dim}")
        return self.features_per_split


def _label(neg, pos):
    return 1 if pos >= neg else -1


@dataclass
class DecisionTreeModel:
    """Flat binary tree. Node 0 is the root; leaves have ``feature == -1``.

    Every node (internal ones too) keeps its class counts and majority label
    so that predictions can be truncated at a depth limit.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (n_nodes, 2): negatives, positives
    depth: np.ndarray
    dim: int

    @property
    def labels(self):
        return np.where(self.counts[:, 1] >= self.counts[:, 0], 1, -1)

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def max_depth(self):
        return int(self.depth.max())

    def predict(self, X, max_depth: int | None = None) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DomainError(f"dimension mismatch: model has {self.dim}, got {X.shape[1]}")
        node = np.zeros(X.shape[0], dtype=int)
        rows = np.arange(X.shape[0])
        limit = self.max_depth if max_depth is None else max_depth
        for _ in range(limit):
            f = self.feature[node]
            active = f >= 0
            if not active.any():
                break
            r, nd = rows[active], node[active]
            go_left = X[r, f[active]] < self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
        return self.labels[node]

    def to_dict(self) -> dict:
        return {
            "format": TREE_FORMAT,
            "version": MODEL_VERSION,
            "dim": self.dim,
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
            "depth": self.depth.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTreeModel":
        if d.get("format") != TREE_FORMAT or d.get("version") != MODEL_VERSION:
            raise ValueError(f"not a version-{MODEL_VERSION} tree record")
        return cls(
            np.asarray(d["feature"], dtype=int),
            np.asarray(d["threshold"], dtype=float),
            np.asarray(d["left"], dtype=int),
            np.asarray(d["right"], dtype=int),
            np.asarray(d["counts"], dtype=int).reshape(-1, 2),
            np.asarray(d["depth"], dtype=int),
            int(d["dim"]),
        )


def _best_split_on(x, pos):
    """Lowest weighted Gini split of one feature.

    Returns ``(impurity, threshold)`` or ``None`` when the feature is constant.
    """
    order = np.argsort(x, kind="stable")
    xs = x[order]
    distinct = np.flatnonzero(xs[1:] != xs[:-1])
    if distinct.size == 0:
        return None
    n = len(x)
    cum_pos = np.cumsum(pos[order])
    n_left = distinct + 1.0
    p_left = cum_pos[distinct].astype(float)
    n_right = n - n_left
    p_right = cum_pos[-1] - p_left
    gini_l = 1.0 - (p_left / n_left) ** 2 - ((n_left - p_left) / n_left) ** 2
    gini_r = 1.0 - (p_right / n_right) ** 2 - ((n_right - p_right) / n_right) ** 2
    impurity = (n_left * gini_l + n_right * gini_r) / n
    k = int(np.argmin(impurity))
    lo, hi = xs[distinct[k]], xs[distinct[k] + 1]
    thr = 0.5 * (lo + hi)
    if not lo < thr:
        thr = hi
    return float(impurity[k]), float(thr)


def _grow(X, y, cfg: TreeConfig, rng=None, n_sub=None) -> DecisionTreeModel:
    dim = X.shape[1]
    feature, threshold, left, right, counts, depth = [], [], [], [], [], []
    pos_all = (y > 0).astype(np.int64)

    def new_node(idx, d):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        p = int(pos_all[idx].sum())
        counts.append((len(idx) - p, p))
        depth.append(d)
        return len(feature) - 1

    root = new_node(np.arange(len(y)), 0)
    stack = [(root, np.arange(len(y)))]
    while stack:
        node, idx = stack.pop()
        neg, pos = counts[node]
        if neg == 0 or pos == 0 or depth[node] >= cfg.max_depth or len(idx) < cfg.min_samples_split:
            continue
        if n_sub is None or n_sub >= dim:
            order = list(range(dim))
        else:
            perm = rng.permutation(dim)
            order = sorted(perm[:n_sub].tolist()) + sorted(perm[n_sub:].tolist())
        best = None
        # scan the sampled features; fall back to the rest only if none can split
        for rank, f in enumerate(order):
            if best is not None and n_sub is not None and rank >= n_sub:
                break
            res = _best_split_on(X[idx, f], pos_all[idx])
            if res is not None and (best is None or res[0] < best[0]):
                best = (res[0], res[1], f)
        if best is None:
            continue
        _, thr, f = best
        go_left = X[idx, f] < thr
        feature[node], threshold[node] = f, thr
        li = new_node(idx[go_left], depth[node] + 1)
        ri = new_node(idx[~go_left], depth[node] + 1)
        left[node], right[node] = li, ri
        stack.append((ri, idx[~go_left]))
        stack.append((li, idx[go_left]))
    return DecisionTreeModel(
        np.asarray(feature, dtype=int),
        np.asarray(threshold, dtype=float),
        np.asarray(left, dtype=int),
        np.asarray(right, dtype=int),
        np.asarray(counts, dtype=int).reshape(-1, 2),
        np.asarray(depth, dtype=int),
        dim,
    )


def train_tree(data: TrainingSet, cfg: TreeConfig = TreeConfig()) -> DecisionTreeModel:
    """Greedy CART: midpoint thresholds, weighted Gini, majority leaves (ties to +1)."""
    data.require_both_classes()
    return _grow(data.X, data.y, cfg)


@dataclass
class RandomForestModel:
    trees: list
    tree_seeds: list

    @property
    def dim(self):
        return self.trees[0].dim

    def predict(self, X, n_trees: int | None = None) -> np.ndarray:
        trees = self.trees if n_trees is None else self.trees[:n_trees]
        votes = sum(t.predict(X) for t in trees)
        return np.where(votes >= 0, 1, -1)

    def to_dict(self) -> dict:
        return {
            "format": FOREST_FORMAT,
            "version": MODEL_VERSION,
            "tree_seeds": list(self.tree_seeds),
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForestModel":
        if d.get("format") != FOREST_FORMAT or d.get("version") != MODEL_VERSION:
            raise ValueError(f"not a version-{MODEL_VERSION} forest record")
        return cls([DecisionTreeModel.from_dict(t) for t in d["trees"]], list(d["tree_seeds"]))


def train_forest(data: TrainingSet, tree_cfg: TreeConfig = TreeConfig(),
                 cfg: ForestConfig = ForestConfig()) -> RandomForestModel:
    data.require_both_classes()
    n_sub = cfg.n_features(data.dim)
    n = len(data)
    trees, seeds = [], []
    for t in range(cfg.n_trees):
        rng = make_rng(cfg.rng_seed, "forest", t)
        seeds.append([cfg.rng_seed, t])
        if cfg.bootstrap:
            idx = np.sort(rng.integers(0, n, size=n))
            X, y = data.X[idx], data.y[idx]
        else:
            X, y = data.X, data.y
        trees.append(_grow(X, y, tree_cfg, rng, n_sub))
    return RandomForestModel(trees, seeds)


def predict_class(model, x) -> int:
    """Single-vector prediction for a tree or forest."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DomainError("predict_class expects a single feature vector")
    return int(model.predict(x[None, :])[0])
