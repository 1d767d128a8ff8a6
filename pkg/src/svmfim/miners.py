"""Exact frequent-itemset miners: brute force (oracle), Apriori, FP-Growth."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

from .errors import ConfigError, EmptyDatabaseError, GuardError
from .txdb import TransactionDb

BRUTE_FORCE_MAX_ITEMS = 20


@dataclass(frozen=True)
class MiningConfig:
    minsup: float
    max_len: int | None = None

    def __post_init__(self):
        if not (isinstance(self.minsup, (int, float)) and 0.0 < self.minsup <= 1.0):
            raise ConfigError(f"minsup must lie in (0, 1], got {self.minsup!r}")
        if self.max_len is not None and self.max_len < 1:
            raise ConfigError("max_len must be >= 1")


def min_count(minsup: float, n: int) -> int:
    """Smallest absolute count c with c / n >= minsup (float comparison)."""
    c = max(1, math.ceil(minsup * n))
    while c > 1 and (c - 1) / n >= minsup:
        c -= 1
    while c / n < minsup:
        c += 1
    return c


@dataclass
class FrequentItemsets:
    """Itemset -> absolute count, with the database size used for relative supports.

    Iteration is lexicographic by item sequence.
    """

    counts: dict
    n_transactions: int
    minsup: float

    def __post_init__(self):
        self.counts = {k: self.counts[k] for k in sorted(self.counts)}

    def __len__(self):
        return len(self.counts)

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.counts)

    def __contains__(self, itemset):
        return tuple(itemset) in self.counts

    def __eq__(self, other):
        if not isinstance(other, FrequentItemsets):
            return NotImplemented
        return self.n_transactions == other.n_transactions and self.counts == other.counts

    def support(self, itemset) -> float:
        return self.counts[tuple(itemset)] / self.n_transactions

    def supports(self) -> dict:
        return {k: c / self.n_transactions for k, c in self.counts.items()}

    def to_fimi(self) -> str:
        """FIMI output convention: ``<ids> #SUP: <count>`` per line."""
        return "".join(f"{' '.join(map(str, k))} #SUP: {c}\n" for k, c in self.counts.items())


def _check_db(db: TransactionDb):
    if len(db) == 0:
        raise EmptyDatabaseError("cannot mine an empty database")


def brute_force_mine(db: TransactionDb, cfg: MiningConfig) -> FrequentItemsets:
    """Enumerate every itemset over the items present in ``db``. Test oracle only."""
    _check_db(db)
    if db.n_items > BRUTE_FORCE_MAX_ITEMS:
        raise GuardError(f"brute force refuses n_items={db.n_items} > {BRUTE_FORCE_MAX_ITEMS}")
    n = len(db)
    threshold = min_count(cfg.minsup, n)
    present = [i for i in range(db.n_items) if db.item_counts()[i] > 0]
    top = len(present) if cfg.max_len is None else min(cfg.max_len, len(present))
    out = {}
    for k in range(1, top + 1):
        for x in combinations(present, k):
            xs = set(x)
            c = sum(1 for t in db.sets if xs <= t)
            if c >= threshold:
                out[x] = c
    return FrequentItemsets(out, n, cfg.minsup)


def apriori_join(frequent_k: list) -> list:
    """Join k-itemsets sharing a (k-1)-prefix, then drop candidates with an
    infrequent k-subset. ``frequent_k`` must be sorted."""
    known = set(frequent_k)
    out = []
    for i, a in enumerate(frequent_k):
        prefix = a[:-1]
        for b in frequent_k[i + 1:]:
            if b[:-1] != prefix:
                break
            cand = a + (b[-1],)
            if all(cand[:j] + cand[j + 1:] in known for j in range(len(cand) - 2)):
                out.append(cand)
    return out


def count_candidates(transactions, candidates: list, k: int) -> dict:
    """One pass over ``transactions`` counting each k-candidate."""
    counts = dict.fromkeys(candidates, 0)
    n_cand = len(candidates)
    cand_sets = None
    for t in transactions:
        if len(t) < k:
            continue
        if math.comb(len(t), k) <= n_cand:
            for sub in combinations(t, k):
                if sub in counts:
                    counts[sub] += 1
        else:
            if cand_sets is None:
                cand_sets = [(c, frozenset(c)) for c in candidates]
            ts = frozenset(t)
            for c, cs in cand_sets:
                if cs <= ts:
                    counts[c] += 1
    return counts


def apriori_mine(db: TransactionDb, cfg: MiningConfig) -> FrequentItemsets:
    _check_db(db)
    n = len(db)
    threshold = min_count(cfg.minsup, n)
    item_counts = db.item_counts()
    level = {(i,): int(c) for i, c in enumerate(item_counts) if c >= threshold}
    out = dict(level)
    keep = set(i for (i,) in level)
    # items below threshold can never appear in a frequent superset
    transactions = [tuple(i for i in t if i in keep) for t in db.transactions]
    k = 1
    while level and (cfg.max_len is None or k < cfg.max_len):
        candidates = apriori_join(sorted(level))
        k += 1
        if not candidates:
            break
        counts = count_candidates(transactions, candidates, k)
        level = {c: v for c, v in counts.items() if v >= threshold}
        out.update(level)
    return FrequentItemsets(out, n, cfg.minsup)


class FpNode:
    __slots__ = ("item", "count", "parent", "children")

    def __init__(self, item, parent):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children = {}

    def sorted_children(self):
        return [self.children[k] for k in sorted(self.children)]

    def __repr__(self):
        return f"FpNode({self.item}:{self.count})"


@dataclass
class FpTree:
    root: FpNode
    header: dict = field(default_factory=dict)  # item -> [nodes] in insertion order
    item_order: list = field(default_factory=list)  # frequency descending, ties by id
    min_count: int = 1

    def chain_count(self, item) -> int:
        return sum(node.count for node in self.header[item])

    def insert(self, path, count=1):
        node = self.root
        for item in path:
            child = node.children.get(item)
            if child is None:
                child = FpNode(item, node)
                node.children[item] = child
                self.header.setdefault(item, []).append(child)
            child.count += count
            node = child

    def prefix_path(self, node):
        path = []
        node = node.parent
        while node is not self.root:
            path.append(node.item)
            node = node.parent
        path.reverse()
        return path


def _tree_from_weighted(paths, threshold) -> FpTree:
    counts = {}
    for path, w in paths:
        for i in path:
            counts[i] = counts.get(i, 0) + w
    order = sorted((i for i, c in counts.items() if c >= threshold), key=lambda i: (-counts[i], i))
    rank = {i: r for r, i in enumerate(order)}
    tree = FpTree(FpNode(None, None), {}, order, threshold)
    for path, w in paths:
        kept = sorted((i for i in path if i in rank), key=rank.__getitem__)
        if kept:
            tree.insert(kept, w)
    return tree


def build_fptree(db: TransactionDb, cfg: MiningConfig) -> FpTree:
    """Insert frequency-ordered, filtered transactions as prefix paths."""
    _check_db(db)
    threshold = min_count(cfg.minsup, len(db))
    return _tree_from_weighted([(t, 1) for t in db.transactions], threshold)


def _fpgrowth(tree: FpTree, suffix: tuple, out: dict, max_len):
    # least frequent first, so each conditional base only holds higher-ranked items
    for item in reversed(tree.item_order):
        nodes = tree.header.get(item)
        if not nodes:
            continue
        itemset = tuple(sorted(suffix + (item,)))
        out[itemset] = sum(n.count for n in nodes)
        if max_len is not None and len(itemset) >= max_len:
            continue
        base = [(tree.prefix_path(n), n.count) for n in nodes]
        base = [(p, w) for p, w in base if p]
        if not base:
            continue
        cond = _tree_from_weighted(base, tree.min_count)
        if cond.item_order:
            _fpgrowth(cond, suffix + (item,), out, max_len)


def fpgrowth_mine(db: TransactionDb, cfg: MiningConfig) -> FrequentItemsets:
    tree = build_fptree(db, cfg)
    out = {}
    _fpgrowth(tree, (), out, cfg.max_len)
    return FrequentItemsets(out, len(db), cfg.minsup)


MINERS = {
    "apriori": apriori_mine,
    "fpgrowth": fpgrowth_mine,
    "bruteforce": brute_force_mine,
}
