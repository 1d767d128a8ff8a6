"""Transaction databases: loaders, exact support counting, synthetic data.

Items are densified to contiguous integer ids at load time. A transaction is
a strictly increasing tuple of ids; supports are relative (fraction of
transactions).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._rng import make_rng
from .errors import ConfigError, DomainError, EmptyDatabaseError, FormatError, ParseError

Itemset = tuple  # strictly increasing tuple[int, ...]

_TOKEN = re.compile(r"[^ \t\r\n\v\f]+")


def canonical(items: Iterable[int]) -> tuple:
    return tuple(sorted(set(int(i) for i in items)))


@dataclass(frozen=True, eq=False)
class TransactionDb:
    transactions: tuple
    n_items: int
    item_labels: dict | None = None
    source: str = ""
    seed_patterns: tuple = ()
    # per transaction: index of the injected seed pattern, or -1 (synthetic only)
    injections: tuple = ()

    def __post_init__(self):
        for t in self.transactions:
            if t and (t[0] < 0 or t[-1] >= self.n_items):
                raise DomainError(f"transaction {t} outside universe of size {self.n_items}")
        object.__setattr__(self, "_sets", None)
        object.__setattr__(self, "_item_counts", None)

    def __len__(self):
        return len(self.transactions)

    def __iter__(self):
        return iter(self.transactions)

    def __eq__(self, other):
        # item_labels and provenance are metadata; equality is on content
        if not isinstance(other, TransactionDb):
            return NotImplemented
        return self.n_items == other.n_items and self.transactions == other.transactions

    def __hash__(self):
        return hash((self.n_items, self.transactions))

    @property
    def sets(self) -> tuple:
        if self._sets is None:
            object.__setattr__(self, "_sets", tuple(frozenset(t) for t in self.transactions))
        return self._sets

    def item_counts(self) -> np.ndarray:
        """Number of transactions containing each item (length ``n_items``)."""
        if self._item_counts is None:
            counts = np.zeros(self.n_items, dtype=np.int64)
            for t in self.transactions:
                counts[list(t)] += 1
            counts.flags.writeable = False
            object.__setattr__(self, "_item_counts", counts)
        return self._item_counts

    def subset(self, indices: Sequence[int], source: str | None = None) -> "TransactionDb":
        return TransactionDb(
            tuple(self.transactions[i] for i in indices),
            self.n_items,
            self.item_labels,
            source if source is not None else self.source + "[subset]",
            self.seed_patterns,
            tuple(self.injections[i] for i in indices) if self.injections else (),
        )

    def count(self, itemset: Sequence[int]) -> int:
        """Absolute support count of ``itemset``."""
        x = canonical(itemset)
        for i in x:
            if i < 0 or i >= self.n_items:
                raise DomainError(f"item {i} outside universe of size {self.n_items}")
        if not x:
            return len(self.transactions)
        if len(x) == 1:
            return int(self.item_counts()[x[0]])
        xs = frozenset(x)
        return sum(1 for t in self.sets if xs <= t)


def support(db: TransactionDb, itemset: Sequence[int]) -> float:
    """Relative support of ``itemset`` in ``db``; the empty set has support 1."""
    if len(db) == 0:
        raise EmptyDatabaseError("support of an empty database is undefined")
    return db.count(itemset) / len(db)


def load_fimi(text: str | Iterable[str], source: str = "fimi") -> TransactionDb:
    """Parse FIMI text: one transaction per line, whitespace-separated item ids.

    Blank lines are skipped and duplicate items within a line are dropped.
    """
    lines = text.splitlines() if isinstance(text, str) else (ln.rstrip("\r\n") for ln in text)
    transactions = []
    max_item = -1
    for lineno, line in enumerate(lines, start=1):
        items = []
        for m in _TOKEN.finditer(line):
            tok = m.group()
            if not (tok.isascii() and tok.isdigit()):
                raise ParseError(f"invalid item token {tok!r}", line=lineno, column=m.start() + 1)
            items.append(int(tok))
        if not items:
            continue
        t = canonical(items)
        max_item = max(max_item, t[-1])
        transactions.append(t)
    if not transactions:
        raise EmptyDatabaseError("no transactions found in FIMI input")
    return TransactionDb(tuple(transactions), max_item + 1, None, source)


def dump_fimi(db: TransactionDb) -> str:
    return "".join(" ".join(map(str, t)) + "\n" for t in db.transactions)


def load_categorical_csv(
    text: str | Iterable[str],
    delimiter: str = ",",
    drop_columns: Sequence[int] = (),
    source: str = "csv",
) -> TransactionDb:
    """Convert categorical rows (e.g. Mushroom) into transactions.

    Every retained cell becomes the token ``col<j>=<value>``; tokens get dense
    ids in first-seen order. No quoting is supported.
    """
    if len(delimiter) != 1:
        raise ConfigError("delimiter must be a single character")
    lines = text.splitlines() if isinstance(text, str) else (ln.rstrip("\r\n") for ln in text)
    dropped = set(drop_columns)
    ids: dict[str, int] = {}
    transactions = []
    width = None
    for row_idx, line in enumerate(ln for ln in lines if ln.strip()):
        cells = line.split(delimiter)
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise FormatError(f"expected {width} columns, found {len(cells)}", row=row_idx)
        items = []
        for j, cell in enumerate(cells):
            if j in dropped:
                continue
            token = f"col{j}={cell.strip()}"
            if token not in ids:
                ids[token] = len(ids)
            items.append(ids[token])
        if items:
            transactions.append(canonical(items))
    if not transactions:
        raise EmptyDatabaseError("no rows found in CSV input")
    labels = {i: tok for tok, i in ids.items()}
    return TransactionDb(tuple(transactions), len(ids), labels, source)


@dataclass(frozen=True)
class SyntheticSpec:
    n_transactions: int = 1000
    n_items: int = 50
    n_seed_patterns: int = 5
    mean_transaction_len: float = 5.0
    pattern_injection_prob: float = 0.5
    rng_seed: int = 0
    pattern_len: int = 3

    def validate(self):
        for name in ("n_transactions", "n_items", "n_seed_patterns", "pattern_len"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0.0 <= self.pattern_injection_prob <= 1.0:
            raise ConfigError("pattern_injection_prob must lie in [0, 1]")
        if not 1.0 <= self.mean_transaction_len <= self.n_items:
            raise ConfigError("mean_transaction_len must lie in [1, n_items]")
        if self.pattern_len > self.n_items:
            raise ConfigError("pattern_len exceeds n_items")


def gen_synthetic(spec: SyntheticSpec) -> TransactionDb:
    """Generate a basket database with planted seed patterns.

    Each transaction draws a Poisson-sized set of uniform background items
    (at least one) and, with probability ``pattern_injection_prob``, the full
    itemset of one uniformly chosen seed pattern.
    """
    spec.validate()
    rng = make_rng(spec.rng_seed, "synthetic")
    patterns = tuple(
        canonical(rng.choice(spec.n_items, size=spec.pattern_len, replace=False))
        for _ in range(spec.n_seed_patterns)
    )
    n = spec.n_transactions
    lengths = np.clip(rng.poisson(spec.mean_transaction_len, size=n), 1, spec.n_items)
    inject = rng.random(n) < spec.pattern_injection_prob
    which = rng.integers(0, spec.n_seed_patterns, size=n)
    transactions = []
    for k in range(n):
        items = set(rng.choice(spec.n_items, size=int(lengths[k]), replace=False).tolist())
        if inject[k]:
            items.update(patterns[which[k]])
        transactions.append(canonical(items))
    return TransactionDb(
        tuple(transactions),
        spec.n_items,
        None,
        f"synthetic(seed={spec.rng_seed})",
        patterns,
        tuple(int(w) if i else -1 for w, i in zip(which, inject)),
    )


def read_db(path, fmt: str = "fimi", delimiter: str = ",", drop_columns: Sequence[int] = ()) -> TransactionDb:
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if fmt == "fimi":
        return load_fimi(text, source=str(path))
    if fmt == "csv":
        return load_categorical_csv(text, delimiter, drop_columns, source=str(path))
    raise ConfigError(f"unknown format {fmt!r}")


DB5_ITEMS = ((0, 1, 2), (0, 1), (0, 2), (1, 2), (0, 1, 2))


def db5() -> TransactionDb:
    """The five-transaction toy database used throughout the tests and docs."""
    return TransactionDb(DB5_ITEMS, 3, {0: "a", 1: "b", 2: "c"}, "db5")
