"""Association rules and their support / confidence / lift metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .errors import AggregationError, ConfigError, UndefinedRuleError
from .miners import FrequentItemsets
from .txdb import TransactionDb, canonical

DEFAULT_TOP_K = 20


@dataclass(frozen=True)
class AssociationRule:
    antecedent: tuple
    consequent: tuple
    support: float
    confidence: float
    lift: float

    def sort_key(self):
        return (-self.confidence, -self.support, self.antecedent, self.consequent)


@dataclass(frozen=True)
class RuleConfig:
    minconf: float = 0.0
    top_k: int = DEFAULT_TOP_K

    def __post_init__(self):
        if not 0.0 <= self.minconf <= 1.0:
            raise ConfigError("minconf must lie in [0, 1]")
        if self.top_k < 1:
            raise ConfigError("top_k must be >= 1")


class _SupportSource:
    """Supports from a FrequentItemsets, falling back to counting in a database."""

    def __init__(self, fi: FrequentItemsets | None, db: TransactionDb | None):
        self.fi = fi
        self.db = db

    def __call__(self, itemset) -> float:
        if self.fi is not None and itemset in self.fi.counts:
            return self.fi.support(itemset)
        if self.db is None:
            raise KeyError(f"support of {itemset} unavailable without a database")
        return self.db.count(itemset) / len(self.db)


def _metrics(sup, x, y, xy):
    s_x, s_y, s_xy = sup(x), sup(y), sup(xy)
    if s_x == 0 or s_y == 0:
        raise UndefinedRuleError(f"rule {x} -> {y} has a zero-support side")
    conf = s_xy / s_x
    return s_xy, conf, conf / s_y


def rule_metrics(source, antecedent: Sequence[int], consequent: Sequence[int]) -> tuple:
    """Return ``(support, confidence, lift)`` of ``antecedent -> consequent``.

    ``source`` is a FrequentItemsets (supports looked up) or a TransactionDb
    (supports counted).
    """
    x, y = canonical(antecedent), canonical(consequent)
    if not x or not y:
        raise UndefinedRuleError("antecedent and consequent must be non-empty")
    if set(x) & set(y):
        raise UndefinedRuleError("antecedent and consequent must be disjoint")
    if isinstance(source, FrequentItemsets):
        sup = _SupportSource(source, None)
    else:
        sup = _SupportSource(None, source)
    return _metrics(sup, x, y, canonical(x + y))


def generate_rules(fi: FrequentItemsets, db: TransactionDb | None = None,
                   cfg: RuleConfig = RuleConfig()) -> list:
    """All rules X -> Z\\X over frequent Z with confidence >= minconf.

    Sorted by confidence desc, support desc, then antecedent and consequent.
    """
    sup = _SupportSource(fi, db)
    rules = []
    for z in fi:
        if len(z) < 2:
            continue
        for r in range(1, len(z)):
            for x in combinations(z, r):
                y = tuple(i for i in z if i not in x)
                s, conf, lift = _metrics(sup, x, y, z)
                if conf >= cfg.minconf:
                    rules.append(AssociationRule(x, y, s, conf, lift))
    rules.sort(key=AssociationRule.sort_key)
    return rules


def aggregate_topk(rules: Sequence[AssociationRule], k: int = DEFAULT_TOP_K) -> tuple:
    """Mean (support, confidence, lift) over the first ``k`` rules."""
    if k < 1:
        raise ConfigError("k must be >= 1")
    if not rules:
        raise AggregationError("cannot aggregate an empty rule list")
    top = rules[:k]
    n = len(top)
    return (
        math.fsum(r.support for r in top) / n,
        math.fsum(r.confidence for r in top) / n,
        math.fsum(r.lift for r in top) / n,
    )


def fmt6(x) -> str:
    """Six significant digits; empty for absent values."""
    if x is None:
        return ""
    return f"{x:.6g}"


def _ids(itemset) -> str:
    return '"' + " ".join(map(str, itemset)) + '"'


def rules_to_csv(rules: Sequence[AssociationRule]) -> str:
    lines = ["antecedent,consequent,support,confidence,lift"]
    for r in rules:
        lines.append(",".join([_ids(r.antecedent), _ids(r.consequent),
                               fmt6(r.support), fmt6(r.confidence), fmt6(r.lift)]))
    return "\n".join(lines) + "\n"
