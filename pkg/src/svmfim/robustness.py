"""Noise injection and the noise-level sweep."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ._rng import derive_seed, make_rng
from .errors import AggregationError, ConfigError
from .rules import RuleConfig, aggregate_topk, fmt6, generate_rules
from .svm import TrainingSet
from .svmminer import EncoderConfig, PipelineConfig, svm_guided_mine
from .txdb import TransactionDb

DEFAULT_LEVELS = (0.0, 0.05, 0.10, 0.20)


@dataclass(frozen=True)
class NoiseSpec:
    label_flip_prob: float = 0.0
    item_swap_prob: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("label_flip_prob", "item_swap_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")


def _check_p(p):
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"noise probability must lie in [0, 1], got {p}")


def inject_label_noise(data: TrainingSet, p: float, seed: int) -> TrainingSet:
    """Flip each label independently with probability ``p``."""
    _check_p(p)
    flip = make_rng(seed, "labels").random(len(data)) < p
    return TrainingSet(data.X.copy(), np.where(flip, -data.y, data.y))


def inject_transaction_noise(db: TransactionDb, p: float, seed: int) -> TransactionDb:
    """With probability ``p`` per transaction, swap one member item for a non-member.

    Transactions holding every item only lose one.
    """
    _check_p(p)
    if db.n_items < 2:
        raise ConfigError("transaction noise needs at least 2 items")
    if p == 0.0:
        return db
    rng = make_rng(seed, "transactions")
    hit = rng.random(len(db)) < p
    out = []
    for t, h in zip(db.transactions, hit):
        if not h:
            out.append(t)
            continue
        members = set(t)
        drop = t[int(rng.integers(len(t)))]
        if len(t) < db.n_items:
            while True:
                add = int(rng.integers(db.n_items))
                if add not in members:
                    break
            members.add(add)
        members.discard(drop)
        out.append(tuple(sorted(members)))
    return TransactionDb(tuple(out), db.n_items, db.item_labels, db.source + f"[swap p={p}]",
                         db.seed_patterns)


def perturb(db: TransactionDb, spec: NoiseSpec):
    """Apply ``spec`` to a database; returns the noisy database and a training-set transform."""
    noisy = inject_transaction_noise(db, spec.item_swap_prob, derive_seed(spec.rng_seed, "swap"))
    flip_seed = derive_seed(spec.rng_seed, "flip")

    def transform(data: TrainingSet) -> TrainingSet:
        return inject_label_noise(data, spec.label_flip_prob, flip_seed)

    return noisy, (transform if spec.label_flip_prob > 0 else None)


@dataclass
class SweepRow:
    level: float
    seed: int
    support: float | None
    confidence: float | None
    lift: float | None
    f1: float

    def csv(self, with_seed=True) -> str:
        vals = [fmt6(self.level)] + ([str(self.seed)] if with_seed else [])
        vals += [fmt6(self.support), fmt6(self.confidence), fmt6(self.lift), fmt6(self.f1)]
        return ",".join(vals)


def pipeline_metrics(db: TransactionDb, cfg: PipelineConfig, enc: EncoderConfig,
                     rules: RuleConfig = RuleConfig(), train_transform=None) -> tuple:
    """Run the guided miner and aggregate its rules.

    Returns ``((support, confidence, lift) or None, report)``.
    """
    fi, report = svm_guided_mine(db, cfg, enc, train_transform)
    try:
        agg = aggregate_topk(generate_rules(fi, db, rules), rules.top_k)
    except AggregationError:
        agg = None
    return agg, report


def cell_configs(pipeline: PipelineConfig, enc: EncoderConfig, k: int):
    """Per-seed configs of sweep column ``k``; column 0 uses the base seeds."""
    return replace(pipeline, rng_seed=pipeline.rng_seed + k), replace(enc, rng_seed=enc.rng_seed + k)


def noise_sweep(db: TransactionDb, pipeline: PipelineConfig, enc: EncoderConfig,
                levels: Sequence[float] = DEFAULT_LEVELS, n_seeds: int = 10,
                rules: RuleConfig = RuleConfig(), label_noise: bool = True,
                transaction_noise: bool = True) -> list:
    """Run the pipeline at each noise level for ``n_seeds`` seeds.

    Both label flips and item swaps are applied at the level's rate unless
    switched off. Returns one SweepRow per (level, seed), ordered by level then seed.
    """
    levels = list(levels)
    if not levels or levels[0] != 0.0 or any(b < a for a, b in zip(levels, levels[1:])):
        raise ConfigError("levels must be sorted ascending and start at 0")
    for p in levels:
        _check_p(p)
    if n_seeds < 1:
        raise ConfigError("n_seeds must be >= 1")
    rows = []
    for li, p in enumerate(levels):
        for k in range(n_seeds):
            cfg, cenc = cell_configs(pipeline, enc, k)
            spec = NoiseSpec(p if label_noise else 0.0, p if transaction_noise else 0.0,
                             derive_seed(pipeline.rng_seed, "noise", li, k))
            noisy, transform = perturb(db, spec)
            agg, report = pipeline_metrics(noisy, cfg, cenc, rules, transform)
            s, c, lift = agg if agg is not None else (None, None, None)
            rows.append(SweepRow(p, k, s, c, lift, report.f1))
    return rows


def _mean(vals):
    vals = [v for v in vals if v is not None]
    return float(np.mean(vals)) if vals else None


def aggregate_sweep(rows: Sequence[SweepRow]) -> list:
    """Per-level means; absent metrics are skipped, and stay absent if all are."""
    out = []
    for p in sorted({r.level for r in rows}):
        sel = [r for r in rows if r.level == p]
        out.append(SweepRow(p, len(sel), _mean(r.support for r in sel), _mean(r.confidence for r in sel),
                            _mean(r.lift for r in sel), _mean(r.f1 for r in sel)))
    return out


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    return "level,seed,support,confidence,lift,f1\n" + "".join(r.csv() + "\n" for r in rows)


def summary_csv(rows: Sequence[SweepRow]) -> str:
    return "level,support,confidence,lift,f1\n" + "".join(r.csv(with_seed=False) + "\n" for r in rows)
