"""Classifier-guided frequent-itemset mining.

Deciding whether a candidate itemset is frequent is treated as binary
classification: candidates are encoded as feature vectors, labelled +1 when
their support reaches ``minsup`` on a labelling partition of the database,
and a classifier trained on them prunes the level-wise search over the full
database. With ``verify`` on, accepted candidates are still counted exactly,
so the output is always a subset of the exact answer with exact supports.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from ._rng import derive_seed, make_rng
from .baselines import ForestConfig, TreeConfig, train_forest, train_tree
from .errors import ConfigError, DomainError, EvaluationError, TrainingError
from .miners import FrequentItemsets, apriori_join, count_candidates, min_count
from .svm import KernelSpec, SvmConfig, TrainingSet, svm_train
from .txdb import TransactionDb


@dataclass(frozen=True)
class EncoderConfig:
    m_indicator_items: int = 20
    include_stats: bool = True
    sample_fraction: float = 0.2
    rng_seed: int = 0

    def __post_init__(self):
        if self.m_indicator_items < 1:
            raise ConfigError("m_indicator_items must be >= 1")
        if not 0.0 < self.sample_fraction <= 1.0:
            raise ConfigError("sample_fraction must lie in (0, 1]")

    @property
    def dim(self):
        return self.m_indicator_items + (5 if self.include_stats else 0)


@dataclass(frozen=True)
class SvmClassifier:
    kernel: KernelSpec = KernelSpec()
    svm: SvmConfig = SvmConfig()
    name = "svm"


@dataclass(frozen=True)
class TreeClassifier:
    tree: TreeConfig = TreeConfig()
    name = "dt"


@dataclass(frozen=True)
class ForestClassifier:
    tree: TreeConfig = TreeConfig()
    forest: ForestConfig = ForestConfig()
    name = "rf"


@dataclass(frozen=True)
class PipelineConfig:
    minsup: float
    train_fraction: float = 0.5
    classifier: SvmClassifier | TreeClassifier | ForestClassifier = SvmClassifier(svm=SvmConfig(C=10.0))
    verify: bool = True
    max_len: int | None = None
    rng_seed: int = 0
    relax_factor: float = 0.5
    holdout_fraction: float = 0.2
    max_train_candidates: int = 2000

    def __post_init__(self):
        if not 0.0 < self.minsup <= 1.0:
            raise ConfigError(f"minsup must lie in (0, 1], got {self.minsup!r}")
        if not 0.0 < self.train_fraction <= 1.0:
            raise ConfigError("train_fraction must lie in (0, 1]")
        if not 0.0 < self.relax_factor <= 1.0:
            raise ConfigError("relax_factor must lie in (0, 1]")
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ConfigError("holdout_fraction must lie in (0, 1)")
        if self.max_len is not None and self.max_len < 1:
            raise ConfigError("max_len must be >= 1")
        if self.max_train_candidates < 2:
            raise ConfigError("max_train_candidates must be >= 2")


@dataclass
class LabeledCandidate:
    itemset: tuple
    features: np.ndarray
    label: int
    exact_support: float


@dataclass
class ClassifierReport:
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0
    n_candidates_scored: int = 0
    n_pruned: int = 0
    n_verified: int = 0
    n_held_out: int = 0
    # metrics that were 0/0 and reported as 0
    undefined: tuple = ()

    FIELDS = ("precision", "recall", "f1", "n_candidates_scored", "n_pruned",
              "n_verified", "n_held_out", "undefined")

    @property
    def n_accepted(self):
        return self.n_candidates_scored - self.n_pruned

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.FIELDS}
        d["undefined"] = list(self.undefined)
        return d

    def to_kv(self) -> str:
        lines = []
        for k in self.FIELDS:
            v = getattr(self, k)
            if isinstance(v, float):
                v = f"{v:.6g}"
            elif isinstance(v, tuple):
                v = ",".join(v)
            lines.append(f"{k}={v}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        d = self.as_dict()
        d["undefined"] = " ".join(self.undefined)
        vals = [f"{v:.6g}" if isinstance(v, float) else str(v) for v in d.values()]
        return ",".join(self.FIELDS) + "\n" + ",".join(vals) + "\n"


@dataclass
class DbStats:
    """Per-database quantities the encoder needs, computed once."""

    n_transactions: int
    singleton_support: np.ndarray
    top_items: tuple
    sample: tuple  # frozensets of sampled transactions

    @property
    def slot(self):
        return {item: k for k, item in enumerate(self.top_items)}


def item_stats(db: TransactionDb, enc: EncoderConfig, top_items: Sequence[int] | None = None) -> DbStats:
    """Singleton supports, the top-M item ranking (unless given) and the sample."""
    n = len(db)
    sup = db.item_counts() / n
    if top_items is None:
        ranking = sorted(range(db.n_items), key=lambda i: (-sup[i], i))
        top = tuple(ranking[: enc.m_indicator_items])
    else:
        top = tuple(top_items)
    if enc.sample_fraction >= 1.0:
        sample = db.sets
    else:
        size = max(1, int(round(enc.sample_fraction * n)))
        idx = np.sort(make_rng(enc.rng_seed, "sample").choice(n, size=size, replace=False))
        sample = tuple(db.sets[i] for i in idx)
    return DbStats(n, sup, top, sample)


def encode_candidate(itemset: Sequence[int], stats: DbStats, enc: EncoderConfig) -> np.ndarray:
    """Feature vector: top-M indicator block, then (optionally) size, min/mean/max
    singleton support of the members, and the support estimated on a sample."""
    return encode_many([tuple(itemset)], stats, enc)[0]


def encode_many(itemsets: Sequence[tuple], stats: DbStats, enc: EncoderConfig) -> np.ndarray:
    n_items = len(stats.singleton_support)
    out = np.zeros((len(itemsets), enc.dim))
    slot = stats.slot
    m = enc.m_indicator_items
    for r, x in enumerate(itemsets):
        if not x:
            raise DomainError("cannot encode the empty itemset")
        for i in x:
            if not 0 <= i < n_items:
                raise DomainError(f"item {i} outside universe of size {n_items}")
            k = slot.get(i)
            if k is not None:
                out[r, k] = 1.0
        if enc.include_stats:
            s = stats.singleton_support[list(x)]
            xs = frozenset(x)
            est = sum(1 for t in stats.sample if xs <= t) / len(stats.sample)
            out[r, m:] = (len(x), s.min(), s.mean(), s.max(), est)
    return out


def _split_transactions(n: int, fraction: float, seed: int) -> np.ndarray:
    if fraction >= 1.0:
        return np.arange(n)
    size = max(1, int(round(fraction * n)))
    return np.sort(make_rng(seed, "partition").permutation(n)[:size])


def enumerate_candidates(db: TransactionDb, threshold_count: int, max_len=None) -> dict:
    """Level-wise candidate generation; returns every generated candidate with its
    exact count, including the ones below ``threshold_count`` (the negative border)."""
    counts = db.item_counts()
    present = [i for i in range(db.n_items) if counts[i] > 0]
    out = {(i,): int(counts[i]) for i in present}
    level = sorted(x for x in out if out[x] >= threshold_count)
    k = 1
    while level and (max_len is None or k < max_len):
        cands = apriori_join(level)
        k += 1
        if not cands:
            break
        got = count_candidates(db.transactions, cands, k)
        out.update(got)
        level = sorted(x for x, c in got.items() if c >= threshold_count)
    return out


def labelling_partition(db: TransactionDb, cfg: PipelineConfig) -> TransactionDb:
    idx = _split_transactions(len(db), cfg.train_fraction, derive_seed(cfg.rng_seed, "split"))
    return db.subset(idx, source=db.source + "[labelling]")


def labelling_stats(part: TransactionDb, enc: EncoderConfig) -> DbStats:
    return item_stats(part, replace(enc, rng_seed=derive_seed(enc.rng_seed, "labelling")))


def build_training_set(db: TransactionDb, cfg: PipelineConfig, enc: EncoderConfig) -> tuple:
    """Return ``(train, held_out)`` lists of LabeledCandidate.

    Candidates are generated level-wise on the labelling partition with the
    relaxed threshold ``minsup * relax_factor`` and labelled at ``minsup``.
    """
    part = labelling_partition(db, cfg)
    n = len(part)
    relaxed = min_count(cfg.minsup * cfg.relax_factor, n)
    label_at = min_count(cfg.minsup, n)
    counted = enumerate_candidates(part, relaxed, cfg.max_len)
    itemsets = sorted(counted)
    rng = make_rng(cfg.rng_seed, "candidates")
    if len(itemsets) > cfg.max_train_candidates:
        keep = np.sort(rng.choice(len(itemsets), size=cfg.max_train_candidates, replace=False))
        itemsets = [itemsets[i] for i in keep]
    X = encode_many(itemsets, labelling_stats(part, enc), enc)
    cands = [
        LabeledCandidate(x, X[r], 1 if counted[x] >= label_at else -1, counted[x] / n)
        for r, x in enumerate(itemsets)
    ]
    order = rng.permutation(len(cands))
    n_hold = int(round(cfg.holdout_fraction * len(cands)))
    if len(cands) >= 2:
        n_hold = min(max(n_hold, 1), len(cands) - 1)
    held = [cands[i] for i in order[:n_hold]]
    train = [cands[i] for i in order[n_hold:]]
    labels = {c.label for c in train}
    if len(labels) < 2:
        which = "positive" if labels == {1} else "negative"
        raise TrainingError(
            f"all {len(train)} training candidates are {which}; adjust minsup, relax_factor "
            "or train_fraction so that both classes occur"
        )
    return train, held


def to_training_set(cands: Sequence[LabeledCandidate]) -> TrainingSet:
    return TrainingSet(np.array([c.features for c in cands]), np.array([c.label for c in cands]))


def fit_classifier(spec, data: TrainingSet, seed: int, on_pass=None):
    """Train the classifier named by ``spec``; its seed is derived from ``seed``."""
    if isinstance(spec, SvmClassifier):
        cfg = replace(spec.svm, rng_seed=derive_seed(seed, "svm"))
        model, _ = svm_train(data, spec.kernel, cfg, on_pass=on_pass)
        return model
    if isinstance(spec, TreeClassifier):
        return train_tree(data, replace(spec.tree, rng_seed=derive_seed(seed, "dt")))
    if isinstance(spec, ForestClassifier):
        return train_forest(data, spec.tree, replace(spec.forest, rng_seed=derive_seed(seed, "rf")))
    raise ConfigError(f"unknown classifier spec {spec!r}")


def evaluate_classifier(model, held_out: Sequence[LabeledCandidate]) -> ClassifierReport:
    """Precision / recall / F1 with +1 as the positive class."""
    if not held_out:
        raise EvaluationError("held-out set is empty")
    X = np.array([c.features for c in held_out])
    y = np.array([c.label for c in held_out])
    pred = np.asarray(model.predict(X))
    return report_from_labels(y, pred)


def report_from_labels(y, pred) -> ClassifierReport:
    y, pred = np.asarray(y), np.asarray(pred)
    tp = int(np.sum((pred == 1) & (y == 1)))
    fp = int(np.sum((pred == 1) & (y == -1)))
    fn = int(np.sum((pred == -1) & (y == 1)))
    undefined = []
    if tp + fp:
        precision = tp / (tp + fp)
    else:
        precision = 0.0
        undefined.append("precision")
    if tp + fn:
        recall = tp / (tp + fn)
    else:
        recall = 0.0
        undefined.append("recall")
    if precision > 0 and recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = 0.0
        if precision == 0 and recall == 0:
            undefined.append("f1")
    return ClassifierReport(precision, recall, f1, n_held_out=len(y), undefined=tuple(undefined))


Scorer = Callable[[list, np.ndarray], np.ndarray]


def guided_search(db: TransactionDb, cfg: PipelineConfig, enc: EncoderConfig, scorer: Scorer,
                  top_items: Sequence[int] | None = None) -> tuple:
    """Level-wise search over ``db`` where ``scorer`` decides which candidates survive.

    Returns ``(FrequentItemsets, (n_scored, n_pruned, n_verified))``. Pruned
    candidates are never expanded. ``top_items`` pins the indicator slots to
    the ones the classifier was trained with.
    """
    n = len(db)
    threshold = min_count(cfg.minsup, n)
    stats = item_stats(db, enc, top_items)
    counts = db.item_counts()
    level_cands = [(i,) for i in range(db.n_items) if counts[i] > 0]
    out = {}
    n_scored = n_pruned = n_verified = 0
    k = 1
    while level_cands:
        X = encode_many(level_cands, stats, enc)
        labels = np.asarray(scorer(level_cands, X))
        accepted = [c for c, lab in zip(level_cands, labels) if lab == 1]
        n_scored += len(level_cands)
        n_pruned += len(level_cands) - len(accepted)
        got = count_candidates(db.transactions, accepted, k) if k > 1 else {
            c: int(counts[c[0]]) for c in accepted}
        if cfg.verify:
            n_verified += len(accepted)
            got = {c: v for c, v in got.items() if v >= threshold}
        out.update(got)
        if cfg.max_len is not None and k >= cfg.max_len:
            break
        level_cands = apriori_join(sorted(got))
        k += 1
    return FrequentItemsets(out, n, cfg.minsup), (n_scored, n_pruned, n_verified)


@dataclass
class PipelineResult:
    itemsets: FrequentItemsets
    report: ClassifierReport
    model: object = None
    train: list = field(default_factory=list)
    held_out: list = field(default_factory=list)


def run_pipeline(db: TransactionDb, cfg: PipelineConfig, enc: EncoderConfig,
                 train_transform: Callable[[TrainingSet], TrainingSet] | None = None,
                 scorer: Scorer | None = None) -> PipelineResult:
    """Full pipeline, keeping the trained model and candidate sets around."""
    train, held = build_training_set(db, cfg, enc)
    data = to_training_set(train)
    if train_transform is not None:
        data = train_transform(data)
    model = fit_classifier(cfg.classifier, data, cfg.rng_seed)
    report = evaluate_classifier(model, held)
    if scorer is None:
        scorer = lambda itemsets, X: model.predict(X)  # noqa: E731
    top_items = labelling_stats(labelling_partition(db, cfg), enc).top_items
    fi, (n_scored, n_pruned, n_verified) = guided_search(db, cfg, enc, scorer, top_items)
    report.n_candidates_scored, report.n_pruned, report.n_verified = n_scored, n_pruned, n_verified
    return PipelineResult(fi, report, model, train, held)


def svm_guided_mine(db: TransactionDb, cfg: PipelineConfig, enc: EncoderConfig = EncoderConfig(),
                    train_transform=None, scorer: Scorer | None = None) -> tuple:
    """Classifier-pruned mining; returns ``(FrequentItemsets, ClassifierReport)``.

    ``scorer(itemsets, features) -> labels`` overrides the trained classifier
    during the search (the report still describes the trained one).
    """
    res = run_pipeline(db, cfg, enc, train_transform, scorer)
    return res.itemsets, res.report
