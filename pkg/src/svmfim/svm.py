"""Soft-margin kernel SVM trained in the dual by two-multiplier (SMO) updates.

The solver works on the minimisation form of the dual

    min_a  1/2 a^T Q a - e^T a,   Q_ij = y_i y_j K(x_i, x_j)
    s.t.   0 <= a_i <= C,  sum_i a_i y_i = 0

and picks, at each step, the maximally violating pair (i, j) of the KKT
conditions. The feature map behind the kernel is never materialised.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from ._rng import make_rng
from .errors import ConfigError, DomainError, NumericError, TrainingError

KERNELS = ("linear", "rbf", "polynomial")
MODEL_FORMAT = "svmfim.svm"
MODEL_VERSION = 1
_TAU = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float | None = None  # rbf only; None means 1 / dimension
    degree: int = 3
    scale: float = 1.0
    coef0: float = 1.0

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise ConfigError(f"unknown kernel {self.kind!r}; expected one of {KERNELS}")
        if self.kind == "rbf" and self.gamma is not None and not self.gamma > 0:
            raise ConfigError("rbf gamma must be > 0")
        if self.kind == "polynomial":
            if int(self.degree) != self.degree or self.degree < 1:
                raise ConfigError("polynomial degree must be an integer >= 1")
            if not self.scale > 0:
                raise ConfigError("polynomial scale must be > 0")
            if not self.coef0 >= 0:
                raise ConfigError("polynomial coef0 must be >= 0")

    def resolved(self, dim: int) -> "KernelSpec":
        if self.kind == "rbf" and self.gamma is None:
            return replace(self, gamma=1.0 / max(dim, 1))
        return self


def kernel_eval(spec: KernelSpec, x, y) -> float:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise DomainError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    if spec.kind == "linear":
        return float(np.dot(x, y))
    if spec.kind == "rbf":
        gamma = spec.gamma if spec.gamma is not None else 1.0 / max(len(x), 1)
        d = x - y
        return float(np.exp(-gamma * np.dot(d, d)))
    return float((spec.scale * np.dot(x, y) + spec.coef0) ** spec.degree)


def kernel_matrix(spec: KernelSpec, A, B=None) -> np.ndarray:
    """Pairwise kernel values between the rows of ``A`` and ``B`` (default ``A``)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    sym = B is None
    B = A if sym else np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise DomainError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    dot = A @ B.T
    if spec.kind == "linear":
        K = dot
    elif spec.kind == "rbf":
        gamma = spec.gamma if spec.gamma is not None else 1.0 / max(A.shape[1], 1)
        sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * dot
        np.maximum(sq, 0.0, out=sq)
        K = np.exp(-gamma * sq)
    else:
        K = (spec.scale * dot + spec.coef0) ** spec.degree
    if sym:
        K = 0.5 * (K + K.T)
        if spec.kind == "rbf":
            np.fill_diagonal(K, 1.0)
    return K


@dataclass
class TrainingSet:
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=int).ravel()
        if self.X.shape[0] != self.y.shape[0]:
            raise DomainError("vectors and labels differ in length")
        if self.X.shape[0] < 2:
            raise DomainError("a training set needs at least 2 samples")
        if not np.all(np.isin(self.y, (-1, 1))):
            raise DomainError("labels must be -1 or +1")
        if not np.all(np.isfinite(self.X)):
            raise DomainError("feature vectors must be finite")

    def __len__(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]

    def require_both_classes(self):
        if np.all(self.y == self.y[0]):
            raise TrainingError("training set contains a single class")


@dataclass(frozen=True)
class SvmConfig:
    C: float = 1.0
    kkt_tol: float = 1e-3
    max_passes: int = 200
    numeric_eps: float = 1e-12
    rng_seed: int = 0
    standardize: bool | None = None  # None: on for rbf/polynomial, off for linear
    gram_limit: int = 4096
    pass_size: int | None = None  # pair updates per pass; None means n

    def __post_init__(self):
        if not self.C > 0:
            raise ConfigError("C must be > 0")
        if not self.kkt_tol > 0:
            raise ConfigError("kkt_tol must be > 0")
        if self.max_passes < 1:
            raise ConfigError("max_passes must be >= 1")
        if self.pass_size is not None and self.pass_size < 1:
            raise ConfigError("pass_size must be >= 1")


@dataclass
class SvmModel:
    support_vectors: np.ndarray
    alphas: np.ndarray
    sv_labels: np.ndarray
    bias: float
    kernel: KernelSpec
    x_mean: np.ndarray | None = None
    x_scale: np.ndarray | None = None

    @property
    def dim(self):
        return self.support_vectors.shape[1]

    def transform(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DomainError(f"dimension mismatch: model has {self.dim}, got {X.shape[1]}")
        if self.x_mean is not None:
            X = (X - self.x_mean) / self.x_scale
        return X

    def decision_function(self, X) -> np.ndarray:
        K = kernel_matrix(self.kernel, self.transform(X), self.support_vectors)
        return K @ (self.alphas * self.sv_labels) + self.bias

    def predict(self, X) -> np.ndarray:
        return np.where(self.decision_function(X) >= 0.0, 1, -1)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "kernel": {k: getattr(self.kernel, k) for k in ("kind", "gamma", "degree", "scale", "coef0")},
            "x_mean": None if self.x_mean is None else self.x_mean.tolist(),
            "x_scale": None if self.x_scale is None else self.x_scale.tolist(),
            "support_vectors": self.support_vectors.tolist(),
            "alphas": self.alphas.tolist(),
            "sv_labels": self.sv_labels.tolist(),
            "bias": self.bias,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SvmModel":
        if d.get("format") != MODEL_FORMAT or d.get("version") != MODEL_VERSION:
            raise ValueError(f"not a version-{MODEL_VERSION} SVM model record")
        opt = lambda v: None if v is None else np.asarray(v, dtype=float)  # noqa: E731
        sv = np.asarray(d["support_vectors"], dtype=float).reshape(len(d["alphas"]), -1)
        return cls(sv, np.asarray(d["alphas"], dtype=float), np.asarray(d["sv_labels"], dtype=int),
                   float(d["bias"]), KernelSpec(**d["kernel"]), opt(d["x_mean"]), opt(d["x_scale"]))


def svm_decision(model: SvmModel, x) -> tuple:
    """Return ``(margin, label)`` for one vector; a zero margin maps to +1."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DomainError("svm_decision expects a single feature vector")
    margin = float(model.decision_function(x[None, :])[0])
    return margin, 1 if margin >= 0.0 else -1


@dataclass
class SolverDiagnostics:
    dual_objective_trace: list = field(default_factory=list)
    slacks: np.ndarray | None = None
    max_kkt_violation: float = 0.0
    n_iterations: int = 0
    n_passes: int = 0
    converged: bool = False


class _KernelRows:
    """Row access to the training Gram matrix, precomputed below ``limit`` rows."""

    def __init__(self, spec, X, limit):
        self.spec, self.X = spec, X
        self.full = kernel_matrix(spec, X) if X.shape[0] <= limit else None
        if self.full is not None:
            self.diag = np.diag(self.full).copy()
        else:
            self.diag = np.array([kernel_eval(spec, x, x) for x in X])
            self._row = lru_cache(maxsize=256)(self._compute)

    def _compute(self, i):
        return kernel_matrix(self.spec, self.X[i:i + 1], self.X)[0]

    def __getitem__(self, i):
        if self.full is not None:
            return self.full[i]
        return self._row(i)


def _bias(alphas, y, v, C):
    # v_t = y_t - sum_j a_j y_j K_jt, the bias that puts point t exactly on its margin
    free = (alphas > 0) & (alphas < C)
    if free.any():
        return float(v[free].mean())
    up = ((y == 1) & (alphas < C)) | ((y == -1) & (alphas > 0))
    low = ((y == -1) & (alphas < C)) | ((y == 1) & (alphas > 0))
    hi = v[up].max() if up.any() else v.max()
    lo = v[low].min() if low.any() else v.min()
    return float(0.5 * (hi + lo))


def _standardizer(X, enabled):
    if not enabled:
        return None, None
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    return mean, scale


def _kkt_violation(alphas, y, margins, C):
    yf = y * margins
    at_zero = alphas <= 0
    at_c = alphas >= C
    free = ~at_zero & ~at_c
    viol = np.zeros_like(yf)
    viol[at_zero] = np.maximum(0.0, 1.0 - yf[at_zero])
    viol[at_c] = np.maximum(0.0, yf[at_c] - 1.0)
    viol[free] = np.abs(yf[free] - 1.0)
    return float(viol.max()) if viol.size else 0.0


def svm_train(data: TrainingSet, kernel: KernelSpec = KernelSpec(), cfg: SvmConfig = SvmConfig(),
              on_pass: Callable[[int, SvmModel], None] | None = None) -> tuple:
    """Train a binary soft-margin SVM.

    Returns ``(model, diagnostics)``. ``on_pass``, when given, receives the
    pass index and a snapshot model after every pass (``cfg.pass_size`` pair
    updates, default ``n``).
    """
    data.require_both_classes()
    n = len(data)
    y = data.y.astype(float)
    kernel = kernel.resolved(data.dim)
    standardize = cfg.standardize if cfg.standardize is not None else kernel.kind != "linear"
    x_mean, x_scale = _standardizer(data.X, standardize)
    X = data.X if x_mean is None else (data.X - x_mean) / x_scale
    rows = _KernelRows(kernel, X, cfg.gram_limit)
    if rows.full is not None and not np.all(np.isfinite(rows.full)):
        raise NumericError("non-finite kernel values")
    C = float(cfg.C)
    rng = make_rng(cfg.rng_seed, "smo")

    alphas = np.zeros(n)
    G = -np.ones(n)  # gradient Q a - e
    diag_q = rows.diag  # Q_ii = K_ii since y_i^2 = 1
    if not np.isfinite(diag_q).all():
        raise NumericError("non-finite kernel values")
    diagnostics = SolverDiagnostics()
    trace = diagnostics.dual_objective_trace

    def make_model():
        # v_t = -y_t G_t, and sum_j a_j y_j K_jt = y_t (G_t + 1)
        v = -y * G
        b = _bias(alphas, y, v, C)
        keep = alphas > 0
        return SvmModel(X[keep].copy(), alphas[keep].copy(), data.y[keep].copy(), b,
                        kernel, x_mean, x_scale), v, b

    converged = False
    it = 0
    passes = 0
    while passes < cfg.max_passes and not converged:
        for _ in range(cfg.pass_size or n):
            v = -y * G
            up = ((y > 0) & (alphas < C)) | ((y < 0) & (alphas > 0))
            low = ((y < 0) & (alphas < C)) | ((y > 0) & (alphas > 0))
            if not up.any() or not low.any():
                converged = True
                break
            v_up = np.where(up, v, -np.inf)
            v_low = np.where(low, v, np.inf)
            m_up = v_up.max()
            m_low = v_low.min()
            if m_up - m_low <= cfg.kkt_tol:
                converged = True
                break
            i = int(np.argmax(v_up))
            ties = np.flatnonzero(v_low == m_low)
            j = int(ties[0] if ties.size == 1 else rng.choice(ties))
            Ki, Kj = rows[i], rows[j]
            Qi = y[i] * y * Ki
            Qj = y[j] * y * Kj
            old_i, old_j = alphas[i], alphas[j]
            if y[i] != y[j]:
                quad = diag_q[i] + diag_q[j] + 2.0 * Qi[j]
                if quad <= 0:
                    quad = _TAU
                delta = (-G[i] - G[j]) / quad
                diff = old_i - old_j
                ai, aj = old_i + delta, old_j + delta
                if diff > 0:
                    if aj < 0:
                        aj, ai = 0.0, diff
                else:
                    if ai < 0:
                        ai, aj = 0.0, -diff
                if diff > 0:
                    if ai > C:
                        ai, aj = C, C - diff
                else:
                    if aj > C:
                        aj, ai = C, C + diff
            else:
                quad = diag_q[i] + diag_q[j] - 2.0 * Qi[j]
                if quad <= 0:
                    quad = _TAU
                delta = (G[i] - G[j]) / quad
                total = old_i + old_j
                ai, aj = old_i - delta, old_j + delta
                if total > C:
                    if ai > C:
                        ai, aj = C, total - C
                    if aj > C:
                        aj, ai = C, total - C
                else:
                    if aj < 0:
                        aj, ai = 0.0, total
                    if ai < 0:
                        ai, aj = 0.0, total
            d_i, d_j = ai - old_i, aj - old_j
            alphas[i], alphas[j] = ai, aj
            G += Qi * d_i + Qj * d_j
            if not np.isfinite(G).all():
                raise NumericError("non-finite gradient during SMO")
            it += 1
            trace.append(float(0.5 * alphas.sum() - 0.5 * alphas @ G))
        passes += 1
        if on_pass is not None:
            on_pass(passes, make_model()[0])

    model, v, b = make_model()
    margins = (y - v) + b
    diagnostics.slacks = np.maximum(0.0, 1.0 - y * margins)
    diagnostics.max_kkt_violation = _kkt_violation(alphas, y, margins, C)
    diagnostics.n_iterations = it
    diagnostics.n_passes = passes
    diagnostics.converged = converged
    return model, diagnostics
