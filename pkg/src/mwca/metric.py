"""Diagonal metrics on tensor spaces and the correspondence-analysis weights.

A :class:`ModeMetric` holds, for every mode, the diagonal of an SPD matrix
``M_mu``. The induced inner product is ``<a, b>_M = <M a, M b>``, and the
map ``F -> (M_1, ..., M_d) F`` is an isometry from the weighted space onto
the standard Euclidean one.
"""

from dataclasses import dataclass

import numpy as np

from .table import ContingencyTable
from .tensor import as_tensor, ttm, unfold

__all__ = [
    "Marginals",
    "ModeMetric",
    "ZeroMarginalError",
    "ca_metric",
    "isometry_apply",
    "isometry_inverse",
    "marginals",
    "relative_frequencies",
    "weighted_norm",
]


class ZeroMarginalError(ValueError):
    """A marginal has a zero entry, so the CA weights are undefined."""

    def __init__(self, mode, index, label=None):
        where = f"index {index}" if label is None else f"index {index} ({label!r})"
        super().__init__(f"mode {mode}: marginal is zero at {where}")
        self.mode = mode
        self.index = index


def _frozen(vectors):
    out = []
    for v in vectors:
        v = np.array(v, dtype=np.float64).reshape(-1)
        v.setflags(write=False)
        out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class ModeMetric:
    """Per-mode positive diagonal weights (the diagonals of ``M_mu``)."""

    weights: tuple

    def __post_init__(self):
        weights = _frozen(self.weights)
        for k, w in enumerate(weights, start=1):
            if not np.all(np.isfinite(w)) or not np.all(w > 0):
                raise ValueError(f"mode {k}: metric weights must be finite and > 0")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def identity(cls, shape):
        return cls(tuple(np.ones(n) for n in shape))

    @property
    def order(self):
        return len(self.weights)

    @property
    def shape(self):
        return tuple(w.shape[0] for w in self.weights)

    @property
    def squared(self):
        """Diagonals of ``N_mu = M_mu**2``."""
        return tuple(w * w for w in self.weights)

    def matrices(self):
        return [np.diag(w) for w in self.weights]

    def inverse_matrices(self):
        return [np.diag(1.0 / w) for w in self.weights]


@dataclass(frozen=True)
class Marginals:
    vectors: tuple

    def __post_init__(self):
        object.__setattr__(self, "vectors", _frozen(self.vectors))

    def __getitem__(self, k):
        return self.vectors[k]

    def __len__(self):
        return len(self.vectors)

    @property
    def total(self):
        return float(self.vectors[0].sum())


def relative_frequencies(t):
    """Divide a table (or bare count array) by its grand total."""
    counts = t.tensor if isinstance(t, ContingencyTable) else t
    counts = as_tensor(counts)
    if (counts < 0).any():
        raise ValueError("counts must be nonnegative")
    total = counts.sum()
    if not total > 0:
        raise ValueError("table is all zero")
    return counts / total


def marginals(f):
    """Per-mode sums of ``f`` over all other modes."""
    f = as_tensor(f)
    if (f < 0).any():
        raise ValueError("marginals need a nonnegative tensor")
    return Marginals(tuple(unfold(f, k).sum(axis=1) for k in range(1, f.ndim + 1)))


def ca_metric(m, labels=None):
    """Correspondence-analysis weights ``1 / sqrt(f^mu)`` for every mode.

    Raises :class:`ZeroMarginalError` naming the first zero entry found.
    """
    weights = []
    for k, f in enumerate(m.vectors, start=1):
        zero = np.flatnonzero(f <= 0)
        if zero.size:
            i = int(zero[0])
            label = labels[k - 1][i] if labels is not None else None
            raise ZeroMarginalError(k, i + 1, label)
        weights.append(1.0 / np.sqrt(f))
    return ModeMetric(tuple(weights))


def _check_shape(t, metric):
    if t.shape != metric.shape:
        raise ValueError(f"tensor shape {t.shape} does not match metric shape {metric.shape}")


def isometry_apply(f, metric):
    """``(M_1, ..., M_d) f``, mapping the weighted space onto the standard one."""
    f = as_tensor(f)
    _check_shape(f, metric)
    return ttm(f, metric.matrices())


def isometry_inverse(x, metric):
    """``(M_1^-1, ..., M_d^-1) x``."""
    x = as_tensor(x)
    _check_shape(x, metric)
    return ttm(x, metric.inverse_matrices())


def weighted_norm(f, metric):
    """Norm of ``f`` under the metric, evaluated cell by cell.

    Each cell contributes ``f[i]**2 * prod_mu w_mu[i_mu]**2``; no TTM is
    involved, so this is an independent check on :func:`isometry_apply`.
    """
    f = as_tensor(f)
    _check_shape(f, metric)
    scale = np.ones(f.shape)
    for axis, w in enumerate(metric.squared):
        shape = [1] * f.ndim
        shape[axis] = w.shape[0]
        scale = scale * w.reshape(shape)
    return float(np.sqrt(np.sum(f * f * scale)))
