"""Correspondence analysis of matrices and multiway tables.

MWCA maps the frequency tensor ``F`` to ``X = (M_1, ..., M_d) F`` with the
CA weights ``M_mu = diag(1 / sqrt(f^mu))``, decomposes ``X`` in a Tucker
basis, and reads off three coordinate systems per mode:

* ``Y_mu = U_mu Sigma_mu``, principal components in the standard space;
* ``W_mu = M_mu^-1 Y_mu``, principal components in the weighted space;
* ``Z_mu = M_mu^2 W_mu``, the scaled components that satisfy the
  barycentric relation.

The ``verify_*`` functions evaluate the identities that link the point
clouds of different modes and report their residuals.
"""

import string
from dataclasses import asdict, dataclass, field

import numpy as np

from .decompose import ALGORITHMS, RankError, mode_ranks, numerical_rank, sign_fix
from .decompose import hosvd as _hosvd
from .metric import (
    ModeMetric,
    ZeroMarginalError,
    ca_metric,
    isometry_apply,
    isometry_inverse,
    marginals,
    relative_frequencies,
)
from .table import ContingencyTable
from .tensor import as_tensor, check_mode, kron_chain, ttm, unfold

__all__ = [
    "CaResult",
    "CompareResult",
    "MwcaResult",
    "RankHypothesisError",
    "VerificationReport",
    "compare",
    "isometry_routes",
    "metric_pca",
    "relative_error_ca_mwca",
    "run_ca",
    "run_mwca",
    "verify_all",
    "verify_barycentric",
    "verify_component_link_euclidean",
    "verify_component_link_metric",
]

DEFAULT_TOL = 1e-9
WEIGHT_SUM_TOL = 1e-12
# above this many entries the Kronecker chain is replaced by successive TTMs
KRON_LIMIT = 1 << 24


class RankHypothesisError(RankError):
    """The ranks in use violate the hypothesis of an identity."""


@dataclass(frozen=True)
class MwcaResult:
    decomposition: object
    frequencies: np.ndarray
    x: np.ndarray
    metric: ModeMetric
    marginals: object
    y: tuple
    w: tuple
    z: tuple
    b: np.ndarray
    mode_names: tuple = None

    @property
    def order(self):
        return self.x.ndim

    @property
    def ranks(self):
        return self.decomposition.ranks

    @property
    def sigma(self):
        return self.decomposition.mode_sigma

    @property
    def inertia(self):
        return tuple(s * s for s in self.decomposition.mode_sigma)

    def _axis(self, mode):
        if isinstance(mode, str) and self.mode_names and mode in self.mode_names:
            return self.mode_names.index(mode)
        return check_mode(mode, self.order)

    def coordinates(self, kind, mode):
        """``Y``, ``W`` or ``Z`` coordinates of mode ``mode`` (1-based or a mode name)."""
        axis = self._axis(mode)
        try:
            return {"Y": self.y, "W": self.w, "Z": self.z}[kind.upper()][axis]
        except KeyError:
            raise ValueError(f"unknown coordinate system {kind!r}") from None

    def scaled_b(self, mode):
        """``B_mu``: ``B`` with mode ``mode`` multiplied back by ``Sigma_mu``."""
        axis = self._axis(mode)
        mats = [None] * self.order
        mats[axis] = np.diag(self.sigma[axis])
        return ttm(self.b, mats)


@dataclass(frozen=True)
class CaResult:
    """Classical CA of a two-way table.

    Rows and columns are oriented independently by the majority rule, so
    ``core_signs[l] * sigma[l]`` is the ``l``-th diagonal entry of
    ``row_factor.T @ x @ col_factor``.
    """

    x: np.ndarray
    sigma: np.ndarray
    row_factor: np.ndarray
    col_factor: np.ndarray
    core_signs: np.ndarray
    row_masses: np.ndarray
    col_masses: np.ndarray
    row_labels: tuple = ()
    col_labels: tuple = ()

    @property
    def row_y(self):
        return self.row_factor * self.sigma

    @property
    def col_y(self):
        return self.col_factor * self.sigma

    @property
    def row_w(self):
        return self.row_y * np.sqrt(self.row_masses)[:, None]

    @property
    def col_w(self):
        return self.col_y * np.sqrt(self.col_masses)[:, None]

    @property
    def row_z(self):
        return self.row_y / np.sqrt(self.row_masses)[:, None]

    @property
    def col_z(self):
        return self.col_y / np.sqrt(self.col_masses)[:, None]

    def coordinates(self, kind, side="row"):
        attr = f"{'row' if side == 'row' else 'col'}_{kind.lower()}"
        if kind.upper() not in ("Y", "W", "Z"):
            raise ValueError(f"unknown coordinate system {kind!r}")
        return getattr(self, attr)


@dataclass(frozen=True)
class VerificationReport:
    check: str
    mode: int
    max_abs_residual: float
    relative_residual: float
    tolerance: float
    passed: bool
    ranks: tuple
    target: str = "original"
    route: str = "kronecker"
    weight_sum_error: float = None

    def as_dict(self):
        out = asdict(self)
        out["ranks"] = list(self.ranks)
        return out


@dataclass(frozen=True)
class CompareResult:
    mode: int
    relative_error: float
    mwca: MwcaResult
    ca: CaResult
    f_tilde: np.ndarray = field(repr=False)
    a_tilde: np.ndarray = field(repr=False)


def _counts(t):
    return t.tensor if isinstance(t, ContingencyTable) else as_tensor(t)


def _labels(t):
    return t.labels if isinstance(t, ContingencyTable) else None


def metric_pca(f, metric, ranks="full", algorithm="hosvd"):
    """Tucker-based PCA of ``f`` under an arbitrary diagonal metric.

    ``f`` need not be a frequency tensor, so the result carries no marginals
    and the barycentric check does not apply to it.
    """
    f = as_tensor(f)
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}")
    x = isometry_apply(f, metric)
    dec = ALGORITHMS[algorithm](x, ranks)
    return _assemble(f, x, metric, None, dec)


def _assemble(f, x, metric, margs, dec, mode_names=None):
    y = tuple(u * s for u, s in zip(dec.factors, dec.mode_sigma))
    w = tuple(yk / wk[:, None] for yk, wk in zip(y, metric.weights))
    z = tuple(yk * wk[:, None] for yk, wk in zip(y, metric.weights))
    b = ttm(dec.core, [np.diag(1.0 / s) for s in dec.mode_sigma])
    return MwcaResult(dec, f, x, metric, margs, y, w, z, b, mode_names)


def run_mwca(t, ranks="full", algorithm="hosvd"):
    """Multiway correspondence analysis of a contingency table or count array."""
    f = relative_frequencies(_counts(t))
    margs = marginals(f)
    metric = ca_metric(margs, _labels(t))
    x = isometry_apply(f, metric)
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}")
    dec = ALGORITHMS[algorithm](x, ranks)
    names = t.mode_names if isinstance(t, ContingencyTable) else None
    return _assemble(f, x, metric, margs, dec, names)


def _ca_weighted(a):
    f = a / a.sum()
    r, c = f.sum(axis=1), f.sum(axis=0)
    for side, m in (("rows", r), ("columns", c)):
        zero = np.flatnonzero(m <= 0)
        if zero.size:
            raise ZeroMarginalError(side, int(zero[0]) + 1)
    return f / np.sqrt(np.outer(r, c)), r, c


def run_ca(t, rank="full", mode=None):
    """Classical CA of a two-way table, or of the mode-``mode`` unfolding.

    Parameters
    ----------
    t : ContingencyTable or array_like
        Counts. Tables of order other than 2 need ``mode``.
    rank : int or "full"
        Number of components kept. ``"full"`` keeps every nonzero one.
    mode : int, optional
        Matricize at this mode first; rows are then the mode's categories and
        columns all combinations of the other modes.
    """
    row_labels = col_labels = ()
    if isinstance(t, ContingencyTable):
        if mode is not None or t.order != 2:
            if mode is None:
                raise ValueError("a table of order != 2 needs a mode to unfold at")
            t = t.matricize(mode)
        row_labels, col_labels = t.labels
        a = t.tensor.astype(np.float64)
    else:
        a = as_tensor(t)
        if mode is not None:
            a = unfold(a, mode)
        elif a.ndim != 2:
            raise ValueError("a table of order != 2 needs a mode to unfold at")
    if (a < 0).any() or not a.sum() > 0:
        raise ValueError("counts must be nonnegative with a positive total")

    x, r, c = _ca_weighted(a)
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    full = numerical_rank(s)
    if rank is None or rank == "full":
        rank = full
    rank = int(rank)
    if not 1 <= rank <= full:
        raise RankError(f"CA rank {rank} outside [1, {full}]")
    u, v = u[:, :rank], vt[:rank].T
    row_factor, _ = sign_fix(u, v)
    col_factor, _ = sign_fix(v, u)
    signs = np.sign(np.einsum("il,ij,jl->l", row_factor, x, col_factor))
    signs[signs == 0] = 1.0
    return CaResult(x, s[:rank].copy(), row_factor, col_factor, signs, r, c,
                    tuple(row_labels), tuple(col_labels))


def _residual(lhs, rhs):
    abs_res = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
    scale = max(1.0, float(np.max(np.abs(lhs))) if lhs.size else 0.0)
    return abs_res, abs_res / scale


def _link_rhs(t, factors, b, mode):
    """``unfold(t, mode) @ kron(factors reversed, skip mode) @ unfold(b, mode).T``."""
    rows = int(np.prod([fk.shape[0] for k, fk in enumerate(factors, 1) if k != mode]))
    cols = int(np.prod([fk.shape[1] for k, fk in enumerate(factors, 1) if k != mode]))
    if rows * cols <= KRON_LIMIT:
        left = unfold(t, mode) @ kron_chain(factors, skip=mode)
        route = "kronecker"
    else:
        proj = [None if k == mode else fk.T for k, fk in enumerate(factors, 1)]
        left = unfold(ttm(t, proj), mode)
        route = "ttm"
    return left @ unfold(b, mode).T, route


def _target(x, dec, target):
    if target == "auto":
        target = "original" if tuple(dec.ranks) == mode_ranks(x) else "reconstruction"
    if target == "original":
        return x, dec, target
    if target == "reconstruction":
        rec = dec.reconstruct()
        return rec, _hosvd(rec, dec.ranks), target
    raise ValueError(f"unknown verification target {target!r}")


def verify_component_link_euclidean(x, dec, mode, tol=DEFAULT_TOL, target="auto"):
    """Check ``Y_mu = X^(mu) (Y_d (x) ... (x) Y_1, mode mu omitted) B^(mu).T``.

    ``target`` selects the tensor the identity is evaluated on: the given
    ``x`` (``"original"``), or the Tucker reconstruction together with its
    own HOSVD at the same ranks (``"reconstruction"``). ``"auto"`` uses the
    original when ``dec`` has full multilinear rank.
    """
    x = as_tensor(x)
    check_mode(mode, x.ndim)
    x_used, d_used, target = _target(x, dec, target)
    ys = [u * s for u, s in zip(d_used.factors, d_used.mode_sigma)]
    b = ttm(d_used.core, [np.diag(1.0 / s) for s in d_used.mode_sigma])
    rhs, route = _link_rhs(x_used, ys, b, mode)
    abs_res, rel = _residual(ys[mode - 1], rhs)
    return VerificationReport("component_link_euclidean", mode, abs_res, rel, tol,
                              rel <= tol, tuple(d_used.ranks), target, route)


def verify_component_link_metric(f, res, mode, tol=DEFAULT_TOL, target="auto"):
    """Check ``W_mu = F^(mu) (M_d^2 W_d (x) ... , mode mu omitted) B^(mu).T``."""
    f = as_tensor(f)
    metric = res.metric
    if f.shape != metric.shape:
        raise ValueError(f"tensor shape {f.shape} does not match metric shape {metric.shape}")
    check_mode(mode, f.ndim)
    x = isometry_apply(f, metric)
    x_used, d_used, target = _target(x, res.decomposition, target)
    f_used = f if target == "original" else isometry_inverse(x_used, metric)
    r = _assemble(f_used, x_used, metric, res.marginals, d_used)
    chain = [n[:, None] * wk for n, wk in zip(metric.squared, r.w)]
    rhs, route = _link_rhs(f_used, chain, r.b, mode)
    abs_res, rel = _residual(r.w[mode - 1], rhs)
    return VerificationReport("component_link_metric", mode, abs_res, rel, tol,
                              rel <= tol, tuple(d_used.ranks), target, route)


def verify_barycentric(res, mode, tol=DEFAULT_TOL):
    """Check the scaled barycentric relation for every coordinate of ``Z_mu``.

    Each entry is evaluated as the explicit sum over the other modes' cells
    and components, weighted by ``F / f^mu``. The weights' row sums are also
    checked against 1.
    """
    d = res.order
    axis = check_mode(mode, d)
    if res.marginals is None:
        raise ValueError("barycentric check needs a frequency tensor with CA weights")
    exact = mode_ranks(res.x)
    if tuple(res.ranks) != exact:
        raise RankHypothesisError(
            f"barycentric relation needs full multilinear rank {exact}, got {tuple(res.ranks)}",
            mode=mode,
        )
    f = res.frequencies
    fm = res.marginals[axis]
    shape = [1] * d
    shape[axis] = fm.shape[0]
    weights = f / fm.reshape(shape)
    others = tuple(k for k in range(d) if k != axis)
    weight_sum_error = float(np.max(np.abs(weights.sum(axis=others) - 1.0)))

    cells = string.ascii_lowercase[:d]
    comps = string.ascii_uppercase[:d]
    operands = [weights]
    terms = [cells]
    for k in others:
        operands.append(res.z[k])
        terms.append(cells[k] + comps[k])
    operands.append(res.scaled_b(mode))
    terms.append(comps)
    expr = ",".join(terms) + "->" + cells[axis] + comps[axis]
    rhs = np.einsum(expr, *operands, optimize="greedy") / res.sigma[axis]

    abs_res, rel = _residual(res.z[axis], rhs)
    passed = rel <= tol and weight_sum_error <= WEIGHT_SUM_TOL
    return VerificationReport("barycentric", mode, abs_res, rel, tol, passed,
                              tuple(res.ranks), "original", "elementwise",
                              weight_sum_error)


def verify_all(res, tol=DEFAULT_TOL):
    """Every identity, every mode, in mode order.

    The barycentric relation is only checked at full multilinear rank.
    """
    reports = []
    for k in range(1, res.order + 1):
        reports.append(verify_component_link_euclidean(res.x, res.decomposition, k, tol))
    for k in range(1, res.order + 1):
        reports.append(verify_component_link_metric(res.frequencies, res, k, tol))
    if res.marginals is not None and tuple(res.ranks) == mode_ranks(res.x):
        for k in range(1, res.order + 1):
            reports.append(verify_barycentric(res, k, tol))
    return reports


def isometry_routes(f, mode):
    """The two weighted versions of the mode-``mode`` unfolding of ``f``.

    Returns ``(f_tilde, a_tilde)``: the unfolding of the multiway-weighted
    tensor, and the unfolding weighted as a two-way table by its own row and
    column marginals.
    """
    f = as_tensor(f)
    check_mode(mode, f.ndim)
    f = f / f.sum()
    x = isometry_apply(f, ca_metric(marginals(f)))
    a_tilde, _, _ = _ca_weighted(unfold(f, mode))
    return unfold(x, mode), a_tilde


def relative_error_ca_mwca(f_tilde, a_tilde):
    """``||f_tilde - a_tilde|| / ||f_tilde||`` (Frobenius)."""
    f_tilde = np.asarray(f_tilde, dtype=np.float64)
    a_tilde = np.asarray(a_tilde, dtype=np.float64)
    if f_tilde.shape != a_tilde.shape:
        raise ValueError(f"shape mismatch: {f_tilde.shape} vs {a_tilde.shape}")
    denom = np.linalg.norm(f_tilde)
    if denom == 0:
        raise ValueError("reference matrix has zero norm")
    return float(np.linalg.norm(f_tilde - a_tilde) / denom)


def compare(t, mode, ranks="full", algorithm="hosvd", ca_rank="full"):
    """Run MWCA and the CA of the mode-``mode`` unfolding side by side."""
    counts = _counts(t)
    mode = t.mode_index(mode) if isinstance(t, ContingencyTable) else mode
    check_mode(mode, counts.ndim)
    mw = run_mwca(t, ranks, algorithm)
    ca = run_ca(t, ca_rank, mode=mode)
    f_tilde, a_tilde = isometry_routes(mw.frequencies, mode)
    err = relative_error_ca_mwca(f_tilde, a_tilde)
    return CompareResult(mode, err, mw, ca, f_tilde, a_tilde)
