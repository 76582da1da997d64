"""Matrix SVD and Tucker bases (HOSVD, sequentially truncated HOSVD, HOOI)."""

from dataclasses import dataclass, field

import numpy as np

from .tensor import as_tensor, ttm, unfold

__all__ = [
    "RANK_RTOL",
    "RankError",
    "SvdResult",
    "TuckerDecomposition",
    "hooi",
    "hosvd",
    "mode_ranks",
    "numerical_rank",
    "resolve_ranks",
    "sign_fix",
    "st_hosvd",
    "svd",
]

# singular values below RANK_RTOL * sigma_1 are treated as zero
RANK_RTOL = 1e-12


class RankError(ValueError):
    """A requested rank is not attainable for some mode."""

    def __init__(self, message, mode=None):
        super().__init__(message)
        self.mode = mode


@dataclass(frozen=True)
class SvdResult:
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @property
    def rank(self):
        return self.sigma.shape[0]

    def reconstruct(self):
        return (self.u * self.sigma) @ self.v.T


@dataclass(frozen=True)
class TuckerDecomposition:
    """Tucker model ``(U_1, ..., U_d) core`` with per-mode singular values.

    ``mode_sigma[k]`` holds the singular values attached to the columns of
    ``factors[k]``; they are what turns factors into principal components.
    """

    factors: tuple
    core: np.ndarray
    mode_sigma: tuple
    ranks: tuple
    algorithm: str = "hosvd"
    info: dict = field(default_factory=dict, compare=False)

    @property
    def order(self):
        return len(self.factors)

    @property
    def shape(self):
        return tuple(u.shape[0] for u in self.factors)

    def reconstruct(self):
        return ttm(self.core, self.factors)


def sign_fix(u, companion):
    """Orient each column of ``u`` toward the bulk of its entries.

    The orientation statistic of column ``k`` is ``sum_j sign(u_jk) u_jk**2``.
    Columns with a negative statistic are negated together with the matching
    column of ``companion``; zero counts as positive.
    """
    u = np.array(u, dtype=np.float64)
    companion = np.array(companion, dtype=np.float64)
    if u.ndim != 2 or companion.ndim != 2 or u.shape[1] != companion.shape[1]:
        raise ValueError(
            f"column-count mismatch: {u.shape} vs {companion.shape}"
        )
    stat = np.sum(np.sign(u) * u * u, axis=0)
    flip = stat < 0
    u[:, flip] *= -1.0
    companion[:, flip] *= -1.0
    return u, companion


def numerical_rank(sigma, rtol=RANK_RTOL):
    sigma = np.asarray(sigma)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > rtol * sigma[0]))


def svd(m, rank=None):
    """Thin SVD of ``m`` truncated to ``rank`` columns, sign-fixed.

    With ``rank=None`` all ``min(rows, cols)`` triplets are returned,
    including zero singular values.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={m.ndim}")
    kmax = min(m.shape)
    if rank is None:
        rank = kmax
    if not 0 <= rank <= kmax:
        raise RankError(f"rank {rank} exceeds min dimension {kmax} of a {m.shape} matrix")
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    u, v = sign_fix(u[:, :rank], vt[:rank].T)
    return SvdResult(u=u, sigma=s[:rank].copy(), v=v)


def mode_ranks(t, rtol=RANK_RTOL):
    """Numerical multilinear rank of ``t``."""
    t = as_tensor(t)
    return tuple(
        numerical_rank(np.linalg.svd(unfold(t, k), compute_uv=False), rtol)
        for k in range(1, t.ndim + 1)
    )


def resolve_ranks(t, ranks="full", rtol=RANK_RTOL):
    """Turn a rank request into an explicit tuple and validate it.

    ``ranks`` may be ``"full"``/``None`` (the numerical mode ranks), a single
    integer applied to every mode, or one entry per mode where each entry is
    an integer or ``"full"``.
    """
    t = as_tensor(t)
    exact = mode_ranks(t, rtol)
    if ranks is None or ranks == "full":
        requested = list(exact)
    elif isinstance(ranks, (int, np.integer)):
        requested = [int(ranks)] * t.ndim
    else:
        requested = list(ranks)
        if len(requested) != t.ndim:
            raise RankError(f"expected {t.ndim} ranks, got {len(requested)}")
    out = []
    for k, (r, rk) in enumerate(zip(requested, exact), start=1):
        if r is None or r == "full":
            r = rk
        r = int(r)
        if r < 1:
            raise RankError(f"mode {k}: rank must be >= 1, got {r}", mode=k)
        if r > rk:
            raise RankError(
                f"mode {k}: requested rank {r} exceeds the mode rank {rk}", mode=k
            )
        out.append(r)
    return tuple(out)


def hosvd(t, ranks="full"):
    """Truncated HOSVD: leading left singular vectors of every unfolding."""
    t = as_tensor(t)
    ranks = resolve_ranks(t, ranks)
    factors, sigmas = [], []
    for k, r in enumerate(ranks, start=1):
        res = svd(unfold(t, k), r)
        factors.append(res.u)
        sigmas.append(res.sigma)
    core = ttm(t, factors, transpose=True)
    return TuckerDecomposition(tuple(factors), core, tuple(sigmas), ranks, "hosvd")


def st_hosvd(t, ranks="full"):
    """Sequentially truncated HOSVD, processing modes in order 1..d."""
    t = as_tensor(t)
    ranks = resolve_ranks(t, ranks)
    work = t
    factors, sigmas = [], []
    for k, r in enumerate(ranks, start=1):
        res = svd(unfold(work, k), r)
        factors.append(res.u)
        sigmas.append(res.sigma)
        proj = [None] * t.ndim
        proj[k - 1] = res.u.T
        work = ttm(work, proj)
    return TuckerDecomposition(tuple(factors), work, tuple(sigmas), ranks, "st_hosvd")


def hooi(t, ranks="full", max_iters=50, tol=1e-10):
    """Higher-order orthogonal iteration started from the truncated HOSVD.

    After convergence the factors are re-expressed in the singular basis of
    the reconstruction's unfoldings (same subspaces), and ``mode_sigma`` holds
    those singular values. ``info`` records the fit history, i.e. the core
    norm after each sweep.
    """
    t = as_tensor(t)
    init = hosvd(t, ranks)
    ranks = init.ranks
    factors = list(init.factors)
    core = init.core
    d = t.ndim
    fits = [float(np.linalg.norm(init.core))]
    iters = 0
    converged = False
    for _ in range(max_iters):
        iters += 1
        for k in range(d):
            proj = [None if j == k else factors[j].T for j in range(d)]
            partial = ttm(t, proj)
            factors[k] = svd(unfold(partial, k + 1), ranks[k]).u
        core = ttm(t, factors, transpose=True)
        fits.append(float(np.linalg.norm(core)))
        if abs(fits[-1] - fits[-2]) <= tol * max(fits[-2], np.finfo(float).tiny):
            converged = True
            break

    rec = ttm(core, factors)
    # singular basis of the reconstruction, needed for principal components
    aligned = hosvd(rec, ranks)
    info = {"fit_history": fits, "iterations": iters, "converged": converged,
            "sigma_source": "reconstruction"}
    return TuckerDecomposition(aligned.factors, aligned.core, aligned.mode_sigma,
                               ranks, "hooi", info)


ALGORITHMS = {"hosvd": hosvd, "st_hosvd": st_hosvd, "hooi": hooi}
