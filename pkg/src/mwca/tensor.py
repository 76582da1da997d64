"""Dense tensor primitives: matricization, folding, TTM and Kronecker chains.

Tensors are plain :class:`numpy.ndarray` objects. Modes are numbered from 1
to ``d`` in every public function, so ``unfold(t, 1)`` is the first-mode
matricization.

The unfolding follows the Kolda-Bader column ordering: element
``(i_1, ..., i_d)`` goes to row ``i_mu`` and to the column whose index
treats the remaining modes as a mixed-radix number with the *lowest*
remaining mode varying fastest. With that convention the unfolding of a
TTM product is

    unfold(ttm(A, M), mu) == M_mu @ unfold(A, mu) @ kron(M_d, ..., M_1).T

with mode ``mu`` left out of the Kronecker chain.
"""

from functools import reduce

import numpy as np

__all__ = [
    "as_tensor",
    "check_mode",
    "fold",
    "kronecker",
    "kron_chain",
    "ttm",
    "unfold",
]


def as_tensor(t, dtype=np.float64):
    """Return ``t`` as a float array of order >= 1 with positive dimensions."""
    arr = np.asarray(t, dtype=dtype)
    if arr.ndim == 0:
        raise ValueError("a tensor must have order >= 1")
    if any(n < 1 for n in arr.shape):
        raise ValueError(f"all tensor dimensions must be >= 1, got {arr.shape}")
    return arr


def check_mode(mode, order):
    """Validate a 1-based mode index and return its 0-based axis."""
    if isinstance(mode, bool) or not isinstance(mode, (int, np.integer)):
        raise TypeError(f"mode must be an integer, got {mode!r}")
    if not 1 <= mode <= order:
        raise ValueError(f"mode {mode} out of range [1, {order}]")
    return int(mode) - 1


def unfold(t, mode):
    """Mode-``mode`` matricization of ``t``.

    Returns an ``n_mode x prod(other dims)`` matrix. Columns enumerate the
    remaining indices with the lowest mode varying fastest.

    >>> t = np.arange(1, 9).reshape(2, 2, 2)
    >>> unfold(t, 1)
    array([[1., 3., 2., 4.],
           [5., 7., 6., 8.]])
    """
    t = as_tensor(t)
    axis = check_mode(mode, t.ndim)
    return np.moveaxis(t, axis, 0).reshape(t.shape[axis], -1, order="F")


def fold(m, mode, shape):
    """Inverse of :func:`unfold`."""
    shape = tuple(int(n) for n in shape)
    axis = check_mode(mode, len(shape))
    m = np.asarray(m, dtype=np.float64)
    if m.ndim == 1 and len(shape) == 1:
        m = m.reshape(-1, 1)
    rest = tuple(n for k, n in enumerate(shape) if k != axis)
    expected = (shape[axis], int(np.prod(rest, dtype=np.int64)))
    if m.shape != expected:
        raise ValueError(
            f"matrix of shape {m.shape} cannot be folded at mode {mode} "
            f"into {shape}; expected {expected}"
        )
    return np.moveaxis(m.reshape((shape[axis],) + rest, order="F"), 0, axis)


def _mode_product(t, matrix, axis):
    # contract the columns of ``matrix`` with axis ``axis`` of ``t``
    out = np.tensordot(matrix, t, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def ttm(t, matrices, transpose=False):
    """Tensor-times-matrix product ``(M_1, ..., M_d) t``.

    Parameters
    ----------
    t : array_like
        Tensor of order ``d``.
    matrices : sequence
        One entry per mode. ``None`` stands for the identity and is never
        materialized.
    transpose : bool
        Apply ``M_mu.T`` instead of ``M_mu`` on every mode. Handy for
        projecting onto orthonormal factors.
    """
    t = as_tensor(t)
    if len(matrices) != t.ndim:
        raise ValueError(f"expected {t.ndim} matrices, got {len(matrices)}")
    out = t
    for axis, mat in enumerate(matrices):
        if mat is None:
            continue
        mat = np.asarray(mat, dtype=np.float64)
        if mat.ndim != 2:
            raise ValueError(f"mode {axis + 1}: expected a matrix, got ndim={mat.ndim}")
        if transpose:
            mat = mat.T
        if mat.shape[1] != out.shape[axis]:
            raise ValueError(
                f"mode {axis + 1}: matrix has {mat.shape[1]} columns but the "
                f"tensor dimension is {out.shape[axis]}"
            )
        out = _mode_product(out, mat, axis)
    return out


def kronecker(a, b):
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(np.atleast_2d(a), np.atleast_2d(b))


def kron_chain(matrices, skip=None):
    """Reversed Kronecker chain ``M_d (x) ... (x) M_1``, omitting mode ``skip``.

    ``matrices`` is indexed by mode (``matrices[0]`` is ``M_1``). This is the
    right-hand factor of the unfolding identity for TTM products.
    """
    chosen = [m for k, m in enumerate(matrices, start=1) if k != skip]
    if not chosen:
        return np.ones((1, 1))
    return reduce(kronecker, reversed(chosen))
