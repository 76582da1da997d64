"""Labeled contingency tables."""

import itertools
from dataclasses import dataclass

import numpy as np

from .tensor import unfold


@dataclass(frozen=True)
class ContingencyTable:
    """Nonnegative integer counts with a name per mode and a label per category.

    ``tensor[i_1, ..., i_d]`` is the count of the cell whose mode-``k``
    category is ``labels[k - 1][i_k]``.
    """

    tensor: np.ndarray
    mode_names: tuple
    labels: tuple

    def __post_init__(self):
        arr = np.asarray(self.tensor)
        if arr.ndim == 0:
            raise ValueError("a contingency table needs at least one mode")
        if not np.issubdtype(arr.dtype, np.integer):
            as_int = np.rint(arr)
            if not np.array_equal(as_int, arr):
                raise ValueError("counts must be integers")
            arr = as_int
        arr = arr.astype(np.int64)
        if (arr < 0).any():
            raise ValueError("counts must be nonnegative")
        if not (arr > 0).any():
            raise ValueError("table has no positive entry")
        names = tuple(str(n) for n in self.mode_names)
        labels = tuple(tuple(str(x) for x in lab) for lab in self.labels)
        if len(names) != arr.ndim or len(labels) != arr.ndim:
            raise ValueError(
                f"expected {arr.ndim} mode names and label lists, "
                f"got {len(names)} and {len(labels)}"
            )
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate mode names: {names}")
        for name, lab, n in zip(names, labels, arr.shape):
            if len(lab) != n:
                raise ValueError(f"mode {name!r}: {len(lab)} labels for dimension {n}")
            if len(set(lab)) != len(lab):
                raise ValueError(f"mode {name!r}: duplicate labels")
        arr.setflags(write=False)
        object.__setattr__(self, "tensor", arr)
        object.__setattr__(self, "mode_names", names)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_array(cls, counts, mode_names=None, labels=None):
        """Wrap a bare array, inventing names (``mode1``...) and labels (``1``...)."""
        arr = np.asarray(counts)
        if mode_names is None:
            mode_names = [f"mode{k}" for k in range(1, arr.ndim + 1)]
        if labels is None:
            labels = [[str(i) for i in range(1, n + 1)] for n in arr.shape]
        return cls(arr, tuple(mode_names), tuple(tuple(lab) for lab in labels))

    @property
    def shape(self):
        return self.tensor.shape

    @property
    def order(self):
        return self.tensor.ndim

    @property
    def total(self):
        return int(self.tensor.sum())

    def mode_index(self, mode):
        """1-based mode number from a mode number or mode name."""
        if isinstance(mode, str):
            if mode in self.mode_names:
                return self.mode_names.index(mode) + 1
            if not mode.isdigit():
                raise ValueError(f"unknown mode {mode!r}; modes are {self.mode_names}")
            mode = int(mode)
        if not 1 <= int(mode) <= self.order:
            raise ValueError(f"mode {mode} out of range [1, {self.order}]")
        return int(mode)

    def matricize(self, mode, sep=":"):
        """Two-way table of the mode-``mode`` unfolding.

        Column labels join the other modes' labels with ``sep``, listed in
        unfolding order (lowest remaining mode varying fastest).
        """
        k = self.mode_index(mode)
        others = [j for j in range(self.order) if j != k - 1]
        combos = itertools.product(*(self.labels[j] for j in reversed(others)))
        col_labels = tuple(sep.join(reversed(c)) for c in combos)
        col_name = sep.join(self.mode_names[j] for j in others) or "cell"
        if not col_labels or col_labels == ("",):
            col_labels = ("all",)
        counts = unfold(self.tensor, k).astype(np.int64)
        return ContingencyTable(counts, (self.mode_names[k - 1], col_name),
                                (self.labels[k - 1], col_labels))
