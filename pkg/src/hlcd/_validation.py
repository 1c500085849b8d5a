"""Input validation helpers for array-facing entry points."""
from typing import Optional, Sequence

import numpy as np
from sklearn.utils import check_array

from .data import DataError, Dataset


def validate_discrete_matrix(
    X,
    *,
    names: Optional[Sequence[str]] = None,
    arities: Optional[Sequence[int]] = None,
) -> Dataset:
    """Coerce a 2-d array-like of non-negative integer codes into a Dataset.

    Existing Dataset instances pass through untouched. Column names default
    to X0..X{p-1}; arities default to observed max + 1 per column.
    """
    if isinstance(X, Dataset):
        return X
    arr = check_array(X, dtype="numeric", ensure_2d=True)
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise DataError("matrix entries must be integers (category codes)")
    arr = arr.astype(np.int64)
    if arr.min(initial=0) < 0:
        raise DataError("matrix entries must be non-negative category codes")
    n_cols = arr.shape[1]
    if names is None:
        names = tuple(f"X{i}" for i in range(n_cols))
    if arities is None:
        arities = tuple(int(arr[:, j].max()) + 1 for j in range(n_cols))
    return Dataset(tuple(names), tuple(int(a) for a in arities), arr)
