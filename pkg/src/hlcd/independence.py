"""G-squared conditional independence test, mutual information, and SU."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.special import gammaincc

from .data import DataError, Dataset, marginal_counts

__all__ = [
    "CiResult",
    "g2_test",
    "is_independent",
    "mutual_information",
    "entropy",
    "symmetric_uncertainty",
]

RELIABILITY_FACTOR = 5  # heuristic: need N >= 5 * df for the test to be trusted


@dataclass(frozen=True)
class CiResult:
    x: int
    y: int
    z: Tuple[int, ...]
    g2: float
    df: int
    p_value: float
    reliable: bool


def _check_vars(dataset: Dataset, x: int, y: int, z: Sequence[int]) -> Tuple[int, ...]:
    n = dataset.n_vars
    z = tuple(int(v) for v in z)
    for v in (x, y, *z):
        if not 0 <= v < n:
            raise DataError(f"variable index {v} out of range")
    if x == y or x in z or y in z:
        raise DataError("x, y, and conditioning variables must be distinct")
    if len(set(z)) != len(z):
        raise DataError("duplicate conditioning variable")
    return z


def g2_test(dataset: Dataset, x: int, y: int, z: Sequence[int] = ()) -> CiResult:
    """Conditional G-squared test of x against y within each stratum of z.

    G2 = 2 * sum O * ln(O / E) with E the per-stratum independence expectation;
    zero observed cells contribute 0, empty strata are skipped. Degrees of
    freedom use the full declared arities: (r_x - 1)(r_y - 1) * prod r_z, never
    reduced for empty strata. The p-value is the chi-square upper tail.
    """
    z = _check_vars(dataset, x, y, z)
    rx = int(dataset.arities[x])
    ry = int(dataset.arities[y])
    rz = [int(dataset.arities[v]) for v in z]
    qz = 1
    for r in rz:
        qz *= r

    cols = tuple(dataset.rows[:, v] for v in (*z, x, y))
    flat = np.ravel_multi_index(cols, dims=(*rz, rx, ry))
    cube = np.bincount(flat, minlength=qz * rx * ry).reshape(qz, rx, ry)

    totals = cube.sum(axis=(1, 2))
    used = totals > 0
    g2 = 0.0
    if np.any(used):
        obs = cube[used].astype(np.float64)
        row = obs.sum(axis=2, keepdims=True)
        col = obs.sum(axis=1, keepdims=True)
        expected = row * col / totals[used][:, None, None]
        mask = obs > 0
        g2 = float(2.0 * np.sum(obs[mask] * np.log(obs[mask] / expected[mask])))
    g2 = max(g2, 0.0)  # clamp away negative rounding residue

    df = max(1, (rx - 1) * (ry - 1) * qz)
    p_value = float(gammaincc(df / 2.0, g2 / 2.0))
    reliable = dataset.n_rows >= RELIABILITY_FACTOR * df
    return CiResult(x=x, y=y, z=z, g2=g2, df=df, p_value=p_value, reliable=reliable)


def is_independent(result: CiResult, alpha: float) -> bool:
    """Accept independence only when the test is reliable and p exceeds alpha."""
    return result.reliable and result.p_value > alpha


def entropy(dataset: Dataset, x: int) -> float:
    """Empirical entropy of one variable, in nats."""
    counts = marginal_counts(dataset, x)
    pos = counts[counts > 0].astype(np.float64)
    p = pos / dataset.n_rows
    return float(-np.sum(p * np.log(p)))


def mutual_information(dataset: Dataset, x: int, y: int) -> float:
    """Empirical mutual information of two variables, in nats."""
    _check_vars(dataset, x, y, ())
    rx = int(dataset.arities[x])
    ry = int(dataset.arities[y])
    flat = np.ravel_multi_index(
        (dataset.rows[:, x], dataset.rows[:, y]), dims=(rx, ry)
    )
    joint = np.bincount(flat, minlength=rx * ry).reshape(rx, ry).astype(np.float64)
    n = dataset.n_rows
    px = joint.sum(axis=1) / n
    py = joint.sum(axis=0) / n
    p = joint / n
    mask = p > 0
    ratio = p[mask] / (np.outer(px, py)[mask])
    return max(float(np.sum(p[mask] * np.log(ratio))), 0.0)


def symmetric_uncertainty(dataset: Dataset, x: int, y: int) -> float:
    """2 * I(x; y) / (H(x) + H(y)); zero when both variables are constant."""
    hx = entropy(dataset, x)
    hy = entropy(dataset, y)
    if hx + hy == 0.0:
        return 0.0
    return 2.0 * mutual_information(dataset, x, y) / (hx + hy)
