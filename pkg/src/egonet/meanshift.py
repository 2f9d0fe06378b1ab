"""Flat-kernel Mean Shift for one-dimensional data."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

TOL = 1e-6
MAX_ITER = 500


@dataclass(frozen=True)
class Cluster:
    center: float
    members: Tuple[int, ...]  # indices into the input sequence


def shift_to_modes(values: Sequence[float], bandwidth: float,
                   tol: float = TOL, max_iter: int = MAX_ITER) -> np.ndarray:
    """Run the mean-shift update from every input point; return the converged positions.

    Each point moves to the mean of the data within ``[x - bandwidth, x + bandwidth]``
    until it moves less than ``tol`` or ``max_iter`` updates were applied.
    """
    x0 = np.asarray(values, dtype=float)
    data = np.sort(x0)
    csum = np.concatenate(([0.0], np.cumsum(data)))
    x = x0.copy()
    active = np.ones(len(x), dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        pos = x[idx]
        lo = np.searchsorted(data, pos - bandwidth, side="left")
        hi = np.searchsorted(data, pos + bandwidth, side="right")
        new = (csum[hi] - csum[lo]) / (hi - lo)
        x[idx] = new
        active[idx[np.abs(new - pos) < tol]] = False
    return x


def mean_shift_1d(values: Sequence[float], bandwidth: float) -> List[Cluster]:
    """Cluster 1-D values with flat-kernel Mean Shift.

    Converged points closer than ``bandwidth / 2`` to their neighbour (after
    sorting) are chained into one cluster. Clusters come back sorted by
    descending center; the result does not depend on input order.

    :raises ValueError: on empty input, non-finite values or non-positive bandwidth
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("mean_shift_1d needs at least one value")
    if not np.all(np.isfinite(v)):
        raise ValueError("mean_shift_1d got non-finite values")
    if not (bandwidth > 0 and np.isfinite(bandwidth)):
        raise ValueError(f"bandwidth must be positive, got {bandwidth!r}")

    modes = shift_to_modes(v, bandwidth)
    order = np.lexsort((v, modes))
    groups = []
    current = [order[0]]
    for prev, i in zip(order[:-1], order[1:]):
        if modes[i] - modes[prev] < bandwidth / 2:
            current.append(i)
        else:
            groups.append(current)
            current = [i]
    groups.append(current)

    clusters = [Cluster(float(np.mean(modes[g])), tuple(sorted(int(i) for i in g))) for g in groups]
    clusters.sort(key=lambda c: -c.center)
    return clusters
