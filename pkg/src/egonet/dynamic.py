"""Sliding-window ego networks and ring stability indices (Jaccard and jump)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .model import DAY, Interaction
from .static import (DEFAULT_BANDWIDTH_QUANTILE, DEFAULT_MERGE_RADIUS, active_network,
                     build_ego_network, detect_circles)

NUM_RINGS = 5
WIDTH_DAYS = 365
STEP_DAYS = 30
ALIGNMENTS = ("inner", "outer")


@dataclass(frozen=True)
class SnapshotSeries:
    ego_id: str
    windows: Tuple[Tuple[int, int], ...]
    ring_membership: Tuple[Dict[str, int], ...]  # per window: alter -> ring (1..num_rings)
    num_rings: int = NUM_RINGS

    def members(self, t: int, ring: int) -> frozenset:
        return frozenset(a for a, r in self.ring_membership[t].items() if r == ring)


@dataclass(frozen=True)
class RingStability:
    ring: int
    mean_jaccard: Optional[float]
    jaccard_pairs: int
    mean_jump: Optional[float]
    jump_alters: int  # distinct alters behind mean_jump


def make_windows(first: int, last: int, width_days: float = WIDTH_DAYS,
                 step_days: float = STEP_DAYS) -> List[Tuple[int, int]]:
    """Windows ``[first + k*step, first + k*step + width)`` that end no later than ``last``."""
    width = int(round(width_days * DAY))
    step = int(round(step_days * DAY))
    if width <= 0 or step <= 0:
        raise ValueError("window width and step must be positive")
    out = []
    start = first
    while start + width <= last:
        out.append((start, start + width))
        start += step
    return out


def snapshot_rings(ego_id: str, interactions: Sequence[Interaction],
                   windows: Sequence[Tuple[int, int]], num_rings: int = NUM_RINGS,
                   bandwidth_quantile: float = DEFAULT_BANDWIDTH_QUANTILE,
                   merge_radius: float = DEFAULT_MERGE_RADIUS,
                   align: str = "inner") -> SnapshotSeries:
    """Detect circles in every window and map clusters to rings ``1..num_rings``.

    With ``align="inner"`` the c clusters of a window take rings 1..c and clusters
    ranked beyond ``num_rings`` fold into the outermost ring. With ``"outer"`` a
    window with fewer clusters fills the outermost rings instead (c clusters take
    rings num_rings-c+1..num_rings), so the sparse outer layers stay aligned.
    """
    if align not in ALIGNMENTS:
        raise ValueError(f"align must be one of {ALIGNMENTS}, got {align!r}")
    memberships = []
    for w in windows:
        active = active_network(build_ego_network(ego_id, interactions, w))
        ls = detect_circles(active, bandwidth_quantile, merge_radius=merge_radius)
        shift = max(0, num_rings - ls.num_circles) if align == "outer" else 0
        memberships.append({a: min(r + shift, num_rings) for a, r in ls.ring_of.items()})
    return SnapshotSeries(ego_id, tuple(windows), tuple(memberships), num_rings)


def jaccard(a: frozenset, b: frozenset) -> Optional[float]:
    union = len(a | b)
    if union == 0:
        return None
    return len(a & b) / union


def _require_pairs(series: SnapshotSeries) -> None:
    if len(series.windows) < 2:
        raise ValueError(f"ego {series.ego_id}: stability needs at least 2 windows, "
                         f"got {len(series.windows)}")


def jaccard_per_ring(series: SnapshotSeries) -> Dict[int, Tuple[Optional[float], int]]:
    """Per ring: mean Jaccard index over consecutive window pairs and the number of pairs used.

    Pairs where the ring is empty in both windows are skipped.
    """
    _require_pairs(series)
    out = {}
    for ring in range(1, series.num_rings + 1):
        values = []
        for t in range(len(series.windows) - 1):
            j = jaccard(series.members(t, ring), series.members(t + 1, ring))
            if j is not None:
                values.append(j)
        out[ring] = (sum(values) / len(values) if values else None, len(values))
    return out


def jump_index_per_ring(series: SnapshotSeries, magnitude: bool = False
                        ) -> Dict[int, Tuple[Optional[float], int]]:
    """Per ring: mean jump rate of its alters and the number of distinct alters involved.

    An alter present in both windows of a consecutive pair scores 1 if its ring
    changed (the absolute ring difference with ``magnitude``). Its jump rate is the
    score summed over all such pairs divided by their number. Each pair where the
    alter sits in ring r in the earlier window contributes that rate once to
    ring r's average.
    """
    _require_pairs(series)
    rates = alter_jump_rates(series, magnitude)
    sums = {r: [0.0, 0, set()] for r in range(1, series.num_rings + 1)}
    for before, after in zip(series.ring_membership, series.ring_membership[1:]):
        for alter, r0 in before.items():
            if alter in after:
                acc = sums[r0]
                acc[0] += rates[alter]
                acc[1] += 1
                acc[2].add(alter)
    return {r: (total / n if n else None, len(alters)) for r, (total, n, alters) in sums.items()}


def alter_jump_rates(series: SnapshotSeries, magnitude: bool = False) -> Dict[str, float]:
    """Jumps per consecutive pair for every alter present in at least one pair of windows."""
    acc: Dict[str, List[float]] = {}
    for before, after in zip(series.ring_membership, series.ring_membership[1:]):
        for alter, r0 in before.items():
            r1 = after.get(alter)
            if r1 is None:
                continue
            a = acc.setdefault(alter, [0.0, 0])
            a[0] += abs(r1 - r0) if magnitude else float(r1 != r0)
            a[1] += 1
    return {a: j / n for a, (j, n) in sorted(acc.items())}


def ring_stability(series: SnapshotSeries, magnitude: bool = False) -> List[RingStability]:
    jac = jaccard_per_ring(series)
    jump = jump_index_per_ring(series, magnitude)
    return [RingStability(r, jac[r][0], jac[r][1], jump[r][0], jump[r][1])
            for r in range(1, series.num_rings + 1)]
