"""Static ego networks: tie aggregation, active-tie threshold and circle detection."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .meanshift import Cluster, mean_shift_1d
from .model import DAY, YEAR, Interaction

log = logging.getLogger(__name__)

ACTIVE_THRESHOLD = 1.0  # contacts per year, inclusive
MIN_TIE_DAYS = 30.0
DEFAULT_BANDWIDTH_QUANTILE = 0.35
# adjacent clusters whose centers are closer than this many bandwidths are merged
DEFAULT_MERGE_RADIUS = 1.25


@dataclass(frozen=True)
class TieStats:
    interaction_count: int
    first_contact: int
    last_contact: int
    frequency_per_year: float
    hashtag_total: int
    activated_by_hashtag: bool

    @property
    def intensity(self) -> float:
        return self.hashtag_total / self.interaction_count


@dataclass(frozen=True)
class EgoNetwork:
    ego_id: str
    window: Tuple[int, int]  # [start, end)
    ties: Dict[str, TieStats] = field(default_factory=dict)

    def __post_init__(self):
        if self.window[1] <= self.window[0]:
            raise ValueError(f"empty window {self.window}")

    def __len__(self):
        return len(self.ties)

    def frequencies(self) -> Dict[str, float]:
        return {a: t.frequency_per_year for a, t in self.ties.items()}


@dataclass(frozen=True)
class LayerStructure:
    ego_id: str
    num_circles: int
    ring_of: Dict[str, int]
    ring_sizes: Tuple[int, ...]
    circle_sizes: Tuple[int, ...]
    ring_mean_frequency: Tuple[float, ...] = ()
    bandwidth: float = float("nan")
    degenerate: bool = False

    @property
    def scaling_ratios(self) -> List[float]:
        return scaling_ratios(self)

    def ring_members(self, ring: int) -> List[str]:
        return sorted(a for a, r in self.ring_of.items() if r == ring)


def tie_frequency(count: int, first_contact: int, window_end: int,
                  min_days: float = MIN_TIE_DAYS) -> float:
    """Contacts per year since the first contact, with the tie age floored at ``min_days``."""
    age = max((window_end - first_contact) / DAY, min_days)
    return count / (age * DAY / YEAR)


def build_ego_network(ego_id: str, interactions: Sequence[Interaction],
                      window: Tuple[int, int], min_days: float = MIN_TIE_DAYS) -> EgoNetwork:
    """Aggregate interactions falling in ``[start, end)`` into per-alter tie statistics.

    Interactions before the window still decide whether the tie was activated by a hashtag.
    """
    start, end = window
    first_seen: Dict[str, Tuple[int, str, int]] = {}
    acc: Dict[str, List[int]] = {}
    for it in interactions:
        if it.timestamp >= end:
            continue
        key = (it.timestamp, it.tweet_id, it.hashtag_count)
        prev = first_seen.get(it.alter_id)
        if prev is None or key[:2] < prev[:2]:
            first_seen[it.alter_id] = key
        if it.timestamp < start:
            continue
        a = acc.get(it.alter_id)
        if a is None:
            acc[it.alter_id] = [1, it.timestamp, it.timestamp, it.hashtag_count]
        else:
            a[0] += 1
            a[1] = min(a[1], it.timestamp)
            a[2] = max(a[2], it.timestamp)
            a[3] += it.hashtag_count
    ties = {}
    for alter in sorted(acc):
        count, first, last, tags = acc[alter]
        ties[alter] = TieStats(
            interaction_count=count,
            first_contact=first,
            last_contact=last,
            frequency_per_year=tie_frequency(count, first, end, min_days),
            hashtag_total=tags,
            activated_by_hashtag=first_seen[alter][2] >= 1,
        )
    return EgoNetwork(ego_id, (start, end), ties)


def active_network(net: EgoNetwork, threshold: float = ACTIVE_THRESHOLD) -> EgoNetwork:
    return EgoNetwork(net.ego_id, net.window,
                      {a: t for a, t in net.ties.items() if t.frequency_per_year >= threshold})


def quantile_bandwidth(log_values: np.ndarray, quantile: float) -> float:
    """``quantile`` of all pairwise absolute differences; falls back to the smallest
    positive difference (or 1.0 for constant data) when that quantile is zero."""
    v = np.sort(np.asarray(log_values, dtype=float))
    if v.size < 2:
        return 1.0
    i, j = np.triu_indices(v.size, k=1)
    diffs = v[j] - v[i]
    bw = float(np.quantile(diffs, quantile))
    if bw > 0:
        return bw
    positive = diffs[diffs > 0]
    return float(positive.min()) if positive.size else 1.0


def merge_close_clusters(clusters: Sequence[Cluster], radius: float) -> List[Cluster]:
    """Chain clusters (by center) whose neighbouring centers are closer than ``radius``.

    The merged center is the member-weighted mean of the chained centers.
    """
    ordered = sorted(clusters, key=lambda c: c.center)
    groups = [[ordered[0]]]
    for c in ordered[1:]:
        if c.center - groups[-1][-1].center < radius:
            groups[-1].append(c)
        else:
            groups.append([c])
    merged = []
    for g in groups:
        n = sum(len(c.members) for c in g)
        center = sum(c.center * len(c.members) for c in g) / n
        merged.append(Cluster(center, tuple(sorted(i for c in g for i in c.members))))
    merged.sort(key=lambda c: -c.center)
    return merged


def detect_circles(active: EgoNetwork, bandwidth_quantile: float = DEFAULT_BANDWIDTH_QUANTILE,
                   bandwidth: Optional[float] = None,
                   merge_radius: float = DEFAULT_MERGE_RADIUS) -> LayerStructure:
    """Cluster the active ties by log contact frequency into nested circles.

    Mean Shift runs on ``ln(frequency)``; unless given, the bandwidth is the
    ``bandwidth_quantile`` of all pairwise log differences. Modes closer than
    ``merge_radius`` bandwidths are then fused (0.5 keeps the raw Mean Shift
    clusters). Rings are numbered from 1 (highest mean frequency). With fewer
    than two ties the structure is a single (possibly empty) circle flagged as
    degenerate.
    """
    alters = sorted(active.ties)
    freqs = np.array([active.ties[a].frequency_per_year for a in alters], dtype=float)
    if len(alters) < 2:
        if alters:
            log.warning("ego %s: %d active tie(s), circle structure is degenerate",
                        active.ego_id, len(alters))
        ring_of = {a: 1 for a in alters}
        n = len(alters)
        return LayerStructure(active.ego_id, 1 if n else 0, ring_of,
                              (n,) if n else (), (n,) if n else (),
                              tuple(float(f) for f in freqs), degenerate=True)

    logs = np.log(freqs)
    bw = bandwidth if bandwidth is not None else quantile_bandwidth(logs, bandwidth_quantile)
    clusters = mean_shift_1d(logs, bw)
    if merge_radius > 0.5:
        clusters = merge_close_clusters(clusters, merge_radius * bw)
    mean_freq = [float(np.mean(freqs[list(c.members)])) for c in clusters]
    order = sorted(range(len(clusters)), key=lambda k: (-mean_freq[k], -clusters[k].center))
    ring_of = {}
    ring_sizes = []
    for ring, k in enumerate(order, start=1):
        for i in clusters[k].members:
            ring_of[alters[i]] = ring
        ring_sizes.append(len(clusters[k].members))
    return LayerStructure(
        ego_id=active.ego_id,
        num_circles=len(clusters),
        ring_of=ring_of,
        ring_sizes=tuple(ring_sizes),
        circle_sizes=tuple(int(s) for s in np.cumsum(ring_sizes)),
        ring_mean_frequency=tuple(mean_freq[k] for k in order),
        bandwidth=bw,
    )


def scaling_ratios(ls: LayerStructure) -> List[float]:
    """Ratios between consecutive circle sizes (empty for fewer than two circles)."""
    c = ls.circle_sizes
    if ls.num_circles < 2:
        return []
    return [c[k + 1] / c[k] for k in range(len(c) - 1)]
