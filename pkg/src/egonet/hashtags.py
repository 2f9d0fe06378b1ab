"""Ties activated by hashtags: activation rates, contact frequency and hashtag intensity per ring."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .model import Interaction
from .static import EgoNetwork

NUM_RINGS = 5
Z95 = 1.96


def activation_by_hashtag(interactions: Sequence[Interaction]) -> bool:
    """True iff the chronologically first interaction (ties broken by tweet id) carries a hashtag."""
    if not interactions:
        raise ValueError("no interactions: the relationship does not exist")
    first = min(interactions, key=lambda it: (it.timestamp, it.tweet_id))
    return first.hashtag_count >= 1


def hashtag_intensity(interactions: Sequence[Interaction]) -> float:
    """Hashtag occurrences per interaction."""
    if not interactions:
        raise ValueError("no interactions")
    return sum(it.hashtag_count for it in interactions) / len(interactions)


@dataclass(frozen=True)
class AlterRecord:
    """One active tie as seen by the hashtag analysis."""
    alter_id: str
    ring: int
    frequency: float
    activated: bool
    interaction_count: int
    hashtag_total: int

    @property
    def intensity(self) -> float:
        return self.hashtag_total / self.interaction_count


@dataclass(frozen=True)
class EgoActivation:
    ego_id: str
    n_active: int
    n_activated: int
    ring_counts: Dict[int, Tuple[int, int]]  # ring -> (activated, total)

    @property
    def activation_pct(self) -> float:
        return 100.0 * self.n_activated / self.n_active if self.n_active else float("nan")

    def ring_pct(self, ring: int) -> Optional[float]:
        act, tot = self.ring_counts.get(ring, (0, 0))
        return 100.0 * act / tot if tot else None


@dataclass(frozen=True)
class GroupSummary:
    mean: Optional[float]
    sd: Optional[float]
    n: int


@dataclass(frozen=True)
class RingHashtags:
    ring: int
    mean_activation_pct: float
    ci95: Optional[float]  # half-width, None when fewer than 2 egos have the ring
    n_egos: int
    freq_activated: GroupSummary
    freq_not: GroupSummary
    intensity_activated: GroupSummary
    intensity_not: GroupSummary
    total_activated: GroupSummary  # raw hashtag totals per alter
    total_not: GroupSummary


def alter_records(net: EgoNetwork, ring_of: Mapping[str, int], num_rings: int = NUM_RINGS
                  ) -> List[AlterRecord]:
    """Join a network with a ring assignment; rings beyond ``num_rings`` fold into the last one."""
    out = []
    for alter, ring in sorted(ring_of.items()):
        tie = net.ties[alter]
        out.append(AlterRecord(alter, min(ring, num_rings), tie.frequency_per_year,
                               tie.activated_by_hashtag, tie.interaction_count, tie.hashtag_total))
    return out


def ego_activation(ego_id: str, records: Sequence[AlterRecord]) -> EgoActivation:
    counts: Dict[int, List[int]] = {}
    for r in records:
        c = counts.setdefault(r.ring, [0, 0])
        c[0] += int(r.activated)
        c[1] += 1
    return EgoActivation(ego_id, len(records), sum(int(r.activated) for r in records),
                         {k: (a, t) for k, (a, t) in sorted(counts.items())})


def summarize(values: Sequence[float]) -> GroupSummary:
    """Mean, sample standard deviation (0 for a single value) and size."""
    if len(values) == 0:
        return GroupSummary(None, None, 0)
    x = np.asarray(values, dtype=float)
    sd = float(x.std(ddof=1)) if x.size >= 2 else 0.0
    return GroupSummary(float(x.mean()), sd, int(x.size))


def mean_ci(values: Sequence[float], z: float = Z95) -> Tuple[float, Optional[float]]:
    """Mean and normal-approximation half-width ``z * sd / sqrt(n)``; no half-width below n = 2."""
    s = summarize(values)
    if s.n == 0:
        raise ValueError("empty sample")
    if s.n < 2:
        return s.mean, None
    return s.mean, z * s.sd / math.sqrt(s.n)


def activation_stats(egos: Mapping[str, Sequence[AlterRecord]], num_rings: int = NUM_RINGS
                     ) -> Tuple[List[EgoActivation], List[RingHashtags]]:
    """Per-ego activation table and per-ring summary pooled over egos.

    Rings that are empty for every ego are left out of the summary.
    """
    per_ego = [ego_activation(e, egos[e]) for e in sorted(egos)]
    rings = []
    for ring in range(1, num_rings + 1):
        pcts = [p for p in (e.ring_pct(ring) for e in per_ego) if p is not None]
        if not pcts:
            continue
        members = [r for e in sorted(egos) for r in egos[e] if r.ring == ring]
        act = [r for r in members if r.activated]
        plain = [r for r in members if not r.activated]
        mean, ci = mean_ci(pcts)
        rings.append(RingHashtags(
            ring=ring, mean_activation_pct=mean, ci95=ci, n_egos=len(pcts),
            freq_activated=summarize([r.frequency for r in act]),
            freq_not=summarize([r.frequency for r in plain]),
            intensity_activated=summarize([r.intensity for r in act]),
            intensity_not=summarize([r.intensity for r in plain]),
            total_activated=summarize([r.hashtag_total for r in act]),
            total_not=summarize([r.hashtag_total for r in plain]),
        ))
    return per_ego, rings


def frequency_by_activation(egos: Mapping[str, Sequence[AlterRecord]], num_rings: int = NUM_RINGS
                            ) -> Dict[int, Tuple[GroupSummary, GroupSummary]]:
    """Per ring: contact-frequency summaries of (activated, not activated) alters pooled over egos."""
    out = {}
    for ring in range(1, num_rings + 1):
        members = [r for e in sorted(egos) for r in egos[e] if r.ring == ring]
        out[ring] = (summarize([r.frequency for r in members if r.activated]),
                     summarize([r.frequency for r in members if not r.activated]))
    return out


def intensity_by_activation(egos: Mapping[str, Sequence[AlterRecord]], num_rings: int = NUM_RINGS
                            ) -> Dict[int, Tuple[GroupSummary, GroupSummary]]:
    """Per ring: hashtags-per-tweet summaries of (activated, not activated) alters pooled over egos."""
    out = {}
    for ring in range(1, num_rings + 1):
        members = [r for e in sorted(egos) for r in egos[e] if r.ring == ring]
        out[ring] = (summarize([r.intensity for r in members if r.activated]),
                     summarize([r.intensity for r in members if not r.activated]))
    return out
