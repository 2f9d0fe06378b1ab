"""Synthetic ego timelines with planted ring structure.

Each planted alter receives outgoing tweets from a homogeneous Poisson process at
its ring's rate. The resulting timelines use the regular archive format, so the
whole pipeline can be run against a corpus whose answer is known.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .corpus import Profile, write_profiles, write_timeline
from .model import YEAR, Timeline, TweetRecord, parse_instant

DEFAULT_START = parse_instant("2014-01-01T00:00:00Z")
KIND_WEIGHTS = (0.54, 0.22, 0.24)  # retweet, reply, mention
HASHTAG_POOL = tuple(f"tag{i}" for i in range(40))
TRUTH_FILE = "truth.csv"


@dataclass(frozen=True)
class SynthConfig:
    ring_sizes: Tuple[int, ...] = (2, 3, 10, 35, 100)
    ring_rates: Tuple[float, ...] = (243.0, 81.0, 27.0, 9.0, 3.0)
    duration_years: float = 3.0
    hashtag_prob_activated: float = 0.4
    hashtag_prob_plain: float = 0.2
    activation_prob: float = 0.36
    noise_alters: int = 30
    noise_rate_range: Tuple[float, float] = (0.1, 0.5)
    indirect_rate: float = 250.0  # tweets/year without any reference
    reshuffle_rates_yearly: bool = False
    start: int = DEFAULT_START
    seed: int = 0

    def validate(self) -> None:
        if len(self.ring_sizes) != len(self.ring_rates) or not self.ring_sizes:
            raise ValueError("ring_sizes and ring_rates must be non-empty and of equal length")
        if any(s < 0 for s in self.ring_sizes):
            raise ValueError("ring sizes must be non-negative")
        if any(b >= a for a, b in zip(self.ring_rates, self.ring_rates[1:])):
            raise ValueError("ring_rates must be strictly decreasing")
        if min(self.ring_rates) < 1.0:
            raise ValueError("planted ring rates must be at least 1 contact/year")
        for name in ("hashtag_prob_activated", "hashtag_prob_plain", "activation_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        lo, hi = self.noise_rate_range
        if self.noise_alters < 0 or not 0 < lo <= hi < 1.0:
            raise ValueError("noise alters need rates in (0, 1) contacts/year")
        if self.duration_years <= 0 or self.indirect_rate < 0:
            raise ValueError("duration must be positive and indirect_rate non-negative")


@dataclass(frozen=True)
class PlantedAlter:
    alter_id: str
    ring: int  # 0 for sub-threshold noise alters
    rate: float
    activated: bool


@dataclass(frozen=True)
class GroundTruth:
    ego_id: str
    alters: Tuple[PlantedAlter, ...] = field(default_factory=tuple)

    def by_alter(self):
        return {a.alter_id: a for a in self.alters}


def _poisson_times(rng: np.random.Generator, rate_per_year: float, t0: float, t1: float) -> np.ndarray:
    n = rng.poisson(rate_per_year * (t1 - t0) / YEAR)
    return rng.uniform(t0, t1, size=n)


def generate_ego(cfg: SynthConfig, ego_id: Optional[str] = None) -> Tuple[Timeline, GroundTruth]:
    """Draw one synthetic timeline and its planted truth; deterministic in ``cfg.seed``."""
    cfg.validate()
    ego_id = ego_id or f"ego{cfg.seed}"
    rng = np.random.default_rng(cfg.seed)
    start = cfg.start
    end = start + int(round(cfg.duration_years * YEAR))

    planted: List[PlantedAlter] = []
    k = 0
    for ring, (size, rate) in enumerate(zip(cfg.ring_sizes, cfg.ring_rates), start=1):
        for _ in range(size):
            k += 1
            planted.append(PlantedAlter(f"{ego_id}_a{k:04d}", ring, rate,
                                        bool(rng.random() < cfg.activation_prob)))
    lo, hi = cfg.noise_rate_range
    for _ in range(cfg.noise_alters):
        k += 1
        planted.append(PlantedAlter(f"{ego_id}_a{k:04d}", 0, float(rng.uniform(lo, hi)),
                                    bool(rng.random() < cfg.activation_prob)))

    # (time, alter index or -1 for indirect)
    events_t: List[np.ndarray] = []
    events_a: List[np.ndarray] = []
    if cfg.reshuffle_rates_yearly:
        # every planted alter redraws its rate once a year, at its own anniversary
        pool = np.array([p.rate for p in planted if p.ring > 0])
        for i, p in enumerate(planted):
            if p.ring == 0:
                t = _poisson_times(rng, p.rate, start, end)
            else:
                bounds = [start] + list(np.arange(start + rng.uniform(0, YEAR), end, YEAR)) + [end]
                rate = p.rate
                parts = []
                for k, (t0, t1) in enumerate(zip(bounds[:-1], bounds[1:])):
                    if k > 0:
                        rate = float(rng.choice(pool))
                    parts.append(_poisson_times(rng, rate, t0, t1))
                t = np.concatenate(parts)
            events_t.append(t)
            events_a.append(np.full(t.size, i))
    else:
        for i, p in enumerate(planted):
            t = _poisson_times(rng, p.rate, start, end)
            events_t.append(t)
            events_a.append(np.full(t.size, i))
    t = _poisson_times(rng, cfg.indirect_rate, start, end)
    events_t.append(t)
    events_a.append(np.full(t.size, -1))

    times = np.floor(np.concatenate(events_t)).astype(np.int64) if events_t else np.zeros(0, np.int64)
    alters = np.concatenate(events_a).astype(np.int64) if events_a else np.zeros(0, np.int64)
    order = np.lexsort((alters, times))
    times, alters = times[order], alters[order]

    kinds = rng.choice(3, size=times.size, p=KIND_WEIGHTS)
    tag_u = rng.random(times.size)
    tag_pick = rng.integers(len(HASHTAG_POOL), size=times.size)
    seen = set()
    tweets = []
    for n, (ts, ai) in enumerate(zip(times.tolist(), alters.tolist())):
        tid = f"{ego_id}-{n:06d}"
        if ai < 0:
            has_tag = tag_u[n] < cfg.hashtag_prob_plain
            tweets.append(TweetRecord(tid, ego_id, ts,
                                      hashtags=(HASHTAG_POOL[tag_pick[n]],) if has_tag else ()))
            continue
        p = planted[ai]
        if ai not in seen:
            seen.add(ai)
            has_tag = p.activated
        else:
            prob = cfg.hashtag_prob_activated if p.activated else cfg.hashtag_prob_plain
            has_tag = tag_u[n] < prob
        tags = (HASHTAG_POOL[tag_pick[n]],) if has_tag else ()
        kind = kinds[n]
        tweets.append(TweetRecord(
            tid, ego_id, ts,
            retweeted_user=p.alter_id if kind == 0 else None,
            replied_to_user=p.alter_id if kind == 1 else None,
            mentioned_users=frozenset((p.alter_id,)) if kind == 2 else frozenset(),
            hashtags=tags,
        ))
    tl = Timeline(ego_id, start, end, tuple(tweets))
    return tl, GroundTruth(ego_id, tuple(planted))


def ego_config(cfg: SynthConfig, i: int) -> SynthConfig:
    return replace(cfg, seed=cfg.seed + i)


def generate_population(cfg: SynthConfig, n_egos: int, out_dir: Path) -> List[GroundTruth]:
    """Write ``n_egos`` timelines, ``profiles.csv`` and ``truth.csv`` into ``out_dir``."""
    if n_egos < 1:
        raise ValueError("n_egos must be at least 1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    truths, profiles = [], []
    for i in range(n_egos):
        tl, truth = generate_ego(ego_config(cfg, i), f"ego{i:04d}")
        write_timeline(out_dir, tl)
        profiles.append(Profile(tl.user_id, tl.account_created, tl.download_time, len(tl)))
        truths.append(truth)
    write_profiles(out_dir, profiles)
    write_truth(out_dir / TRUTH_FILE, truths)
    return truths


def write_truth(path: Path, truths: List[GroundTruth]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ego_id", "alter_id", "ring", "rate", "activated"])
        for t in truths:
            for a in t.alters:
                w.writerow([t.ego_id, a.alter_id, a.ring, repr(float(a.rate)), int(a.activated)])


def read_truth(path: Path) -> List[GroundTruth]:
    rows = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            rows.setdefault(r["ego_id"], []).append(
                PlantedAlter(r["alter_id"], int(r["ring"]), float(r["rate"]), r["activated"] == "1"))
    return [GroundTruth(ego, tuple(alters)) for ego, alters in rows.items()]
