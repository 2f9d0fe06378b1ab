"""User selection: observability, abandonment, regularity, stationarity and outliers."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
from sklearn.cluster import DBSCAN

from .model import DAY, YEAR, Timeline

log = logging.getLogger(__name__)

TWEET_CAP = 3200
GRACE_DAYS = 182.5  # six months
REGULAR_MIN_DAILY = 1.0 / 3.0
REGULAR_MIN_MONTH_FRACTION = 0.5
STATIONARITY_WEEKS = 84
DBSCAN_EPS = 3.0
DBSCAN_MIN_PTS = 5
STATIC_MIN_SPAN_DAYS = 365.0
DYNAMIC_MIN_SPAN_DAYS = 730.0
WEEK = 7 * DAY


class ClassificationError(ValueError):
    """Not enough history to apply a classifier."""


class Observability(enum.Enum):
    FULL = "Full"
    PARTIAL = "Partial"


class Abandonment(enum.Enum):
    ACTIVE = "Active"
    ABANDONED = "Abandoned"


class Regularity(enum.Enum):
    REGULAR = "Regular"
    SPORADIC = "Sporadic"


class Purpose(enum.Enum):
    STATIC = "Static"
    DYNAMIC = "Dynamic"


@dataclass(frozen=True)
class IntertweetStats:
    max_itt_days: Optional[float]
    inactive_life_days: float


@dataclass(frozen=True)
class UserAssessment:
    user_id: str
    observability: Observability
    coverage: float
    active_life_years: float
    observed_tweet_count: int
    daily_frequency: float
    abandonment: Optional[Abandonment]  # None when undetermined (< 2 tweets)
    regularity: Optional[Regularity]  # None when the span is under one month
    is_outlier: bool
    observed_span_days: float
    lifetime_known: bool = True


def assess_observability(tl: Timeline, lifetime_tweet_count: int,
                         cap: int = TWEET_CAP) -> Tuple[Observability, float]:
    observed = len(tl.tweets)
    if lifetime_tweet_count < observed:
        raise ValueError(f"user {tl.user_id}: lifetime count {lifetime_tweet_count} "
                         f"below observed count {observed}")
    kind = (Observability.PARTIAL if observed == cap and lifetime_tweet_count > cap
            else Observability.FULL)
    coverage = observed / lifetime_tweet_count if lifetime_tweet_count else 1.0
    return kind, coverage


def intertweet_stats(tl: Timeline) -> IntertweetStats:
    stamps = np.array([t.timestamp for t in tl.tweets], dtype=np.int64)
    max_itt = float(np.diff(stamps).max()) / DAY if stamps.size >= 2 else None
    last = int(stamps[-1]) if stamps.size else tl.account_created
    return IntertweetStats(max_itt, (tl.download_time - last) / DAY)


def classify_abandonment(tl: Timeline, grace_days: float = GRACE_DAYS) -> Abandonment:
    """Abandoned iff the inactive life reaches the longest past intertweet gap plus the grace period."""
    stats = intertweet_stats(tl)
    if stats.max_itt_days is None:
        raise ClassificationError(f"user {tl.user_id}: abandonment needs at least 2 tweets")
    if stats.inactive_life_days >= stats.max_itt_days + grace_days:
        return Abandonment.ABANDONED
    return Abandonment.ACTIVE


def _utc_date(ts: int) -> date:
    return datetime.fromtimestamp(ts, tz=timezone.utc).date()


def _add_month(d: date) -> date:
    y, m = (d.year + 1, 1) if d.month == 12 else (d.year, d.month + 1)
    for day in (d.day, 30, 29, 28):
        try:
            return d.replace(year=y, month=m, day=day)
        except ValueError:
            continue
    raise AssertionError("unreachable")


def monthly_activity(tl: Timeline) -> List[Tuple[Tuple[int, int], int, int]]:
    """Per calendar month (UTC) touched by the observed span: (year, month), tweets, covered days.

    Covered days count whole calendar days between the first and last tweet, inclusive.
    """
    first, last = _utc_date(tl.first_ts), _utc_date(tl.last_ts)
    counts: Dict[Tuple[int, int], int] = {}
    for t in tl.tweets:
        d = _utc_date(t.timestamp)
        counts[(d.year, d.month)] = counts.get((d.year, d.month), 0) + 1
    out = []
    cursor = first.replace(day=1)
    while cursor <= last:
        nxt = _add_month(cursor)
        lo = max(cursor, first)
        hi = min(nxt - timedelta(days=1), last)
        key = (cursor.year, cursor.month)
        out.append((key, counts.get(key, 0), (hi - lo).days + 1))
        cursor = nxt
    return out


def classify_regularity(tl: Timeline, min_daily: float = REGULAR_MIN_DAILY,
                        min_fraction: float = REGULAR_MIN_MONTH_FRACTION) -> Regularity:
    """Regular iff at least ``min_fraction`` of covered months average ``min_daily`` tweets a day."""
    if len(tl.tweets) == 0 or _add_month(_utc_date(tl.first_ts)) > _utc_date(tl.last_ts):
        raise ClassificationError(f"user {tl.user_id}: observed span shorter than one month")
    months = monthly_activity(tl)
    # exact comparison for the default 1/3 threshold
    if min_daily == REGULAR_MIN_DAILY:
        passing = sum(1 for _, n, days in months if 3 * n >= days)
    else:
        passing = sum(1 for _, n, days in months if n / days >= min_daily)
    if passing >= min_fraction * len(months):
        return Regularity.REGULAR
    return Regularity.SPORADIC


def mean_normalize(series: Sequence[float]) -> np.ndarray:
    """``(x - mean) / (max - min)``; a constant series maps to zeros."""
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        return x
    span = x.max() - x.min()
    if span == 0:
        return np.zeros_like(x)
    return (x - x.mean()) / span


def weekly_counts(tl: Timeline, horizon_weeks: int = STATIONARITY_WEEKS) -> np.ndarray:
    """Tweets per week since the first observed tweet, for the weeks the span reaches."""
    if not tl.tweets:
        return np.zeros(0)
    stamps = np.array([t.timestamp for t in tl.tweets], dtype=np.int64) - tl.first_ts
    n_weeks = min(horizon_weeks, int(stamps[-1] // WEEK) + 1)
    week = stamps // WEEK
    return np.bincount(week[week < n_weeks], minlength=n_weeks).astype(float)


def stationarity_profile(timelines: Iterable[Timeline], horizon_weeks: int = STATIONARITY_WEEKS
                         ) -> Tuple[np.ndarray, np.ndarray]:
    """Mean of the users' mean-normalised weekly counts per week, and the users behind each week."""
    total = np.zeros(horizon_weeks)
    users = np.zeros(horizon_weeks, dtype=int)
    for tl in timelines:
        norm = mean_normalize(weekly_counts(tl, horizon_weeks))
        total[:norm.size] += norm
        users[:norm.size] += 1
    if not users.any():
        raise ValueError("stationarity profile needs at least one fully observed timeline")
    with np.errstate(invalid="ignore"):
        profile = np.where(users > 0, total / np.maximum(users, 1), np.nan)
    return profile, users


def detect_frequency_outliers(frequencies: Mapping[str, float], eps: float = DBSCAN_EPS,
                              min_pts: int = DBSCAN_MIN_PTS) -> Set[str]:
    """Users that DBSCAN labels as noise on their daily tweet frequency."""
    if len(frequencies) < min_pts:
        raise ValueError(f"DBSCAN needs at least min_pts={min_pts} users, got {len(frequencies)}")
    users = sorted(frequencies)
    x = np.array([frequencies[u] for u in users], dtype=float).reshape(-1, 1)
    labels = DBSCAN(eps=eps, min_samples=min_pts).fit(x).labels_
    return {u for u, lab in zip(users, labels) if lab == -1}


def observed_span_days(tl: Timeline) -> float:
    if len(tl.tweets) < 2:
        return 0.0
    return (tl.last_ts - tl.first_ts) / DAY


def assess_users(users: Sequence[Tuple[Timeline, Optional[int]]], cap: int = TWEET_CAP,
                 eps: float = DBSCAN_EPS, min_pts: int = DBSCAN_MIN_PTS) -> List[UserAssessment]:
    """Run every per-user classifier plus the population-level outlier detection."""
    rows = []
    for tl, lifetime in users:
        known = lifetime is not None
        if not known:
            log.info("user %s: lifetime tweet count unknown, assuming fully observed", tl.user_id)
        obs, coverage = assess_observability(tl, lifetime if known else len(tl.tweets), cap)
        span = observed_span_days(tl)
        try:
            abandonment = classify_abandonment(tl)
        except ClassificationError as exc:
            log.info("%s", exc)
            abandonment = None
        try:
            regularity = classify_regularity(tl)
        except ClassificationError as exc:
            log.info("%s", exc)
            regularity = None
        rows.append(dict(
            user_id=tl.user_id, observability=obs, coverage=coverage,
            active_life_years=(tl.download_time - tl.account_created) / YEAR,
            observed_tweet_count=len(tl.tweets),
            daily_frequency=len(tl.tweets) / span if span > 0 else 0.0,
            abandonment=abandonment, regularity=regularity,
            observed_span_days=span, lifetime_known=known,
        ))
    freqs = {r["user_id"]: r["daily_frequency"] for r in rows}
    if len(freqs) >= min_pts:
        outliers = detect_frequency_outliers(freqs, eps, min_pts)
    else:
        log.warning("only %d users, fewer than min_pts=%d: no outlier detection", len(freqs), min_pts)
        outliers = set()
    return [UserAssessment(is_outlier=r["user_id"] in outliers, **r) for r in rows]


def select_study_population(assessments: Iterable[UserAssessment],
                            purpose: Purpose = Purpose.STATIC) -> Set[str]:
    min_span = STATIC_MIN_SPAN_DAYS if purpose is Purpose.STATIC else DYNAMIC_MIN_SPAN_DAYS
    return {a.user_id for a in assessments
            if a.abandonment is Abandonment.ACTIVE
            and a.regularity is Regularity.REGULAR
            and not a.is_outlier
            and a.observed_span_days >= min_span}
