"""CSV/JSON emission: summary statistics table, assessment tables and the run manifest.

All CSV files use a header row, ``,`` separators, ``.`` decimals, UTF-8 and LF line
endings. Floats are written with 12 significant digits so that reruns are byte-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .corpus import UserArchive
from .filtering import (Abandonment, Observability, Regularity, UserAssessment,
                        observed_span_days)
from .model import YEAR, social_breakdown

SUMMARY_COLUMNS = ("active_life_years", "total_tweets", "observed_tweets", "tweets_per_day",
                   "pct_social", "pct_replies", "pct_retweets", "pct_mentions")
ASSESSMENT_COLUMNS = ("user_id", "observability", "coverage", "active_life_years",
                      "tweets_per_day", "abandonment", "regularity", "outlier", "span_days",
                      "observed_tweets", "lifetime_known")
UNDETERMINED = "Undetermined"


def fmt(value: Any) -> str:
    """Canonical CSV cell: 12 significant digits for floats, empty for None."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if v != v:
            return "nan"
        return f"{v:.12g}"
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]],
              comment: Optional[str] = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def write_assessments(path: Path, assessments: Sequence[UserAssessment]) -> None:
    rows = []
    for a in sorted(assessments, key=lambda a: a.user_id):
        rows.append([
            a.user_id, a.observability.value, a.coverage, a.active_life_years,
            a.daily_frequency,
            a.abandonment.value if a.abandonment else UNDETERMINED,
            a.regularity.value if a.regularity else UNDETERMINED,
            a.is_outlier, a.observed_span_days, a.observed_tweet_count, a.lifetime_known,
        ])
    write_csv(path, ASSESSMENT_COLUMNS, rows)


def read_assessments(path: Path) -> List[UserAssessment]:
    out = []
    for r in read_csv(path):
        out.append(UserAssessment(
            user_id=r["user_id"],
            observability=Observability(r["observability"]),
            coverage=float(r["coverage"]),
            active_life_years=float(r["active_life_years"]),
            observed_tweet_count=int(r.get("observed_tweets") or 0),
            daily_frequency=float(r["tweets_per_day"]),
            abandonment=None if r["abandonment"] == UNDETERMINED else Abandonment(r["abandonment"]),
            regularity=None if r["regularity"] == UNDETERMINED else Regularity(r["regularity"]),
            is_outlier=r["outlier"] == "1",
            observed_span_days=float(r["span_days"]),
            lifetime_known=r.get("lifetime_known", "1") == "1",
        ))
    return out


def user_summary_row(user: UserArchive) -> Dict[str, float]:
    tl = user.timeline
    b = social_breakdown(tl)
    span = observed_span_days(tl)
    return {
        "active_life_years": (tl.download_time - tl.account_created) / YEAR,
        "total_tweets": float(user.lifetime_tweets if user.lifetime_tweets is not None else len(tl)),
        "observed_tweets": float(len(tl)),
        "tweets_per_day": len(tl) / span if span > 0 else 0.0,
        "pct_social": b.pct_social,
        "pct_replies": b.pct_replies,
        "pct_retweets": b.pct_retweets,
        "pct_mentions": b.pct_mentions,
    }


def summary_table(users: Sequence[UserArchive]) -> Dict[str, tuple]:
    """Column-wise (mean, population sd) over the population."""
    if not users:
        raise ValueError("summary table needs a non-empty population")
    rows = [user_summary_row(u) for u in users]
    out = {}
    for col in SUMMARY_COLUMNS:
        x = np.array([r[col] for r in rows], dtype=float)
        out[col] = (float(x.mean()), float(x.std(ddof=0)))
    return out


def write_summary(path: Path, table: Dict[str, tuple], n_users: int) -> None:
    write_csv(path, ("statistic", "mean", "sd"),
              [(k, m, s) for k, (m, s) in table.items()],
              comment=f"n={n_users}; sd is the population standard deviation (divide by n)")


@dataclass
class RunManifest:
    input: str
    parameters: Dict[str, Any]
    version: str
    population: Dict[str, int] = field(default_factory=dict)
    stages: Dict[str, str] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    status: str = "OK"
    error: Optional[str] = None

    def write(self, path: Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")
