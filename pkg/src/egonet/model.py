"""Tweet and timeline data model, archive parsing and interaction extraction.

Timestamps are integer seconds since the Unix epoch (UTC). The archive format is
one JSON object per line with keys ``id``, ``user_id``, ``created_at``, ``text``,
``reply_to``, ``retweet_of``, ``quote_of``, ``mentions`` and ``hashtags``.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

# 2006-01-01T00:00:00Z
TWITTER_EPOCH = 1136073600

DAY = 86400
YEAR_DAYS = 365.25
YEAR = YEAR_DAYS * DAY


class ArchiveError(ValueError):
    """Malformed archive input. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TimelineValidationError(ValueError):
    pass


class TweetKind(enum.Enum):
    RETWEET = "Retweet"
    REPLY = "Reply"
    MENTION = "Mention"
    INDIRECT = "Indirect"

    @property
    def social(self) -> bool:
        return self is not TweetKind.INDIRECT


SOCIAL_KINDS = (TweetKind.RETWEET, TweetKind.REPLY, TweetKind.MENTION)


def parse_instant(value: str) -> int:
    """ISO-8601 UTC string -> epoch seconds."""
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def format_instant(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    author_id: str
    timestamp: int
    text: str = ""
    replied_to_user: Optional[str] = None
    retweeted_user: Optional[str] = None
    mentioned_users: frozenset = frozenset()
    hashtags: Tuple[str, ...] = ()

    def __post_init__(self):
        if not isinstance(self.timestamp, int) or self.timestamp < TWITTER_EPOCH:
            raise TimelineValidationError(
                f"tweet {self.tweet_id}: timestamp {self.timestamp!r} predates 2006-01-01")
        # self-references are stripped, never rejected
        if self.replied_to_user == self.author_id:
            object.__setattr__(self, "replied_to_user", None)
        if self.retweeted_user == self.author_id:
            object.__setattr__(self, "retweeted_user", None)
        mentions = frozenset(self.mentioned_users)
        object.__setattr__(self, "mentioned_users", mentions - {self.author_id})
        object.__setattr__(self, "hashtags", tuple(h.lower() for h in self.hashtags))

    @property
    def hashtag_count(self) -> int:
        return len(self.hashtags)

    def referenced_alters(self) -> List[str]:
        """Distinct alters referenced by this tweet, in channel order then sorted mentions."""
        out = []
        for alter in (self.retweeted_user, self.replied_to_user, *sorted(self.mentioned_users)):
            if alter is not None and alter not in out:
                out.append(alter)
        return out

    def to_json(self) -> str:
        return json.dumps({
            "id": self.tweet_id,
            "user_id": self.author_id,
            "created_at": format_instant(self.timestamp),
            "text": self.text,
            "reply_to": self.replied_to_user,
            "retweet_of": self.retweeted_user,
            "quote_of": None,
            "mentions": sorted(self.mentioned_users),
            "hashtags": list(self.hashtags),
        }, ensure_ascii=False)


@dataclass(frozen=True)
class Timeline:
    user_id: str
    account_created: int
    download_time: int
    tweets: Tuple[TweetRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "tweets", tuple(self.tweets))
        prev = None
        for t in self.tweets:
            if t.author_id != self.user_id:
                raise TimelineValidationError(
                    f"tweet {t.tweet_id} authored by {t.author_id}, expected {self.user_id}")
            if not self.account_created <= t.timestamp <= self.download_time:
                raise TimelineValidationError(
                    f"tweet {t.tweet_id} at {format_instant(t.timestamp)} outside "
                    f"[{format_instant(self.account_created)}, {format_instant(self.download_time)}]")
            key = (t.timestamp, t.tweet_id)
            if prev is not None and key <= prev:
                raise TimelineValidationError(f"tweets not strictly ascending at {t.tweet_id}")
            prev = key

    def __len__(self):
        return len(self.tweets)

    @property
    def first_ts(self) -> int:
        return self.tweets[0].timestamp

    @property
    def last_ts(self) -> int:
        return self.tweets[-1].timestamp

    def serialize(self) -> str:
        return "".join(t.to_json() + "\n" for t in self.tweets)


@dataclass(frozen=True)
class Interaction:
    alter_id: str
    timestamp: int
    hashtag_count: int
    source_kind: TweetKind
    tweet_id: str = ""


def _record_from_obj(obj: dict) -> TweetRecord:
    for key in ("id", "user_id", "created_at"):
        if key not in obj:
            raise KeyError(key)
    retweet_of = obj.get("retweet_of") or obj.get("quote_of")
    return TweetRecord(
        tweet_id=str(obj["id"]),
        author_id=str(obj["user_id"]),
        timestamp=parse_instant(obj["created_at"]),
        text=obj.get("text") or "",
        replied_to_user=obj.get("reply_to") or None,
        retweeted_user=retweet_of or None,
        mentioned_users=frozenset(str(m) for m in obj.get("mentions") or ()),
        hashtags=tuple(str(h) for h in obj.get("hashtags") or ()),
    )


def iter_records(lines: Iterable[str]) -> Iterator[TweetRecord]:
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            if not isinstance(obj, dict):
                raise ValueError("record is not an object")
            yield _record_from_obj(obj)
        except TimelineValidationError as exc:
            raise ArchiveError(str(exc), lineno) from exc
        except (ValueError, KeyError, TypeError) as exc:
            raise ArchiveError(f"malformed record ({exc!r})", lineno) from exc


def parse_timeline(stream: Iterable[str], user_id: str, account_created: int,
                   download_time: int) -> Timeline:
    """Parse a line-delimited archive into a validated, time-sorted :class:`Timeline`.

    :raises ArchiveError: on a malformed line (carries the line number)
    :raises TimelineValidationError: on duplicate ids, foreign authors or out-of-range timestamps
    """
    records = list(iter_records(stream))
    seen = set()
    for r in records:
        if r.tweet_id in seen:
            raise TimelineValidationError(f"duplicate tweet id {r.tweet_id}")
        seen.add(r.tweet_id)
    records.sort(key=lambda r: (r.timestamp, r.tweet_id))
    return Timeline(user_id, account_created, download_time, tuple(records))


def classify_tweet(t: TweetRecord) -> TweetKind:
    # precedence Retweet > Reply > Mention > Indirect
    if t.retweeted_user is not None:
        return TweetKind.RETWEET
    if t.replied_to_user is not None:
        return TweetKind.REPLY
    if t.mentioned_users:
        return TweetKind.MENTION
    return TweetKind.INDIRECT


def kind_counts(tl: Timeline) -> Counter:
    return Counter(classify_tweet(t) for t in tl.tweets)


@dataclass(frozen=True)
class SocialBreakdown:
    pct_social: float
    pct_replies: float
    pct_retweets: float
    pct_mentions: float
    dominant_kind: TweetKind


def social_breakdown(tl: Timeline) -> SocialBreakdown:
    """Percentages of social tweet kinds over all tweets, plus the dominant mode."""
    n = len(tl.tweets)
    if n == 0:
        raise ValueError(f"timeline of {tl.user_id} is empty; percentages undefined")
    counts = kind_counts(tl)
    social = sum(counts[k] for k in SOCIAL_KINDS)
    # ties among social kinds resolve in precedence order
    dominant = max(SOCIAL_KINDS, key=lambda k: (counts[k], -SOCIAL_KINDS.index(k)))
    if counts[TweetKind.INDIRECT] > counts[dominant]:
        dominant = TweetKind.INDIRECT
    return SocialBreakdown(
        pct_social=100.0 * social / n,
        pct_replies=100.0 * counts[TweetKind.REPLY] / n,
        pct_retweets=100.0 * counts[TweetKind.RETWEET] / n,
        pct_mentions=100.0 * counts[TweetKind.MENTION] / n,
        dominant_kind=dominant,
    )


def extract_interactions(tl: Timeline) -> List[Interaction]:
    """One interaction per (tweet, distinct referenced alter), time-ascending."""
    out = []
    for t in tl.tweets:
        kind = classify_tweet(t)
        if kind is TweetKind.INDIRECT:
            continue
        for alter in t.referenced_alters():
            if alter == tl.user_id:
                continue
            out.append(Interaction(alter, t.timestamp, t.hashtag_count, kind, t.tweet_id))
    return out


def interactions_by_alter(interactions: Sequence[Interaction]) -> dict:
    by_alter: dict = {}
    for it in interactions:
        by_alter.setdefault(it.alter_id, []).append(it)
    return by_alter
