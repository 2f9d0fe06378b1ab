import json

import pytest

from egonet.model import DAY, Timeline, TweetRecord, parse_instant

T0 = parse_instant("2014-01-01T00:00:00Z")


def tweet(tid, ts, author="ego", reply=None, retweet=None, mentions=(), hashtags=(), text=""):
    return TweetRecord(str(tid), author, int(ts), text, reply, retweet, frozenset(mentions),
                       tuple(hashtags))


def timeline(stamps, user="ego", created=None, downloaded=None, **kw):
    """Timeline of plain tweets at the given epoch seconds."""
    stamps = sorted(int(s) for s in stamps)
    tweets = tuple(tweet(f"t{i:06d}", s, user, **kw) for i, s in enumerate(stamps))
    lo = created if created is not None else (stamps[0] if stamps else T0)
    hi = downloaded if downloaded is not None else (stamps[-1] if stamps else T0)
    return Timeline(user, lo, hi, tweets)


def record_line(tid, created_at, user="ego", **fields):
    obj = {"id": tid, "user_id": user, "created_at": created_at, "text": "",
           "reply_to": None, "retweet_of": None, "quote_of": None, "mentions": [], "hashtags": []}
    obj.update(fields)
    return json.dumps(obj) + "\n"


@pytest.fixture
def day():
    return DAY


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS, key=str):
            terminalreporter.write_line(RESULTS[key])
