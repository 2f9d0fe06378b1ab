"""Archive directory layout.

A corpus directory holds one ``<user_id>.jsonl`` timeline per user and an optional
``profiles.csv`` with columns ``user_id, account_created, download_time,
lifetime_tweets``. Users missing from ``profiles.csv`` get their account creation
and download instants from the first and last observed tweet, and their lifetime
tweet count is unknown.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

from .model import ArchiveError, Timeline, format_instant, iter_records, parse_instant, parse_timeline

PROFILES_FILE = "profiles.csv"
PROFILE_COLUMNS = ["user_id", "account_created", "download_time", "lifetime_tweets"]


@dataclass(frozen=True)
class Profile:
    user_id: str
    account_created: Optional[int] = None
    download_time: Optional[int] = None
    lifetime_tweets: Optional[int] = None


@dataclass(frozen=True)
class UserArchive:
    timeline: Timeline
    lifetime_tweets: Optional[int]

    @property
    def user_id(self) -> str:
        return self.timeline.user_id


def read_profiles(directory: Path) -> Dict[str, Profile]:
    path = Path(directory) / PROFILES_FILE
    if not path.exists():
        return {}
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            def opt(key, conv):
                value = (row.get(key) or "").strip()
                return conv(value) if value else None
            out[row["user_id"]] = Profile(
                row["user_id"],
                opt("account_created", parse_instant),
                opt("download_time", parse_instant),
                opt("lifetime_tweets", int),
            )
    return out


def write_profiles(directory: Path, profiles: List[Profile]) -> None:
    with open(Path(directory) / PROFILES_FILE, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROFILE_COLUMNS)
        for p in profiles:
            w.writerow([
                p.user_id,
                "" if p.account_created is None else format_instant(p.account_created),
                "" if p.download_time is None else format_instant(p.download_time),
                "" if p.lifetime_tweets is None else p.lifetime_tweets,
            ])


def archive_paths(directory: Path) -> List[Path]:
    return sorted(Path(directory).glob("*.jsonl"))


def load_user(path: Path, profile: Optional[Profile] = None) -> UserArchive:
    path = Path(path)
    user_id = profile.user_id if profile else path.stem
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    created = profile.account_created if profile else None
    downloaded = profile.download_time if profile else None
    if created is None or downloaded is None:
        # bounds unknown: take them from the data itself
        stamps = [r.timestamp for r in iter_records(lines)]
        if created is None:
            created = min(stamps) if stamps else 0
        if downloaded is None:
            downloaded = max(stamps) if stamps else 0
    try:
        tl = parse_timeline(lines, user_id, created, downloaded)
    except ArchiveError as exc:
        raise ArchiveError(f"{path.name}: {exc}") from exc
    return UserArchive(tl, profile.lifetime_tweets if profile else None)


def load_corpus(directory: Path) -> List[UserArchive]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"corpus directory {directory} does not exist")
    profiles = read_profiles(directory)
    return [load_user(p, profiles.get(p.stem)) for p in archive_paths(directory)]


def write_timeline(directory: Path, tl: Timeline) -> Path:
    path = Path(directory) / f"{tl.user_id}.jsonl"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(tl.serialize())
    return path


def dump_json(obj, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
