"""Command line entry point: ``egonet <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .corpus import UserArchive, load_corpus
from .dynamic import (ALIGNMENTS, STEP_DAYS, WIDTH_DAYS, RingStability, make_windows,
                      ring_stability, snapshot_rings)
from .filtering import (DBSCAN_EPS, DBSCAN_MIN_PTS, GRACE_DAYS, STATIONARITY_WEEKS, TWEET_CAP,
                        Abandonment, Observability, Purpose, Regularity, UserAssessment,
                        assess_users, select_study_population, stationarity_profile)
from .hashtags import AlterRecord, activation_stats, alter_records
from .model import (ArchiveError, TweetKind, extract_interactions, format_instant, kind_counts,
                    social_breakdown)
from .report import (RunManifest, read_assessments, read_csv, summary_table, write_assessments,
                     write_csv, write_summary)
from .static import (ACTIVE_THRESHOLD, DEFAULT_BANDWIDTH_QUANTILE, DEFAULT_MERGE_RADIUS,
                     MIN_TIE_DAYS, EgoNetwork, LayerStructure, active_network, build_ego_network,
                     detect_circles)
from .synth import SynthConfig, generate_population

log = logging.getLogger("egonet")

NUM_RINGS = 5


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def configure_logging() -> None:
    level = os.environ.get("EGONET_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def pool_map(fn: Callable, items: Sequence, threads: int) -> List:
    """Order-preserving map, in worker processes when ``threads > 1``."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * threads))))


def static_window(tl) -> Tuple[int, int]:
    return tl.first_ts, tl.last_ts + 1


# ---- stages -----------------------------------------------------------------

def load_input(path: Path, stage: str) -> List[UserArchive]:
    try:
        users = load_corpus(path)
    except (ArchiveError, FileNotFoundError, ValueError) as exc:
        raise StageError(stage, str(exc)) from exc
    if not users:
        raise StageError(stage, f"no timelines (*.jsonl) found in {path}")
    return users


def run_classify(users: Sequence[UserArchive], out: Path, cap: int = TWEET_CAP,
                 eps: float = DBSCAN_EPS, min_pts: int = DBSCAN_MIN_PTS) -> List[UserAssessment]:
    """Write ``assessments.csv`` plus ``outliers.csv`` and ``stationarity.csv`` next to it."""
    try:
        assessments = assess_users([(u.timeline, u.lifetime_tweets) for u in users], cap, eps, min_pts)
    except ValueError as exc:
        raise StageError("classify", str(exc)) from exc
    write_assessments(out, assessments)
    write_csv(out.parent / "outliers.csv", ("user_id", "tweets_per_day"),
              [(a.user_id, a.daily_frequency) for a in sorted(assessments, key=lambda a: a.user_id)
               if a.is_outlier])
    eligible = {a.user_id for a in assessments
                if a.observability is Observability.FULL and a.abandonment is Abandonment.ACTIVE
                and a.regularity is Regularity.REGULAR}
    rows = []
    timelines = [u.timeline for u in users if u.user_id in eligible and len(u.timeline)]
    if timelines:
        profile, counts = stationarity_profile(timelines, STATIONARITY_WEEKS)
        rows = [(w, profile[w], counts[w]) for w in range(len(profile)) if counts[w] > 0]
    write_csv(out.parent / "stationarity.csv", ("week", "mean_normalized", "users"), rows)
    return assessments


def population_ids(users: Sequence[UserArchive], population: Optional[Path],
                   purpose: Purpose) -> List[str]:
    if population is None:
        return sorted(u.user_id for u in users)
    return sorted(select_study_population(read_assessments(population), purpose))


@dataclass(frozen=True)
class StaticResult:
    ego_id: str
    total_size: int
    network: EgoNetwork  # active ties only
    layers: LayerStructure


def ego_static(user: UserArchive, bandwidth_quantile: float, merge_radius: float) -> StaticResult:
    tl = user.timeline
    net = build_ego_network(tl.user_id, extract_interactions(tl), static_window(tl))
    active = active_network(net)
    return StaticResult(tl.user_id, len(net), active,
                        detect_circles(active, bandwidth_quantile, merge_radius=merge_radius))


def run_static(users: Sequence[UserArchive], out_dir: Path, bandwidth_quantile: float,
               merge_radius: float, threads: int = 1) -> List[StaticResult]:
    results = pool_map(partial(ego_static, bandwidth_quantile=bandwidth_quantile,
                               merge_radius=merge_radius), list(users), threads)
    width = max([r.layers.num_circles for r in results] + [1])
    write_csv(out_dir / "layers.csv",
              ["ego_id", "num_circles"] + [f"circle_{k}" for k in range(1, width + 1)],
              [[r.ego_id, r.layers.num_circles] + list(r.layers.circle_sizes)
               + [None] * (width - r.layers.num_circles) for r in results])
    write_csv(out_dir / "ratios.csv", ("ego_id", "inner_circle", "ratio"),
              [(r.ego_id, k, x) for r in results for k, x in enumerate(r.layers.scaling_ratios, 1)])
    write_csv(out_dir / "total_size.csv", ("ego_id", "total_size"),
              [(r.ego_id, r.total_size) for r in results])
    write_csv(out_dir / "active_size.csv", ("ego_id", "active_size"),
              [(r.ego_id, len(r.network)) for r in results])
    rows = []
    for r in results:
        for alter in sorted(r.layers.ring_of):
            t = r.network.ties[alter]
            rows.append((r.ego_id, alter, r.layers.ring_of[alter], t.frequency_per_year,
                         t.interaction_count, t.hashtag_total, t.activated_by_hashtag))
    write_csv(out_dir / "rings.csv", ("ego_id", "alter_id", "ring", "frequency_per_year",
                                      "interactions", "hashtag_total", "activated"), rows)
    return results


def ego_dynamic(user: UserArchive, width_days: float, step_days: float, bandwidth_quantile: float,
                merge_radius: float, align: str, magnitude: bool) -> Optional[List[RingStability]]:
    tl = user.timeline
    windows = make_windows(tl.first_ts, tl.last_ts, width_days, step_days)
    if len(windows) < 2:
        return None
    series = snapshot_rings(tl.user_id, extract_interactions(tl), windows, NUM_RINGS,
                            bandwidth_quantile, merge_radius, align)
    return ring_stability(series, magnitude)


def run_dynamic(users: Sequence[UserArchive], out: Path, width_days: float, step_days: float,
                bandwidth_quantile: float, merge_radius: float, align: str = "inner",
                magnitude: bool = False, threads: int = 1) -> List[str]:
    """Write ``stability.csv``; returns notes about egos that could not be analysed."""
    fn = partial(ego_dynamic, width_days=width_days, step_days=step_days,
                 bandwidth_quantile=bandwidth_quantile, merge_radius=merge_radius,
                 align=align, magnitude=magnitude)
    results = pool_map(fn, list(users), threads)
    rows, notes = [], []
    for user, res in zip(users, results):
        if res is None:
            notes.append(f"dynamic: ego {user.user_id} spans fewer than two windows, skipped")
            continue
        rows += [(user.user_id, s.ring, s.mean_jaccard, s.mean_jump, s.jaccard_pairs) for s in res]
    write_csv(out, ("ego_id", "ring", "mean_jaccard", "mean_jump", "pairs_used"), rows)
    return notes


def hashtag_records(user: UserArchive, ring_of: Dict[str, int]) -> List[AlterRecord]:
    tl = user.timeline
    net = build_ego_network(tl.user_id, extract_interactions(tl), static_window(tl))
    return alter_records(net, ring_of, NUM_RINGS)


def run_hashtags(egos: Dict[str, List[AlterRecord]], out: Path) -> None:
    per_ego, rings = activation_stats(egos, NUM_RINGS)
    write_csv(out, ("ring", "mean_activation_pct", "ci95", "n_egos",
                    "freq_mean_activated", "freq_sd_activated", "freq_mean_not", "freq_sd_not",
                    "n_activated", "n_not", "intensity_activated", "intensity_not",
                    "hashtags_total_activated", "hashtags_total_not"),
              [(r.ring, r.mean_activation_pct, r.ci95, r.n_egos,
                r.freq_activated.mean, r.freq_activated.sd, r.freq_not.mean, r.freq_not.sd,
                r.freq_activated.n, r.freq_not.n, r.intensity_activated.mean,
                r.intensity_not.mean, r.total_activated.mean, r.total_not.mean) for r in rings])
    write_csv(out.with_name(out.stem + "_egos.csv"),
              ["ego_id", "active_alters", "activated", "activation_pct"]
              + [f"ring_{k}_pct" for k in range(1, NUM_RINGS + 1)],
              [[e.ego_id, e.n_active, e.n_activated,
                e.activation_pct if e.n_active else None]
               + [e.ring_pct(k) for k in range(1, NUM_RINGS + 1)] for e in per_ego])


def run_report(users: Sequence[UserArchive], out: Path) -> None:
    try:
        table = summary_table(users)
    except ValueError as exc:
        raise StageError("report", str(exc)) from exc
    write_summary(out, table, len(users))
    rows = []
    for u in users:
        counts = kind_counts(u.timeline)
        b = social_breakdown(u.timeline)
        rows.append([u.user_id, len(u.timeline)] + [counts.get(k, 0) for k in TweetKind]
                    + [b.dominant_kind.value])
    write_csv(out.with_name("kinds.csv"),
              ["user_id", "tweets"] + [k.value.lower() for k in TweetKind] + ["dominant_kind"], rows)


# ---- command handlers -------------------------------------------------------

def _out(args, default: str) -> Path:
    return Path(args.out) if args.out else Path(default)


def cmd_ingest_check(args) -> int:
    users = load_input(Path(args.input), "ingest")
    rows = []
    for u in users:
        tl = u.timeline
        counts = kind_counts(tl)
        inter = extract_interactions(tl)
        rows.append([tl.user_id, len(tl)] + [counts.get(k, 0) for k in TweetKind]
                    + [len(inter), len({i.alter_id for i in inter}),
                       format_instant(tl.first_ts) if len(tl) else None,
                       format_instant(tl.last_ts) if len(tl) else None])
    header = (["user_id", "tweets"] + [k.value.lower() for k in TweetKind]
              + ["interactions", "alters", "first_tweet", "last_tweet"])
    if args.out:
        write_csv(Path(args.out), header, rows)
    print(f"{len(users)} timelines, {sum(r[1] for r in rows)} tweets: OK")
    return 0


def cmd_classify(args) -> int:
    users = load_input(Path(args.input), "classify")
    out = _out(args, "assessments.csv")
    assessments = run_classify(users, out, args.cap, args.eps, args.min_pts)
    print(f"{len(assessments)} users assessed, "
          f"{len(select_study_population(assessments, Purpose.STATIC))} in the static population")
    return 0


def cmd_static(args) -> int:
    users = load_input(Path(args.input), "static")
    ids = set(population_ids(users, args.population and Path(args.population), Purpose.STATIC))
    out_dir = Path(args.out_dir or args.out or "static")
    run_static([u for u in users if u.user_id in ids], out_dir, args.bandwidth_quantile,
               args.merge_radius, args.threads)
    return 0


def cmd_dynamic(args) -> int:
    users = load_input(Path(args.input), "dynamic")
    ids = set(population_ids(users, args.population and Path(args.population), Purpose.DYNAMIC))
    for note in run_dynamic([u for u in users if u.user_id in ids], _out(args, "stability.csv"),
                            args.width_days, args.step_days, args.bandwidth_quantile,
                            args.merge_radius, args.align, args.magnitude, args.threads):
        log.info("%s", note)
    return 0


def cmd_hashtags(args) -> int:
    users = {u.user_id: u for u in load_input(Path(args.input), "hashtags")}
    rings: Dict[str, Dict[str, int]] = {}
    for r in read_csv(Path(args.static_dir) / "rings.csv"):
        rings.setdefault(r["ego_id"], {})[r["alter_id"]] = int(r["ring"])
    missing = sorted(set(rings) - set(users))
    if missing:
        raise StageError("hashtags", f"egos in rings.csv missing from the input: {missing[:5]}")
    run_hashtags({e: hashtag_records(users[e], rings[e]) for e in sorted(rings)},
                 _out(args, "hashtags.csv"))
    return 0


def cmd_synth(args) -> int:
    cfg = SynthConfig(duration_years=args.duration_years, seed=args.seed,
                      noise_alters=args.noise_alters, activation_prob=args.activation_prob,
                      reshuffle_rates_yearly=args.shuffle)
    try:
        generate_population(cfg, args.egos, _out(args, "synth"))
    except ValueError as exc:
        raise StageError("synth", str(exc)) from exc
    return 0


def cmd_report(args) -> int:
    users = load_input(Path(args.input), "report")
    ids = set(population_ids(users, args.population and Path(args.population), Purpose.STATIC))
    run_report([u for u in users if u.user_id in ids], _out(args, "summary.csv"))
    return 0


def pipeline_parameters(args) -> Dict[str, object]:
    return {
        "cap": args.cap, "eps": args.eps, "min_pts": args.min_pts,
        "grace_days": GRACE_DAYS, "regular_min_daily": "1/3", "regular_min_month_fraction": 0.5,
        "stationarity_weeks": STATIONARITY_WEEKS,
        "active_threshold_per_year": ACTIVE_THRESHOLD, "min_tie_days": MIN_TIE_DAYS,
        "bandwidth_quantile": args.bandwidth_quantile, "merge_radius": args.merge_radius,
        "width_days": args.width_days, "step_days": args.step_days, "num_rings": NUM_RINGS,
        "align": args.align, "jump_magnitude": args.magnitude, "seed": args.seed,
    }


def cmd_run_all(args) -> int:
    out = _out(args, "egonet-out")
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(input=str(args.input), parameters=pipeline_parameters(args),
                           version=__version__)
    stage = "classify"
    try:
        users = load_input(Path(args.input), stage)
        assessments = run_classify(users, out / "assessments.csv", args.cap, args.eps, args.min_pts)
        static_ids = select_study_population(assessments, Purpose.STATIC)
        dynamic_ids = select_study_population(assessments, Purpose.DYNAMIC)
        manifest.population = {
            "users": len(assessments),
            "partial": sum(a.observability is Observability.PARTIAL for a in assessments),
            "active": sum(a.abandonment is Abandonment.ACTIVE for a in assessments),
            "regular": sum(a.regularity is Regularity.REGULAR for a in assessments),
            "active_regular": sum(a.abandonment is Abandonment.ACTIVE
                                  and a.regularity is Regularity.REGULAR for a in assessments),
            "outliers": sum(a.is_outlier for a in assessments),
            "static": len(static_ids),
            "dynamic": len(dynamic_ids),
        }
        manifest.stages[stage] = "OK"

        stage = "static"
        static_users = [u for u in users if u.user_id in static_ids]
        if not static_users:
            manifest.notes.append("static: empty study population")
        results = run_static(static_users, out / "static", args.bandwidth_quantile,
                             args.merge_radius, args.threads)
        manifest.stages[stage] = "OK"

        stage = "dynamic"
        dyn_users = [u for u in users if u.user_id in dynamic_ids]
        if not dyn_users:
            manifest.notes.append("dynamic: no user spans the required 730 days, "
                                  "stability table is empty")
        manifest.notes += run_dynamic(dyn_users, out / "stability.csv", args.width_days,
                                      args.step_days, args.bandwidth_quantile, args.merge_radius,
                                      args.align, args.magnitude, args.threads)
        manifest.stages[stage] = "OK"

        stage = "hashtags"
        by_id = {u.user_id: u for u in static_users}
        run_hashtags({r.ego_id: hashtag_records(by_id[r.ego_id], r.layers.ring_of) for r in results},
                     out / "hashtags.csv")
        manifest.stages[stage] = "OK"

        stage = "report"
        if static_users:
            run_report(static_users, out / "summary.csv")
        else:
            manifest.notes.append("report: empty study population, no summary table")
        manifest.stages[stage] = "OK"
    except Exception as exc:
        manifest.status = "FAILED"
        manifest.stages[stage] = "FAILED"
        manifest.error = str(exc) if isinstance(exc, StageError) else f"[{stage}] {exc}"
        manifest.write(out / "manifest.json")
        if isinstance(exc, StageError):
            raise
        raise StageError(stage, str(exc)) from exc
    manifest.write(out / "manifest.json")
    return 0


# ---- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    sup = argparse.SUPPRESS
    g.add_argument("--input", default=sup, help="corpus directory of <user>.jsonl archives")
    g.add_argument("--out", default=sup, help="output file or directory")
    g.add_argument("--seed", type=int, default=sup, help="random seed (default 0)")
    g.add_argument("--threads", type=int, default=sup,
                   help="worker processes for per-ego work (default 1)")

    parser = argparse.ArgumentParser(prog="egonet", description=__doc__, parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(handler=handler)
        return p

    def classify_opts(p):
        p.add_argument("--cap", type=int, default=TWEET_CAP)
        p.add_argument("--eps", type=float, default=DBSCAN_EPS)
        p.add_argument("--min-pts", type=int, default=DBSCAN_MIN_PTS)

    def circle_opts(p):
        p.add_argument("--bandwidth-quantile", type=float, default=DEFAULT_BANDWIDTH_QUANTILE)
        p.add_argument("--merge-radius", type=float, default=DEFAULT_MERGE_RADIUS,
                       help="fuse modes closer than this many bandwidths (0.5 disables)")

    def dynamic_opts(p):
        p.add_argument("--width-days", type=float, default=WIDTH_DAYS)
        p.add_argument("--step-days", type=float, default=STEP_DAYS)
        p.add_argument("--align", choices=ALIGNMENTS, default="inner",
                       help="ring numbering for windows with fewer than 5 circles")
        p.add_argument("--magnitude", action="store_true", default=False,
                       help="weight jumps by ring distance")

    add("ingest-check", cmd_ingest_check, "parse and validate every archive")
    classify_opts(add("classify-users", cmd_classify, "observability, abandonment, regularity, outliers"))

    p = add("static", cmd_static, "static ego networks and circles")
    p.add_argument("--population", default=None, help="assessments.csv restricting the egos")
    p.add_argument("--out-dir", default=None)
    circle_opts(p)

    p = add("dynamic", cmd_dynamic, "sliding-window ring stability")
    p.add_argument("--population", default=None)
    circle_opts(p)
    dynamic_opts(p)

    p = add("hashtags", cmd_hashtags, "activation by hashtag per ring")
    p.add_argument("--static-dir", default="static")

    p = add("synth", cmd_synth, "generate a synthetic corpus with planted rings")
    p.add_argument("--egos", type=int, default=100)
    p.add_argument("--duration-years", type=float, default=SynthConfig.duration_years)
    p.add_argument("--noise-alters", type=int, default=SynthConfig.noise_alters)
    p.add_argument("--activation-prob", type=float, default=SynthConfig.activation_prob)
    p.add_argument("--shuffle", action="store_true", default=False,
                   help="redraw every alter's rate once a year")

    p = add("report", cmd_report, "summary statistics table")
    p.add_argument("--population", default=None)

    p = add("run-all", cmd_run_all, "classify, static, dynamic, hashtags and report in one go")
    classify_opts(p)
    circle_opts(p)
    dynamic_opts(p)
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    for name, default in (("input", None), ("out", None), ("seed", 0), ("threads", 1)):
        if getattr(args, name, None) is None:
            setattr(args, name, default)
    if args.threads < 1:
        raise SystemExit("egonet: --threads must be at least 1")
    if args.command not in ("synth",) and not args.input:
        raise SystemExit(f"egonet {args.command}: --input is required")
    return args


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    args = parse_args(argv)
    try:
        return args.handler(args)
    except StageError as exc:
        print(f"egonet: error {exc}", file=sys.stderr)
        return 2
    except (ArchiveError, OSError, ValueError) as exc:
        print(f"egonet: error [{args.command}] {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
