import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import T0, timeline
from egonet import cli
from egonet.corpus import UserArchive
from egonet.filtering import Abandonment, Observability, Regularity, UserAssessment
from egonet.model import DAY
from egonet.report import (fmt, read_assessments, read_csv, summary_table, write_assessments,
                           write_csv)
from egonet.synth import SynthConfig, generate_population


def user(uid, n_tweets, step_s):
    return UserArchive(timeline([T0 + k * step_s for k in range(n_tweets)], user=uid), None)


def test_single_user_sd_is_zero():
    table = summary_table([user("a", 10, DAY)])
    assert all(sd == 0 for _, sd in table.values())


def test_two_users_population_sd():
    # 20 tweets over 10 days and 40 tweets over 10 days: 2 and 4 per day
    table = summary_table([user("a", 20, 10 * DAY // 19), user("b", 40, 10 * DAY // 39)])
    mean, sd = table["tweets_per_day"]
    assert mean == pytest.approx(3.0, rel=1e-4) and sd == pytest.approx(1.0, rel=1e-3)
    # divide-by-n gives 1.0; the n-1 convention would give 1.414


def test_summary_empty_population_is_error():
    with pytest.raises(ValueError):
        summary_table([])


@settings(max_examples=300, deadline=None)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_cells_round_trip_at_twelve_digits(x):
    assert float(fmt(x)) == float(f"{x:.12g}")
    assert fmt(float(fmt(x))) == fmt(x)


def test_csv_format_is_lf_utf8(tmp_path):
    path = tmp_path / "x.csv"
    write_csv(path, ("a", "b"), [("é", 0.1 + 0.2), (None, True)])
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode("utf-8") == "a,b\né,0.3\n,1\n"


def test_assessments_round_trip(tmp_path):
    rows = [UserAssessment("u1", Observability.PARTIAL, 0.25, 7.5, 3200, 4.2, Abandonment.ACTIVE,
                           Regularity.REGULAR, False, 800.0),
            UserAssessment("u2", Observability.FULL, 1.0, 1.0, 1, 0.0, None, None, True, 0.0, False)]
    write_assessments(tmp_path / "a.csv", rows)
    assert read_assessments(tmp_path / "a.csv") == rows


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    generate_population(SynthConfig(seed=21, noise_alters=10), 6, root)
    return root


def test_empty_input_dir_fails_in_classify(tmp_path, capsys):
    out = tmp_path / "out"
    (tmp_path / "empty").mkdir()
    code = cli.main(["run-all", "--input", str(tmp_path / "empty"), "--out", str(out)])
    assert code != 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "FAILED" and manifest["stages"]["classify"] == "FAILED"
    assert "[classify]" in capsys.readouterr().err


def test_run_all_records_population(corpus, tmp_path):
    out = tmp_path / "out"
    assert cli.main(["run-all", "--input", str(corpus), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["status"] == "OK" and manifest["population"]["static"] == 6
    for name in ("assessments.csv", "static/layers.csv", "static/ratios.csv", "static/rings.csv",
                 "static/total_size.csv", "static/active_size.csv", "stability.csv",
                 "hashtags.csv", "hashtags_egos.csv", "summary.csv", "stationarity.csv"):
        assert (out / name).exists(), name
    rows = read_csv(out / "stability.csv")
    assert len(rows) == 6 * 5 and list(rows[0]) == ["ego_id", "ring", "mean_jaccard", "mean_jump",
                                                    "pairs_used"]


def test_short_corpus_gives_empty_stability(tmp_path):
    src = tmp_path / "c"
    generate_population(SynthConfig(seed=4, duration_years=400 / 365.25), 5, src)
    out = tmp_path / "out"
    assert cli.main(["run-all", "--input", str(src), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["population"]["dynamic"] == 0 and manifest["population"]["static"] == 5
    assert any("730" in n for n in manifest["notes"])
    assert read_csv(out / "stability.csv") == []


def test_stagewise_commands_match_run_all(corpus, tmp_path):
    out = tmp_path / "steps"
    args = ["--input", str(corpus)]
    assert cli.main(["classify-users", *args, "--out", str(out / "assessments.csv")]) == 0
    pop = ["--population", str(out / "assessments.csv")]
    assert cli.main(["static", *args, *pop, "--out-dir", str(out / "static")]) == 0
    assert cli.main(["dynamic", *args, *pop, "--out", str(out / "stability.csv")]) == 0
    assert cli.main(["hashtags", *args, "--static-dir", str(out / "static"),
                     "--out", str(out / "hashtags.csv")]) == 0
    assert cli.main(["report", *args, *pop, "--out", str(out / "summary.csv")]) == 0
    full = tmp_path / "full"
    assert cli.main(["run-all", *args, "--out", str(full)]) == 0
    for name in ("assessments.csv", "static/layers.csv", "static/rings.csv", "stability.csv",
                 "hashtags.csv", "hashtags_egos.csv", "summary.csv"):
        assert (out / name).read_bytes() == (full / name).read_bytes(), name


def test_global_flags_before_subcommand(corpus, tmp_path):
    out = tmp_path / "ingest.csv"
    assert cli.main(["--input", str(corpus), "--out", str(out), "ingest-check"]) == 0
    assert len(read_csv(out)) == 6


def test_ingest_check_reports_bad_line(tmp_path, capsys):
    (tmp_path / "u.jsonl").write_text('{"id": "1"}\n')
    assert cli.main(["ingest-check", "--input", str(tmp_path)]) != 0
    assert "line 1" in capsys.readouterr().err


def test_synth_command(tmp_path):
    assert cli.main(["synth", "--egos", "2", "--seed", "5", "--duration-years", "1",
                     "--out", str(tmp_path / "s")]) == 0
    assert sorted(p.name for p in (tmp_path / "s").iterdir()) == [
        "ego0000.jsonl", "ego0001.jsonl", "profiles.csv", "truth.csv"]


def test_log_level_from_environment(monkeypatch):
    import logging
    monkeypatch.setenv("EGONET_LOG", "debug")
    root = logging.getLogger()
    saved = root.handlers[:], root.level
    root.handlers.clear()
    try:
        cli.configure_logging()
        assert root.level == logging.DEBUG
    finally:
        root.handlers[:] = saved[0]
        root.setLevel(saved[1])
