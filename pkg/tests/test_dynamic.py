import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from egonet.dynamic import (SnapshotSeries, alter_jump_rates, jaccard, jaccard_per_ring,
                            jump_index_per_ring, make_windows, ring_stability, snapshot_rings)
from egonet.model import DAY, Interaction, TweetKind

from oracles import brute_jaccard, brute_jump

T = 1_400_000_000


def series(*memberships, num_rings=5):
    windows = tuple((T + i * 30 * DAY, T + i * 30 * DAY + 365 * DAY) for i in range(len(memberships)))
    return SnapshotSeries("ego", windows, tuple(memberships), num_rings)


@pytest.mark.parametrize("span,count", [(730, 13), (400, 2), (300, 0), (365, 1)])
def test_window_counts(span, count):
    assert len(make_windows(T, T + span * DAY)) == count


@settings(max_examples=200, deadline=None)
@given(st.integers(365, 3000), st.integers(100, 500), st.integers(1, 90))
def test_window_count_formula(span, width, step):
    windows = make_windows(T, T + span * DAY, width, step)
    brute = [s for s in range(0, span + 1) if s % step == 0 and s + width <= span]
    assert len(windows) == (len(brute) if span >= width else 0)
    if span >= width:
        assert len(windows) == (span - width) // step + 1
    assert all(b - a == width * DAY for a, b in windows)
    assert all(w2[0] - w1[0] == step * DAY for w1, w2 in zip(windows, windows[1:]))


def test_jaccard_examples():
    assert jaccard(frozenset("abc"), frozenset("abc")) == 1.0
    assert jaccard(frozenset("abc"), frozenset("bcd")) == 0.5
    assert jaccard(frozenset("ab"), frozenset("cd")) == 0.0
    assert jaccard(frozenset(), frozenset()) is None


def test_empty_union_pairs_skipped():
    s = series({"a": 1}, {"a": 1}, {"a": 1})
    jac = jaccard_per_ring(s)
    assert jac[1] == (1.0, 2) and jac[2] == (None, 0)


def test_fewer_than_two_windows_is_error():
    with pytest.raises(ValueError):
        jaccard_per_ring(series({"a": 1}))
    with pytest.raises(ValueError):
        jump_index_per_ring(series({"a": 1}))


def test_constant_alter_never_jumps():
    s = series({"a": 2}, {"a": 2}, {"a": 2})
    assert jump_index_per_ring(s)[2] == (0.0, 1)


def test_alter_rate_one_jump_in_two_pairs():
    s = series({"a": 1}, {"a": 3}, {"a": 3})
    assert alter_jump_rates(s) == {"a": 0.5}


def test_ring_mean_of_jumper_and_stayer():
    s = series({"a": 1, "b": 1}, {"a": 2, "b": 1})
    assert jump_index_per_ring(s)[1] == (0.5, 2)


def test_appearing_alters_are_not_jumps():
    s = series({"a": 1}, {"a": 1, "b": 3}, {"b": 3})
    jump = jump_index_per_ring(s)
    assert jump[1] == (0.0, 1) and jump[3] == (0.0, 1)
    assert jaccard_per_ring(s)[1] == (0.5, 2)


def test_magnitude_flag():
    s = series({"a": 1}, {"a": 4})
    assert jump_index_per_ring(s, magnitude=True)[1] == (3.0, 1)
    assert jump_index_per_ring(s)[1] == (1.0, 1)


memberships = st.lists(
    st.dictionaries(st.sampled_from([f"u{i}" for i in range(20)]), st.integers(1, 5), max_size=20),
    min_size=2, max_size=10)


@settings(max_examples=200, deadline=None)
@given(memberships)
def test_indices_match_set_enumeration(ms):
    s = series(*ms)
    assert jaccard_per_ring(s) == brute_jaccard(ms, 5)
    got, want = jump_index_per_ring(s), brute_jump(ms, 5)
    for r in range(1, 6):
        assert got[r][1] == want[r][1]
        assert (got[r][0] is None) == (want[r][0] is None)
        if got[r][0] is not None:
            assert abs(got[r][0] - want[r][0]) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.sampled_from("abcdefgh"), st.integers(1, 5)), st.integers(2, 8))
def test_constant_membership_has_zero_jumps_and_unit_jaccard(m, n):
    s = series(*[dict(m)] * n)
    for r, (value, _) in jump_index_per_ring(s).items():
        assert value in (None, 0.0)
    for r, (value, _) in jaccard_per_ring(s).items():
        assert value in (None, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.frozensets(st.integers(0, 15)), st.frozensets(st.integers(0, 15)))
def test_jaccard_symmetry(a, b):
    assert jaccard(a, b) == jaccard(b, a)
    if a | b:
        assert (jaccard(a, b) == 1.0) == (a == b)
        assert (jaccard(a, b) == 0.0) == (not (a & b))


def test_snapshot_single_active_alter_fills_ring_one():
    rng = random.Random(1)
    items = sorted((Interaction("a", T + rng.randrange(730 * DAY), 0, TweetKind.REPLY, str(i))
                    for i in range(40)), key=lambda it: it.timestamp)
    s = snapshot_rings("ego", items, make_windows(T, T + 730 * DAY))
    assert all(m == {"a": 1} for m in s.ring_membership)


def test_alignment_outer_shifts_sparse_windows():
    items = [Interaction("a", T + k * DAY, 0, TweetKind.REPLY, str(k)) for k in range(0, 400, 2)]
    windows = make_windows(T, T + 400 * DAY)
    inner = snapshot_rings("ego", items, windows, align="inner")
    outer = snapshot_rings("ego", items, windows, align="outer")
    assert inner.ring_membership[0] == {"a": 1} and outer.ring_membership[0] == {"a": 5}
    with pytest.raises(ValueError):
        snapshot_rings("ego", items, windows, align="middle")


def test_ring_stability_rows():
    rows = ring_stability(series({"a": 1, "b": 2}, {"a": 1, "b": 3}))
    assert [r.ring for r in rows] == [1, 2, 3, 4, 5]
    assert rows[0].mean_jaccard == 1.0 and rows[1].mean_jump == 1.0 and rows[3].mean_jaccard is None
