import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from egonet.meanshift import mean_shift_1d

from oracles import kde_grid_clusters, trajectory_clusters


def test_identical_values_single_cluster():
    (c,) = mean_shift_1d([2.5] * 7, 1.0)
    assert c.center == 2.5 and c.members == tuple(range(7))


def test_two_groups_hand_example():
    clusters = mean_shift_1d([0.9, 1.0, 1.1, 9.8, 10.0, 10.2], 1.0)
    assert [round(c.center, 6) for c in clusters] == [10.0, 1.0]
    assert [c.members for c in clusters] == [(3, 4, 5), (0, 1, 2)]


def test_far_apart_points_are_singletons():
    clusters = mean_shift_1d([0.0, 5.0], 1.0)
    assert [c.members for c in clusters] == [(1,), (0,)]


@pytest.mark.parametrize("values,bw", [([], 1.0), ([1.0, np.nan], 1.0), ([1.0], 0.0),
                                       ([1.0, np.inf], 1.0), ([1.0], -2.0)])
def test_invalid_input(values, bw):
    with pytest.raises(ValueError):
        mean_shift_1d(values, bw)


def test_matches_kde_oracle_on_separated_groups():
    rng = np.random.default_rng(7)
    v = np.concatenate([rng.normal(c, 0.2, 8) for c in (-6.0, 0.0, 5.0)])
    ms = mean_shift_1d(v, 1.0)
    oracle = kde_grid_clusters(v, 1.0)
    assert [c.members for c in ms] == [m for _, m in oracle]
    assert all(abs(c.center - m) <= 0.1 for c, (m, _) in zip(ms, oracle))


finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


@settings(max_examples=150, deadline=None)
@given(st.lists(finite, min_size=1, max_size=40), st.floats(0.05, 10), st.randoms())
def test_label_invariance_under_permutation(values, bw, rnd):
    perm = list(range(len(values)))
    rnd.shuffle(perm)
    base = mean_shift_1d(values, bw)
    shuffled = mean_shift_1d([values[i] for i in perm], bw)
    as_sets = lambda cl, idx: sorted(tuple(sorted(idx[i] for i in c.members)) for c in cl)
    assert as_sets(shuffled, perm) == as_sets(base, list(range(len(values))))


@settings(max_examples=150, deadline=None)
@given(st.lists(finite, min_size=1, max_size=40), st.floats(0.05, 10))
def test_partition_and_ordering(values, bw):
    clusters = mean_shift_1d(values, bw)
    members = sorted(i for c in clusters for i in c.members)
    assert members == list(range(len(values)))
    centers = [c.center for c in clusters]
    assert centers == sorted(centers, reverse=True)


@settings(max_examples=100, deadline=None)
@given(st.lists(finite, min_size=1, max_size=30), st.floats(0.05, 10))
def test_membership_matches_brute_force_trajectories(values, bw):
    v = np.array(values)
    assert [c.members for c in mean_shift_1d(v, bw)] == [m for _, m in trajectory_clusters(v, bw)]
