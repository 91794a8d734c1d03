import math
import random

import pytest

from peierls import (
    CutoffReport,
    GraphError,
    PotentialSpec,
    ShiftSpec,
    TransitivityError,
    TruncationError,
    barrier_length_profile,
    barrier_upper_bound,
    compute_barrier,
    graph_from_weights,
    letter_cutoff,
    optimize,
    truncate,
)

from oracles import oracle_barrier, oracle_walk_profile, random_graph


def test_barrier_golden_mean(gm_graph):
    result = compute_barrier(gm_graph)
    assert result.base_vertex == (0,)
    assert result.values == {(0,): 0.0, (1,): 0.0}
    assert math.copysign(1.0, result.values[(0,)]) == 1.0
    assert result.max_mean == 0.0
    bounds = result.bounds
    assert bounds is not None
    assert bounds.per_letter == {0: 0.0, 1: 1.0}
    assert bounds.global_bound == 0.0
    assert bounds.ambient_variation == 0.0


def test_barrier_renewal_truncation(renewal_graph):
    result = compute_barrier(renewal_graph)
    expected = {0: 0.0, 1: -2.0, 2: 0.0, 3: -4.0, 4: 0.0, 5: -6.0, 6: 0.0}
    assert result.values == {(j,): x for j, x in expected.items()}
    assert result.bounds.per_letter[5] == 25.0
    for (j,), value in result.values.items():
        assert value <= result.bounds.per_letter[j] + 1e-9
        assert value <= result.bounds.global_bound + 1e-9


def test_barrier_requires_optimized_graph():
    g = graph_from_weights({(0, 0): 0.0})
    with pytest.raises(GraphError):
        compute_barrier(g)
    with pytest.raises(GraphError):
        barrier_length_profile(g, 0, 4)


def test_barrier_matches_path_enumeration_on_seeded_graphs():
    rng = random.Random(911)
    for _ in range(60):
        weights = random_graph(rng, rng.randint(1, 7))
        g = optimize(graph_from_weights(weights))
        result = compute_barrier(g)
        oracle = oracle_barrier(weights, result.base_vertex, g.max_mean)
        assert set(result.values) == set(oracle)
        for v, value in result.values.items():
            assert value == pytest.approx(oracle[v], abs=1e-9)
        assert result.bounds is None


def test_profile_matches_step_enumeration(renewal_graph):
    compute_barrier(renewal_graph)
    base = renewal_graph.critical_cycle[0]
    for target in renewal_graph.vertices:
        got = barrier_length_profile(renewal_graph, target, 8)
        want = oracle_walk_profile(
            renewal_graph.weights, base, target, renewal_graph.max_mean, 8
        )
        assert len(got) == 9
        for a, b in zip(got, want):
            if math.isinf(b):
                assert math.isinf(a)
            else:
                assert a == pytest.approx(b, abs=1e-9)


def test_profile_frozen_values(renewal_graph):
    profile = barrier_length_profile(renewal_graph, (1,), 5)
    assert profile[0] == float("-inf")
    assert profile[1] == float("-inf")
    assert profile[2:] == (-2.0, -2.0, -2.0, -2.0)
    with pytest.raises(GraphError):
        barrier_length_profile(renewal_graph, (9,), 3)
    with pytest.raises(GraphError):
        barrier_length_profile(renewal_graph, (1,), -1)


def test_per_letter_bound_uses_connector_and_floor(gm_graph, gm_finite, gm_pot):
    assert barrier_upper_bound(gm_graph, gm_finite, gm_pot, 1) == 1.0
    assert barrier_upper_bound(gm_graph, gm_finite, gm_pot, 0) == 0.0
    with pytest.raises(GraphError):
        barrier_upper_bound(gm_graph, gm_finite, gm_pot, 7)


def test_letter_cutoff_golden_mean(gm_spec, gm_pot, gm_finite):
    report = letter_cutoff(gm_spec, gm_pot, gm_finite, 1)
    assert report == CutoffReport(
        letter=1,
        excursion_cutoff=2,
        confinement_bound=3,
        local_connect_len=2,
        wide_connect_len=2,
        wide_bound=1,
    )
    base = letter_cutoff(gm_spec, gm_pot, gm_finite, 0)
    assert (base.excursion_cutoff, base.confinement_bound) == (1, 3)
    assert base.local_connect_len == 1


def test_letter_cutoff_renewal(renewal_spec, renewal_pot, renewal_finite):
    report = letter_cutoff(renewal_spec, renewal_pot, renewal_finite, 0)
    assert report == CutoffReport(
        letter=0,
        excursion_cutoff=36,
        confinement_bound=1483,
        local_connect_len=6,
        wide_connect_len=39,
        wide_bound=38,
    )


def test_letter_cutoff_guards(gm_spec, gm_pot, gm_finite):
    with pytest.raises(GraphError):
        letter_cutoff(gm_spec, gm_pot, gm_finite, 9)
    heavy = PotentialSpec(
        depth=1, tail_kind="linear", tail_scale=1.0, table={(1,): -3000.0}
    )
    with pytest.raises(TruncationError):
        letter_cutoff(gm_spec, heavy, gm_finite, 1)
    one_way = ShiftSpec(
        kind="explicit-finite", alphabet_size=2, edges=frozenset({(0, 0), (0, 1), (1, 1)})
    )
    with pytest.raises(TransitivityError):
        letter_cutoff(one_way, gm_pot, truncate(one_way, 1), 0)
