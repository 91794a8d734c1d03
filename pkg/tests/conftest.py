from __future__ import annotations

import pytest

from peierls import (
    PotentialSpec,
    ShiftSpec,
    build_memory_graph,
    covering_core,
    graph_from_weights,
    optimize,
    truncate,
)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("PEIERLS_CACHE_DIR", str(tmp_path / "stage-cache"))


@pytest.fixture
def gm_spec():
    return ShiftSpec(
        kind="explicit-finite",
        alphabet_size=2,
        edges=frozenset({(0, 0), (0, 1), (1, 0)}),
    )


@pytest.fixture
def gm_pot():
    return PotentialSpec(depth=1, tail_kind="linear", tail_scale=1.0)


@pytest.fixture
def gm_finite(gm_spec):
    return truncate(gm_spec, 1)


@pytest.fixture
def gm_graph(gm_finite, gm_pot):
    graph = build_memory_graph(gm_finite, gm_pot)
    return optimize(graph)


@pytest.fixture
def renewal_spec():
    return ShiftSpec(kind="renewal", renewal_rule=(2, 0))


@pytest.fixture
def renewal_pot():
    return PotentialSpec(
        depth=1, tail_kind="linear", tail_scale=1.0, table={(0,): 0.0}
    )


@pytest.fixture
def renewal_finite(renewal_spec):
    return covering_core(renewal_spec, range(7))


@pytest.fixture
def renewal_graph(renewal_finite, renewal_pot):
    graph = build_memory_graph(renewal_finite, renewal_pot)
    return optimize(graph)


@pytest.fixture
def two_class_graph():
    graph = graph_from_weights(
        {(0, 0): 0.0, (0, 1): -1.0, (1, 0): -1.0, (1, 1): 0.0}
    )
    return optimize(graph)
