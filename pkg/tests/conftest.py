import numpy as np
import pytest

from sumgraph import MarginalConditionSpec, ParentGraph
from sumgraph.graph_model import SummaryGraph, reorder_v


def dag(nodes, edges):
    """Parent graph from (offspring, parent) pairs over an ordered node list."""
    idx = {n: i for i, n in enumerate(nodes)}
    a = np.eye(len(nodes), dtype=np.int8)
    for i, k in edges:
        if idx[i] >= idx[k]:
            raise ValueError(f"edge {i} <- {k} breaks the generating order")
        a[idx[i], idx[k]] = 1
    return ParentGraph(tuple(nodes), a)


def random_dag(rng, n, p=0.4, labels=None):
    nodes = labels if labels is not None else tuple(range(1, n + 1))
    a = np.eye(n, dtype=np.int8)
    for i in range(n):
        for k in range(i + 1, n):
            if rng.random() < p:
                a[i, k] = 1
    return ParentGraph(tuple(nodes), a)


def random_spec(rng, nodes, max_c=3, max_m=3):
    pool = list(nodes)
    rng.shuffle(pool)
    nc = int(rng.integers(0, max_c + 1))
    nm = int(rng.integers(0, max_m + 1))
    return MarginalConditionSpec(frozenset(pool[:nc]), frozenset(pool[nc:nc + nm]))


def same_graph(got: SummaryGraph, ref: SummaryGraph) -> bool:
    """Equality after aligning the (meaningless) v storage order."""
    if set(got.v_nodes) != set(ref.v_nodes):
        return False
    return reorder_v(got, ref.v_nodes) == ref


@pytest.fixture
def iv_graph():
    """Marginalising over the common parent 4 leaves the smallest
    instrumental-variable structure: a double edge on (1, 2) next to 2 <- 3.
    Coefficient names used in tests: 1 <- 2 alpha, 1 <- 4 delta,
    2 <- 3 lambda, 2 <- 4 gamma."""
    return dag([1, 2, 3, 4], [(1, 2), (1, 4), (2, 3), (2, 4)])


@pytest.fixture
def indirect_graph():
    """Marginalising over the common parent 5 couples (1, 3) by a dashed
    edge; the surviving dependence 1 <- 4 is then indirectly confounded
    while 1 <- 2 stays undistorted.  Coefficients: 1 <- 2 lambda,
    1 <- 4 alpha, 1 <- 5 delta, 3 <- 4 tau, 3 <- 5 gamma."""
    return dag([1, 2, 3, 4, 5], [(1, 2), (1, 4), (1, 5), (2, 3), (3, 4), (3, 5)])


@pytest.fixture
def two_stage_graph():
    # eight-node generating graph whose conditioning set C = {2, 4} has foster
    # nodes {3, 5, 6, 7, 8} and a single outsider {1}
    return dag(
        [1, 2, 3, 4, 5, 6, 7, 8],
        [(1, 2), (1, 4), (2, 3), (2, 6), (4, 5), (4, 7), (5, 6), (5, 8)],
    )
