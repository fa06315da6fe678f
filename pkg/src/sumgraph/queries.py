"""Independence decision procedures on summary graphs.

The central test is the active-path criterion: a summary graph implies
alpha independent of beta given c exactly when no path joins the two
sets in which every inner collision node is in c or has a descendant in
c while every other inner node stays outside c.

The implied verdict is computed by a reachability sweep over
(node, entering edge-end) states, which admits repeated nodes; an active
walk exists iff an active path does, and the brute-force path enumerator
used in the tests double-checks that equivalence on small graphs.
Witness paths are found by explicit enumeration, shortest first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .edge_matrix import reach_closure
from .graph_model import (
    DASH,
    HEAD,
    LINE,
    TAIL,
    GraphModelError,
    NodeId,
    SummaryGraph,
    classify,
)
from .transform import is_collision_pair


class QueryError(GraphModelError):
    pass


@dataclass(frozen=True)
class IndependenceQuery:
    alpha: frozenset
    beta: frozenset
    given: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "alpha", frozenset(self.alpha))
        object.__setattr__(self, "beta", frozenset(self.beta))
        object.__setattr__(self, "given", frozenset(self.given))
        if not self.alpha or not self.beta:
            raise QueryError("alpha and beta must be non-empty")
        if self.alpha & self.beta or self.alpha & self.given or self.beta & self.given:
            raise QueryError("alpha, beta and the conditioning set must be disjoint")


@dataclass(frozen=True)
class PathWitness:
    """An active path: the node sequence, the edge kind of every step as the
    pair of end marks (mark at the earlier node, mark at the later node), and
    the collision/transmitting status of each inner node."""

    nodes: tuple[NodeId, ...]
    marks: tuple[tuple[str, str], ...]
    inner_status: tuple[str, ...]

    def render(self) -> str:
        symbols = []
        for (mx, my) in self.marks:
            if mx == DASH:
                symbols.append("~~")
            elif mx == LINE:
                symbols.append("--")
            elif mx == HEAD:
                symbols.append("<-")
            else:
                symbols.append("->")
        parts = [str(self.nodes[0])]
        for sym, node in zip(symbols, self.nodes[1:]):
            parts.append(sym)
            parts.append(str(node))
        return " ".join(parts)


@dataclass(frozen=True)
class Verdict:
    implied: bool
    witness: Optional[PathWitness] = None


_EdgeRec = tuple  # (other_node, mark_here, mark_there)


def _adjacency(g: SummaryGraph) -> dict[NodeId, list[_EdgeRec]]:
    adj: dict[NodeId, list[_EdgeRec]] = {n: [] for n in g.nodes}
    nu = len(g.u_nodes)

    def link(x, y, mark_x, mark_y):
        adj[x].append((y, mark_x, mark_y))
        adj[y].append((x, mark_y, mark_x))

    for i in range(nu):
        for k in range(nu):
            if i != k and g.h_uu[i, k]:
                link(g.u_nodes[i], g.u_nodes[k], HEAD, TAIL)
        for k in range(len(g.v_nodes)):
            if g.h_uv[i, k]:
                link(g.u_nodes[i], g.v_nodes[k], HEAD, TAIL)
        for k in range(i + 1, nu):
            if g.w_uu[i, k]:
                link(g.u_nodes[i], g.u_nodes[k], DASH, DASH)
    for i in range(len(g.v_nodes)):
        for k in range(i + 1, len(g.v_nodes)):
            if g.s_vv[i, k]:
                link(g.v_nodes[i], g.v_nodes[k], LINE, LINE)
    order = {n: i for i, n in enumerate(g.nodes)}
    for n in adj:
        adj[n].sort(key=lambda rec: order[rec[0]])
    return adj


def _collision_enabled(g: SummaryGraph, conditioning: frozenset) -> frozenset:
    """Nodes that are in c or have a descendant in c."""
    out = set(conditioning)
    for n in g.nodes:
        if n in out:
            continue
        if g.descendants(n) & conditioning:
            out.add(n)
    return frozenset(out)


def _inner_ok(
    node: NodeId,
    mark_in: str,
    mark_out: str,
    marginalised: frozenset,
    enabled: frozenset,
) -> bool:
    if is_collision_pair(mark_in, mark_out):
        return node in enabled
    return node in marginalised


def has_active_path(
    g: SummaryGraph,
    alpha: Iterable[NodeId],
    beta: Iterable[NodeId],
    conditioning: Iterable[NodeId] = (),
    marginalised: Optional[Iterable[NodeId]] = None,
    skip_direct: frozenset = frozenset(),
) -> bool:
    """Reachability test for an active path between alpha and beta relative to
    [conditioning, marginalised].  When ``marginalised`` is None it defaults
    to all remaining nodes (the implicit reading used by independence
    queries).  ``skip_direct`` removes given single edges (as frozenset node
    pairs) from consideration, which the confounding audit uses to ignore the
    audited edge itself."""
    alpha, beta = frozenset(alpha), frozenset(beta)
    conditioning = frozenset(conditioning)
    if marginalised is None:
        marginalised = frozenset(g.nodes) - alpha - beta - conditioning
    else:
        marginalised = frozenset(marginalised)
    enabled = _collision_enabled(g, conditioning)
    adj = _adjacency(g)
    endpoints = alpha | beta
    seen: set[tuple[NodeId, str]] = set()
    stack: list[tuple[NodeId, str]] = []
    for i in sorted(alpha, key=str):
        for (y, mark_i, mark_y) in adj[i]:
            if y in beta and frozenset((i, y)) not in skip_direct:
                return True
            if y in endpoints:
                continue
            state = (y, mark_y)
            if state not in seen:
                seen.add(state)
                stack.append(state)
    while stack:
        x, mark_in = stack.pop()
        for (y, mark_x, mark_y) in adj[x]:
            if not _inner_ok(x, mark_in, mark_x, marginalised, enabled):
                continue
            if y in beta:
                return True
            if y in endpoints:
                continue
            state = (y, mark_y)
            if state not in seen:
                seen.add(state)
                stack.append(state)
    return False


def active_paths(
    g: SummaryGraph,
    alpha: Iterable[NodeId],
    beta: Iterable[NodeId],
    conditioning: Iterable[NodeId] = (),
    marginalised: Optional[Iterable[NodeId]] = None,
    skip_direct: frozenset = frozenset(),
    max_len: Optional[int] = None,
) -> list[PathWitness]:
    """Enumerate active paths (distinct inner nodes, endpoints excluded as
    inner nodes), ordered by length then lexicographically by node order."""
    alpha, beta = frozenset(alpha), frozenset(beta)
    conditioning = frozenset(conditioning)
    if marginalised is None:
        marginalised = frozenset(g.nodes) - alpha - beta - conditioning
    else:
        marginalised = frozenset(marginalised)
    enabled = _collision_enabled(g, conditioning)
    adj = _adjacency(g)
    endpoints = alpha | beta
    order = {n: i for i, n in enumerate(g.nodes)}
    found: list[PathWitness] = []
    limit = max_len if max_len is not None else len(g.nodes)

    def extend(path_nodes, path_marks, statuses, mark_in):
        x = path_nodes[-1]
        for (y, mark_x, mark_y) in adj[x]:
            if len(path_nodes) > 1:
                if not _inner_ok(x, mark_in, mark_x, marginalised, enabled):
                    continue
            status = (
                ()
                if len(path_nodes) == 1
                else ("collision" if is_collision_pair(mark_in, mark_x) else "transmitting",)
            )
            if y in beta:
                if len(path_nodes) == 1 and frozenset((x, y)) in skip_direct:
                    continue
                found.append(
                    PathWitness(
                        nodes=tuple(path_nodes) + (y,),
                        marks=tuple(path_marks) + ((mark_x, mark_y),),
                        inner_status=tuple(statuses) + status,
                    )
                )
                continue
            if y in endpoints or y in path_nodes:
                continue
            if len(path_nodes) >= limit:
                continue
            extend(
                path_nodes + [y],
                path_marks + [(mark_x, mark_y)],
                list(statuses) + list(status),
                mark_y,
            )

    for i in sorted(alpha, key=lambda n: order[n]):
        extend([i], [], [], "")
    found.sort(key=lambda w: (len(w.nodes), tuple(order[n] for n in w.nodes)))
    return found


def implies_independence(g: SummaryGraph, q: IndependenceQuery) -> Verdict:
    """Decide whether the graph implies alpha independent of beta given c,
    returning a shortest active path as witness when it does not."""
    extra = (q.alpha | q.beta | q.given) - set(g.nodes)
    if extra:
        raise QueryError(f"query names unknown nodes: {sorted(extra, key=str)}")
    if has_active_path(g, q.alpha, q.beta, q.given):
        paths = active_paths(g, q.alpha, q.beta, q.given)
        return Verdict(implied=False, witness=paths[0] if paths else None)
    return Verdict(implied=True)


# ---------------------------------------------------------------------------
# undirected separations


def _vertex_cut(sym: np.ndarray, alpha, beta, removed) -> bool:
    n = sym.shape[0]
    alpha, beta, removed = set(alpha), set(beta), set(removed)
    seen = set(alpha)
    stack = list(alpha)
    while stack:
        x = stack.pop()
        for y in np.flatnonzero(sym[x]):
            y = int(y)
            if y == x or y in removed or y in seen:
                continue
            if y in beta:
                return False
            seen.add(y)
            stack.append(y)
    return True


def _check_disjoint(dim, alpha, beta, other):
    for name, s in (("alpha", alpha), ("beta", beta), ("separator", other)):
        for i in s:
            if not 0 <= i < dim:
                raise QueryError(f"{name} index {i} out of range")
    if set(alpha) & set(beta) or set(alpha) & set(other) or set(beta) & set(other):
        raise QueryError("separation arguments must be disjoint")


def separate_concentration(mat: np.ndarray, alpha, beta, c) -> bool:
    """Concentration-graph separation: every alpha-beta path meets c."""
    mat = np.asarray(mat)
    _check_disjoint(mat.shape[0], alpha, beta, c)
    return _vertex_cut(mat, alpha, beta, c)


def separate_covariance(mat: np.ndarray, alpha, beta, m) -> bool:
    """Covariance-graph separation: every alpha-beta path meets m."""
    mat = np.asarray(mat)
    _check_disjoint(mat.shape[0], alpha, beta, m)
    return _vertex_cut(mat, alpha, beta, m)


# ---------------------------------------------------------------------------
# local Markov statements


@dataclass(frozen=True)
class IndependenceStatement:
    i: NodeId
    k: NodeId
    given: frozenset
    family: int
    conditioning_context: frozenset = frozenset()

    def render(self) -> str:
        given = sorted(self.given, key=str)
        ctx = sorted(self.conditioning_context, key=str)
        cond = ", ".join(str(x) for x in ctx + given)
        return f"{self.i} _||_ {self.k} | {{{cond}}}" if cond else f"{self.i} _||_ {self.k}"


def local_markov(g: SummaryGraph) -> list[IndependenceStatement]:
    """Pairwise local Markov statements of the four families: within v,
    u to v, u pairs across non-ancestors, and u to ancestors.  Every
    candidate is confirmed through the path criterion before it is
    emitted; the derivation context C is carried along separately."""
    prov = g.provenance
    context = frozenset(prov.conditioning) if prov is not None else frozenset()
    nu, nv = len(g.u_nodes), len(g.v_nodes)
    closed = reach_closure(g.h_uu)
    w = g.w_uu.astype(np.int64)
    out: list[IndependenceStatement] = []

    def confirmed(i, k, given) -> bool:
        return implies_independence(
            g, IndependenceQuery(frozenset([i]), frozenset([k]), frozenset(given))
        ).implied

    # (1) within v, given the rest of v
    for a in range(nv):
        for b in range(a + 1, nv):
            if g.s_vv[a, b]:
                continue
            i, k = g.v_nodes[a], g.v_nodes[b]
            given = frozenset(set(g.v_nodes) - {i, k})
            if confirmed(i, k, given):
                out.append(IndependenceStatement(i, k, given, 1, context))
    # (2) u to v, given the rest of v; path criterion only
    for a in range(nu):
        for b in range(nv):
            if g.h_uv[a, b]:
                continue
            i, k = g.u_nodes[a], g.v_nodes[b]
            given = frozenset(set(g.v_nodes) - {k})
            if confirmed(i, k, given):
                out.append(IndependenceStatement(i, k, given, 2, context))
    # (3) u pairs, the later node not an ancestor of the earlier
    for a in range(nu):
        anc_a = {k for k in range(nu) if k != a and closed[a, k]}
        for b in range(a + 1, nu):
            if b in anc_a:
                continue
            anc_b = {k for k in range(nu) if k != b and closed[b, k]}
            e = sorted((anc_a | anc_b) - {a, b})
            cond_matrix = w[a, b] == 0
            if cond_matrix and e:
                w_ee_closed = reach_closure(g.w_uu[np.ix_(e, e)]).astype(np.int64)
                cond_matrix = (
                    w[np.ix_([a], e)] @ w_ee_closed @ w[np.ix_(e, [b])]
                ).item() == 0
            if not cond_matrix:
                continue
            i, k = g.u_nodes[a], g.u_nodes[b]
            given = frozenset(set(g.v_nodes) | {g.u_nodes[x] for x in e})
            if confirmed(i, k, given):
                out.append(IndependenceStatement(i, k, given, 3, context))
    # (4) u to its ancestors
    for a in range(nu):
        anc_a = sorted(k for k in range(nu) if k != a and closed[a, k])
        if not anc_a:
            continue
        w_cc_closed = reach_closure(g.w_uu[np.ix_(anc_a, anc_a)]).astype(np.int64)
        h64 = g.h_uu.astype(np.int64)
        for b in anc_a:
            if g.h_uu[a, b]:
                continue
            cond_matrix = (
                w[np.ix_([a], anc_a)] @ w_cc_closed @ h64[np.ix_(anc_a, [b])]
            ).item() == 0
            if not cond_matrix:
                continue
            i, k = g.u_nodes[a], g.u_nodes[b]
            given = frozenset(set(g.v_nodes) | {g.u_nodes[x] for x in anc_a if x != b})
            if confirmed(i, k, given):
                out.append(IndependenceStatement(i, k, given, 4, context))
    return out


# ---------------------------------------------------------------------------
# Markov-equivalence obstructions


@dataclass(frozen=True)
class Obstruction:
    kind: str  # "collision_path" | "chordless_cycle"
    nodes: tuple[NodeId, ...]
    pattern: Optional[str] = None


class NotARegressionGraphError(QueryError):
    pass


def equivalence_obstruction(g: SummaryGraph) -> Optional[Obstruction]:
    """Search for a structure that rules out Markov equivalence to a DAG:
    a chordless collision path in four nodes, or a chordless cycle of four
    or more nodes within v.  Finding none does not certify equivalence."""
    cls = classify(g)
    if cls.kind != "regression_graph":
        raise NotARegressionGraphError(
            f"graph has semi-directed cycles: {cls.semi_directed_cycles}"
        )
    path = _chordless_collision_path(g)
    if path is not None:
        return path
    cycle = _chordless_cycle_in_v(g)
    if cycle is not None:
        return cycle
    return None


def _coupled_matrix(g: SummaryGraph) -> np.ndarray:
    n = len(g.nodes)
    nu = len(g.u_nodes)
    m = np.zeros((n, n), dtype=np.int8)
    huu = np.triu(g.h_uu, 1) + np.triu(g.h_uu, 1).T
    wuu = g.w_uu - np.eye(nu, dtype=np.int8)
    m[:nu, :nu] = _or(huu, wuu)
    m[:nu, nu:] = g.h_uv
    m[nu:, :nu] = g.h_uv.T
    svv = g.s_vv - np.eye(n - nu, dtype=np.int8) if n - nu else g.s_vv
    m[nu:, nu:] = svv
    return m


def _or(a, b):
    return ((a.astype(np.int64) + b.astype(np.int64)) > 0).astype(np.int8)


def _chordless_collision_path(g: SummaryGraph) -> Optional[Obstruction]:
    """The three four-node patterns: -> ~~ <- , ~~ ~~ <- , ~~ ~~ ~~ ."""
    nu = len(g.u_nodes)
    coupled = _coupled_matrix(g)

    def dashed(i, k):
        return bool(g.w_uu[i, k]) and i != k

    def arrow_into(i, k):
        # arrow with head at i, tail at k; the tail may sit in u or v
        if k < nu:
            return bool(g.h_uu[i, k]) and i != k
        return bool(g.h_uv[i, k - nu])

    u_range = range(nu)
    n_range = range(len(g.nodes))
    # pattern 1: x1 -> x2 ~~ x3 <- x4
    for x2 in u_range:
        for x3 in u_range:
            if not dashed(x2, x3):
                continue
            for x1 in n_range:
                if x1 in (x2, x3) or not arrow_into(x2, x1):
                    continue
                for x4 in n_range:
                    if x4 in (x1, x2, x3) or not arrow_into(x3, x4):
                        continue
                    if coupled[x1, x3] or coupled[x2, x4]:
                        continue
                    return Obstruction(
                        "collision_path",
                        tuple(g.nodes[x] for x in (x1, x2, x3, x4)),
                        pattern="-> ~~ <-",
                    )
    # pattern 2: x1 ~~ x2 ~~ x3 <- x4  (and its mirror, found by symmetry)
    for x1 in u_range:
        for x2 in u_range:
            if not dashed(x1, x2):
                continue
            for x3 in u_range:
                if x3 in (x1, x2) or not dashed(x2, x3):
                    continue
                for x4 in n_range:
                    if x4 in (x1, x2, x3) or not arrow_into(x3, x4):
                        continue
                    if coupled[x1, x3] or coupled[x2, x4]:
                        continue
                    return Obstruction(
                        "collision_path",
                        tuple(g.nodes[x] for x in (x1, x2, x3, x4)),
                        pattern="~~ ~~ <-",
                    )
    # pattern 3: x1 ~~ x2 ~~ x3 ~~ x4
    for x2 in u_range:
        for x3 in u_range:
            if x2 >= x3 or not dashed(x2, x3):
                continue
            for x1 in u_range:
                if x1 in (x2, x3) or not dashed(x1, x2):
                    continue
                for x4 in u_range:
                    if x4 in (x1, x2, x3) or not dashed(x3, x4):
                        continue
                    if coupled[x1, x3] or coupled[x2, x4]:
                        continue
                    return Obstruction(
                        "collision_path",
                        tuple(g.nodes[x] for x in (x1, x2, x3, x4)),
                        pattern="~~ ~~ ~~",
                    )
    return None


def _chordless_cycle_in_v(g: SummaryGraph) -> Optional[Obstruction]:
    nv = len(g.v_nodes)
    s = g.s_vv
    # enumerate simple cycles of length >= 4 without chords
    for length in range(4, nv + 1):
        for combo in itertools.combinations(range(nv), length):
            sub = s[np.ix_(combo, combo)]
            deg = sub.sum(axis=1) - 1
            if not (deg == 2).all():
                continue
            if int(sub.sum() - length) != 2 * length:
                continue
            if _is_single_cycle(sub):
                cyc = _cycle_order(sub)
                return Obstruction(
                    "chordless_cycle", tuple(g.v_nodes[combo[i]] for i in cyc)
                )
    return None


def _is_single_cycle(sub: np.ndarray) -> bool:
    n = sub.shape[0]
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in np.flatnonzero(sub[x]):
            y = int(y)
            if y != x and y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def _cycle_order(sub: np.ndarray) -> list[int]:
    n = sub.shape[0]
    order = [0]
    prev = None
    x = 0
    while len(order) < n:
        nbrs = [int(y) for y in np.flatnonzero(sub[x]) if y != x and y != prev]
        prev, x = x, nbrs[0]
        order.append(x)
    return order
