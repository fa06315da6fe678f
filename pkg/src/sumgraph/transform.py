"""Graph derivations: summary graphs under marginalising and conditioning.

Three equivalent routes produce the summary graph of a reduced node set:

* the block-matrix route from a parent graph (``summary_from_parent``),
  built on partial closure of an arranged edge matrix;
* the block-matrix route from an existing summary graph
  (``summary_from_summary``);
* the node-at-a-time route (``step_marginalise`` / ``step_condition``)
  that inserts edges for two-edge configurations at the operated node.

The module also derives the overall covariance and concentration graphs,
order-respecting regression graphs, and the MAG that is Markov
equivalent to a given summary graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .edge_matrix import partial_close, reach_closure
from .graph_model import (
    ARROW,
    DASH,
    DASHED,
    FULL,
    HEAD,
    LINE,
    TAIL,
    Edge,
    GraphModelError,
    Mag,
    NodeId,
    ParentGraph,
    Provenance,
    SummaryGraph,
    from_edge_list,
    parent_to_summary,
)


class TransformError(GraphModelError):
    pass


class InvalidSpecError(TransformError):
    """Conditioning and marginalising sets overlap or leave the node set."""


@dataclass(frozen=True)
class MarginalConditionSpec:
    conditioning: frozenset = frozenset()
    marginalising: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "conditioning", frozenset(self.conditioning))
        object.__setattr__(self, "marginalising", frozenset(self.marginalising))
        if self.conditioning & self.marginalising:
            raise InvalidSpecError(
                f"conditioning and marginalising overlap: "
                f"{sorted(self.conditioning & self.marginalising, key=str)}"
            )

    def validate_over(self, nodes: Iterable[NodeId]) -> None:
        missing = (self.conditioning | self.marginalising) - set(nodes)
        if missing:
            raise InvalidSpecError(f"spec names unknown nodes: {sorted(missing, key=str)}")


def spec_of(conditioning: Iterable[NodeId] = (), marginalising: Iterable[NodeId] = ()) -> MarginalConditionSpec:
    return MarginalConditionSpec(frozenset(conditioning), frozenset(marginalising))


@dataclass(frozen=True)
class SplitRecord:
    """Node split induced by a conditioning set: outsiders O, foster nodes F
    (ancestors of C outside C), their marginalised parts p = O & M and
    q = F & M, and the surviving u = O - p, v = F - q."""

    outsiders: tuple[NodeId, ...]
    foster: tuple[NodeId, ...]
    u: tuple[NodeId, ...]
    v: tuple[NodeId, ...]
    p: tuple[NodeId, ...]
    q: tuple[NodeId, ...]


def compute_split(g: ParentGraph, spec: MarginalConditionSpec) -> SplitRecord:
    spec.validate_over(g.nodes)
    anc = g.ancestor_matrix()
    cset = spec.conditioning
    mset = spec.marginalising
    c_idx = [g.index(c) for c in cset]
    foster = [
        n
        for k, n in enumerate(g.nodes)
        if n not in cset and any(anc[ci, k] for ci in c_idx)
    ]
    fset = set(foster)
    outsiders = [n for n in g.nodes if n not in cset and n not in fset]
    p = tuple(n for n in outsiders if n in mset)
    q = tuple(n for n in foster if n in mset)
    u = tuple(n for n in outsiders if n not in mset)
    v = tuple(n for n in foster if n not in mset)
    return SplitRecord(tuple(outsiders), tuple(foster), u, v, p, q)


def _in(m: np.ndarray) -> np.ndarray:
    return (np.asarray(m, dtype=np.int64) > 0).astype(np.int8)


def summary_from_parent(g: ParentGraph, spec: MarginalConditionSpec) -> SummaryGraph:
    """Derive the summary graph of V minus (C, M) from a parent graph.

    Works on the edge matrix arranged in the order (p, u, q, v): the O rows
    carry the parent-graph arrows, the F rows carry the concentration graph
    of the foster nodes given C.  Partial closure on p and then on q yields
    all four components in place.
    """
    split = compute_split(g, spec)
    a = g.amat.astype(np.int64)
    idx = {n: i for i, n in enumerate(g.nodes)}
    r_nodes = [n for n in g.nodes if n in spec.conditioning or n in set(split.foster)]
    r = [idx[n] for n in r_nodes]
    f_in_r = [k for k, n in enumerate(r_nodes) if n in set(split.foster)]

    arr_nodes = list(split.p) + list(split.u) + list(split.q) + list(split.v)
    arr = [idx[n] for n in arr_nodes]
    n_p, n_u, n_q, n_v = len(split.p), len(split.u), len(split.q), len(split.v)
    sl_p = slice(0, n_p)
    sl_u = slice(n_p, n_p + n_u)
    sl_q = slice(n_p + n_u, n_p + n_u + n_q)
    sl_v = slice(n_p + n_u + n_q, None)

    t = np.zeros((len(arr), len(arr)), dtype=np.int8)
    if n_p + n_u:
        t[: n_p + n_u, :] = _in(a[np.ix_(arr[: n_p + n_u], arr)])
    if r:
        a_rr = a[np.ix_(r, r)]
        s_ff_o = _in(a_rr.T @ a_rr)[np.ix_(f_in_r, f_in_r)]
        f_nodes = [n for n in r_nodes if n in set(split.foster)]
        f_pos = {n: i for i, n in enumerate(f_nodes)}
        qv_nodes = list(split.q) + list(split.v)
        perm = [f_pos[n] for n in qv_nodes]
        t[n_p + n_u:, n_p + n_u:] = s_ff_o[np.ix_(perm, perm)]

    p_pos = list(range(n_p))
    q_pos = list(range(n_p + n_u, n_p + n_u + n_q))
    d = partial_close(t, p_pos)
    k = partial_close(d, q_pos)

    h_uu = k[sl_u, sl_u]
    h_uv = k[sl_u, sl_v]
    s_vv = k[sl_v, sl_v]
    s_qq = k[sl_q, sl_q].astype(np.int64)
    d_up = d[sl_u, sl_p].astype(np.int64)
    d_uq = d[sl_u, sl_q].astype(np.int64)
    w_uu = _in(np.eye(n_u, dtype=np.int64) + d_up @ d_up.T + d_uq @ s_qq @ d_uq.T)

    return SummaryGraph(
        u_nodes=split.u,
        v_nodes=split.v,
        h_uu=h_uu,
        h_uv=h_uv,
        w_uu=w_uu,
        s_vv=s_vv,
        provenance=Provenance(spec.conditioning, spec.marginalising, split),
    )


def induced_covariance_graph(g: ParentGraph) -> np.ndarray:
    """In[A- A-T]: a zero at (i, k) means the graph implies i independent of k."""
    closed = g.ancestor_matrix().astype(np.int64)
    return _in(closed @ closed.T)


def induced_concentration_graph(g: ParentGraph) -> np.ndarray:
    """In[AT A]: a zero at (i, k) means i independent of k given all others."""
    a = g.amat.astype(np.int64)
    return _in(a.T @ a)


@dataclass(frozen=True)
class RegressionGraphComponents:
    a_nodes: tuple[NodeId, ...]
    b_nodes: tuple[NodeId, ...]
    s_aa_given_b: np.ndarray  # dashed edges among the responses a given b
    p_a_given_b: np.ndarray   # arrows from b to a
    s_bb_marginal: np.ndarray  # concentration graph of b after marginalising a


def regression_graph_from_parent(g: ParentGraph, n_a: int) -> RegressionGraphComponents:
    """Regression graph induced for the order-respecting split a | b, where a
    is the first ``n_a`` nodes of the generating order."""
    if not 0 <= n_a <= g.dim:
        raise TransformError(f"split size {n_a} out of range")
    a = g.amat.astype(np.int64)
    ai = list(range(n_a))
    bi = list(range(n_a, g.dim))
    k_aa = reach_closure(a[np.ix_(ai, ai)]).astype(np.int64) if ai else np.zeros((0, 0), dtype=np.int64)
    k_ab = _in(k_aa @ a[np.ix_(ai, bi)]).astype(np.int64)
    a_bb = a[np.ix_(bi, bi)]
    return RegressionGraphComponents(
        a_nodes=g.nodes[:n_a],
        b_nodes=g.nodes[n_a:],
        s_aa_given_b=_in(k_aa @ k_aa.T),
        p_a_given_b=_in(k_ab),
        s_bb_marginal=_in(a_bb.T @ a_bb),
    )


# ---------------------------------------------------------------------------
# node-at-a-time construction


def is_collision_pair(mark_in: str, mark_out: str) -> bool:
    """Whether an inner node with these two edge-end marks is a collision node."""
    return mark_in in (HEAD, DASH) and mark_out in (HEAD, DASH)


def induced_edge_kind(mark_x: str, mark_y: str) -> tuple[str, Optional[str]]:
    """Edge induced for the outer pair of a two-edge path, given the edge-end
    marks at the outer nodes x and y.  Returns (kind, end holding the
    arrowhead: 'x' | 'y' | None).

    This one rule reproduces every cell of the stepwise construction table:
    an endpoint keeps an arrowhead-like end (head or dash) and the combination
    of the two ends fixes the induced kind.
    """
    at_x = mark_x in (HEAD, DASH)
    at_y = mark_y in (HEAD, DASH)
    if at_x and at_y:
        return DASHED, None
    if at_x:
        return ARROW, "x"
    if at_y:
        return ARROW, "y"
    return FULL, None


_EdgeItem = tuple  # ("arrow", head_id) | ("dashed",) | ("full",)


def _mark(item: _EdgeItem, node: NodeId) -> str:
    if item[0] == ARROW:
        return HEAD if item[1] == node else TAIL
    return DASH if item[0] == DASHED else LINE


class _WorkGraph:
    """Mutable multigraph used while a step operator runs."""

    def __init__(self, g: SummaryGraph):
        self.u = list(g.u_nodes)
        self.v = list(g.v_nodes)
        self.edges: dict[frozenset, set[_EdgeItem]] = {}
        nu = len(g.u_nodes)
        for i in range(nu):
            for k in range(nu):
                if i != k and g.h_uu[i, k]:
                    self._add(g.u_nodes[i], g.u_nodes[k], (ARROW, g.u_nodes[i]))
        for i in range(nu):
            for k in range(len(g.v_nodes)):
                if g.h_uv[i, k]:
                    self._add(g.u_nodes[i], g.v_nodes[k], (ARROW, g.u_nodes[i]))
        for i in range(nu):
            for k in range(i + 1, nu):
                if g.w_uu[i, k]:
                    self._add(g.u_nodes[i], g.u_nodes[k], (DASHED,))
        for i in range(len(g.v_nodes)):
            for k in range(i + 1, len(g.v_nodes)):
                if g.s_vv[i, k]:
                    self._add(g.v_nodes[i], g.v_nodes[k], (FULL,))

    def _add(self, x: NodeId, y: NodeId, item: _EdgeItem) -> bool:
        key = frozenset((x, y))
        bucket = self.edges.setdefault(key, set())
        if item in bucket:
            return False
        bucket.add(item)
        return True

    def neighbors(self, x: NodeId) -> list[NodeId]:
        out = set()
        for key, bucket in self.edges.items():
            if x in key and bucket:
                out |= key - {x}
        return sorted(out, key=self._pos)

    def _pos(self, n: NodeId) -> int:
        order = self.u + self.v
        return order.index(n)

    def items(self, x: NodeId, y: NodeId) -> set[_EdgeItem]:
        return set(self.edges.get(frozenset((x, y)), set()))

    def ancestors(self, node: NodeId) -> set[NodeId]:
        """Nodes with a directed path to ``node`` (arrows only)."""
        parents: dict[NodeId, set[NodeId]] = {}
        for key, bucket in self.edges.items():
            for item in bucket:
                if item[0] == ARROW:
                    head = item[1]
                    (tail,) = key - {head}
                    parents.setdefault(head, set()).add(tail)
        out: set[NodeId] = set()
        stack = [node]
        while stack:
            x = stack.pop()
            for par in parents.get(x, ()):
                if par not in out:
                    out.add(par)
                    stack.append(par)
        out.discard(node)
        return out

    def induce_at(self, w: NodeId, collision: bool) -> bool:
        """Insert the edges the construction table prescribes for every pair of
        neighbors of ``w``, taking w as a collision node (conditioning) or a
        transmitting node (marginalising).  Returns whether anything changed."""
        changed = False
        nbrs = self.neighbors(w)
        for xi in range(len(nbrs)):
            for yi in range(xi + 1, len(nbrs)):
                x, y = nbrs[xi], nbrs[yi]
                for e1 in self.items(x, w):
                    for e2 in self.items(w, y):
                        if is_collision_pair(_mark(e1, w), _mark(e2, w)) != collision:
                            continue
                        kind, head_end = induced_edge_kind(_mark(e1, x), _mark(e2, y))
                        if kind == ARROW:
                            item = (ARROW, x if head_end == "x" else y)
                        else:
                            item = (kind,)
                        changed |= self._add(x, y, item)
        return changed

    def retype(self, v_new: set[NodeId]) -> None:
        """Turn every edge within the new v into a full line and every edge
        between the new u and v into an arrow from v to u."""
        for key in list(self.edges):
            if len(key) != 2:
                continue
            x, y = sorted(key, key=self._pos)
            if x in v_new and y in v_new:
                self.edges[key] = {(FULL,)}
            elif x in v_new or y in v_new:
                u_node = y if x in v_new else x
                self.edges[key] = {(ARROW, u_node)}

    def delete(self, node: NodeId) -> None:
        self.edges = {key: b for key, b in self.edges.items() if node not in key}
        self.u = [n for n in self.u if n != node]
        self.v = [n for n in self.v if n != node]

    def to_summary(self, provenance: Optional[Provenance]) -> SummaryGraph:
        edges = []
        for key, bucket in self.edges.items():
            x, y = sorted(key, key=self._pos)
            for item in bucket:
                if item[0] == ARROW:
                    head = item[1]
                    (tail,) = key - {head}
                    edges.append(Edge(tail=tail, head=head, kind=ARROW))
                else:
                    edges.append(Edge(tail=x, head=y, kind=item[0]))
        return from_edge_list(edges, self.u, self.v, provenance)


def _extended_provenance(g: SummaryGraph, conditioning=(), marginalising=()) -> Provenance:
    prov = g.provenance or Provenance()
    return Provenance(
        conditioning=prov.conditioning | frozenset(conditioning),
        marginalising=prov.marginalising | frozenset(marginalising),
        split=None,
    )


def step_marginalise(g: SummaryGraph, t: NodeId) -> SummaryGraph:
    """Marginalise over a single node: close every transmitting two-edge path
    through it, then drop the node."""
    if t not in g.nodes:
        raise TransformError(f"node {t!r} not in graph")
    work = _WorkGraph(g)
    work.induce_at(t, collision=False)
    v_new = set(work.v) - {t}
    work.retype(v_new)
    work.delete(t)
    return work.to_summary(_extended_provenance(g, marginalising=(t,)))


def step_condition(g: SummaryGraph, s: NodeId) -> SummaryGraph:
    """Condition on a single node: repeatedly close collision two-edge paths
    at the node and at each of its ancestors, move the ancestors within u
    into v, re-type their edges, and drop the node."""
    if s not in g.nodes:
        raise TransformError(f"node {s!r} not in graph")
    work = _WorkGraph(g)
    closure_nodes = [s] + sorted(work.ancestors(s), key=work._pos)
    changed = True
    while changed:
        changed = False
        for w in closure_nodes:
            changed |= work.induce_at(w, collision=True)
    d_s = set(work.ancestors(s)) & set(work.u)
    v_new = (set(work.v) | d_s) - {s}
    work.retype(v_new)
    work.delete(s)
    work.v = [n for n in work.v if n in v_new] + [n for n in work.u if n in v_new]
    work.u = [n for n in work.u if n not in v_new]
    return work.to_summary(_extended_provenance(g, conditioning=(s,)))


def stepwise_trace(
    g: SummaryGraph | ParentGraph,
    spec: MarginalConditionSpec,
    conditioning_order: Optional[list[NodeId]] = None,
    marginalising_order: Optional[list[NodeId]] = None,
    condition_first: bool = True,
) -> list[tuple[str, NodeId, SummaryGraph]]:
    """Apply the one-node-at-a-time construction, recording every step."""
    if isinstance(g, ParentGraph):
        g = parent_to_summary(g)
    spec.validate_over(g.nodes)
    c_order = list(conditioning_order) if conditioning_order is not None else sorted(
        spec.conditioning, key=str
    )
    m_order = list(marginalising_order) if marginalising_order is not None else sorted(
        spec.marginalising, key=str
    )
    if set(c_order) != spec.conditioning or set(m_order) != spec.marginalising:
        raise InvalidSpecError("step orders must enumerate the spec sets exactly")
    steps = []
    current = g
    blocks = (
        [("condition", c_order), ("marginalise", m_order)]
        if condition_first
        else [("marginalise", m_order), ("condition", c_order)]
    )
    for op, order in blocks:
        for node in order:
            current = step_condition(current, node) if op == "condition" else step_marginalise(
                current, node
            )
            steps.append((op, node, current))
    return steps


def stepwise_reduce(
    g: SummaryGraph | ParentGraph,
    spec: MarginalConditionSpec,
    conditioning_order: Optional[list[NodeId]] = None,
    marginalising_order: Optional[list[NodeId]] = None,
    condition_first: bool = True,
) -> SummaryGraph:
    steps = stepwise_trace(g, spec, conditioning_order, marginalising_order, condition_first)
    if not steps:
        if isinstance(g, ParentGraph):
            return parent_to_summary(g)
        return g
    return steps[-1][2]


# ---------------------------------------------------------------------------
# summary graph from summary graph


def summary_from_summary(g: SummaryGraph, spec: MarginalConditionSpec) -> SummaryGraph:
    """Derive a smaller summary graph from a summary graph in one shot.

    Conditioning splits u into outsiders o and the block r of conditioned
    nodes plus their foster ancestors; partial closure of the dashed
    structure on r supplies the collision-path closures, the directed
    blocks are orthogonalised against r, and partial closure on the
    marginalised nodes finishes the job.  Residual cross products between
    surviving and marginalised outsiders enter the dashed component; the
    stepwise route and the parent-graph route agree with this derivation.
    """
    spec.validate_over(g.nodes)
    mu = list(g.u_nodes)
    nu_nodes = list(g.v_nodes)
    mu_pos = {n: i for i, n in enumerate(mu)}
    nu_pos = {n: i for i, n in enumerate(nu_nodes)}
    c_mu = [n for n in mu if n in spec.conditioning]
    c_nu = [n for n in nu_nodes if n in spec.conditioning]

    closed_uu = reach_closure(g.h_uu)
    f_mu = [
        n
        for n in mu
        if n not in spec.conditioning
        and any(closed_uu[mu_pos[c], mu_pos[n]] for c in c_mu)
    ]
    r = [n for n in mu if n in set(c_mu) | set(f_mu)]
    o = [n for n in mu if n not in set(r)]
    phi = [n for n in f_mu] + [n for n in nu_nodes if n not in set(c_nu)]
    h = [n for n in o if n in spec.marginalising]
    l = [n for n in phi if n in spec.marginalising]
    u_new = [n for n in o if n not in set(h)]
    v_new = [n for n in phi if n not in set(l)]

    w = g.w_uu.astype(np.int64)
    b_uu = g.h_uu.astype(np.int64)
    b_uv = g.h_uv.astype(np.int64)
    s_vv = g.s_vv.astype(np.int64)

    r_idx = [mu_pos[n] for n in r]
    o_idx = [mu_pos[n] for n in o]
    q_full = partial_close(g.w_uu, r_idx).astype(np.int64)

    # concentration graph of (r, v) given the enlarged conditioning set
    brr = b_uu[np.ix_(r_idx, r_idx)]
    brv = b_uv[np.ix_(r_idx, range(len(nu_nodes)))]
    qrr = q_full[np.ix_(r_idx, r_idx)]
    s_psi = np.zeros((len(r) + len(nu_nodes),) * 2, dtype=np.int64)
    if r:
        s_psi[: len(r), : len(r)] = brr.T @ qrr @ brr
        s_psi[: len(r), len(r):] = brr.T @ qrr @ brv
        s_psi[len(r):, : len(r)] = s_psi[: len(r), len(r):].T
    s_psi[len(r):, len(r):] = s_vv + (brv.T @ qrr @ brv if r else 0)
    psi_nodes = r + nu_nodes
    psi_pos = {n: i for i, n in enumerate(psi_nodes)}
    phi_idx = [psi_pos[n] for n in phi]
    s_phi = _in(s_psi[np.ix_(phi_idx, phi_idx)]).astype(np.int64)

    # orthogonalise the outsider equations against r
    q_or = q_full[np.ix_(o_idx, r_idx)]
    b_o_psi = np.concatenate(
        [b_uu[np.ix_(o_idx, r_idx)], b_uv[np.ix_(o_idx, range(len(nu_nodes)))]], axis=1
    )
    b_r_psi = np.concatenate([brr, brv], axis=1)
    c_o_psi = _in(b_o_psi + (q_or @ b_r_psi if r else 0)).astype(np.int64)
    c_o_phi = c_o_psi[:, phi_idx]

    big_nodes = o + phi
    big_pos = {n: i for i, n in enumerate(big_nodes)}
    big = np.zeros((len(big_nodes),) * 2, dtype=np.int8)
    big[: len(o), : len(o)] = _in(b_uu[np.ix_(o_idx, o_idx)])
    big[: len(o), len(o):] = _in(c_o_phi)
    big[len(o):, len(o):] = _in(s_phi)

    hl_idx = [big_pos[n] for n in h] + [big_pos[n] for n in l]
    k = partial_close(big, hl_idx).astype(np.int64)

    ub = [big_pos[n] for n in u_new]
    vb = [big_pos[n] for n in v_new]
    hb = [big_pos[n] for n in h]
    lb = [big_pos[n] for n in l]
    k_uu = _in(k[np.ix_(ub, ub)])
    k_uv = _in(k[np.ix_(ub, vb)])
    s_vv_new = _in(k[np.ix_(vb, vb)])
    s_ll = k[np.ix_(lb, lb)]
    k_uh = k[np.ix_(ub, hb)]
    k_ul = k[np.ix_(ub, lb)]

    uo = [mu_pos[n] for n in u_new]
    ho = [mu_pos[n] for n in h]
    q_uu = q_full[np.ix_(uo, uo)]
    q_uh = q_full[np.ix_(uo, ho)]
    q_hh = q_full[np.ix_(ho, ho)]
    cross = k_uh @ q_uh.T
    w_new = _in(q_uu + cross + cross.T + k_uh @ q_hh @ k_uh.T + k_ul @ s_ll @ k_ul.T)

    prov = _extended_provenance(g, spec.conditioning, spec.marginalising)
    return SummaryGraph(
        u_nodes=tuple(u_new),
        v_nodes=tuple(v_new),
        h_uu=k_uu,
        h_uv=k_uv,
        w_uu=w_new,
        s_vv=s_vv_new,
        provenance=prov,
    )


# ---------------------------------------------------------------------------
# MAG construction


def mag_from_summary(g: SummaryGraph) -> Mag:
    """Build the Markov-equivalent MAG: the v block and the arrows from v are
    copied; within u, each ancestral pair keeps an arrow exactly when the
    dependence survives conditioning on the remaining ancestors, and each
    non-ancestral pair gains a dashed edge exactly when the residual
    association survives conditioning on the joint ancestor set."""
    nu = len(g.u_nodes)
    closed = reach_closure(g.h_uu)
    anc = [
        frozenset(k for k in range(nu) if k != i and closed[i, k]) for i in range(nu)
    ]
    h_new = np.eye(nu, dtype=np.int8)
    w_new = np.eye(nu, dtype=np.int8)
    all_pos = set(range(nu))
    for i in range(nu):
        b = sorted(anc[i])
        if b:
            a = sorted(all_pos - set(b))
            k_mat = partial_close(g.h_uu, a).astype(np.int64)
            q_mat = partial_close(g.w_uu, b).astype(np.int64)
            row = k_mat[i, b] + q_mat[i, b] @ k_mat[np.ix_(b, b)]
            for pos, kk in enumerate(b):
                if row[pos] > 0:
                    h_new[i, kk] = 1
        for ll in range(i + 1, nu):
            if ll in anc[i]:
                continue
            e = sorted(anc[i] | anc[ll])
            a = sorted(all_pos - set(e))
            k_mat = partial_close(g.h_uu, a).astype(np.int64)
            q_mat = partial_close(g.w_uu, e).astype(np.int64) if e else g.w_uu.astype(np.int64)
            s_aa = k_mat[np.ix_(a, a)] @ q_mat[np.ix_(a, a)] @ k_mat[np.ix_(a, a)].T
            ai = a.index(i)
            al = a.index(ll)
            if s_aa[ai, al] > 0:
                w_new[i, ll] = 1
                w_new[ll, i] = 1
    return Mag(
        u_nodes=g.u_nodes,
        v_nodes=g.v_nodes,
        h_uu=h_new,
        h_uv=g.h_uv,
        w_uu=w_new,
        s_vv=g.s_vv,
        provenance=g.provenance,
    )
