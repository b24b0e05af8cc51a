"""Induced-subgraph embedding enumeration, with a compiled fast path.

Substructure matching dominates encoder runtime (one search per group
per molecule), so the inner search ships twice: a Cython kernel
(:mod:`gselfies._match.core`) and a pure-Python twin with identical
semantics.  The backend is chosen once at import; set
``GSELFIES_PURE_MATCH=1`` to force the fallback.  Both backends consume
the same flat search plan and return identical mappings in identical
order, which the parity tests assert directly.

Semantics: embeddings are injective, exact on (element, charge,
explicit H, bond order), and induced — molecule atoms in the image may
carry extra bonds to atoms outside the image, but never to each other
beyond the template's own bonds.
"""

from __future__ import annotations

import os

from .molgraph import MolGraph

_ATTR_CODES: dict[tuple[str, int, int], int] = {}


def _attr_code(element: str, charge: int, explicit_h: int) -> int:
    key = (element, charge, explicit_h)
    code = _ATTR_CODES.get(key)
    if code is None:
        code = len(_ATTR_CODES)
        _ATTR_CODES[key] = code
    return code


class PackedGraph:
    """CSR adjacency plus per-atom attribute codes."""

    __slots__ = ("n", "attr", "deg", "adj_start", "adj_nbr", "adj_order")

    def __init__(self, graph: MolGraph):
        self.n = graph.n
        self.attr = [
            _attr_code(a.element, a.charge, a.explicit_h) for a in graph.atoms]
        self.deg = [graph.degree(i) for i in range(graph.n)]
        self.adj_start = [0]
        self.adj_nbr: list[int] = []
        self.adj_order: list[int] = []
        for i in range(graph.n):
            for j, order in sorted(graph.neighbors(i)):
                self.adj_nbr.append(j)
                self.adj_order.append(order)
            self.adj_start.append(len(self.adj_nbr))


class MatchPlan:
    """Template-side search plan: visit order, anchors, and bond demands.

    order[d] is the template atom visited at depth d; its candidates are
    the molecule neighbors of the atom matched at anchor[d] (or every
    molecule atom when anchor[d] < 0).  req_* lists, CSR-indexed by
    depth, give every earlier-depth neighbor and the exact bond order it
    must have.
    """

    __slots__ = ("n", "order", "attr", "deg", "anchor",
                 "req_start", "req_depth", "req_order")

    def __init__(self, template: PackedGraph):
        n = self.n = template.n
        degree = template.deg
        chosen: set[int] = set()
        order: list[int] = []
        while len(order) < n:
            best = None
            for candidate in range(n):
                if candidate in chosen:
                    continue
                anchored = any(
                    template.adj_nbr[k] in chosen
                    for k in range(template.adj_start[candidate],
                                   template.adj_start[candidate + 1]))
                if not anchored and order:
                    continue
                key = (degree[candidate], -candidate)
                if best is None or key > best[0]:
                    best = (key, candidate)
            if best is None:  # disconnected template: open a new root
                rest = [c for c in range(n) if c not in chosen]
                best = ((0, 0), max(rest, key=lambda i: (degree[i], -i)))
            order.append(best[1])
            chosen.add(best[1])
        pos_of = {t: d for d, t in enumerate(order)}
        self.order = order
        self.attr = [template.attr[t] for t in order]
        self.deg = [degree[t] for t in order]
        self.anchor = []
        self.req_start = [0]
        self.req_depth: list[int] = []
        self.req_order: list[int] = []
        for depth, t in enumerate(order):
            earlier = sorted(
                (pos_of[template.adj_nbr[k]], template.adj_order[k])
                for k in range(template.adj_start[t], template.adj_start[t + 1])
                if pos_of[template.adj_nbr[k]] < depth)
            self.anchor.append(earlier[0][0] if earlier else -1)
            for nbr_depth, bond_order in earlier:
                self.req_depth.append(nbr_depth)
                self.req_order.append(bond_order)
            self.req_start.append(len(self.req_depth))


def enumerate_embeddings_pure(plan: MatchPlan, mol: PackedGraph,
                              forbidden: list[int]) -> list[tuple[int, ...]]:
    """All induced embeddings, pure-Python backend."""
    t_n, m_n = plan.n, mol.n
    if t_n == 0 or t_n > m_n:
        return []
    m_attr, m_deg = mol.attr, mol.deg
    m_start, m_nbr, m_ord = mol.adj_start, mol.adj_nbr, mol.adj_order
    assignment = [-1] * t_n
    used = [False] * m_n
    results: list[tuple[int, ...]] = []

    def feasible(depth: int, u: int) -> bool:
        if used[u] or forbidden[u]:
            return False
        if m_attr[u] != plan.attr[depth] or m_deg[u] < plan.deg[depth]:
            return False
        mapped = 0
        for k in range(m_start[u], m_start[u + 1]):
            if used[m_nbr[k]]:
                mapped += 1
        lo, hi = plan.req_start[depth], plan.req_start[depth + 1]
        if mapped != hi - lo:
            return False  # induced: no bonds into the image beyond demands
        for k in range(lo, hi):
            v = assignment[plan.req_depth[k]]
            found = 0
            for j in range(m_start[u], m_start[u + 1]):
                if m_nbr[j] == v:
                    found = m_ord[j]
                    break
            if found != plan.req_order[k]:
                return False
        return True

    def extend(depth: int) -> None:
        if depth == t_n:
            mapping = [0] * t_n
            for d in range(t_n):
                mapping[plan.order[d]] = assignment[d]
            results.append(tuple(mapping))
            return
        anchor = plan.anchor[depth]
        if anchor < 0:
            pool = range(m_n)
        else:
            u = assignment[anchor]
            pool = m_nbr[m_start[u]:m_start[u + 1]]
        for u in pool:
            if feasible(depth, u):
                assignment[depth] = u
                used[u] = True
                extend(depth + 1)
                used[u] = False
                assignment[depth] = -1

    extend(0)
    return results


def _load_backend():
    if os.environ.get("GSELFIES_PURE_MATCH"):
        return None
    try:
        from ._match import core  # noqa: PLC0415
    except ImportError:
        return None
    return core


_BACKEND = _load_backend()

BACKEND_NAME = "cython" if _BACKEND is not None else "pure"


def enumerate_embeddings(plan: MatchPlan, mol: PackedGraph,
                         forbidden: list[int]) -> list[tuple[int, ...]]:
    if _BACKEND is not None:
        return _BACKEND.enumerate_embeddings(
            plan.n, plan.order, plan.attr, plan.deg, plan.anchor,
            plan.req_start, plan.req_depth, plan.req_order,
            mol.n, mol.attr, mol.deg,
            mol.adj_start, mol.adj_nbr, mol.adj_order,
            [1 if f else 0 for f in forbidden])
    return enumerate_embeddings_pure(plan, mol, forbidden)
