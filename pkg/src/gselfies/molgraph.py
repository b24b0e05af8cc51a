"""Molecular graph core: atoms, bonds, valence accounting, ring utilities.

Atom ids are list positions; the position doubles as the placement index
(the order in which atoms were created).  Graphs are immutable once built;
use :class:`GraphBuilder` for construction.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import GraphError
from .valence import DEFAULT_VALENCE, ValenceTable


@dataclass(frozen=True)
class Atom:
    element: str
    charge: int = 0
    explicit_h: int = 0
    aromatic: bool = False  # input provenance only; never part of semantics


@dataclass(frozen=True)
class Bond:
    a: int
    b: int
    order: int
    annot: str | None = None  # '/' or '\\', carried but not interpreted

    def other(self, atom_id: int) -> int:
        return self.b if atom_id == self.a else self.a


class MolGraph:
    """Immutable molecule; construct through :class:`GraphBuilder`."""

    __slots__ = ("atoms", "bonds", "_adj", "_table", "_cert_cache")

    def __init__(self, atoms: tuple[Atom, ...], bonds: tuple[Bond, ...],
                 table: ValenceTable = DEFAULT_VALENCE):
        self.atoms = atoms
        self.bonds = bonds
        self._table = table
        adj: list[list[tuple[int, int]]] = [[] for _ in atoms]
        for bond in bonds:
            adj[bond.a].append((bond.b, bond.order))
            adj[bond.b].append((bond.a, bond.order))
        self._adj = adj
        self._cert_cache: dict[str, bytes] = {}

    @property
    def n(self) -> int:
        return len(self.atoms)

    @property
    def table(self) -> ValenceTable:
        return self._table

    def neighbors(self, atom_id: int) -> list[tuple[int, int]]:
        """(neighbor id, bond order) pairs."""
        return self._adj[atom_id]

    def degree(self, atom_id: int) -> int:
        return len(self._adj[atom_id])

    def bond_between(self, a: int, b: int) -> Bond | None:
        for bond in self.bonds:
            if {bond.a, bond.b} == {a, b}:
                return bond
        return None

    def bonded_order(self, atom_id: int) -> int:
        return sum(order for _, order in self._adj[atom_id])

    def free_valence(self, atom_id: int) -> int:
        if not 0 <= atom_id < self.n:
            raise GraphError(f"no atom with id {atom_id}")
        atom = self.atoms[atom_id]
        cap = self._table.max_valence(atom.element, atom.charge)
        return cap - atom.explicit_h - self.bonded_order(atom_id)

    def implicit_h(self, atom_id: int) -> int:
        """Hydrogens implied by unfilled valence (organic-subset convention)."""
        return self.free_valence(atom_id)

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        out: list[list[int]] = []
        for start in range(self.n):
            if seen[start]:
                continue
            comp = [start]
            seen[start] = True
            stack = [start]
            while stack:
                cur = stack.pop()
                for nbr, _ in self._adj[cur]:
                    if not seen[nbr]:
                        seen[nbr] = True
                        comp.append(nbr)
                        stack.append(nbr)
            out.append(comp)
        return out

    def ring_count(self) -> int:
        """Smallest-set-of-smallest-rings size (cyclomatic number)."""
        return len(self.bonds) - self.n + len(self.components())

    def ring_bonds(self) -> set[frozenset[int]]:
        """Bonds that lie on at least one cycle (non-bridge edges)."""
        bridges = find_bridges(self)
        return {
            frozenset((bond.a, bond.b))
            for bond in self.bonds
            if frozenset((bond.a, bond.b)) not in bridges
        }

    def ring_atoms(self) -> set[int]:
        out: set[int] = set()
        for pair in self.ring_bonds():
            out |= pair
        return out


def free_valence(graph: MolGraph, atom_id: int) -> int:
    return graph.free_valence(atom_id)


class GraphBuilder:
    """Mutable construction buffer with incremental free-valence tracking."""

    __slots__ = ("table", "elements", "charges", "explicit_hs", "aromatic",
                 "free", "adjacency", "_bonds")

    def __init__(self, table: ValenceTable = DEFAULT_VALENCE):
        self.table = table
        self.elements: list[str] = []
        self.charges: list[int] = []
        self.explicit_hs: list[int] = []
        self.aromatic: list[bool] = []
        self.free: list[int] = []
        self.adjacency: list[dict[int, int]] = []
        self._bonds: list[list] = []  # [a, b, order, annot]

    @property
    def n(self) -> int:
        return len(self.elements)

    def add_atom(self, element: str, charge: int = 0, explicit_h: int = 0,
                 aromatic: bool = False) -> int:
        cap = self.table.max_valence(element, charge)
        if explicit_h < 0:
            raise GraphError("explicit hydrogen count must be non-negative")
        if explicit_h > cap:
            raise GraphError(
                f"{explicit_h}H exceeds capacity {cap} of {element}{charge:+d}"
                if charge else f"{explicit_h}H exceeds capacity {cap} of {element}")
        self.elements.append(element)
        self.charges.append(charge)
        self.explicit_hs.append(explicit_h)
        self.aromatic.append(aromatic)
        self.free.append(cap - explicit_h)
        self.adjacency.append({})
        return self.n - 1

    def add_bond(self, a: int, b: int, order: int, annot: str | None = None) -> None:
        if a == b:
            raise GraphError("self bonds are not allowed")
        if b in self.adjacency[a]:
            raise GraphError(f"parallel bond between atoms {a} and {b}")
        if order < 1 or order > 3:
            raise GraphError(f"bond order {order} outside 1..3")
        if self.free[a] < order or self.free[b] < order:
            raise GraphError(
                f"bond of order {order} between atoms {a} and {b} exceeds free valence")
        self.adjacency[a][b] = order
        self.adjacency[b][a] = order
        self.free[a] -= order
        self.free[b] -= order
        self._bonds.append([a, b, order, annot])

    def set_bond_order(self, a: int, b: int, order: int) -> None:
        old = self.adjacency[a].get(b)
        if old is None:
            raise GraphError(f"no bond between atoms {a} and {b}")
        delta = order - old
        if self.free[a] < delta or self.free[b] < delta:
            raise GraphError("bond order change exceeds free valence")
        self.adjacency[a][b] = order
        self.adjacency[b][a] = order
        self.free[a] -= delta
        self.free[b] -= delta
        for rec in self._bonds:
            if {rec[0], rec[1]} == {a, b}:
                rec[2] = order
                return

    def has_bond(self, a: int, b: int) -> bool:
        return b in self.adjacency[a]

    def finish(self) -> MolGraph:
        atoms = tuple(
            Atom(self.elements[i], self.charges[i], self.explicit_hs[i], self.aromatic[i])
            for i in range(self.n))
        bonds = tuple(Bond(a, b, order, annot) for a, b, order, annot in self._bonds)
        return MolGraph(atoms, bonds, self.table)


def validate(graph: MolGraph) -> None:
    """Raise :class:`GraphError` on any structural-invariant violation."""
    n = graph.n
    incident = [0] * n
    pairs = set()
    for bond in graph.bonds:
        a, b = bond.a, bond.b
        if a == b:
            raise GraphError(f"self bond on atom {a}")
        if not (0 <= a < n and 0 <= b < n):
            raise GraphError(f"bond endpoint outside graph: {bond}")
        if bond.order not in (1, 2, 3):
            raise GraphError(f"bond order {bond.order} outside 1..3")
        key = (a, b) if a < b else (b, a)
        if key in pairs:
            raise GraphError(f"parallel bonds between atoms {a} and {b}")
        pairs.add(key)
        incident[a] += bond.order
        incident[b] += bond.order
    table = graph.table
    capacity_cache: dict[tuple[str, int], int] = {}
    for atom_id, atom in enumerate(graph.atoms):
        key = (atom.element, atom.charge)
        cap = capacity_cache.get(key)
        if cap is None:
            if not table.supports(atom.element):
                raise GraphError(f"element {atom.element!r} not in valence table")
            cap = table.max_valence(atom.element, atom.charge)
            capacity_cache[key] = cap
        if atom.explicit_h < 0:
            raise GraphError("negative explicit hydrogen count")
        if cap - atom.explicit_h - incident[atom_id] < 0:
            raise GraphError(
                f"atom {atom_id} ({atom.element}) exceeds its valence capacity")


def find_bridges(graph: MolGraph) -> set[frozenset[int]]:
    """Bridge edges via iterative Tarjan lowpoint search."""
    n = graph.n
    visited = [False] * n
    disc = [0] * n
    low = [0] * n
    bridges: set[frozenset[int]] = set()
    timer = 0
    for root in range(n):
        if visited[root]:
            continue
        stack: list[tuple[int, int, int]] = [(root, -1, 0)]
        while stack:
            node, parent, idx = stack.pop()
            if idx == 0:
                visited[node] = True
                disc[node] = low[node] = timer
                timer += 1
            nbrs = graph.neighbors(node)
            if idx < len(nbrs):
                stack.append((node, parent, idx + 1))
                nxt = nbrs[idx][0]
                if nxt == parent:
                    continue
                if visited[nxt]:
                    low[node] = min(low[node], disc[nxt])
                else:
                    stack.append((nxt, node, 0))
            else:
                if parent >= 0:
                    low[parent] = min(low[parent], low[node])
                    if low[node] > disc[parent]:
                        bridges.add(frozenset((parent, node)))
    return bridges


def simple_cycles_upto(graph: MolGraph, max_len: int) -> list[list[int]]:
    """All simple cycles of length <= max_len, each reported once.

    Only the ring subgraph is explored; a cycle is reported rooted at its
    minimum atom id with its lower second endpoint first, which makes the
    enumeration order deterministic.
    """
    ring_bond_pairs = graph.ring_bonds()
    if not ring_bond_pairs:
        return []
    adj: dict[int, list[int]] = {}
    for pair in ring_bond_pairs:
        a, b = sorted(pair)
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    for nbrs in adj.values():
        nbrs.sort()
    cycles: list[list[int]] = []
    seen: set[frozenset[int]] = set()
    for start in sorted(adj):
        # paths where every interior atom id > start
        stack: list[list[int]] = [[start]]
        while stack:
            path = stack.pop()
            last = path[-1]
            for nbr in adj[last]:
                if nbr == start and len(path) >= 3:
                    key = frozenset(path)
                    if key not in seen and len(path) <= max_len:
                        if len(path) < 3 or path[1] < path[-1]:
                            seen.add(key)
                            cycles.append(list(path))
                    continue
                if nbr <= start or nbr in path:
                    continue
                if len(path) < max_len:
                    stack.append(path + [nbr])
    cycles.sort(key=lambda cyc: (len(cyc), cyc))
    return cycles
