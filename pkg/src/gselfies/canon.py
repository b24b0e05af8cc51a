"""Canonical atom ordering, graph certificates, and isomorphism.

Canonical order is found by iterative neighborhood refinement with
backtracking individualization: every branch of the search produces a
certificate and the lexicographically smallest one wins, so the result
is independent of input atom labeling.  Isomorphism compares the
certificates of canonically re-kekulized graphs, which makes the two
alternations of an aromatic ring compare equal while stereo annotations
and aromatic flags are ignored throughout.
"""

from __future__ import annotations

from .aromatic import _perfect_matching, aromatic_bond_pairs
from .molgraph import Bond, MolGraph

_BLUR_ORDER = 9  # stand-in order for bonds whose alternation is blurred


def _bond_orders(graph: MolGraph,
                 blurred: set[frozenset[int]] | None) -> dict[frozenset[int], int]:
    orders: dict[frozenset[int], int] = {}
    for bond in graph.bonds:
        pair = frozenset((bond.a, bond.b))
        if blurred and pair in blurred:
            orders[pair] = _BLUR_ORDER
        else:
            orders[pair] = bond.order
    return orders


def _refine(graph: MolGraph, colors: list[int],
            orders: dict[frozenset[int], int]) -> list[int]:
    n = graph.n
    while True:
        signatures = []
        for i in range(n):
            nbr_sig = sorted(
                (colors[j], orders[frozenset((i, j))]) for j, _ in graph.neighbors(i))
            signatures.append((colors[i], tuple(nbr_sig)))
        remap = {sig: idx for idx, sig in enumerate(sorted(set(signatures)))}
        new_colors = [remap[sig] for sig in signatures]
        if len(set(new_colors)) == len(set(colors)):
            return new_colors
        colors = new_colors


def _certificate_for_order(graph: MolGraph, order: list[int],
                           orders: dict[frozenset[int], int]) -> tuple:
    pos = {atom_id: idx for idx, atom_id in enumerate(order)}
    atoms = tuple(
        (graph.atoms[a].element, graph.atoms[a].charge, graph.atoms[a].explicit_h)
        for a in order)
    edges = sorted(
        (min(pos[bond.a], pos[bond.b]), max(pos[bond.a], pos[bond.b]),
         orders[frozenset((bond.a, bond.b))])
        for bond in graph.bonds)
    return (graph.n, atoms, tuple(edges))


def canonical_order(graph: MolGraph,
                    blurred: set[frozenset[int]] | None = None,
                    extra: list | None = None) -> list[int]:
    """Canonical position -> atom id permutation.

    `extra` adds one caller-supplied component per atom to the initial
    colors (e.g. attachment annotations), refining the canonical form.
    """
    n = graph.n
    if n == 0:
        return []
    orders = _bond_orders(graph, blurred)
    initial = []
    for i, atom in enumerate(graph.atoms):
        incident = tuple(sorted(orders[frozenset((i, j))] for j, _ in graph.neighbors(i)))
        initial.append((atom.element, atom.charge, atom.explicit_h,
                        None if extra is None else extra[i], incident))
    remap = {sig: idx for idx, sig in enumerate(sorted(set(initial)))}
    colors = [remap[sig] for sig in initial]

    best: dict[str, object] = {"cert": None, "order": None}

    def search(colors: list[int]) -> None:
        colors = _refine(graph, colors, orders)
        cells: dict[int, list[int]] = {}
        for atom_id, color in enumerate(colors):
            cells.setdefault(color, []).append(atom_id)
        target = None
        for color in sorted(cells):
            if len(cells[color]) > 1:
                target = cells[color]
                break
        if target is None:
            order = sorted(range(n), key=lambda a: colors[a])
            cert = _certificate_for_order(graph, order, orders)
            if best["cert"] is None or cert < best["cert"]:
                best["cert"] = cert
                best["order"] = order
            return
        bumped = max(colors) + 1
        for atom_id in target:
            branch = list(colors)
            branch[atom_id] = bumped
            search(branch)

    search(colors)
    return list(best["order"])  # type: ignore[arg-type]


def canonical_ranks(graph: MolGraph,
                    blurred: set[frozenset[int]] | None = None,
                    extra: list | None = None) -> list[int]:
    """atom id -> canonical position."""
    ranks = [0] * graph.n
    for position, atom_id in enumerate(canonical_order(graph, blurred, extra)):
        ranks[atom_id] = position
    return ranks


def certificate(graph: MolGraph) -> tuple:
    cached = graph._cert_cache.get("plain")
    if cached is None:
        cached = _certificate_for_order(
            graph, canonical_order(graph), _bond_orders(graph, None))
        graph._cert_cache["plain"] = cached
    return cached


def canonical_kekulize(graph: MolGraph, extra: list | None = None) -> MolGraph:
    """Re-assign aromatic-ring alternations in a labeling-independent way."""
    arom_pairs = aromatic_bond_pairs(graph)
    if not arom_pairs:
        return graph
    carriers: set[int] = set()
    double_count: dict[int, int] = {}
    for bond in graph.bonds:
        pair = frozenset((bond.a, bond.b))
        if pair in arom_pairs and bond.order == 2:
            carriers.add(bond.a)
            carriers.add(bond.b)
            double_count[bond.a] = double_count.get(bond.a, 0) + 1
            double_count[bond.b] = double_count.get(bond.b, 0) + 1
    if any(count >= 2 for count in double_count.values()):
        # the existing doubles do not form a matching; keep orders as-is
        return graph
    ranks = canonical_ranks(graph, blurred=arom_pairs, extra=extra)
    rank_map = {i: ranks[i] for i in range(graph.n)}
    edges: dict[int, list[int]] = {}
    for pair in arom_pairs:
        a, b = tuple(pair)
        if a in carriers and b in carriers:
            edges.setdefault(a, []).append(b)
            edges.setdefault(b, []).append(a)
    mate = _perfect_matching(sorted(carriers, key=lambda a: rank_map[a]), edges, rank_map)
    if mate is None:  # cannot happen: the current assignment is itself a matching
        return graph
    matched = {frozenset((a, b)) for a, b in mate.items()}
    bonds = []
    for bond in graph.bonds:
        pair = frozenset((bond.a, bond.b))
        if pair in arom_pairs:
            order = 2 if pair in matched else 1
        else:
            order = bond.order
        bonds.append(Bond(bond.a, bond.b, order, bond.annot))
    return MolGraph(graph.atoms, tuple(bonds), graph.table)


def _kekule_certificate(graph: MolGraph) -> tuple:
    cached = graph._cert_cache.get("kekule")
    if cached is None:
        cached = certificate(canonical_kekulize(graph))
        graph._cert_cache["kekule"] = cached
    return cached


def isomorphic(a: MolGraph, b: MolGraph) -> bool:
    """Bijection preserving element, charge, explicit H, and bond orders.

    Kekule-equivalent aromatic forms compare equal; stereo annotations and
    aromatic flags do not participate.
    """
    if a.n != b.n or len(a.bonds) != len(b.bonds):
        return False
    if sorted((x.element, x.charge, x.explicit_h) for x in a.atoms) != \
       sorted((x.element, x.charge, x.explicit_h) for x in b.atoms):
        return False
    return _kekule_certificate(a) == _kekule_certificate(b)
