"""Kekulization and structural aromatic-ring perception.

Kekulization resolves aromatic-flagged ring systems into alternating
single/double bonds by perfect matching on the subgraph of atoms that
still need a double bond.  Perception works the other way around: a ring
of size 5-7 counts as aromatic when its integer bond orders already form
such an alternation (lone-pair donors like O, S and pyrrole-type N are
exempt from needing a double).
"""

from __future__ import annotations

from .errors import KekulizationError
from .molgraph import GraphBuilder, MolGraph, simple_cycles_upto

# Capacities used only to decide which aromatic atoms require a double
# bond; S and P use their octet values here, otherwise thiophene-type
# sulfur would demand a double it cannot have.
_KEKULE_CAPACITY = {"B": 3, "C": 4, "N": 3, "O": 2, "S": 2, "P": 3}


def _pi_capacity(element: str, charge: int) -> int:
    base = _KEKULE_CAPACITY.get(element, 1)
    return max(base + charge, 0)


def _needs_double(graph: MolGraph, atom_id: int, pi_pairs: set[frozenset[int]]) -> bool:
    atom = graph.atoms[atom_id]
    used = atom.explicit_h
    for nbr, order in graph.neighbors(atom_id):
        if order >= 2 and frozenset((atom_id, nbr)) in pi_pairs:
            return False  # already satisfied by an existing ring double
        used += order
    return _pi_capacity(atom.element, atom.charge) - used >= 1


def _perfect_matching(need: list[int], edges: dict[int, list[int]],
                      rank: dict[int, int]) -> dict[int, int] | None:
    """Deterministic backtracking perfect matching on the needing set.

    Atoms are processed in `rank` order, partners tried in `rank` order;
    aromatic systems are small, so backtracking cost is negligible.
    """
    order = sorted(need, key=lambda a: rank[a])
    mate: dict[int, int] = {}

    def extend() -> bool:
        pick = next((a for a in order if a not in mate), None)
        if pick is None:
            return True
        for partner in sorted(edges.get(pick, ()), key=lambda a: rank[a]):
            if partner in mate:
                continue
            mate[pick] = partner
            mate[partner] = pick
            if extend():
                return True
            del mate[pick]
            del mate[partner]
        return False

    return mate if extend() else None


def kekulize(graph: MolGraph, rank: dict[int, int] | None = None) -> MolGraph:
    """Assign alternating orders to aromatic-flagged ring systems.

    `rank` fixes the matching order (defaults to atom ids); passing
    canonical ranks makes the assignment independent of input labeling.
    Raises :class:`KekulizationError` when no perfect matching exists.
    """
    flagged = {i for i, atom in enumerate(graph.atoms) if atom.aromatic}
    if not flagged:
        return graph
    ring_pairs = graph.ring_bonds()
    pi_pairs = {
        frozenset((bond.a, bond.b)) for bond in graph.bonds
        if bond.a in flagged and bond.b in flagged
        and frozenset((bond.a, bond.b)) in ring_pairs
    }
    if rank is None:
        rank = {i: i for i in range(graph.n)}
    need = [a for a in sorted(flagged, key=lambda x: rank[x])
            if _needs_double(graph, a, pi_pairs)]
    edges: dict[int, list[int]] = {}
    need_set = set(need)
    for pair in pi_pairs:
        a, b = tuple(pair)
        if a in need_set and b in need_set:
            edges.setdefault(a, []).append(b)
            edges.setdefault(b, []).append(a)
    mate = _perfect_matching(need, edges, rank)
    if mate is None:
        raise KekulizationError(
            "aromatic system cannot be kekulized (no alternating assignment)")

    builder = GraphBuilder(graph.table)
    for atom in graph.atoms:
        builder.add_atom(atom.element, atom.charge, atom.explicit_h, atom.aromatic)
    matched_pairs = {frozenset((a, b)) for a, b in mate.items()}
    for bond in graph.bonds:
        pair = frozenset((bond.a, bond.b))
        order = 2 if (pair in matched_pairs and pair in pi_pairs
                      and bond.order == 1) else bond.order
        builder.add_bond(bond.a, bond.b, order, bond.annot)
    return builder.finish()


def _is_donor(graph: MolGraph, atom_id: int) -> bool:
    atom = graph.atoms[atom_id]
    if atom.element in ("O", "S"):
        return True
    if atom.element == "N":
        if atom.charge < 0 or atom.explicit_h >= 1:
            return True
        return graph.bonded_order(atom_id) >= 3
    return False


def aromatic_rings(graph: MolGraph) -> list[list[int]]:
    """Rings of size 5-7 whose bond orders admit a Kekule alternation.

    Each ring atom must either carry a double bond on some ring bond
    (possibly the shared bond of a fused neighbor, so both Kekule forms
    of naphthalene-like systems qualify) or contribute a lone pair
    (O, S, pyrrole-type N).  Cycle bonds must be single or double and no
    atom may carry two doubles on one cycle.
    """
    cycles = simple_cycles_upto(graph, 7)
    if not cycles:
        return []
    ring_pairs = graph.ring_bonds()
    pi_covered: set[int] = set()
    for bond in graph.bonds:
        if bond.order == 2 and frozenset((bond.a, bond.b)) in ring_pairs:
            pi_covered.add(bond.a)
            pi_covered.add(bond.b)
    out = []
    for cycle in cycles:
        if len(cycle) < 5:
            continue
        k = len(cycle)
        orders = []
        ok = True
        for idx in range(k):
            a, b = cycle[idx], cycle[(idx + 1) % k]
            order = next((o for nbr, o in graph.neighbors(a) if nbr == b), None)
            if order not in (1, 2):
                ok = False
                break
            orders.append(order)
        if not ok:
            continue
        for idx in range(k):
            if orders[idx - 1] == 2 and orders[idx] == 2:
                ok = False  # two doubles on this cycle at one atom
                break
            atom = cycle[idx]
            if atom not in pi_covered and not _is_donor(graph, atom):
                ok = False
                break
        if ok:
            out.append(cycle)
    return out


def perceive_aromatic_atoms(graph: MolGraph) -> set[int]:
    atoms: set[int] = set()
    for cycle in aromatic_rings(graph):
        atoms.update(cycle)
    return atoms


def aromatic_bond_pairs(graph: MolGraph) -> set[frozenset[int]]:
    pairs: set[frozenset[int]] = set()
    for cycle in aromatic_rings(graph):
        k = len(cycle)
        for idx in range(k):
            pairs.add(frozenset((cycle[idx], cycle[(idx + 1) % k])))
    return pairs
