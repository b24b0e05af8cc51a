"""Molecule -> token encoding with group recognition; exact inverse of decode.

Matching: groups are tried in matching order (priority, then size);
embeddings are enumerated by the matcher backend, deduplicated per atom
set, sorted, and accepted greedily when disjoint from earlier matches
and when every bond leaving the matched set fits through an attachment
point with spare capacity.

Traversal: matched groups contract to supernodes.  A depth-first walk
from the canonically smallest atom emits tokens while feeding them to a
live decoder engine; the engine *is* the bookkeeping, so attachment
navigation, implicit branch returns, and branchpoints consumed by group
exits are read off the real decoder state instead of being re-derived.
Every bond not covered by a spanning-tree step becomes a ring directive
emitted at the later-visited endpoint, so ring counts always point
backward in placement order.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from weakref import WeakKeyDictionary

from .canon import canonical_ranks
from .decoder import _AT_ATOM, _AT_ATTACH, _AT_GIDX, DecoderEngine, decode
from .errors import EncodeError, GroupError
from .groups import EMPTY_GROUPSET, Group, GroupSet
from .matcher import MatchPlan, PackedGraph, enumerate_embeddings
from .molgraph import MolGraph
from .tokens import ATOM, BRANCH, DIGIT_TOKENS, GROUP, POP, RING, Token

_POP = Token(POP)
_BRANCH = Token(BRANCH)

_plan_cache: "WeakKeyDictionary[Group, MatchPlan]" = WeakKeyDictionary()


def _plan_for(group: Group) -> MatchPlan:
    plan = _plan_cache.get(group)
    if plan is None:
        plan = MatchPlan(PackedGraph(group.template))
        _plan_cache[group] = plan
    return plan


@dataclass
class GroupMatch:
    group: Group
    mapping: tuple[int, ...]                 # template atom -> molecule atom
    attach_of_bond: dict[frozenset[int], int]  # external bond -> attachment index
    atoms: frozenset[int] = field(init=False)
    inverse: dict[int, int] = field(init=False)

    def __post_init__(self):
        self.atoms = frozenset(self.mapping)
        self.inverse = {mol: tpl for tpl, mol in enumerate(self.mapping)}


def _assign_attachments(mol: MolGraph, group: Group,
                        mapping: tuple[int, ...]) -> dict[frozenset[int], int] | None:
    """Route every bond leaving the image through an attachment point.

    Per host atom, bonds are placed largest-order first with
    backtracking over that atom's attachments in index order; returns
    None when some atom's external bonds cannot all be covered.
    """
    atoms = set(mapping)
    inverse = {mol_atom: tpl for tpl, mol_atom in enumerate(mapping)}
    external: dict[int, list[tuple[int, frozenset[int]]]] = {}
    for bond in mol.bonds:
        a_in, b_in = bond.a in atoms, bond.b in atoms
        if a_in == b_in:
            continue  # internal template bond, or entirely outside
        inside = bond.a if a_in else bond.b
        external.setdefault(inverse[inside], []).append(
            (bond.order, frozenset((bond.a, bond.b))))
    markers_at: dict[int, list] = {}
    for marker in group.attachments:
        markers_at.setdefault(marker.host, []).append(marker)
    assignment: dict[frozenset[int], int] = {}
    for tpl_atom in sorted(external):
        bonds = sorted(external[tpl_atom],
                       key=lambda item: (-item[0], sorted(item[1])))
        markers = markers_at.get(tpl_atom)
        if not markers:
            return None
        remaining = {m.index: m.valency_cap for m in markers}

        def place(idx: int) -> bool:
            if idx == len(bonds):
                return True
            order, pair = bonds[idx]
            for marker in markers:
                if remaining[marker.index] >= order:
                    remaining[marker.index] -= order
                    assignment[pair] = marker.index
                    if place(idx + 1):
                        return True
                    remaining[marker.index] += order
                    del assignment[pair]
            return False

        if not place(0):
            return None
    return assignment


def match_groups(mol: MolGraph, groupset: GroupSet) -> list[GroupMatch]:
    """Greedy non-overlapping substructure matches, deterministic order."""
    if len(groupset) == 0 or mol.n == 0:
        return []
    packed = PackedGraph(mol)
    used = [0] * mol.n
    matches: list[GroupMatch] = []
    for group in groupset.groups_in_matching_order():
        if group.size > mol.n:
            continue
        embeddings = enumerate_embeddings(_plan_for(group), packed, used)
        if not embeddings:
            continue
        by_atom_set: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
        for mapping in embeddings:
            by_atom_set.setdefault(tuple(sorted(mapping)), []).append(mapping)
        for key in sorted(by_atom_set):
            if any(used[a] for a in key):
                continue
            # automorphic images differ in which template atom lands where,
            # so try them in order until one routes every external bond
            for mapping in sorted(by_atom_set[key]):
                assignment = _assign_attachments(mol, group, mapping)
                if assignment is not None:
                    for atom in mapping:
                        used[atom] = 1
                    matches.append(GroupMatch(group, mapping, assignment))
                    break
    return matches


class _Edge:
    __slots__ = ("a", "b", "order", "annot", "handled")

    def __init__(self, a: int, b: int, order: int, annot: str | None):
        self.a = a
        self.b = b
        self.order = order
        self.annot = annot
        self.handled = False

    @property
    def pair(self) -> frozenset[int]:
        return frozenset((self.a, self.b))

    def other(self, atom: int) -> int:
        return self.b if atom == self.a else self.a


def _modifier_for(order: int, annot: str | None) -> str:
    if annot in ("/", "\\"):
        return annot
    return {1: "", 2: "=", 3: "#"}[order]


class _Encoder:
    def __init__(self, mol: MolGraph, groupset: GroupSet):
        self.mol = mol
        self.groupset = groupset
        self.matches = match_groups(mol, groupset)
        self.ranks = canonical_ranks(mol)
        self.node_of: dict[int, tuple] = {}
        for idx, match in enumerate(self.matches):
            for atom in match.atoms:
                self.node_of[atom] = ("grp", idx)
        for atom in range(mol.n):
            self.node_of.setdefault(atom, ("atom", atom))
        self.edges_at: dict[tuple, list[_Edge]] = {}
        for bond in mol.bonds:
            node_a, node_b = self.node_of[bond.a], self.node_of[bond.b]
            if node_a == node_b:
                continue  # template-internal bond of one match
            edge = _Edge(bond.a, bond.b, bond.order, bond.annot)
            self.edges_at.setdefault(node_a, []).append(edge)
            self.edges_at.setdefault(node_b, []).append(edge)
        for node, edges in self.edges_at.items():
            edges.sort(key=lambda e: self._edge_key(node, e))
        self.visited: set[tuple] = set()
        self.engine = DecoderEngine(groupset)
        self.pos: dict[int, int] = {}
        self.out: list[Token] = []

    def _edge_key(self, node: tuple, edge: _Edge):
        near = edge.a if self.node_of[edge.a] == node else edge.b
        far = edge.other(near)
        return (self.ranks[far], self.ranks[near], edge.order, edge.annot or "")

    def _emit(self, token: Token) -> None:
        self.out.append(token)
        self.engine.feed(token)

    def run(self) -> list[Token]:
        mol = self.mol
        if mol.n == 0:
            return []
        start_atom = self.ranks.index(0)
        start_node = self.node_of[start_atom]
        if start_node[0] == "atom":
            self._visit_atom(start_atom, "")
        else:
            self._visit_group(start_node[1], None, "")
        return self.out

    # -- node visits -------------------------------------------------

    def _visit_atom(self, atom: int, modifier: str) -> None:
        mol_atom = self.mol.atoms[atom]
        node = ("atom", atom)
        self.visited.add(node)
        self.pos[atom] = self.engine.builder.n
        self._emit(Token(ATOM, modifier, element=mol_atom.element,
                         charge=mol_atom.charge, explicit_h=mol_atom.explicit_h))
        assert self.engine.current == (_AT_ATOM, self.pos[atom]), \
            "encoder/decoder desync at atom placement"
        edges = self.edges_at.get(node, [])
        for idx, edge in enumerate(edges):
            if edge.handled:
                continue
            far = edge.other(atom)
            far_node = self.node_of[far]
            edge.handled = True
            if far_node in self.visited:
                self._emit_ring(atom, far, edge)
                continue
            trailing = any(not e.handled for e in edges[idx + 1:])
            depth_before = len(self.engine.stack)
            if trailing:
                self._emit(_BRANCH)
            self._enter_child(edge, far)
            if trailing:
                if len(self.engine.stack) > depth_before:
                    self._emit(_POP)
                assert self.engine.current == (_AT_ATOM, self.pos[atom]), \
                    "encoder did not return to branchpoint"

    def _visit_group(self, match_idx: int, entry_edge: _Edge | None,
                     modifier: str) -> None:
        match = self.matches[match_idx]
        node = ("grp", match_idx)
        self.visited.add(node)
        if entry_edge is not None:
            start = match.attach_of_bond[entry_edge.pair]
        else:
            start = 0
        base = self.engine.builder.n
        for tpl_idx, mol_atom in enumerate(match.mapping):
            self.pos[mol_atom] = base + tpl_idx
        self._emit(Token(GROUP, modifier, start_index=start,
                         name=match.group.name))
        assert self.engine.current[0] == _AT_GIDX, "group placement desync"
        frame = self.engine.current[1]
        assert frame.base == base
        for edge in self.edges_at.get(node, []):
            if edge.handled:
                continue
            near = edge.a if edge.a in match.atoms else edge.b
            far = edge.other(near)
            attach_idx = match.attach_of_bond[edge.pair]
            edge.handled = True
            self._emit_index(frame, attach_idx)
            assert self.engine.current == (_AT_ATTACH, frame, attach_idx), \
                "attachment navigation desync"
            if self.node_of[far] in self.visited:
                self._emit_ring(near, far, edge)
                self._emit(_POP)
            else:
                self._enter_child(edge, far)
                if self.engine.current != (_AT_GIDX, frame):
                    self._emit(_POP)
            assert self.engine.current == (_AT_GIDX, frame), \
                "encoder did not return to group index loop"
        self._emit(_POP)  # exit the group

    def _enter_child(self, edge: _Edge, far: int) -> None:
        modifier = _modifier_for(edge.order, edge.annot)
        far_node = self.node_of[far]
        if far_node[0] == "atom":
            self._visit_atom(far, modifier)
        else:
            self._visit_group(far_node[1], edge, modifier)

    # -- directives ---------------------------------------------------

    def _emit_index(self, frame, attach_idx: int) -> None:
        count = frame.group.attachment_count
        relative = (attach_idx - frame.cur_idx) % count
        self._emit(DIGIT_TOKENS[relative])

    def _emit_ring(self, source: int, target: int, edge: _Edge) -> None:
        distance = self.pos[source] - self.pos[target]
        assert distance > 0, "ring partner must be placed earlier"
        if distance >= 4096:
            raise EncodeError(
                "molecule too large for ring addressing (distance needs > 3 digits)")
        arity = 1 if distance < 16 else (2 if distance < 256 else 3)
        self._emit(Token(RING, _modifier_for(edge.order, edge.annot),
                         arity=arity))
        for shift in range(arity - 1, -1, -1):
            self._emit(DIGIT_TOKENS[(distance >> (4 * shift)) & 15])


def encode(mol: MolGraph, groupset: GroupSet = EMPTY_GROUPSET) -> list[Token]:
    """Deterministic token encoding; decode(encode(m)) is isomorphic to m."""
    for atom_id, atom in enumerate(mol.atoms):
        if not groupset.table.supports(atom.element):
            raise EncodeError(
                f"atom {atom_id} has element {atom.element!r} outside the "
                "dialect's valence table")
    if mol.n == 0:
        return []
    if len(mol.components()) != 1:
        raise EncodeError("only connected molecules can be encoded")
    limit = 3 * mol.n + 200
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)
    return _Encoder(mol, groupset).run()


def expand_groups(tokens: list[Token], groupset: GroupSet) -> list[Token]:
    """Replace group mechanics by an equivalent fully atomic stream.

    Group-free inputs pass through unchanged; otherwise the stream is
    decoded under its dialect and re-encoded against the empty dialect,
    which preserves decode semantics exactly.
    """
    unknown = sorted({t.name for t in tokens
                      if t.kind == GROUP and t.name not in groupset})
    if unknown:
        raise GroupError(f"unknown group name(s): {unknown}")
    if not any(t.kind == GROUP for t in tokens):
        return list(tokens)
    mol = decode(tokens, groupset)
    if mol.n == 0:
        return []
    return encode(mol, GroupSet(table=groupset.table))
