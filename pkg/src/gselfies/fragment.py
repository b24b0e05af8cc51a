"""Corpus fragmentation and group-set extraction.

The cleavage rule cuts every acyclic single bond touching a ring atom,
which separates ring systems from their side chains (and from each
other); each cut position becomes a cap-1 attachment point.  Candidate
templates are merged by an attachment-aware canonical form, scored by
occurrence count times size, and selected either by score or by greedy
max-min diversity over a hashed path fingerprint.
"""

from __future__ import annotations

import logging
import zlib
from dataclasses import dataclass

from .canon import canonical_kekulize, canonical_order
from .groups import (GroupSet, MAX_ATTACHMENTS, MAX_TEMPLATE_ATOMS, make_group)
from .molgraph import GraphBuilder, MolGraph
from .smiles import AttachmentMarker, write_smiles
from .valence import DEFAULT_VALENCE, ValenceTable

logger = logging.getLogger(__name__)

_FP_BITS = 1024
_FP_PATH_LEN = 5  # bonds per fingerprint path


@dataclass(frozen=True)
class FragmentTemplate:
    graph: MolGraph
    attachments: tuple[AttachmentMarker, ...]
    text: str  # attachment-aware canonical template string


def _canonical_template(graph: MolGraph,
                        caps_at: dict[int, list[int]]) -> FragmentTemplate:
    """Relabel a fragment into attachment-aware canonical form."""
    extra = [tuple(sorted(caps_at.get(i, ()))) for i in range(graph.n)]
    rekek = canonical_kekulize(graph, extra=extra)
    order = canonical_order(rekek, extra=extra)
    position = {atom_id: idx for idx, atom_id in enumerate(order)}
    builder = GraphBuilder(graph.table)
    for atom_id in order:
        atom = rekek.atoms[atom_id]
        builder.add_atom(atom.element, atom.charge, atom.explicit_h, atom.aromatic)
    for bond in sorted(rekek.bonds,
                       key=lambda b: (min(position[b.a], position[b.b]),
                                      max(position[b.a], position[b.b]))):
        builder.add_bond(position[bond.a], position[bond.b], bond.order, bond.annot)
    relabeled = builder.finish()
    markers = []
    for host in sorted(caps_at, key=lambda a: position[a]):
        for cap in sorted(caps_at[host]):
            markers.append(AttachmentMarker(position[host], cap, len(markers)))
    markers_tuple = tuple(markers)
    return FragmentTemplate(relabeled, markers_tuple,
                            write_smiles(relabeled, markers_tuple))


def naive_fragment(mol: MolGraph) -> list[FragmentTemplate]:
    """Cleave acyclic single bonds touching ring atoms; one template per piece.

    A molecule with no cuttable bond yields itself as a single template
    with no attachments (filtered out by group-set construction).
    """
    ring_atoms = mol.ring_atoms()
    ring_pairs = mol.ring_bonds()
    cut: set[frozenset[int]] = set()
    for bond in mol.bonds:
        pair = frozenset((bond.a, bond.b))
        if pair in ring_pairs or bond.order != 1:
            continue
        if bond.a in ring_atoms or bond.b in ring_atoms:
            cut.add(pair)
    kept_bonds = [b for b in mol.bonds if frozenset((b.a, b.b)) not in cut]
    # connected components of the cut graph
    adj: dict[int, list[int]] = {i: [] for i in range(mol.n)}
    for bond in kept_bonds:
        adj[bond.a].append(bond.b)
        adj[bond.b].append(bond.a)
    comp_of = [-1] * mol.n
    comps = 0
    for start in range(mol.n):
        if comp_of[start] >= 0:
            continue
        stack = [start]
        comp_of[start] = comps
        while stack:
            node = stack.pop()
            for nbr in adj[node]:
                if comp_of[nbr] < 0:
                    comp_of[nbr] = comps
                    stack.append(nbr)
        comps += 1
    out: list[FragmentTemplate] = []
    for comp in range(comps):
        atoms = [i for i in range(mol.n) if comp_of[i] == comp]
        local = {atom: idx for idx, atom in enumerate(atoms)}
        builder = GraphBuilder(mol.table)
        for atom_id in atoms:
            atom = mol.atoms[atom_id]
            builder.add_atom(atom.element, atom.charge, atom.explicit_h,
                             atom.aromatic)
        for bond in kept_bonds:
            if bond.a in local and bond.b in local:
                builder.add_bond(local[bond.a], local[bond.b], bond.order,
                                 bond.annot)
        caps_at: dict[int, list[int]] = {}
        for pair in cut:
            for endpoint in pair:
                if endpoint in local:
                    caps_at.setdefault(local[endpoint], []).append(1)
        out.append(_canonical_template(builder.finish(), caps_at))
    return out


def _fingerprint(template: FragmentTemplate) -> frozenset[int]:
    """Hashed multiset of element/order paths up to _FP_PATH_LEN bonds."""
    graph = template.graph
    bits: set[int] = set()
    labels = [
        f"{a.element}{a.charge:+d}" if a.charge else a.element
        for a in graph.atoms]

    def grow(path_atoms: list[int], text: str) -> None:
        bits.add(zlib.crc32(text.encode()) % _FP_BITS)
        if len(path_atoms) > _FP_PATH_LEN:
            return
        last = path_atoms[-1]
        for nbr, order in graph.neighbors(last):
            if nbr in path_atoms:
                continue
            grow(path_atoms + [nbr], f"{text}{order}{labels[nbr]}")

    for start in range(graph.n):
        grow([start], labels[start])
    return frozenset(bits)


def _tanimoto_distance(a: frozenset[int], b: frozenset[int]) -> float:
    union = len(a | b)
    if union == 0:
        return 0.0
    return 1.0 - len(a & b) / union


def fragment_corpus(corpus: list[MolGraph]) -> dict[str, tuple[int, FragmentTemplate]]:
    """Candidate templates with occurrence counts, keyed by canonical text."""
    candidates: dict[str, tuple[int, FragmentTemplate]] = {}
    for mol in corpus:
        for template in naive_fragment(mol):
            if not template.attachments:
                continue
            if template.graph.n > MAX_TEMPLATE_ATOMS:
                continue
            if len(template.attachments) > MAX_ATTACHMENTS:
                continue
            entry = candidates.get(template.text)
            candidates[template.text] = (
                (entry[0] + 1, entry[1]) if entry else (1, template))
    return candidates


def build_groupset(corpus: list[MolGraph], k: int, strategy: str = "frequency",
                   table: ValenceTable = DEFAULT_VALENCE) -> GroupSet:
    """Extract k groups from a corpus; strategy 'frequency' or 'diverse'.

    Score is occurrence count times template size.  Diverse selection is
    greedy max-min on fingerprint distance, seeded by the top scorer.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if strategy not in ("frequency", "diverse"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if not corpus:
        raise ValueError("corpus is empty")
    candidates = fragment_corpus(corpus)
    scored = sorted(
        ((count * tpl.graph.n, text, tpl)
         for text, (count, tpl) in candidates.items()),
        key=lambda item: (-item[0], item[1]))
    if k > len(scored):
        logger.warning("requested %d groups but only %d candidates; using all",
                       k, len(scored))
        k = len(scored)
    if strategy == "frequency":
        chosen = scored[:k]
    else:
        fingerprints = {text: _fingerprint(tpl) for _, text, tpl in scored}
        chosen = [scored[0]]
        remaining = scored[1:]
        while remaining and len(chosen) < k:
            best = None  # (nearest, score, text, item); max dist, max score, min text
            for item in remaining:
                nearest = min(
                    _tanimoto_distance(fingerprints[item[1]], fingerprints[sel[1]])
                    for sel in chosen)
                candidate = (nearest, item[0], item[1], item)
                if best is None \
                        or (candidate[0], candidate[1]) > (best[0], best[1]) \
                        or ((candidate[0], candidate[1]) == (best[0], best[1])
                            and candidate[2] < best[2]):
                    best = candidate
            chosen.append(best[3])
            remaining.remove(best[3])
    groups = [
        make_group(f"g{rank + 1}", tpl.text, table=table)
        for rank, (_, text, tpl) in enumerate(chosen)]
    return GroupSet(groups, table)
