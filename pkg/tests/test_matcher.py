import itertools
import random

from gselfies.matcher import (MatchPlan, PackedGraph, enumerate_embeddings,
                              enumerate_embeddings_pure)
from gselfies.molgraph import GraphBuilder
from gselfies.smiles import parse_smiles, parse_template

from oracles import brute_embeddings

TEMPLATES = [
    "C(*1)",                      # methyl
    "O(*1)",                      # hydroxy
    "C(*1)C",                     # ethyl
    "C(*1)=O",                    # carbonyl
    "C(*1)(F)F",                  # difluoromethylene
    "C(*1)(*1)C=O",               # branch point
    "N(*1)C(*1)=O",               # amide core
    "C(*1)C(*1)C",                # propylene
    "C1CC1(*1)",                  # cyclopropane
    "C(*1)(C)(C)C",               # tert-butyl
    "N(*2)C",                     # cap-2 nitrogen
]

MOLECULES = [
    "CCO", "CC=O", "CC(=O)N", "CC(=O)NC", "FC(F)C", "CC(C)(C)C", "C1CC1C",
    "CCC(C)C", "OCC=O", "NC(=O)CF", "CC(=O)OC", "C1CCC1", "CC1CC1C",
    "O=CC=O", "CNC(=O)C", "FC(F)(F)CO",
]


def as_sorted(embeddings):
    return sorted(embeddings)


def test_matcher_agrees_with_brute_force_on_small_instances():
    checked = 0
    for tpl_text in TEMPLATES:
        template, _ = parse_template(tpl_text)
        assert template.n <= 5
        plan = MatchPlan(PackedGraph(template))
        for mol_text in MOLECULES:
            mol = parse_smiles(mol_text)
            assert mol.n <= 8
            fast = as_sorted(enumerate_embeddings_pure(plan, PackedGraph(mol),
                                                       [0] * mol.n))
            oracle = brute_embeddings(template, mol)
            assert fast == oracle, (tpl_text, mol_text)
            checked += 1
    assert checked == len(TEMPLATES) * len(MOLECULES)


def test_matcher_respects_forbidden_mask():
    template, _ = parse_template("C(*1)")
    mol = parse_smiles("CCC")
    plan = MatchPlan(PackedGraph(template))
    packed = PackedGraph(mol)
    assert len(enumerate_embeddings_pure(plan, packed, [0, 0, 0])) == 3
    masked = enumerate_embeddings_pure(plan, packed, [1, 0, 0])
    assert as_sorted(masked) == [(1,), (2,)]
    oracle = brute_embeddings(template, mol, forbidden=[0])
    assert as_sorted(masked) == oracle


def random_molecule(rng: random.Random):
    builder = GraphBuilder()
    n = rng.randint(2, 10)
    elements = ["C", "C", "C", "N", "O", "S"]
    for _ in range(n):
        builder.add_atom(rng.choice(elements))
    for i in range(1, builder.n):
        j = rng.randrange(i)
        order = rng.choice([1, 1, 1, 2])
        if builder.free[i] >= order and builder.free[j] >= order:
            builder.add_bond(i, j, order)
    for _ in range(2):
        i, j = rng.randrange(builder.n), rng.randrange(builder.n)
        if i != j and not builder.has_bond(i, j) \
                and builder.free[i] >= 1 and builder.free[j] >= 1:
            builder.add_bond(i, j, 1)
    return builder.finish()


def test_backends_identical_on_random_graphs(small_set):
    rng = random.Random(99)
    plans = [MatchPlan(PackedGraph(g.template))
             for g in small_set.groups_in_matching_order()]
    for _ in range(120):
        mol = random_molecule(rng)
        packed = PackedGraph(mol)
        forbidden = [rng.choice([0, 0, 0, 1]) for _ in range(mol.n)]
        for plan in plans:
            fast = enumerate_embeddings(plan, packed, forbidden)
            pure = enumerate_embeddings_pure(plan, packed, forbidden)
            assert fast == pure  # identical content AND order


def test_backends_identical_on_corpus(corpus_sample, groups53):
    plans = [MatchPlan(PackedGraph(g.template))
             for g in groups53.groups_in_matching_order()[:10]]
    for mol in corpus_sample[:40]:
        packed = PackedGraph(mol)
        forbidden = [0] * mol.n
        for plan in plans:
            assert enumerate_embeddings(plan, packed, forbidden) == \
                enumerate_embeddings_pure(plan, packed, forbidden)


def test_exhaustive_tiny_graph_battery():
    """All connected 4-vertex carbon graphs vs all 3-vertex templates."""
    vertices = range(4)
    all_edges = list(itertools.combinations(vertices, 2))
    templates = []
    for tpl_edges in [[(0, 1)], [(0, 1), (1, 2)], [(0, 1), (1, 2), (0, 2)]]:
        builder = GraphBuilder()
        for _ in range(max(max(e) for e in tpl_edges) + 1):
            builder.add_atom("C")
        for a, b in tpl_edges:
            builder.add_bond(a, b, 1)
        templates.append(builder.finish())
    count = 0
    for mask in range(1 << len(all_edges)):
        edges = [e for i, e in enumerate(all_edges) if mask >> i & 1]
        if len(edges) < 3:
            continue
        builder = GraphBuilder()
        for _ in vertices:
            builder.add_atom("C")
        ok = True
        for a, b in edges:
            if builder.free[a] < 1 or builder.free[b] < 1:
                ok = False
                break
            builder.add_bond(a, b, 1)
        if not ok:
            continue
        mol = builder.finish()
        if len(mol.components()) != 1:
            continue
        for template in templates:
            plan = MatchPlan(PackedGraph(template))
            fast = as_sorted(
                enumerate_embeddings_pure(plan, PackedGraph(mol), [0] * mol.n))
            assert fast == brute_embeddings(template, mol)
            count += 1
    assert count > 50
