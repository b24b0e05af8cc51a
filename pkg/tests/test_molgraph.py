import pytest

from gselfies.errors import GraphError
from gselfies.molgraph import GraphBuilder, find_bridges, simple_cycles_upto, validate
from gselfies.smiles import parse_smiles
from gselfies.valence import DEFAULT_VALENCE, ValenceTable


def test_valence_table_entries():
    table = DEFAULT_VALENCE
    assert table.max_valence("C") == 4
    assert table.max_valence("O") == 2
    assert table.max_valence("N", 1) == 4  # cation gains a slot
    assert table.max_valence("N", -1) == 2
    assert table.max_valence("S") == 6
    with pytest.raises(KeyError):
        table.max_valence("Zz")


def test_valence_table_from_json(tmp_path):
    path = tmp_path / "table.json"
    path.write_text('{"C": 4, "N": 3}')
    table = ValenceTable.from_json(path)
    assert table.supports("C") and not table.supports("O")


def test_free_valence_examples():
    mol = parse_smiles("CC")  # neutral C with one single bond
    assert mol.free_valence(0) == 3
    mol = parse_smiles("O=C")  # neutral O with one double bond
    assert mol.free_valence(0) == 0
    mol = parse_smiles("C[N+](C)C")  # N+ with three single bonds -> 4 - 3
    n_id = next(i for i, a in enumerate(mol.atoms) if a.element == "N")
    assert mol.atoms[n_id].charge == 1
    assert mol.free_valence(n_id) == 1


def test_free_valence_unknown_atom():
    mol = parse_smiles("C")
    with pytest.raises(GraphError):
        mol.free_valence(5)


def test_builder_rejects_overflow_and_parallel():
    builder = GraphBuilder()
    a = builder.add_atom("C")
    b = builder.add_atom("O")
    builder.add_bond(a, b, 2)
    with pytest.raises(GraphError):
        builder.add_bond(a, b, 1)  # parallel
    c = builder.add_atom("O")
    with pytest.raises(GraphError):
        builder.add_bond(b, c, 1)  # O already saturated
    with pytest.raises(GraphError):
        builder.add_bond(c, c, 1)  # self bond
    with pytest.raises(GraphError):
        builder.add_atom("C", explicit_h=5)


def test_validate_passes_on_corpus_head(corpus_sample):
    for mol in corpus_sample[:50]:
        validate(mol)


def test_ring_count_is_cyclomatic():
    assert parse_smiles("c1ccccc1").ring_count() == 1
    assert parse_smiles("c1ccc2ccccc2c1").ring_count() == 2
    assert parse_smiles("CCC").ring_count() == 0
    assert parse_smiles("CC.C1CC1").ring_count() == 1


def test_bridges_and_cycles():
    mol = parse_smiles("Cc1ccccc1")
    bridges = find_bridges(mol)
    assert frozenset((0, 1)) in bridges
    assert len(mol.ring_bonds()) == 6
    cycles = simple_cycles_upto(mol, 7)
    assert len(cycles) == 1 and len(cycles[0]) == 6


def test_components():
    assert len(parse_smiles("CC.OC.N").components()) == 3
