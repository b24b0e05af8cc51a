import pytest

from gselfies.aromatic import kekulize, perceive_aromatic_atoms
from gselfies.canon import isomorphic
from gselfies.errors import KekulizationError
from gselfies.smiles import parse_smiles


def ring_orders(mol, size):
    return sorted(b.order for b in mol.bonds)[:size]


def test_benzene_alternation():
    mol = parse_smiles("c1ccccc1")  # kekulized on load
    assert sorted(b.order for b in mol.bonds) == [1, 1, 1, 2, 2, 2]
    for atom_id in range(6):
        doubles = sum(1 for _, o in mol.neighbors(atom_id) if o == 2)
        assert doubles == 1


def test_pyridine_nitrogen_participates():
    mol = parse_smiles("c1ccncc1")
    n_id = next(i for i, a in enumerate(mol.atoms) if a.element == "N")
    assert sum(1 for _, o in mol.neighbors(n_id) if o == 2) == 1


def test_furan_oxygen_contributes_lone_pair():
    # matching runs on the remaining 4-carbon path: two doubles, O untouched
    mol = parse_smiles("c1ccoc1")
    o_id = next(i for i, a in enumerate(mol.atoms) if a.element == "O")
    assert all(o == 1 for _, o in mol.neighbors(o_id))
    assert sorted(b.order for b in mol.bonds) == [1, 1, 1, 2, 2]


def test_pyrrole_and_thiophene():
    mol = parse_smiles("c1cc[nH]c1")
    n_id = next(i for i, a in enumerate(mol.atoms) if a.element == "N")
    assert all(o == 1 for _, o in mol.neighbors(n_id))
    mol = parse_smiles("c1ccsc1")
    s_id = next(i for i, a in enumerate(mol.atoms) if a.element == "S")
    assert all(o == 1 for _, o in mol.neighbors(s_id))


def test_unkekulizable_rejected():
    with pytest.raises(KekulizationError):
        parse_smiles("c1ccnc1")  # bare-n pyrrole position cannot alternate


def test_kekulize_idempotent_on_own_output(corpus_sample):
    for mol in corpus_sample[:80]:
        again = kekulize(mol)
        assert [b.order for b in again.bonds] == [b.order for b in mol.bonds]


def test_perceive_examples():
    assert len(perceive_aromatic_atoms(parse_smiles("c1ccccc1"))) == 6
    assert perceive_aromatic_atoms(parse_smiles("C1CCCCC1")) == set()
    styrene = parse_smiles("C=Cc1ccccc1")
    marked = perceive_aromatic_atoms(styrene)
    assert len(marked) == 6
    assert 0 not in marked and 1 not in marked  # vinyl carbons excluded


def test_perceive_fused_and_heteroaromatic():
    assert len(perceive_aromatic_atoms(parse_smiles("c1ccc2ccccc2c1"))) == 10
    assert len(perceive_aromatic_atoms(parse_smiles("c1cc[nH]c1"))) == 5
    # benzoquinone's carbonyl carbons have no ring double: not aromatic
    assert perceive_aromatic_atoms(parse_smiles("O=C1C=CC(=O)C=C1")) == set()
    # cyclohexene is not an alternating ring
    assert perceive_aromatic_atoms(parse_smiles("C1=CCCCC1")) == set()


def test_perceive_stable_under_kekulize(corpus_sample):
    for mol in corpus_sample[:80]:
        assert perceive_aromatic_atoms(kekulize(mol)) == perceive_aromatic_atoms(mol)


def test_both_kekule_forms_isomorphic():
    a = parse_smiles("C1=CC=CC=C1")
    b = parse_smiles("C1C=CC=CC=1")  # shifted alternation
    assert isomorphic(a, b)
