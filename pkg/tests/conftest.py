import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gselfies.groups import GroupSet, load_groupset, make_group
from gselfies.smiles import read_corpus

DATA = Path(__file__).parent.parent / "src" / "gselfies" / "data"

CELECOXIB = "Cc1ccc(cc1)-c1cc(nn1-c1ccc(cc1)S(N)(=O)=O)C(F)(F)F"


@pytest.fixture(scope="session")
def corpus_path() -> Path:
    return DATA / "corpus.smi"


@pytest.fixture(scope="session")
def corpus(corpus_path):
    load = read_corpus(corpus_path)
    assert load.skipped == 0
    return load.molecules


@pytest.fixture(scope="session")
def corpus_sample(corpus):
    return corpus[:250]


@pytest.fixture(scope="session")
def groups53_path() -> Path:
    return DATA / "groups53.json"


@pytest.fixture(scope="session")
def groups53(groups53_path) -> GroupSet:
    return load_groupset(groups53_path)


@pytest.fixture(scope="session")
def celecoxib_groups() -> GroupSet:
    return load_groupset(DATA / "celecoxib_groups.json")


@pytest.fixture(scope="session")
def benzene_set() -> GroupSet:
    return GroupSet([make_group("benzene", "c1(*1)c(*1)c(*1)c(*1)c(*1)c1*1")])


@pytest.fixture(scope="session")
def small_set() -> GroupSet:
    return GroupSet([
        make_group("benzene", "c1(*1)c(*1)c(*1)c(*1)c(*1)c1*1"),
        make_group("cf3", "C(*1)(F)(F)F"),
        make_group("amide", "C(*1)(=O)N(*2)"),
        make_group("thiophene", "c1(*1)cc(*1)cs1"),
    ])
