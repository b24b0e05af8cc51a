import pytest

from gselfies.errors import GroupError
from gselfies.groups import (EMPTY_GROUPSET, GroupSet, load_groupset,
                             make_group, save_groupset)


def test_make_group_benzene_has_six_indexed_attachments():
    group = make_group("benzene", "c1(*1)c(*1)c(*1)c(*1)c(*1)c1*1")
    assert group.attachment_count == 6
    assert [m.index for m in group.attachments] == list(range(6))
    assert all(m.valency_cap == 1 for m in group.attachments)


def test_name_grammar():
    assert make_group("x1y", "C(*1)C").name == "x1y"
    with pytest.raises(GroupError):
        make_group("1bad", "C(*1)C")
    with pytest.raises(GroupError):
        make_group("has space", "C(*1)C")
    with pytest.raises(GroupError):
        make_group("", "C(*1)C")


def test_template_validation():
    with pytest.raises(GroupError):        # zero attachments
        make_group("g", "CC")
    with pytest.raises(GroupError):        # cap above host free valence
        make_group("g", "C(*9)(F)(F)F")
    with pytest.raises(GroupError):        # overload range
        make_group("g", "C(*1)C", overload=16)
    with pytest.raises(GroupError):        # disconnected template
        make_group("g", "C(*1).C")
    with pytest.raises(GroupError):        # unparseable template
        make_group("g", "C(((")


def test_matching_order_priority_size_name():
    groupset = GroupSet([
        make_group("small", "C(*1)C"),
        make_group("big", "C(*1)CCCC"),
        make_group("weighted", "O(*1)", priority=5),
        make_group("alpha", "N(*1)C"),
    ])
    assert groupset.matching_order == ["weighted", "big", "alpha", "small"]


def test_duplicate_names_rejected():
    with pytest.raises(GroupError):
        GroupSet([make_group("g", "C(*1)C"), make_group("g", "O(*1)")])


def test_save_load_roundtrip(tmp_path):
    groupset = GroupSet([
        make_group("benzene", "c1(*1)c(*1)c(*1)c(*1)c(*1)c1*1", priority=2),
        make_group("cf3", "C(*1)(F)(F)F", overload=7),
    ])
    path = tmp_path / "groups.json"
    save_groupset(groupset, path)
    loaded = load_groupset(path)
    assert loaded.structurally_equal(groupset)
    # byte stability after one normalization pass
    second = tmp_path / "groups2.json"
    save_groupset(loaded, second)
    assert path.read_bytes() == second.read_bytes()


def test_empty_groupset_file(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text('{"groups": []}\n')
    groupset = load_groupset(path)
    assert len(groupset) == 0
    assert groupset.alphabet() == EMPTY_GROUPSET.alphabet()


def test_schema_violations(tmp_path):
    cases = [
        'not json at all',
        '{"nope": []}',
        '{"groups": [{"name": "g"}]}',
        '{"groups": [{"name": "g", "template": "C(*1)C", "extra": 1}]}',
        '{"groups": [{"name": "g", "template": "C(*1)C", "priority": "x"}]}',
        '{"groups": [{"name": "g", "template": "C(*1)C"},'
        ' {"name": "g", "template": "O(*1)"}]}',
    ]
    for body in cases:
        path = tmp_path / "bad.json"
        path.write_text(body)
        with pytest.raises(GroupError):
            load_groupset(path)


def test_alphabet_contents(benzene_set):
    spellings = benzene_set.alphabet()
    for start in range(6):
        assert f"[:{start}benzene]" in spellings
    assert "[=Branch]" in spellings
    assert "[#C]" in spellings
    assert "[pop]" in spellings and "[->]" in spellings
    assert "[=F]" not in spellings          # modifier above capacity
    assert len(spellings) == len(set(spellings))


def test_empty_alphabet_is_atomic_and_structural_only():
    spellings = EMPTY_GROUPSET.alphabet()
    assert not any(":" in s for s in spellings)
    assert "[C]" in spellings and "[Ring3]" in spellings


def test_group_count_53(groups53):
    assert len(groups53) == 53
    assert len(groups53.matching_order) == 53
