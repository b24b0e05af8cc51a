import pytest

from gselfies.canon import isomorphic
from gselfies.fragment import build_groupset, naive_fragment
from gselfies.groups import GroupSet
from gselfies.smiles import parse_smiles, parse_template


def fragment_shapes(smiles):
    return sorted((f.graph.n, len(f.attachments)) for f in naive_fragment(
        parse_smiles(smiles)))


def test_toluene_split():
    # one cut at the ring-methyl bond: benzene + methyl, one attachment each
    assert fragment_shapes("Cc1ccccc1") == [(1, 1), (6, 1)]


def test_cyclohexane_no_cuts():
    assert fragment_shapes("C1CCCCC1") == [(6, 0)]


def test_acyclic_molecule_is_one_attachment_free_fragment():
    assert fragment_shapes("CCC") == [(3, 0)]


def test_biphenyl_two_phenyls():
    frags = naive_fragment(parse_smiles("c1ccccc1-c1ccccc1"))
    assert len(frags) == 2
    assert all(f.graph.n == 6 and len(f.attachments) == 1 for f in frags)
    assert frags[0].text == frags[1].text  # canonically identical


def test_side_chain_stays_whole():
    # ethyl side chain is cleaved as one piece, not atomized
    assert fragment_shapes("CCc1ccccc1") == [(2, 1), (6, 1)]


def test_para_disubstitution_two_attachments():
    shapes = fragment_shapes("Cc1ccc(O)cc1")
    assert (6, 2) in shapes


def test_canonical_merge_across_kekule_forms():
    a = naive_fragment(parse_smiles("Cc1ccccc1"))
    b = naive_fragment(parse_smiles("CC1C=CC=CC=1"))
    ring_a = next(f.text for f in a if f.graph.n == 6)
    ring_b = next(f.text for f in b if f.graph.n == 6)
    assert ring_a == ring_b


def test_fragment_templates_reparse():
    for smiles in ["Cc1ccccc1", "CCc1ccc(O)cc1", "c1ccccc1-c1ccccc1"]:
        for frag in naive_fragment(parse_smiles(smiles)):
            graph, markers = parse_template(frag.text)
            assert isomorphic(graph, frag.graph)
            assert len(markers) == len(frag.attachments)


def synthetic_corpus():
    base = ["Cc1ccccc1", "CCc1ccccc1", "Oc1ccccc1", "Nc1ccccc1",
            "FC(F)(F)c1ccccc1", "Cc1ccco1", "CCCCC"]
    return [parse_smiles(s) for s in base * 15]


def test_frequency_selection_prefers_common_large():
    corpus = synthetic_corpus()
    groupset = build_groupset(corpus, 1, "frequency")
    assert len(groupset) == 1
    top = groupset[groupset.names()[0]]
    assert top.size == 6  # the benzene-with-one-attachment fragment


def test_invalid_k_rejected():
    with pytest.raises(ValueError):
        build_groupset(synthetic_corpus(), 0)
    with pytest.raises(ValueError):
        build_groupset([], 3)
    with pytest.raises(ValueError):
        build_groupset(synthetic_corpus(), 1, "bogus")


def test_oversized_k_returns_all_candidates():
    corpus = [parse_smiles("Cc1ccccc1")]
    groupset = build_groupset(corpus, 50, "frequency")
    assert 1 <= len(groupset) < 50


def test_groups_valid_and_deduplicated(corpus_sample):
    groupset = build_groupset(corpus_sample, 30, "frequency")
    assert len(groupset) == 30
    texts = {groupset[n].template_text for n in groupset.names()}
    assert len(texts) == 30
    for name in groupset.names():
        group = groupset[name]
        assert group.attachment_count >= 1
        assert group.size <= 25


def test_determinism(corpus_sample):
    first = build_groupset(corpus_sample, 12, "diverse")
    second = build_groupset(corpus_sample, 12, "diverse")
    assert first.structurally_equal(second)


def test_strategies_differ(corpus_sample):
    freq = build_groupset(corpus_sample, 12, "frequency")
    diverse = build_groupset(corpus_sample, 12, "diverse")
    assert isinstance(freq, GroupSet) and isinstance(diverse, GroupSet)
    freq_texts = [freq[n].template_text for n in freq.names()]
    diverse_texts = [diverse[n].template_text for n in diverse.names()]
    assert freq_texts != diverse_texts
