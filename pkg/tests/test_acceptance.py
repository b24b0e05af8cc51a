"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
report.  Tolerances are pinned here and nowhere else.
"""

import json
import random
import re
import time
from pathlib import Path

import pytest

from gselfies.canon import isomorphic
from gselfies.cli import main
from gselfies.decoder import _AT_GIDX, DecoderEngine, decode
from gselfies.encoder import encode, expand_groups
from gselfies.groups import EMPTY_GROUPSET
from gselfies.matcher import MatchPlan, PackedGraph, enumerate_embeddings
from gselfies.molgraph import validate
from gselfies.sampler import build_bag, molecule_metrics, sample_with_tokens
from gselfies.smiles import parse_smiles
from gselfies.tokens import GROUP, POP, detokenize, tokenize

from conftest import CELECOXIB
from oracles import brute_embeddings, brute_isomorphic


def report(name: str, detail: str) -> None:
    print(f"\nACCEPTANCE {name}: PASS ({detail})")


def test_a01_robustness_campaign(groups53):
    """100% of >=100k uniform random strings (len <= 100) over a >=50-group
    alphabet decode to valence-valid graphs in under two minutes."""
    assert len(groups53) >= 50
    alphabet = groups53.alphabet_tokens()
    rng = random.Random(20240717)
    total = 100_000
    start = time.perf_counter()
    failures = 0
    for _ in range(total):
        length = rng.randint(1, 100)
        tokens = [alphabet[rng.randrange(len(alphabet))] for _ in range(length)]
        graph = decode(tokens, groups53)
        try:
            validate(graph)
        except Exception:  # noqa: BLE001 - counted, then asserted zero
            failures += 1
    elapsed = time.perf_counter() - start
    assert failures == 0
    assert elapsed < 120.0
    report("A01 robustness",
           f"{total} strings, 0 failures, {elapsed:.1f}s < 120s, "
           f"alphabet of {len(groups53)} groups")


def test_a02_roundtrip_corpus(corpus, groups53):
    """100% isomorphic round-trip on the bundled >=1000-molecule corpus for
    both the extracted 53-group dialect and the empty dialect."""
    assert len(corpus) >= 1000
    assert 30 <= len(groups53) <= 53
    for dialect, label in ((groups53, "53-group"), (EMPTY_GROUPSET, "empty")):
        failures = sum(
            0 if isomorphic(decode(encode(mol, dialect), dialect), mol) else 1
            for mol in corpus)
        assert failures == 0, f"{failures} failures under {label} dialect"
    report("A02 roundtrip",
           f"{len(corpus)} molecules x 2 dialects, zero failures")


def test_a03_bond_demotion_golden():
    """decode('[C][O][=C]') yields C-O-C with all single bonds."""
    graph = decode(tokenize("[C][O][=C]"))
    assert [a.element for a in graph.atoms] == ["C", "O", "C"]
    assert sorted((b.a, b.b, b.order) for b in graph.bonds) == [
        (0, 1, 1), (1, 2, 1)]
    report("A03 bond demotion", "[C][O][=C] -> C-O-C, orders (1, 1)")


def test_a04_celecoxib_golden_fixture(celecoxib_groups):
    """The four-group fixture set encodes celecoxib with exactly 4 group
    tokens, decodes back isomorphic, and exits trifluoromethane via a pop
    in relative-index position."""
    mol = parse_smiles(CELECOXIB)
    tokens = encode(mol, celecoxib_groups)
    group_tokens = [t for t in tokens if t.kind == GROUP]
    assert len(group_tokens) == 4
    assert isomorphic(decode(tokens, celecoxib_groups), mol)
    engine = DecoderEngine(celecoxib_groups)
    cf3_pop_in_index_position = False
    for token in tokens:
        state = engine.current
        if token.kind == POP and state[0] == _AT_GIDX \
                and state[1].group.name == "trifluoromethane":
            cf3_pop_in_index_position = True
        engine.feed(token)
    engine.finish()
    assert cf3_pop_in_index_position
    report("A04 celecoxib", f"stream {detokenize(tokens)[:60]}... has 4 group "
           "tokens, round-trips, CF3 exits via pop in index position")


def test_a05_compactness_trend(corpus, groups53):
    """Mean token count under the extracted dialect is below the empty
    dialect's mean; the ratio is reported."""
    grouped = [len(encode(mol, groups53)) for mol in corpus]
    plain = [len(encode(mol, EMPTY_GROUPSET)) for mol in corpus]
    mean_grouped = sum(grouped) / len(grouped)
    mean_plain = sum(plain) / len(plain)
    assert mean_grouped < mean_plain
    report("A05 compactness",
           f"mean tokens {mean_grouped:.2f} (groups) < {mean_plain:.2f} "
           f"(empty), ratio {mean_grouped / mean_plain:.3f}")


def test_a06_compression_trend(tmp_path, corpus_path, groups53_path):
    """Index-encoded + DEFLATE size of the group dialect <= empty dialect."""
    out = tmp_path / "stats.json"
    assert main(["stats", "--groups", str(groups53_path),
                 "--in", str(corpus_path), "--out", str(out)]) == 0
    stats = json.loads(out.read_text())
    grouped = stats["group_dialect"]["deflate_bytes"]
    plain = stats["empty_dialect"]["deflate_bytes"]
    assert grouped <= plain
    report("A06 compression",
           f"DEFLATE {grouped} bytes (groups) <= {plain} bytes (empty), "
           f"ratio {grouped / plain:.3f}")


def test_a07_aromatic_preservation_trend(corpus, groups53):
    """At n=10,000 and a fixed seed, the fraction of sampled molecules with
    at least one aromatic atom is >= 2x higher under the group dialect."""
    n, seed = 10_000, 7
    fractions = {}
    for dialect, label in ((groups53, "groups"), (EMPTY_GROUPSET, "empty")):
        bag = build_bag(corpus, dialect)
        draws = sample_with_tokens(bag, dialect, n, seed)
        with_aromatic = sum(
            1 for _, mol in draws
            if molecule_metrics(mol)["aromatic_atom_count"] >= 1)
        fractions[label] = with_aromatic / n
    assert fractions["groups"] >= 2 * fractions["empty"]
    report("A07 aromatic preservation",
           f"aromatic fraction {fractions['groups']:.3f} (groups) vs "
           f"{fractions['empty']:.3f} (empty), "
           f"{fractions['groups'] / max(fractions['empty'], 1e-9):.1f}x")


TINY_TEMPLATES = [
    "C(*1)", "O(*1)", "C(*1)C", "C(*1)=O", "C(*1)(F)F", "N(*1)C(*1)=O",
    "C(*1)(*1)C=O", "C1CC1(*1)", "N(*2)C", "C(*1)#N",
]
TINY_MOLECULES = [
    "CCO", "CC=O", "CC(=O)N", "CC(=O)NC", "FC(F)C", "CC(C)(C)C", "C1CC1C",
    "CCC(C)C", "OCC=O", "NC(=O)CF", "CC(=O)OC", "C1CCC1", "CC1CC1C",
    "O=CC=O", "CNC(=O)C", "FC(F)(F)CO", "C#CC", "OC1CCC1O", "CC(N)C(=O)O",
    "ClC(Cl)C",
]


def test_a08_oracle_equivalence():
    """Matcher and isomorphism agree with brute force on every small
    instance (molecules <= 8 atoms, templates <= 5 atoms)."""
    from gselfies.smiles import parse_template
    molecules = [parse_smiles(s) for s in TINY_MOLECULES]
    assert all(m.n <= 8 for m in molecules)
    checked = 0
    for tpl_text in TINY_TEMPLATES:
        template, _ = parse_template(tpl_text)
        assert template.n <= 5
        plan = MatchPlan(PackedGraph(template))
        for mol in molecules:
            fast = sorted(enumerate_embeddings(plan, PackedGraph(mol),
                                               [0] * mol.n))
            assert fast == brute_embeddings(template, mol)
            checked += 1
    iso_checked = 0
    for a in molecules:
        for b in molecules:
            assert isomorphic(a, b) == brute_isomorphic(a, b)
            iso_checked += 1
    report("A08 oracle equivalence",
           f"{checked} matcher instances + {iso_checked} isomorphism pairs, "
           "100% agreement")


def test_a09_substring_expansion(corpus, groups53):
    """decode(expand(t)) isomorphic to decode(t) for 1000 corpus encodings."""
    subset = corpus[:1000]
    failures = 0
    for mol in subset:
        tokens = encode(mol, groups53)
        expanded = expand_groups(tokens, groups53)
        assert all(t.kind != GROUP for t in expanded)
        if not isomorphic(decode(expanded, EMPTY_GROUPSET),
                          decode(tokens, groups53)):
            failures += 1
    assert failures == 0
    report("A09 substring expansion", f"{len(subset)} encodings, 0 failures")


def _run_twice(tmp_path: Path, name: str, argv_builder):
    outputs = []
    for run in ("x", "y"):
        run_dir = tmp_path / f"{name}-{run}"
        run_dir.mkdir()
        argv, files = argv_builder(run_dir)
        assert main(argv) == 0, f"{name} failed"
        outputs.append(b"".join(Path(f).read_bytes() for f in files))
    assert outputs[0] == outputs[1], f"{name} not byte-identical"


def test_a10_cli_determinism(tmp_path, corpus_path, groups53_path, capsys):
    """Every subcommand produces byte-identical outputs across two runs
    with the same seed (bench compared with timing values masked)."""
    small = tmp_path / "small.smi"
    with open(corpus_path, encoding="utf-8") as handle:
        lines = handle.readlines()[:120]
    small.write_text("".join(lines))
    groups = str(groups53_path)
    corpus_file = str(small)

    enc_ref = tmp_path / "enc-ref.txt"
    assert main(["encode", "--groups", groups, "--in", corpus_file,
                 "--out", str(enc_ref)]) == 0

    def encode_args(rd):
        out = rd / "enc.txt"
        return (["encode", "--groups", groups, "--in", corpus_file,
                 "--out", str(out)], [out])

    def decode_args(rd):
        out = rd / "dec.smi"
        return (["decode", "--groups", groups, "--in", str(enc_ref),
                 "--out", str(out)], [out])

    def roundtrip_args(rd):
        out = rd / "report.json"
        return (["roundtrip", "--groups", groups, "--in", corpus_file,
                 "--report", str(out)], [out])

    def fragment_args(rd):
        out = rd / "groups.json"
        return (["fragment", "--in", corpus_file, "--k", "10",
                 "--strategy", "diverse", "--out", str(out)], [out])

    def sample_args(rd):
        csv = rd / "metrics.csv"
        smi = rd / "sampled.smi"
        return (["sample", "--groups", groups, "--bag-from", corpus_file,
                 "--n", "200", "--seed", "13", "--metrics", str(csv),
                 "--out", str(smi)], [csv, smi])

    def stats_args(rd):
        out = rd / "stats.json"
        return (["stats", "--groups", groups, "--in", corpus_file,
                 "--out", str(out)], [out])

    def expand_args(rd):
        out = rd / "expanded.txt"
        return (["expand", "--groups", groups, "--in", str(enc_ref),
                 "--out", str(out)], [out])

    for name, builder in [("encode", encode_args), ("decode", decode_args),
                          ("roundtrip", roundtrip_args),
                          ("fragment", fragment_args),
                          ("sample", sample_args), ("stats", stats_args),
                          ("expand", expand_args)]:
        _run_twice(tmp_path, name, builder)

    capsys.readouterr()  # drain output from the runs above
    fuzz_outputs = []
    for _ in range(2):
        assert main(["fuzz", "--groups", groups, "--n", "2000",
                     "--max-len", "60", "--seed", "21"]) == 0
        fuzz_outputs.append(capsys.readouterr().out)
    assert fuzz_outputs[0] == fuzz_outputs[1]

    capsys.readouterr()
    bench_outputs = []
    for _ in range(2):
        assert main(["bench", "--groups", groups, "--in", corpus_file,
                     "--limit", "30"]) == 0
        masked = re.sub(r"\d+\.\d+", "?", capsys.readouterr().out)
        bench_outputs.append(masked)
    assert bench_outputs[0] == bench_outputs[1]
    report("A10 CLI determinism",
           "9 subcommands byte-identical across repeated runs "
           "(bench timing values masked)")


def test_a11_performance_report(corpus, groups53, capsys):
    """Informational: per-molecule encode/decode timing versus the 12.9 ms
    reference ceiling; never fails on timing."""
    subset = corpus[:300]
    start = time.perf_counter()
    streams = [encode(mol, groups53) for mol in subset]
    encode_ms = 1e3 * (time.perf_counter() - start) / len(subset)
    start = time.perf_counter()
    for tokens in streams:
        decode(tokens, groups53)
    decode_ms = 1e3 * (time.perf_counter() - start) / len(subset)
    within = "within" if encode_ms <= 12.9 else "ABOVE"
    report("A11 performance (informational)",
           f"encode {encode_ms:.2f} ms/molecule ({within} the 12.9 ms "
           f"reference ceiling), decode {decode_ms:.2f} ms/molecule, "
           f"{len(groups53)} groups")
