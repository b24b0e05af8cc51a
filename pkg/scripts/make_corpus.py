#!/usr/bin/env python3
"""Generate the bundled drug-like corpus deterministically.

Molecules are assembled from ring scaffolds and a substituent pool,
validated through the package's own parser, deduplicated by canonical
form, and written as `<smiles>\t<id>` lines.  Regenerate with:

    python scripts/make_corpus.py [--n 1300] [--seed 20240717] [--out PATH]
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from gselfies.canon import certificate  # noqa: E402
from gselfies.decoder import decode  # noqa: E402
from gselfies.encoder import encode  # noqa: E402
from gselfies.canon import isomorphic  # noqa: E402
from gselfies.errors import GselfiesError  # noqa: E402
from gselfies.molgraph import validate  # noqa: E402
from gselfies.sampler import molecule_metrics  # noqa: E402
from gselfies.smiles import parse_smiles, write_smiles  # noqa: E402

SCAFFOLDS = [
    "c1cc{a}c{b}cc1{c}",          # benzene
    "c1cc{a}ccc1{b}",             # benzene (two sites)
    "c1cc{a}ncc1{b}",             # pyridine
    "c1nc{a}ncc1{b}",             # pyrimidine
    "c1cnc{a}cn1",                # pyrazine
    "c1cc{a}oc1{b}",              # furan
    "c1cc{a}sc1{b}",              # thiophene
    "c1cc{a}[nH]c1{b}",           # pyrrole
    "c1csc{a}n1",                 # thiazole
    "c1coc{a}n1",                 # oxazole
    "Cn1ncc{a}c1{b}",             # N-methylpyrazole
    "c1cc{a}n(C)n1",              # N-methylpyrazole alt
    "c1cc{a}c2ccccc2c1",          # naphthalene
    "c1cc{a}c2ncccc2c1",          # quinoline
    "c1cc{a}c2occc2c1",           # benzofuran
    "c1cc{a}c2sccc2c1",           # benzothiophene
    "c1cc{a}c2c(c1)cc[nH]2",      # indole
    "C1CC{a}CC{b}C1",             # cyclohexane
    "C1CC{a}NCC1{b}",             # piperidine
    "C1COC{a}CN1{b}",             # morpholine
    "C1CN(C)CCN1{a}",             # N-methylpiperazine
    "C1CC{a}OC1",                 # tetrahydrofuran
    "C1CC{a}CC1{b}",              # cyclopentane
]

SUBSTITUENTS = [
    "C", "CC", "CCC", "C(C)C", "O", "OC", "OCC", "N", "NC", "N(C)C", "F",
    "Cl", "Br", "I", "C(F)(F)F", "C#N", "C=C", "C(=O)O", "C(=O)OC",
    "C(=O)N", "C(=O)NC", "NC(=O)C", "S(N)(=O)=O", "SC", "S(C)(=O)=O",
    "OC(F)F", "[N+](=O)[O-]", "C(=O)C", "CO", "CN", "CC#N", "CC(=O)O",
    "C(C)(C)C", "CCO", "OC(=O)C",
    # ring-bearing substituents give biaryls and benzyl/phenoxy linkages
    "c1ccccc1", "Cc1ccccc1", "Oc1ccccc1", "Nc1ccccc1", "C(=O)Nc1ccccc1",
    "c1ccc(F)cc1", "c1ccc(Cl)cc1", "c1ccc(OC)cc1", "c1ccncc1",
    "Cc1ccco1", "c1ccc2ccccc2c1", "CC1CCCCC1", "N1CCOCC1",
    "c1cc2c(cc1)cccn2",
]

ALIPHATICS = [
    "CCO", "CC(=O)OCC", "CCCCCC", "CC(C)CC(=O)O", "OCC(O)CO", "CCN(CC)CC",
    "CC(=O)NCCC", "CCOC(=O)CC(=O)OCC", "NCCCCN", "OCCOCCO", "CC(C)(C)OC(=O)N",
    "C1CCCCC1", "C1CCOC1", "CC(O)CN",
]


def fill(template: str, rng: random.Random) -> str:
    text = template
    for slot in ("{a}", "{b}", "{c}"):
        if slot not in text:
            continue
        if rng.random() < 0.38:
            text = text.replace(slot, "", 1)
        else:
            text = text.replace(slot, "(" + rng.choice(SUBSTITUENTS) + ")", 1)
    return text


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=1300)
    parser.add_argument("--seed", type=int, default=20240717)
    parser.add_argument("--out", default=str(
        Path(__file__).resolve().parent.parent
        / "src" / "gselfies" / "data" / "corpus.smi"))
    args = parser.parse_args()

    rng = random.Random(args.seed)
    seen: set = set()
    records: list[str] = []
    attempts = 0
    while len(records) < args.n and attempts < args.n * 60:
        attempts += 1
        if rng.random() < 0.06:
            candidate = rng.choice(ALIPHATICS)
        else:
            candidate = fill(rng.choice(SCAFFOLDS), rng)
        try:
            mol = parse_smiles(candidate)
            validate(mol)
            metrics = molecule_metrics(mol)
            if not 100 <= metrics["molecular_weight"] <= 650:
                continue
            smiles = write_smiles(mol)
            reparsed = parse_smiles(smiles)
            if not isomorphic(reparsed, mol):
                raise GselfiesError(f"writer round-trip failed for {candidate}")
            if not isomorphic(decode(encode(mol)), mol):
                raise GselfiesError(f"codec round-trip failed for {candidate}")
            key = certificate(mol)
            if key in seen:
                continue
            seen.add(key)
            records.append(smiles)
        except GselfiesError as exc:
            print(f"rejected {candidate}: {exc}", file=sys.stderr)
            continue
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as handle:
        for index, smiles in enumerate(records, start=1):
            handle.write(f"{smiles}\tMOL{index:06d}\n")
    aromatic = sum(
        1 for smiles in records
        if molecule_metrics(parse_smiles(smiles))["aromatic_atom_count"] > 0)
    print(f"wrote {len(records)} molecules to {out_path} "
          f"({aromatic} contain aromatic atoms; {attempts} attempts)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
