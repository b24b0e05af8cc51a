#!/usr/bin/env python3
"""Compare the compiled matching kernel against the pure-Python twin.

Usage: python benchmarks/bench_matcher.py [corpus.smi [groups.json]]
Defaults to the bundled corpus and 53-group dialect.
"""

import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from gselfies.groups import load_groupset  # noqa: E402
from gselfies.matcher import (BACKEND_NAME, MatchPlan,  # noqa: E402
                              PackedGraph, enumerate_embeddings,
                              enumerate_embeddings_pure)
from gselfies.smiles import read_corpus  # noqa: E402


def main() -> int:
    corpus_path = sys.argv[1] if len(sys.argv) > 1 else \
        ROOT / "src" / "gselfies" / "data" / "corpus.smi"
    groups_path = sys.argv[2] if len(sys.argv) > 2 else \
        ROOT / "src" / "gselfies" / "data" / "groups53.json"
    groupset = load_groupset(groups_path)
    molecules = read_corpus(corpus_path).molecules
    packs = [PackedGraph(mol) for mol in molecules]
    plans = [MatchPlan(PackedGraph(g.template))
             for g in groupset.groups_in_matching_order()]
    print(f"{len(molecules)} molecules x {len(plans)} groups; "
          f"selected backend: {BACKEND_NAME}")
    backends = [("pure", enumerate_embeddings_pure)]
    if BACKEND_NAME == "cython":
        backends.insert(0, ("cython", enumerate_embeddings))
    timings = {}
    for label, backend in backends:
        start = time.perf_counter()
        embeddings = 0
        for pack in packs:
            forbidden = [0] * pack.n
            for plan in plans:
                embeddings += len(backend(plan, pack, forbidden))
        elapsed = time.perf_counter() - start
        timings[label] = elapsed
        print(f"{label:>7}: {elapsed:6.2f}s total, "
              f"{1e3 * elapsed / len(packs):6.3f} ms/molecule, "
              f"{embeddings} embeddings")
    if len(timings) == 2:
        print(f"speedup: {timings['pure'] / timings['cython']:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
