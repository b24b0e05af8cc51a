"""Batch command-line interface.

Subcommands: encode, decode, roundtrip, fragment, sample, stats, fuzz,
expand, bench.  One record per line everywhere; every output is
byte-deterministic given the same inputs and seed (bench prints wall
times, which are inherently run-dependent, so its timing fields are the
one documented exception).  Exit codes: 0 success, 1 verification or
invariant failure, 2 usage error.

``--config FILE`` may hold a JSON object whose keys are the long option
names of the subcommand; explicit flags win over config values.  The
environment variable ``GSELFIES_THREADS`` (default 1) parallelizes
per-record work without changing any output.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import statistics
import sys
import time
import zlib
from pathlib import Path

from . import __version__
from .canon import isomorphic
from .decoder import decode
from .encoder import encode, expand_groups
from .errors import EncodeError, GselfiesError, ParseError
from .fragment import build_groupset
from .groups import EMPTY_GROUPSET, GroupSet, load_groupset, save_groupset
from .matcher import (BACKEND_NAME, MatchPlan, PackedGraph,
                      enumerate_embeddings, enumerate_embeddings_pure)
from .molgraph import validate
from .sampler import (METRIC_FIELDS, build_bag, molecule_metrics,
                      sample_with_tokens, wasserstein_1d)
from .smiles import parse_smiles, read_corpus, write_smiles
from .tokens import detokenize, tokenize_robust

_WORKER_GROUPS: GroupSet | None = None
_WORKER_ALPHABET = None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GSELFIES_THREADS", "1")))
    except ValueError:
        return 1


def _init_worker(groups_path: str | None) -> None:
    global _WORKER_GROUPS, _WORKER_ALPHABET
    _WORKER_GROUPS = load_groupset(groups_path) if groups_path else EMPTY_GROUPSET
    _WORKER_ALPHABET = None


def _mapper(func, items, groups_path: str | None):
    """Order-preserving map, parallel when GSELFIES_THREADS > 1."""
    threads = _threads()
    if threads == 1:
        _init_worker(groups_path)
        return [func(item) for item in items]
    import multiprocessing as mp
    with mp.Pool(threads, initializer=_init_worker,
                 initargs=(groups_path,)) as pool:
        return pool.map(func, items, chunksize=64)


def _encode_record(line: str):
    smiles = line.split()[0]
    try:
        mol = parse_smiles(smiles)
        return True, detokenize(encode(mol, _WORKER_GROUPS))
    except (ParseError, EncodeError) as exc:
        return False, f"{smiles}: {exc}"


def _decode_record(line: str):
    tokens, skipped = tokenize_robust(line.strip())
    graph = decode(tokens, _WORKER_GROUPS)
    return write_smiles(graph), skipped


def _roundtrip_record(line: str):
    smiles = line.split()[0]
    try:
        mol = parse_smiles(smiles)
    except ParseError as exc:
        return "parse-error", f"{smiles}: {exc}"
    try:
        tokens = encode(mol, _WORKER_GROUPS)
    except EncodeError as exc:
        return "encode-error", f"{smiles}: {exc}"
    if isomorphic(decode(tokens, _WORKER_GROUPS), mol):
        return "ok", smiles
    return "mismatch", smiles


def _fuzz_record(args):
    global _WORKER_ALPHABET
    index, seed, max_len = args
    rng = random.Random(seed * 1_000_003 + index)
    if _WORKER_ALPHABET is None:
        _WORKER_ALPHABET = _WORKER_GROUPS.alphabet_tokens()
    alphabet = _WORKER_ALPHABET
    length = rng.randint(1, max_len)
    tokens = [alphabet[rng.randrange(len(alphabet))] for _ in range(length)]
    graph = decode(tokens, _WORKER_GROUPS)
    try:
        validate(graph)
    except GselfiesError as exc:
        return False, f"string {index}: {exc}: {detokenize(tokens)}"
    return True, write_smiles(graph)


def _read_lines(path: str) -> list[str]:
    with open(path, encoding="utf-8") as handle:
        return [line.rstrip("\n") for line in handle if line.strip()]


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for line in lines:
            handle.write(line + "\n")


def _require_file(path: str, flag: str) -> None:
    if not Path(path).exists():
        raise _UsageError(f"{flag}: file not found: {path}")


class _UsageError(Exception):
    pass


# -- subcommand implementations ------------------------------------------


def _cmd_encode(args) -> int:
    _require_file(args.in_, "--in")
    if args.groups:
        _require_file(args.groups, "--groups")
    results = _mapper(_encode_record, _read_lines(args.in_), args.groups)
    out = []
    skipped = 0
    for ok, payload in results:
        if ok:
            out.append(payload)
        else:
            skipped += 1
            print(f"skipped: {payload}", file=sys.stderr)
    _write_lines(args.out, out)
    print(f"encoded {len(out)} molecules ({skipped} skipped) -> {args.out}")
    return 0


def _cmd_decode(args) -> int:
    _require_file(args.in_, "--in")
    if args.groups:
        _require_file(args.groups, "--groups")
    results = _mapper(_decode_record, _read_lines(args.in_), args.groups)
    _write_lines(args.out, [smiles for smiles, _ in results])
    unlexable = sum(skipped for _, skipped in results)
    print(f"decoded {len(results)} strings "
          f"({unlexable} unlexable units skipped) -> {args.out}")
    return 0


def _cmd_roundtrip(args) -> int:
    _require_file(args.in_, "--in")
    if args.groups:
        _require_file(args.groups, "--groups")
    results = _mapper(_roundtrip_record, _read_lines(args.in_), args.groups)
    passed = sum(1 for status, _ in results if status == "ok")
    failures = [{"line": i + 1, "status": status, "detail": detail}
                for i, (status, detail) in enumerate(results) if status != "ok"]
    report = {
        "total": len(results),
        "passed": passed,
        "failed": len(failures),
        "pass_rate": round(passed / len(results), 6) if results else 1.0,
        "failures": failures,
    }
    with open(args.report, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2)
        handle.write("\n")
    print(f"roundtrip: {passed}/{len(results)} passed -> {args.report}")
    return 0 if not failures else 1


def _cmd_fragment(args) -> int:
    _require_file(args.in_, "--in")
    corpus = read_corpus(args.in_)
    if not corpus.molecules:
        raise _UsageError("--in: no parseable molecules in corpus")
    groupset = build_groupset(corpus.molecules, args.k, args.strategy)
    save_groupset(groupset, args.out)
    print(f"extracted {len(groupset)} groups ({args.strategy}) -> {args.out}")
    return 0


def _read_metrics_csv(path: str) -> dict[str, list[float]]:
    lines = _read_lines(path)
    if not lines or lines[0].split(",") != list(METRIC_FIELDS):
        raise _UsageError(f"{path}: not a metrics CSV (unexpected header)")
    columns: dict[str, list[float]] = {field: [] for field in METRIC_FIELDS}
    for line in lines[1:]:
        for field, cell in zip(METRIC_FIELDS, line.split(",")):
            columns[field].append(float(cell))
    return columns


def _cmd_sample(args) -> int:
    _require_file(args.bag_from, "--bag-from")
    if args.groups:
        _require_file(args.groups, "--groups")
    if args.compare:
        _require_file(args.compare, "--compare")
    groupset = load_groupset(args.groups) if args.groups else EMPTY_GROUPSET
    corpus = read_corpus(args.bag_from)
    if not corpus.molecules:
        raise _UsageError("--bag-from: no parseable molecules in corpus")
    bag = build_bag(corpus.molecules, groupset)
    draws = sample_with_tokens(bag, groupset, args.n, args.seed)
    rows = []
    smiles_lines = []
    for tokens, mol in draws:
        record = molecule_metrics(mol)
        record["token_length"] = len(tokens)
        rows.append(",".join(str(record[field]) for field in METRIC_FIELDS))
        smiles_lines.append(write_smiles(mol))
    _write_lines(args.metrics, [",".join(METRIC_FIELDS)] + rows)
    if args.out:
        _write_lines(args.out, smiles_lines)
    if args.compare:
        mine = _read_metrics_csv(args.metrics)
        other = _read_metrics_csv(args.compare)
        summary = {
            "metrics": args.metrics,
            "compare": args.compare,
            "wasserstein": {
                field: round(wasserstein_1d(mine[field], other[field]), 6)
                for field in METRIC_FIELDS
            },
        }
        target = args.summary or "-"
        if target == "-":
            print(json.dumps(summary, indent=2))
        else:
            with open(target, "w", encoding="utf-8") as handle:
                json.dump(summary, handle, indent=2)
                handle.write("\n")
    print(f"sampled {args.n} molecules (bag size {bag.size}, "
          f"{bag.skipped} corpus skips) -> {args.metrics}")
    return 0


def _index_encode(streams: list[list[str]]) -> bytes:
    """First-appearance token indexing, LEB128-serialized; 0 ends a record."""
    ids: dict[str, int] = {}
    out = bytearray()

    def put(value: int) -> None:
        while True:
            byte = value & 0x7F
            value >>= 7
            if value:
                out.append(byte | 0x80)
            else:
                out.append(byte)
                return

    for stream in streams:
        for spelling in stream:
            token_id = ids.get(spelling)
            if token_id is None:
                token_id = len(ids) + 1
                ids[spelling] = token_id
            put(token_id)
        put(0)
    return bytes(out)


def _dialect_stats(corpus, groupset: GroupSet) -> dict:
    lengths = []
    streams = []
    for mol in corpus:
        tokens = encode(mol, groupset)
        lengths.append(len(tokens))
        streams.append([t.spelling() for t in tokens])
    encoded = _index_encode(streams)
    deflated = zlib.compress(encoded, 9)
    histogram: dict[str, int] = {}
    for length in lengths:
        bucket = str(10 * (length // 10))
        histogram[bucket] = histogram.get(bucket, 0) + 1
    unique = len({s for stream in streams for s in stream})
    return {
        "molecules": len(lengths),
        "mean_tokens": round(statistics.fmean(lengths), 4),
        "median_tokens": statistics.median(lengths),
        "unique_tokens": unique,
        "length_histogram": dict(sorted(histogram.items(), key=lambda kv: int(kv[0]))),
        "index_encoded_bytes": len(encoded),
        "deflate_bytes": len(deflated),
    }


def _cmd_stats(args) -> int:
    _require_file(args.in_, "--in")
    _require_file(args.groups, "--groups")
    groupset = load_groupset(args.groups)
    corpus = read_corpus(args.in_)
    if not corpus.molecules:
        raise _UsageError("--in: no parseable molecules in corpus")
    with_groups = _dialect_stats(corpus.molecules, groupset)
    without = _dialect_stats(corpus.molecules, EMPTY_GROUPSET)
    report = {
        "corpus": args.in_,
        "groups": args.groups,
        "group_count": len(groupset),
        "group_dialect": with_groups,
        "empty_dialect": without,
        "mean_length_ratio": round(
            with_groups["mean_tokens"] / without["mean_tokens"], 4),
        "deflate_ratio": round(
            with_groups["deflate_bytes"] / without["deflate_bytes"], 4),
    }
    with open(args.out, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2)
        handle.write("\n")
    print(f"stats: mean tokens {with_groups['mean_tokens']} (groups) vs "
          f"{without['mean_tokens']} (empty) -> {args.out}")
    return 0


def _cmd_fuzz(args) -> int:
    if args.groups:
        _require_file(args.groups, "--groups")
    items = [(i, args.seed, args.max_len) for i in range(args.n)]
    results = _mapper(_fuzz_record, items, args.groups)
    violations = [detail for ok, detail in results if not ok]
    digest = hashlib.sha256()
    for ok, payload in results:
        if ok:
            digest.update(payload.encode())
            digest.update(b"\n")
    print(f"fuzz: {args.n} strings (max length {args.max_len}, seed {args.seed}), "
          f"{len(violations)} violations, output sha256 {digest.hexdigest()[:16]}")
    for detail in violations[:20]:
        print(f"violation: {detail}", file=sys.stderr)
    return 1 if violations else 0


def _cmd_expand(args) -> int:
    _require_file(args.in_, "--in")
    _require_file(args.groups, "--groups")
    groupset = load_groupset(args.groups)
    out = []
    for line in _read_lines(args.in_):
        tokens, _ = tokenize_robust(line.strip())
        out.append(detokenize(expand_groups(tokens, groupset)))
    _write_lines(args.out, out)
    print(f"expanded {len(out)} strings -> {args.out}")
    return 0


def _cmd_bench(args) -> int:
    _require_file(args.in_, "--in")
    _require_file(args.groups, "--groups")
    groupset = load_groupset(args.groups)
    corpus = read_corpus(args.in_, limit=args.limit)
    molecules = corpus.molecules
    if not molecules:
        raise _UsageError("--in: no parseable molecules in corpus")
    encode_times = []
    decode_times = []
    token_streams = []
    for mol in molecules:
        start = time.perf_counter()
        tokens = encode(mol, groupset)
        encode_times.append(time.perf_counter() - start)
        token_streams.append(tokens)
    for tokens in token_streams:
        start = time.perf_counter()
        decode(tokens, groupset)
        decode_times.append(time.perf_counter() - start)

    def _ms(values):
        ordered = sorted(values)
        return (1e3 * statistics.fmean(values), 1e3 * statistics.median(values),
                1e3 * ordered[int(0.95 * (len(ordered) - 1))])

    enc = _ms(encode_times)
    dec = _ms(decode_times)
    print(f"bench: {len(molecules)} molecules, {len(groupset)} groups, "
          f"matcher backend {BACKEND_NAME}")
    print(f"encode ms/molecule: mean {enc[0]:.3f} median {enc[1]:.3f} p95 {enc[2]:.3f}")
    print(f"decode ms/molecule: mean {dec[0]:.3f} median {dec[1]:.3f} p95 {dec[2]:.3f}")

    # backend comparison on the raw matching kernel
    packs = [PackedGraph(mol) for mol in molecules]
    plans = [MatchPlan(PackedGraph(g.template))
             for g in groupset.groups_in_matching_order()]
    for label, fn in (("cython", enumerate_embeddings),
                      ("pure", enumerate_embeddings_pure)):
        if label == "cython" and BACKEND_NAME != "cython":
            print("matcher cython: unavailable (extension not built)")
            continue
        start = time.perf_counter()
        found = 0
        for pack in packs:
            blank = [0] * pack.n
            for plan in plans:
                found += len(fn(plan, pack, blank))
        elapsed = time.perf_counter() - start
        print(f"matcher {label}: {1e3 * elapsed / len(packs):.3f} "
              f"ms/molecule ({found} embeddings)")
    return 0


# -- argument plumbing -----------------------------------------------------


def _apply_config(args: argparse.Namespace) -> None:
    config_path = getattr(args, "config", None)
    if not config_path:
        return
    _require_file(config_path, "--config")
    with open(config_path, encoding="utf-8") as handle:
        try:
            config = json.load(handle)
        except json.JSONDecodeError as exc:
            raise _UsageError(f"--config: invalid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise _UsageError("--config: expected a JSON object")
    for key, value in config.items():
        dest = key.replace("-", "_")
        if dest == "in":
            dest = "in_"
        if not hasattr(args, dest):
            raise _UsageError(f"--config: unknown key {key!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, value)


def _add_common(sub, *, groups=None, infile=None, out=None, seed=False):
    sub.add_argument("--config", help="JSON file with defaults for these flags")
    if groups is not None:
        sub.add_argument("--groups", required=False,
                         help="group-set JSON file" + (" (required)" if groups == "req" else ""))
    if infile:
        sub.add_argument("--in", dest="in_", required=False, help=infile)
    if out:
        sub.add_argument("--out", required=False, help=out)
    if seed:
        sub.add_argument("--seed", type=int, required=False, help="RNG seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gselfies",
        description="Robust group-token molecular string representation tools")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("encode", help="corpus SMILES -> token strings")
    _add_common(p, groups="opt", infile="corpus file", out="token strings file")
    p.set_defaults(func=_cmd_encode, required_args=["in_", "out"])

    p = subs.add_parser("decode", help="token strings -> SMILES")
    _add_common(p, groups="opt", infile="token strings file", out="SMILES file")
    p.set_defaults(func=_cmd_decode, required_args=["in_", "out"])

    p = subs.add_parser("roundtrip", help="encode+decode corpus, report isomorphism")
    _add_common(p, groups="opt", infile="corpus file")
    p.add_argument("--report", required=False, help="JSON report path")
    p.set_defaults(func=_cmd_roundtrip, required_args=["in_", "report"])

    p = subs.add_parser("fragment", help="extract a group set from a corpus")
    _add_common(p, infile="corpus file", out="group-set JSON output")
    p.add_argument("--k", type=int, required=False, help="number of groups")
    p.add_argument("--strategy", choices=["frequency", "diverse"],
                   default=None, help="selection strategy (default frequency)")
    p.set_defaults(func=_cmd_fragment, required_args=["in_", "out", "k"])

    p = subs.add_parser("sample", help="bag-of-tokens random generation")
    _add_common(p, groups="opt", seed=True, out="sampled SMILES output (optional)")
    p.add_argument("--bag-from", dest="bag_from", required=False,
                   help="corpus to build the token bag from")
    p.add_argument("--n", type=int, required=False, help="number of samples")
    p.add_argument("--metrics", required=False, help="per-molecule metrics CSV")
    p.add_argument("--compare", required=False,
                   help="metrics CSV from another run to compare against")
    p.add_argument("--summary", required=False,
                   help="summary JSON with per-metric distances ('-' = stdout)")
    p.set_defaults(func=_cmd_sample,
                   required_args=["bag_from", "n", "seed", "metrics"])

    p = subs.add_parser("stats", help="length and compressed-size comparison")
    _add_common(p, groups="req", infile="corpus file", out="JSON report")
    p.set_defaults(func=_cmd_stats, required_args=["groups", "in_", "out"])

    p = subs.add_parser("fuzz", help="decoder robustness campaign")
    _add_common(p, groups="opt", seed=True)
    p.add_argument("--n", type=int, required=False, help="number of strings")
    p.add_argument("--max-len", dest="max_len", type=int, required=False,
                   help="maximum string length in tokens")
    p.set_defaults(func=_cmd_fuzz, required_args=["n", "max_len", "seed"])

    p = subs.add_parser("expand", help="replace group tokens by atomic streams")
    _add_common(p, groups="req", infile="token strings file",
                out="expanded token strings file")
    p.set_defaults(func=_cmd_expand, required_args=["groups", "in_", "out"])

    p = subs.add_parser("bench", help="per-molecule timing report")
    _add_common(p, groups="req", infile="corpus file")
    p.add_argument("--limit", type=int, default=None,
                   help="benchmark only the first N molecules")
    p.set_defaults(func=_cmd_bench, required_args=["groups", "in_"])
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        missing = [name for name in args.required_args
                   if getattr(args, name) in (None, "")]
        if missing:
            flags = ", ".join("--" + name.rstrip("_").replace("_", "-")
                              for name in missing)
            raise _UsageError(f"missing required option(s): {flags}")
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GselfiesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
