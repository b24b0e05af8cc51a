/**
 * Thin string-in/string-out bindings over the `gselfies` CLI.
 *
 * Every call shells out to the command-line tool, so results are
 * byte-identical to direct CLI use; no molecule objects cross the
 * boundary.  Errors raised by the tool surface as exceptions carrying
 * its diagnostics.  Set GSELFIES_BIN to point at a specific binary
 * (defaults to `gselfies` on PATH).
 */

import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export class GselfiesError extends Error {
  constructor(message: string, public readonly exitCode: number) {
    super(message);
    this.name = "GselfiesError";
  }
}

export interface GroupsetHandle {
  /** Path of the validated group-set JSON file. */
  path: string;
  /** Number of groups the file defines. */
  groupCount: number;
}

function binary(): string {
  return process.env.GSELFIES_BIN ?? "gselfies";
}

/** Run the CLI; throws GselfiesError with its stderr on failure. */
export function runCli(args: string[]): string {
  try {
    return execFileSync(binary(), args, { encoding: "utf-8" });
  } catch (err) {
    const failure = err as { status?: number; stderr?: string; message: string };
    const detail = (failure.stderr ?? "").trim() || failure.message;
    throw new GselfiesError(detail, failure.status ?? -1);
  }
}

function withTempDir<T>(body: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "gselfies-"));
  try {
    return body(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function readLines(path: string): string[] {
  const text = readFileSync(path, "utf-8");
  return text.length === 0 ? [] : text.replace(/\n$/, "").split("\n");
}

/**
 * Validate a group-set file and return a handle for the other calls.
 * Validation runs through the CLI (an empty encode), so a bad file
 * throws the tool's own diagnostic.
 */
export function loadGroupset(path: string): GroupsetHandle {
  withTempDir((dir) => {
    const empty = join(dir, "empty.smi");
    writeFileSync(empty, "");
    runCli(["encode", "--groups", path, "--in", empty,
      "--out", join(dir, "out.txt")]);
  });
  const parsed = JSON.parse(readFileSync(path, "utf-8")) as {
    groups: unknown[];
  };
  return { path, groupCount: parsed.groups.length };
}

function groupArgs(groups: GroupsetHandle | null): string[] {
  return groups === null ? [] : ["--groups", groups.path];
}

/** SMILES lines -> token strings (one per input line). */
export function encode(groups: GroupsetHandle | null,
                       smiles: string[]): string[] {
  return withTempDir((dir) => {
    const input = join(dir, "in.smi");
    const output = join(dir, "out.txt");
    writeFileSync(input, smiles.map((s) => s + "\n").join(""));
    runCli(["encode", ...groupArgs(groups), "--in", input, "--out", output]);
    return readLines(output);
  });
}

/** Token strings -> SMILES lines. */
export function decode(groups: GroupsetHandle | null,
                       tokenStrings: string[]): string[] {
  return withTempDir((dir) => {
    const input = join(dir, "in.txt");
    const output = join(dir, "out.smi");
    writeFileSync(input, tokenStrings.map((s) => s + "\n").join(""));
    runCli(["decode", ...groupArgs(groups), "--in", input, "--out", output]);
    return readLines(output);
  });
}

/** Token strings -> fully atomic token strings (group tokens replaced). */
export function expandGroups(groups: GroupsetHandle,
                             tokenStrings: string[]): string[] {
  return withTempDir((dir) => {
    const input = join(dir, "in.txt");
    const output = join(dir, "out.txt");
    writeFileSync(input, tokenStrings.map((s) => s + "\n").join(""));
    runCli(["expand", "--groups", groups.path, "--in", input,
      "--out", output]);
    return readLines(output);
  });
}

/**
 * Bag-of-tokens sampling: builds the bag from a corpus file, draws n
 * strings with the given seed, and returns the decoded molecules as
 * SMILES lines (empty line = empty molecule).
 */
export function sample(groups: GroupsetHandle | null, bagFromCorpus: string,
                       n: number, seed: number): string[] {
  return withTempDir((dir) => {
    const metrics = join(dir, "metrics.csv");
    const output = join(dir, "sampled.smi");
    runCli(["sample", ...groupArgs(groups), "--bag-from", bagFromCorpus,
      "--n", String(n), "--seed", String(seed),
      "--metrics", metrics, "--out", output]);
    return readLines(output);
  });
}

/** Version string of the underlying tool. */
export function version(): string {
  return runCli(["--version"]).trim();
}
