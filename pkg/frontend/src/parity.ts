// Golden-vector parity suite: replays the shared derivation vectors and
// fails on any byte mismatch with the reference implementation.  Run it
// whenever this code or the vectors change; interop rests on it.

import { bytesToHex, hexToBytes } from "./encoding.js";
import { applyPermutation, serializeGraph, serializePermutation } from "./graphs.js";
import { deriveGraph, deriveIdentity, derivePermutation, deriveSeed, streamBytes } from "./kdf.js";

export interface GoldenVectors {
  version: string;
  hash_id: string;
  identities: Array<{
    login: string;
    password: string;
    n: number;
    seed_secret: string;
    seed_graph: string;
    pi: string;
    g1: string;
    g2: string;
  }>;
  primitives: {
    streams: Array<{ seed: string; count: number; bytes: string }>;
    permutations: Array<{ seed: string; n: number; encoded: string }>;
    graphs: Array<{ seed: string; n: number; encoded: string }>;
  };
}

export interface ParityReport {
  checks: number;
  failures: string[];
  pass: boolean;
}

export async function cryptoParitySuite(vectors: GoldenVectors): Promise<ParityReport> {
  const failures: string[] = [];
  let checks = 0;

  function expectEqual(label: string, got: string, want: string) {
    checks++;
    if (got !== want) failures.push(`${label}: got ${got.slice(0, 32)}.. want ${want.slice(0, 32)}..`);
  }

  for (const entry of vectors.identities) {
    const seedSecret = await deriveSeed(entry.login, entry.password, "secret", vectors.version);
    const seedGraph = await deriveSeed(entry.login, entry.password, "graph", vectors.version);
    expectEqual(`${entry.login}/seed_secret`, bytesToHex(seedSecret), entry.seed_secret);
    expectEqual(`${entry.login}/seed_graph`, bytesToHex(seedGraph), entry.seed_graph);
    const identity = await deriveIdentity(entry.login, entry.password, entry.n);
    expectEqual(`${entry.login}/pi`, bytesToHex(serializePermutation(identity.secret)), entry.pi);
    expectEqual(`${entry.login}/g1`, bytesToHex(serializeGraph(identity.g1)), entry.g1);
    expectEqual(`${entry.login}/g2`, bytesToHex(serializeGraph(identity.g2)), entry.g2);
    checks++;
    if (!applyPermutation(identity.secret, identity.g1).equals(identity.g2)) {
      failures.push(`${entry.login}: secret does not map g1 to g2`);
    }
  }

  for (const entry of vectors.primitives.streams) {
    expectEqual(
      `stream/${entry.seed.slice(0, 8)}/${entry.count}`,
      bytesToHex(await streamBytes(hexToBytes(entry.seed), entry.count)),
      entry.bytes,
    );
  }
  for (const entry of vectors.primitives.permutations) {
    const p = await derivePermutation(hexToBytes(entry.seed), entry.n);
    expectEqual(`perm/${entry.seed.slice(0, 8)}/${entry.n}`, bytesToHex(serializePermutation(p)), entry.encoded);
  }
  for (const entry of vectors.primitives.graphs) {
    const g = await deriveGraph(hexToBytes(entry.seed), entry.n);
    expectEqual(`graph/${entry.seed.slice(0, 8)}/${entry.n}`, bytesToHex(serializeGraph(g)), entry.encoded);
  }

  return { checks, failures, pass: failures.length === 0 };
}
