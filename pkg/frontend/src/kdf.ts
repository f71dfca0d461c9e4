// Credential-to-key derivation, byte-compatible with the verifier-side
// tooling and pinned by the shared golden vectors: a domain-separated
// SHA-256 seed expands through a hash counter stream into a Fisher-Yates
// permutation (the secret) and an edge-probability-1/2 graph.
//
// Everything is deterministic in (login, password, n); nothing here may
// touch a nondeterministic randomness source.

import { concatBytes, u64be, utf8 } from "./encoding.js";
import { applyPermutation, Graph, pairCount, Permutation } from "./graphs.js";

export const VERSION_TAG = "GIZKP-v1";
const FIELD_SEP = Uint8Array.of(0x1f);

export interface Identity {
  secret: Permutation;
  g1: Graph;
  g2: Graph;
}

async function sha256(data: Uint8Array): Promise<Uint8Array> {
  const buffer = new Uint8Array(data).buffer as ArrayBuffer;
  return new Uint8Array(await crypto.subtle.digest("SHA-256", buffer));
}

export async function deriveSeed(
  login: string,
  password: string,
  domainTag: string,
  versionTag: string = VERSION_TAG,
): Promise<Uint8Array> {
  if (!login || !password) throw new Error("login and password must be nonempty");
  return sha256(
    concatBytes(utf8(versionTag), FIELD_SEP, utf8(domainTag), FIELD_SEP, utf8(login), FIELD_SEP, utf8(password)),
  );
}

/** Deterministic byte stream: block i is SHA-256(seed | u64-be(i)). */
export class SeedStream {
  private blockIndex = 0;
  private buffer: Uint8Array = new Uint8Array(0);

  constructor(private readonly seed: Uint8Array) {
    if (seed.length !== 32) throw new Error("seed must be exactly 32 bytes");
  }

  async read(count: number): Promise<Uint8Array> {
    const chunks: Uint8Array[] = [this.buffer];
    let have = this.buffer.length;
    while (have < count) {
      const block = await sha256(concatBytes(this.seed, u64be(BigInt(this.blockIndex))));
      this.blockIndex++;
      chunks.push(block);
      have += block.length;
    }
    const data = concatBytes(...chunks);
    this.buffer = data.subarray(count);
    return data.subarray(0, count);
  }

  async nextU64(): Promise<bigint> {
    const bytes = await this.read(8);
    return new DataView(bytes.buffer, bytes.byteOffset, 8).getBigUint64(0, false);
  }
}

export async function streamBytes(seed: Uint8Array, count: number): Promise<Uint8Array> {
  return new SeedStream(seed).read(count);
}

/** Exactly uniform draw from [0, m) via 64-bit rejection sampling. */
export async function uniformInt(stream: SeedStream, m: number): Promise<number> {
  if (m < 1) throw new Error("m must be >= 1");
  const big = BigInt(m);
  const limit = ((1n << 64n) / big) * big;
  for (let attempt = 0; attempt < 1000; attempt++) {
    const chunk = await stream.nextU64();
    if (chunk < limit) return Number(chunk % big);
  }
  throw new Error("rejection sampling failed to terminate");
}

export async function derivePermutation(seed: Uint8Array, n: number): Promise<Permutation> {
  if (n < 1) throw new Error("n must be >= 1");
  const stream = new SeedStream(seed);
  const mapping = new Int32Array(n);
  for (let i = 0; i < n; i++) mapping[i] = i;
  for (let i = n - 1; i >= 1; i--) {
    const j = await uniformInt(stream, i + 1);
    const tmp = mapping[i];
    mapping[i] = mapping[j];
    mapping[j] = tmp;
  }
  return new Permutation(mapping);
}

export async function deriveGraph(seed: Uint8Array, n: number): Promise<Graph> {
  if (n < 1) throw new Error("n must be >= 1");
  const m = pairCount(n);
  const data = await streamBytes(seed, Math.ceil(m / 8));
  const adj = new Uint8Array(n * n);
  let k = 0;
  for (let u = 0; u < n; u++) {
    for (let v = u + 1; v < n; v++) {
      if (data[k >> 3] & (1 << (7 - (k & 7)))) {
        adj[u * n + v] = 1;
        adj[v * n + u] = 1;
      }
      k++;
    }
  }
  return new Graph(n, adj);
}

export async function deriveIdentity(login: string, password: string, n: number): Promise<Identity> {
  const secret = await derivePermutation(await deriveSeed(login, password, "secret"), n);
  const g1 = await deriveGraph(await deriveSeed(login, password, "graph"), n);
  const g2 = applyPermutation(secret, g1);
  return { secret, g1, g2 };
}
