// Graph and permutation values with the fixed binary wire encodings:
// u32 big-endian size header; graphs pack the strict upper triangle
// row-major, most-significant-bit first, zero padding bits.

import { concatBytes, readU32be, u32be } from "./encoding.js";

export const MAX_VERTICES = 1024;

export class Permutation {
  readonly mapping: Int32Array;

  constructor(mapping: ArrayLike<number>) {
    const arr = Int32Array.from(mapping);
    if (arr.length === 0) throw new Error("permutation must be nonempty");
    const seen = new Uint8Array(arr.length);
    for (const v of arr) {
      if (v < 0 || v >= arr.length) throw new Error("permutation images out of range");
      if (seen[v]) throw new Error("not a bijection: some image repeats");
      seen[v] = 1;
    }
    this.mapping = arr;
  }

  get n(): number {
    return this.mapping.length;
  }

  static identity(n: number): Permutation {
    const arr = new Int32Array(n);
    for (let i = 0; i < n; i++) arr[i] = i;
    return new Permutation(arr);
  }

  equals(other: Permutation): boolean {
    if (other.n !== this.n) return false;
    for (let i = 0; i < this.n; i++) if (this.mapping[i] !== other.mapping[i]) return false;
    return true;
  }
}

export class Graph {
  readonly n: number;
  /** Row-major n*n adjacency, 0/1, symmetric with a zero diagonal. */
  readonly adjacency: Uint8Array;

  constructor(n: number, adjacency: Uint8Array) {
    if (n < 1 || n > MAX_VERTICES) throw new Error(`graph size ${n} out of range`);
    if (adjacency.length !== n * n) throw new Error("adjacency has the wrong length");
    for (let u = 0; u < n; u++) {
      if (adjacency[u * n + u]) throw new Error("self-loops are not allowed");
      for (let v = u + 1; v < n; v++) {
        if (adjacency[u * n + v] !== adjacency[v * n + u]) throw new Error("adjacency must be symmetric");
      }
    }
    this.n = n;
    this.adjacency = adjacency;
  }

  static fromEdges(n: number, edges: Array<[number, number]>): Graph {
    const adj = new Uint8Array(n * n);
    for (const [u, v] of edges) {
      adj[u * n + v] = 1;
      adj[v * n + u] = 1;
    }
    return new Graph(n, adj);
  }

  hasEdge(u: number, v: number): boolean {
    return this.adjacency[u * this.n + v] === 1;
  }

  edgeCount(): number {
    let total = 0;
    for (const bit of this.adjacency) total += bit;
    return total / 2;
  }

  equals(other: Graph): boolean {
    if (other.n !== this.n) return false;
    for (let i = 0; i < this.adjacency.length; i++) {
      if (this.adjacency[i] !== other.adjacency[i]) return false;
    }
    return true;
  }
}

/** Relabel g by p: the result has edge (p[u], p[v]) iff g has edge (u, v). */
export function applyPermutation(p: Permutation, g: Graph): Graph {
  if (p.n !== g.n) throw new Error(`size mismatch: permutation n=${p.n}, graph n=${g.n}`);
  const n = g.n;
  const out = new Uint8Array(n * n);
  const m = p.mapping;
  for (let u = 0; u < n; u++) {
    for (let v = u + 1; v < n; v++) {
      if (g.adjacency[u * n + v]) {
        out[m[u] * n + m[v]] = 1;
        out[m[v] * n + m[u]] = 1;
      }
    }
  }
  return new Graph(n, out);
}

/** Composition in application order: apply `first`, then `second`. */
export function compose(first: Permutation, second: Permutation): Permutation {
  if (first.n !== second.n) throw new Error("size mismatch");
  const out = new Int32Array(first.n);
  for (let i = 0; i < first.n; i++) out[i] = second.mapping[first.mapping[i]];
  return new Permutation(out);
}

export function invert(p: Permutation): Permutation {
  const out = new Int32Array(p.n);
  for (let i = 0; i < p.n; i++) out[p.mapping[i]] = i;
  return new Permutation(out);
}

export function pairCount(n: number): number {
  return (n * (n - 1)) / 2;
}

export function serializeGraph(g: Graph): Uint8Array {
  const m = pairCount(g.n);
  const payload = new Uint8Array(Math.ceil(m / 8));
  let k = 0;
  for (let u = 0; u < g.n; u++) {
    for (let v = u + 1; v < g.n; v++) {
      if (g.adjacency[u * g.n + v]) payload[k >> 3] |= 1 << (7 - (k & 7));
      k++;
    }
  }
  return concatBytes(u32be(g.n), payload);
}

export function deserializeGraph(data: Uint8Array): Graph {
  if (data.length < 4) throw new Error("graph encoding shorter than header");
  const n = readU32be(data, 0);
  if (n === 0) throw new Error("graph must have at least one vertex");
  if (n > MAX_VERTICES) throw new Error(`graph size ${n} exceeds limit`);
  const m = pairCount(n);
  if (data.length !== 4 + Math.ceil(m / 8)) throw new Error("graph encoding has the wrong length");
  const payload = data.subarray(4);
  for (let k = m; k < payload.length * 8; k++) {
    if (payload[k >> 3] & (1 << (7 - (k & 7)))) throw new Error("nonzero padding bits");
  }
  const adj = new Uint8Array(n * n);
  let k = 0;
  for (let u = 0; u < n; u++) {
    for (let v = u + 1; v < n; v++) {
      if (payload[k >> 3] & (1 << (7 - (k & 7)))) {
        adj[u * n + v] = 1;
        adj[v * n + u] = 1;
      }
      k++;
    }
  }
  return new Graph(n, adj);
}

export function serializePermutation(p: Permutation): Uint8Array {
  const out = new Uint8Array(4 + 4 * p.n);
  const view = new DataView(out.buffer);
  view.setUint32(0, p.n, false);
  for (let i = 0; i < p.n; i++) view.setUint32(4 + 4 * i, p.mapping[i], false);
  return out;
}

export function deserializePermutation(data: Uint8Array): Permutation {
  if (data.length < 4) throw new Error("permutation encoding shorter than header");
  const n = readU32be(data, 0);
  if (n === 0 || n > MAX_VERTICES) throw new Error("permutation size out of range");
  if (data.length !== 4 + 4 * n) throw new Error("permutation encoding has the wrong length");
  const images = new Int32Array(n);
  for (let i = 0; i < n; i++) images[i] = readU32be(data, 4 + 4 * i);
  return new Permutation(images);
}
