"""Graph and permutation algebra with bit-exact wire encodings.

Graphs are simple and undirected: symmetric boolean adjacency, no
self-loops, vertices labelled 0..n-1.  Permutations are bijections on
vertex labels.  Both are immutable values; every operation here is a
pure function, so instances can be shared freely across threads.
"""

import functools
import itertools
import struct

import numpy as np

# Wire encodings cap n; protocol deployments stay well below this.
MAX_VERTICES = 1024

# Brute-force isomorphism search is factorial; refuse anything bigger.
ORACLE_MAX_VERTICES = 10


class DecodeError(ValueError):
    """Raised when a wire encoding cannot be decoded."""


class Permutation:
    """A bijection on {0, ..., n-1}; mapping[i] is the image of vertex i."""

    __slots__ = ("mapping",)

    def __init__(self, mapping):
        arr = np.asarray(mapping, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("permutation must be a nonempty 1-d sequence")
        n = arr.size
        seen = np.zeros(n, dtype=bool)
        if arr.min() < 0 or arr.max() >= n:
            raise ValueError("permutation images out of range")
        seen[arr] = True
        if not seen.all():
            raise ValueError("not a bijection: some image repeats")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "mapping", arr)

    @classmethod
    def _trusted(cls, arr):
        # Internal fast path for arrays already known to be bijections.
        p = object.__new__(cls)
        arr.flags.writeable = False
        object.__setattr__(p, "mapping", arr)
        return p

    @classmethod
    def identity(cls, n):
        return cls._trusted(np.arange(n, dtype=np.int64))

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @property
    def n(self):
        return self.mapping.size

    def __getitem__(self, i):
        return int(self.mapping[i])

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.mapping, other.mapping)

    def __hash__(self):
        return hash(self.mapping.tobytes())

    def __repr__(self):
        return f"Permutation({self.mapping.tolist()})"


class Graph:
    """Simple undirected graph, dense boolean adjacency matrix."""

    __slots__ = ("adjacency",)

    def __init__(self, adjacency):
        adj = np.asarray(adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] == 0:
            raise ValueError("adjacency must be a nonempty square matrix")
        if adj.shape[0] > MAX_VERTICES:
            raise ValueError(f"graph larger than {MAX_VERTICES} vertices")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if adj.diagonal().any():
            raise ValueError("self-loops are not allowed")
        adj = adj.copy()
        adj.flags.writeable = False
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def _trusted(cls, adj):
        # Internal fast path for matrices valid by construction.
        g = object.__new__(cls)
        adj.flags.writeable = False
        object.__setattr__(g, "adjacency", adj)
        return g

    @classmethod
    def from_edges(cls, n, edges):
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u == v:
                raise ValueError("self-loops are not allowed")
            adj[u, v] = adj[v, u] = True
        return cls(adj)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    @property
    def n(self):
        return self.adjacency.shape[0]

    def has_edge(self, u, v):
        return bool(self.adjacency[u, v])

    def edges(self):
        """Yield edges as (u, v) pairs with u < v."""
        iu, iv = np.nonzero(np.triu(self.adjacency, k=1))
        return list(zip(iu.tolist(), iv.tolist()))

    def edge_count(self):
        return int(self.adjacency.sum()) // 2

    def degrees(self):
        return self.adjacency.sum(axis=1)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return graphs_equal(self, other)

    def __hash__(self):
        return hash((self.n, self.adjacency.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edges()})"


@functools.lru_cache(maxsize=None)
def _upper_triangle(n):
    """Strict upper-triangle index pair arrays in row-major pair order."""
    return np.triu_indices(n, k=1)


def pair_count(n):
    """Number of unordered vertex pairs, n*(n-1)/2."""
    return n * (n - 1) // 2


def apply_permutation(p: Permutation, g: Graph) -> Graph:
    """Relabel g by p: the result has edge (p[u], p[v]) iff g has edge (u, v)."""
    if p.n != g.n:
        raise ValueError(f"size mismatch: permutation n={p.n}, graph n={g.n}")
    inv = np.argsort(p.mapping)
    return Graph._trusted(g.adjacency[np.ix_(inv, inv)])


def compose(first: Permutation, second: Permutation) -> Permutation:
    """Composition in application order: apply `first`, then `second`."""
    if first.n != second.n:
        raise ValueError(f"size mismatch: {first.n} vs {second.n}")
    return Permutation._trusted(second.mapping[first.mapping])


def invert(p: Permutation) -> Permutation:
    """Inverse permutation: invert(p)[p[i]] == i."""
    return Permutation._trusted(np.argsort(p.mapping))


def graphs_equal(a: Graph, b: Graph) -> bool:
    """Label-wise equality of edge sets (not isomorphism)."""
    return a.n == b.n and np.array_equal(a.adjacency, b.adjacency)


def serialize_graph(g: Graph) -> bytes:
    """Encode as u32 big-endian n, then the strict upper triangle row-major,
    packed MSB-first with zero padding bits."""
    iu, iv = _upper_triangle(g.n)
    bits = g.adjacency[iu, iv]
    return struct.pack(">I", g.n) + np.packbits(bits).tobytes()


def deserialize_graph(data: bytes) -> Graph:
    """Decode `serialize_graph` output; rejects any malformed encoding."""
    if len(data) < 4:
        raise DecodeError("graph encoding shorter than header")
    (n,) = struct.unpack(">I", data[:4])
    if n == 0:
        raise DecodeError("graph must have at least one vertex")
    if n > MAX_VERTICES:
        raise DecodeError(f"graph size {n} exceeds limit {MAX_VERTICES}")
    m = pair_count(n)
    expected = 4 + (m + 7) // 8
    if len(data) != expected:
        raise DecodeError(f"graph encoding has {len(data)} bytes, expected {expected}")
    payload = np.frombuffer(data[4:], dtype=np.uint8)
    bits = np.unpackbits(payload)
    if bits[m:].any():
        raise DecodeError("nonzero padding bits")
    adj = np.zeros((n, n), dtype=bool)
    iu, iv = _upper_triangle(n)
    adj[iu, iv] = bits[:m].astype(bool)
    adj |= adj.T
    return Graph._trusted(adj)


def serialize_permutation(p: Permutation) -> bytes:
    """Encode as u32 big-endian n followed by n u32 big-endian images."""
    return struct.pack(">I", p.n) + p.mapping.astype(">u4").tobytes()


def deserialize_permutation(data: bytes) -> Permutation:
    """Decode `serialize_permutation` output; rejects non-bijections."""
    if len(data) < 4:
        raise DecodeError("permutation encoding shorter than header")
    (n,) = struct.unpack(">I", data[:4])
    if n == 0:
        raise DecodeError("permutation must have at least one element")
    if n > MAX_VERTICES:
        raise DecodeError(f"permutation size {n} exceeds limit {MAX_VERTICES}")
    if len(data) != 4 + 4 * n:
        raise DecodeError(f"permutation encoding has {len(data)} bytes, expected {4 + 4 * n}")
    images = np.frombuffer(data[4:], dtype=">u4").astype(np.int64)
    try:
        return Permutation(images)
    except ValueError as exc:
        raise DecodeError(f"not a bijection: {exc}") from exc


def brute_force_isomorphism(a: Graph, b: Graph) -> Permutation | None:
    """Exhaustively search for p with apply_permutation(p, a) == b.

    Desk-scale oracle only: refuses n > 10 to keep the factorial search
    under control.  Returns None when no isomorphism exists.
    """
    if a.n > ORACLE_MAX_VERTICES or b.n > ORACLE_MAX_VERTICES:
        raise ValueError(f"brute-force oracle limited to n <= {ORACLE_MAX_VERTICES}")
    if a.n != b.n or a.edge_count() != b.edge_count():
        return None
    if sorted(a.degrees().tolist()) != sorted(b.degrees().tolist()):
        return None
    adj_b = b.adjacency
    for candidate in itertools.permutations(range(a.n)):
        p = np.asarray(candidate, dtype=np.int64)
        inv = np.argsort(p)
        if np.array_equal(a.adjacency[np.ix_(inv, inv)], adj_b):
            return Permutation._trusted(p)
    return None
