"""Deterministic derivation of the secret permutation and public graph pair.

Everything below is a pure function of (credentials, params): the same
login and password always reproduce bit-identical key material, on any
platform.  That determinism is what lets the secret live only on the
client; the server ever sees just the two public graphs.

Construction: a domain-separated 256-bit digest seeds a hash-counter
byte stream, which drives a Fisher-Yates shuffle (secret permutation)
and an edge-probability-1/2 random graph (first public graph).  The
second public graph is the first one relabelled by the secret.
"""

import hashlib
import struct
import warnings
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, Permutation, apply_permutation, pair_count

VERSION_TAG = "GIZKP-v1"

# Separator between KDF input fields; keeps ("ab","c") and ("a","bc") distinct.
_FIELD_SEP = b"\x1f"

MAX_LOGIN_BYTES = 256
MAX_PASSWORD_BYTES = 1024

MIN_GRAPH_SIZE = 8
MAX_GRAPH_SIZE = 1024

# Retries in the unbiased-sampling rejection loop; each retry rejects with
# probability < 1/2, so hitting the cap has probability < 2^-1000.
_REJECTION_CAP = 1000


class WeakInstanceWarning(UserWarning):
    """Derived public graph makes the secret easy to recover."""


def resolve_hash(hash_id: str):
    """Return the hashlib constructor for a 256-bit digest, or raise."""
    try:
        ctor = getattr(hashlib, hash_id.replace("-", "_"))
    except AttributeError:
        raise ValueError(f"unknown hash function: {hash_id!r}") from None
    if ctor().digest_size != 32:
        raise ValueError(f"hash {hash_id!r} does not produce a 256-bit digest")
    return ctor


@dataclass(frozen=True)
class Credentials:
    login: str
    password: str

    def __post_init__(self):
        if not self.login:
            raise ValueError("login must be nonempty")
        if not self.password:
            raise ValueError("password must be nonempty")
        if len(self.login.encode()) > MAX_LOGIN_BYTES:
            raise ValueError(f"login exceeds {MAX_LOGIN_BYTES} bytes")
        if len(self.password.encode()) > MAX_PASSWORD_BYTES:
            raise ValueError(f"password exceeds {MAX_PASSWORD_BYTES} bytes")


@dataclass(frozen=True)
class Seed:
    digest: bytes

    def __post_init__(self):
        if len(self.digest) != 32:
            raise ValueError("seed must be exactly 32 bytes")


@dataclass(frozen=True)
class KdfParams:
    n: int = 128
    hash_id: str = "sha256"
    version_tag: str = VERSION_TAG

    def __post_init__(self):
        if not MIN_GRAPH_SIZE <= self.n <= MAX_GRAPH_SIZE:
            raise ValueError(f"n must be in [{MIN_GRAPH_SIZE}, {MAX_GRAPH_SIZE}]")
        resolve_hash(self.hash_id)


@dataclass(frozen=True)
class PublicPair:
    g1: Graph
    g2: Graph

    def __post_init__(self):
        if self.g1.n != self.g2.n:
            raise ValueError("public graphs must have the same size")

    @property
    def n(self):
        return self.g1.n


@dataclass(frozen=True)
class IdentityMaterial:
    secret: Permutation
    public_pair: PublicPair

    def __post_init__(self):
        if apply_permutation(self.secret, self.public_pair.g1) != self.public_pair.g2:
            raise ValueError("secret does not map g1 to g2")

    @property
    def n(self):
        return self.public_pair.n


def derive_seed(credentials: Credentials, domain_tag: str, params: KdfParams | None = None) -> Seed:
    """H256(version_tag | 0x1f | domain_tag | 0x1f | login | 0x1f | password)."""
    params = params or KdfParams()
    h = resolve_hash(params.hash_id)()
    h.update(params.version_tag.encode())
    h.update(_FIELD_SEP)
    h.update(domain_tag.encode())
    h.update(_FIELD_SEP)
    h.update(credentials.login.encode())
    h.update(_FIELD_SEP)
    h.update(credentials.password.encode())
    return Seed(h.digest())


class SeedStream:
    """Deterministic byte stream: block i is H256(seed | u64-be(i)).

    The stream is prefix-stable: the first k bytes never depend on how
    much is read afterwards.
    """

    def __init__(self, seed: Seed, hash_id: str = "sha256"):
        self._seed = seed.digest
        self._hash = resolve_hash(hash_id)
        self._block_index = 0
        self._buffer = b""

    def read(self, count: int) -> bytes:
        if count < 0:
            raise ValueError("count must be nonnegative")
        chunks = [self._buffer]
        have = len(self._buffer)
        while have < count:
            block = self._hash(self._seed + struct.pack(">Q", self._block_index)).digest()
            self._block_index += 1
            chunks.append(block)
            have += len(block)
        data = b"".join(chunks)
        self._buffer = data[count:]
        return data[:count]

    def next_u64(self) -> int:
        return struct.unpack(">Q", self.read(8))[0]


def stream_bytes(seed: Seed, count: int, hash_id: str = "sha256") -> bytes:
    """First `count` bytes of the seed's deterministic stream."""
    return SeedStream(seed, hash_id).read(count)


def uniform_int(stream: SeedStream, m: int) -> int:
    """Exactly uniform draw from [0, m) via 64-bit rejection sampling."""
    if m < 1:
        raise ValueError("m must be >= 1")
    limit = (2**64 // m) * m
    for _ in range(_REJECTION_CAP):
        chunk = stream.next_u64()
        if chunk < limit:
            return chunk % m
    raise RuntimeError("rejection sampling failed to terminate")


def derive_permutation(seed: Seed, n: int, hash_id: str = "sha256") -> Permutation:
    """Fisher-Yates shuffle of [0..n-1] driven by the seed stream."""
    if n < 1:
        raise ValueError("n must be >= 1")
    stream = SeedStream(seed, hash_id)
    mapping = list(range(n))
    for i in range(n - 1, 0, -1):
        j = uniform_int(stream, i + 1)
        mapping[i], mapping[j] = mapping[j], mapping[i]
    return Permutation._trusted(np.asarray(mapping, dtype=np.int64))


def derive_graph(seed: Seed, n: int, hash_id: str = "sha256") -> Graph:
    """Random graph with edge probability 1/2, bits from the seed stream.

    Bit k of the stream (MSB-first) decides upper-triangle pair k, in the
    same row-major pair order the wire encoding uses.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m = pair_count(n)
    data = stream_bytes(seed, (m + 7) // 8, hash_id)
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))[:m]
    adj = np.zeros((n, n), dtype=bool)
    iu, iv = np.triu_indices(n, k=1)
    adj[iu, iv] = bits.astype(bool)
    adj |= adj.T
    return Graph._trusted(adj)


def weak_instance_reason(g: Graph) -> str | None:
    """Why this public graph would make the secret trivially recoverable."""
    edges = g.edge_count()
    if edges == 0:
        return "graph has no edges"
    if edges == pair_count(g.n):
        return "graph is complete"
    # Unreachable for n >= 2 (two vertices always share a degree), kept for
    # completeness of the weakness screen.
    if len(set(g.degrees().tolist())) == g.n:
        return "all vertex degrees are distinct"
    return None


def derive_identity(credentials: Credentials, params: KdfParams | None = None) -> IdentityMaterial:
    """Derive the secret permutation and public pair from credentials.

    Emits a WeakInstanceWarning (non-fatal) when the derived public graph
    is degenerate enough that the secret is recoverable in polynomial time.
    """
    params = params or KdfParams()
    secret = derive_permutation(derive_seed(credentials, "secret", params), params.n, params.hash_id)
    g1 = derive_graph(derive_seed(credentials, "graph", params), params.n, params.hash_id)
    reason = weak_instance_reason(g1)
    if reason is not None:
        warnings.warn(f"weak identity instance: {reason}", WeakInstanceWarning, stacklevel=2)
    g2 = apply_permutation(secret, g1)
    return IdentityMaterial(secret=secret, public_pair=PublicPair(g1=g1, g2=g2))
