#!/usr/bin/env python3
"""Regenerate vectors/kdf_golden.json, the pinned derivation vectors.

Every implementation of the key derivation (this package, the browser
client) must reproduce these bytes exactly.  Regenerating should be a
no-op unless the derivation itself changed, which is a breaking,
version-tag-bumping event.
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from gizkp.graphs import serialize_graph, serialize_permutation
from gizkp.kdf import (
    Credentials,
    KdfParams,
    Seed,
    derive_graph,
    derive_identity,
    derive_permutation,
    derive_seed,
    stream_bytes,
)

CREDENTIAL_SET = [
    ("alice", "correct horse battery staple", 16),
    ("bob", "hunter2", 16),
    ("carol", "p4ssw0rd!", 32),
    ("dave", "xyzzy-plugh", 8),
    ("erin", "6LrLBkzTV2RZ", 8),
    ("frank.lee+test@example.com", "a long password with spaces and trailing space ", 16),
    ("grace", "ümläut-pässwörd", 16),
    ("heidi", "密码パスワード", 24),
    ("ivan", "short", 128),
    ("judy", "0123456789abcdef0123456789abcdef", 128),
]


def identity_vectors():
    out = []
    for login, password, n in CREDENTIAL_SET:
        credentials = Credentials(login, password)
        params = KdfParams(n=n)
        seed_secret = derive_seed(credentials, "secret", params)
        seed_graph = derive_seed(credentials, "graph", params)
        identity = derive_identity(credentials, params)
        assert identity.secret == derive_permutation(seed_secret, n)
        assert identity.public_pair.g1 == derive_graph(seed_graph, n)
        out.append(
            {
                "login": login,
                "password": password,
                "n": n,
                "seed_secret": seed_secret.digest.hex(),
                "seed_graph": seed_graph.digest.hex(),
                "pi": serialize_permutation(identity.secret).hex(),
                "g1": serialize_graph(identity.public_pair.g1).hex(),
                "g2": serialize_graph(identity.public_pair.g2).hex(),
            }
        )
    return out


def primitive_vectors():
    seeds = [bytes([i]) * 32 for i in (0, 1, 7, 42, 255)]
    streams = [{"seed": s.hex(), "count": c, "bytes": stream_bytes(Seed(s), c).hex()}
               for s, c in zip(seeds, (0, 1, 32, 33, 100))]
    permutations = [
        {"seed": s.hex(), "n": n, "encoded": serialize_permutation(derive_permutation(Seed(s), n)).hex()}
        for s, n in zip(seeds, (1, 2, 3, 16, 64))
    ]
    graphs = [
        {"seed": s.hex(), "n": n, "encoded": serialize_graph(derive_graph(Seed(s), n)).hex()}
        for s, n in zip(seeds, (1, 2, 3, 16, 64))
    ]
    return {"streams": streams, "permutations": permutations, "graphs": graphs}


def main():
    target = pathlib.Path(__file__).resolve().parent.parent / "vectors" / "kdf_golden.json"
    payload = {
        "version": "GIZKP-v1",
        "hash_id": "sha256",
        "identities": identity_vectors(),
        "primitives": primitive_vectors(),
    }
    target.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {target} ({len(payload['identities'])} identities)")


if __name__ == "__main__":
    main()
