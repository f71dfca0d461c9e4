"""Zero-knowledge authentication from the graph relabelling problem.

A client derives a secret vertex permutation and a public graph pair
from its credentials, registers only the pair, and later proves it
knows the permutation through an interactive challenge-response
protocol that reveals nothing else.
"""

from .graphs import (
    DecodeError,
    Graph,
    Permutation,
    apply_permutation,
    brute_force_isomorphism,
    compose,
    deserialize_graph,
    deserialize_permutation,
    graphs_equal,
    invert,
    serialize_graph,
    serialize_permutation,
)
from .kdf import (
    Credentials,
    IdentityMaterial,
    KdfParams,
    PublicPair,
    Seed,
    WeakInstanceWarning,
    derive_graph,
    derive_identity,
    derive_permutation,
    derive_seed,
    stream_bytes,
)
from .protocol import (
    Challenge,
    CheatingProver,
    Commitment,
    HonestProver,
    ProtocolError,
    Response,
    RoundStateError,
    Transcript,
    Verifier,
    prover_commit,
    prover_respond,
    run_session,
    simulate_transcript,
    verifier_challenge,
    verifier_verify,
)

__version__ = "0.1.0"
