"""Built-in correctness checks: exhaustive small-case completeness and a
quick cheater-rate estimate.  Used by `gizkp selftest` and the test suite.
"""

import itertools
import random
from dataclasses import dataclass

import numpy as np

from . import protocol
from .graphs import Graph, Permutation, apply_permutation, pair_count
from .kdf import IdentityMaterial, PublicPair


def all_graphs(n):
    """Every simple graph on n vertices (2**(n*(n-1)/2) of them)."""
    m = pair_count(n)
    iu, iv = np.triu_indices(n, k=1)
    out = []
    for mask in range(2**m):
        adj = np.zeros((n, n), dtype=bool)
        for k in range(m):
            if mask >> k & 1:
                adj[iu[k], iv[k]] = True
        adj |= adj.T
        out.append(Graph(adj))
    return out


def all_permutations(n):
    return [Permutation(np.asarray(p, dtype=np.int64)) for p in itertools.permutations(range(n))]


def exhaustive_completeness_check(n: int = 4) -> int:
    """Count honest-round verification failures over every graph on n
    vertices, every secret, every relabelling, and all four side/challenge
    combinations, driving the real prover/verifier code.  Zero means the
    response algebra is complete.
    """
    failures = 0
    perms = all_permutations(n)
    for g1 in all_graphs(n):
        for pi in perms:
            identity = IdentityMaterial(pi, PublicPair(g1, apply_permutation(pi, g1)))
            sides = (identity.public_pair.g1, identity.public_pair.g2)
            for eps in perms:
                for a in (1, 2):
                    h = apply_permutation(eps, sides[a - 1])
                    for b in (1, 2):
                        state = protocol.ProverRoundState(identity, a, eps, h)
                        challenge = protocol.Challenge(b)
                        response = protocol.prover_respond(state, challenge)
                        result = protocol.verifier_verify(identity.public_pair, h, challenge, response)
                        if not result.accepted:
                            failures += 1
    return failures


def cheater_round_rate(rounds: int = 10_000, n: int = 8, seed: int | None = None) -> float:
    """Per-round acceptance rate of the optimal no-secret adversary."""
    rng = random.Random(seed) if seed is not None else protocol.SYSTEM_RANDOM
    pi = protocol.random_permutation(n, rng)
    g1 = random_graph(n, rng)
    pair = PublicPair(g1, apply_permutation(pi, g1))
    cheater = protocol.CheatingProver(pair, rng)
    verifier = protocol.Verifier(pair, rng)
    wins = 0
    for _ in range(rounds):
        commitment = cheater.commit()
        challenge = verifier.challenge(commitment)
        response = cheater.respond(challenge)
        if verifier.verify(commitment, challenge, response).accepted:
            wins += 1
    return wins / rounds


def random_graph(n, rng):
    """Uniform simple graph on n vertices (edge probability 1/2)."""
    adj = np.zeros((n, n), dtype=bool)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.randrange(2):
                adj[u, v] = adj[v, u] = True
    return Graph(adj)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def run_selftest(seed: int | None = 20_260_810) -> list[CheckResult]:
    """The checks behind `gizkp selftest`; all must pass for exit 0."""
    results = []

    failures = exhaustive_completeness_check(4)
    results.append(
        CheckResult(
            "completeness-exhaustive-n4",
            failures == 0,
            f"{failures} failures over all graphs x secrets x relabellings x cases",
        )
    )

    rate = cheater_round_rate(10_000, seed=seed)
    # 4-sigma binomial band around 1/2 at 10^4 rounds.
    ok = 0.48 <= rate <= 0.52
    results.append(CheckResult("cheater-round-rate", ok, f"rate {rate:.4f}, expected 0.5 +/- 0.02"))

    return results
