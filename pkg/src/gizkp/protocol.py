"""Interactive proof-of-knowledge of the graph relabelling secret.

One round: the prover picks a side `a` of its public pair, commits to a
freshly relabelled copy H, the verifier challenges with a side `b`, and
the prover answers with a permutation mapping H onto the challenged
graph.  Without the secret, a prover can answer only the side it
guessed, so each round halves a cheater's survival odds: k rounds leave
2**-k.  Ten rounds give 99.902% confidence (1 - 2**-10); the figure is
sometimes loosely quoted as 99.99%, which rounds up.

Round randomness (side choice, relabelling, challenge) always comes from
a CSPRNG, never from the credential-derived stream; a deterministic
relabelling would leak the secret after two sessions.
"""

import random
from dataclasses import dataclass, field

from .graphs import Graph, Permutation, apply_permutation, compose, graphs_equal, invert
from .kdf import IdentityMaterial, PublicPair

import numpy as np

SYSTEM_RANDOM = random.SystemRandom()


class ProtocolError(Exception):
    """Malformed or mis-sized message; the round is rejected."""


class RoundStateError(Exception):
    """Round state misuse, e.g. answering the same commitment twice."""


def random_permutation(n: int, rng: random.Random = SYSTEM_RANDOM) -> Permutation:
    """Uniform permutation via Fisher-Yates on draws from rng."""
    mapping = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.randrange(i + 1)
        mapping[i], mapping[j] = mapping[j], mapping[i]
    return Permutation._trusted(np.asarray(mapping, dtype=np.int64))


@dataclass(frozen=True)
class Commitment:
    h: Graph


@dataclass(frozen=True)
class Challenge:
    b: int

    def __post_init__(self):
        if self.b not in (1, 2):
            raise ValueError("challenge must be 1 or 2")


@dataclass(frozen=True)
class Response:
    chi: Permutation


@dataclass(frozen=True)
class RoundResult:
    accepted: bool
    cause: str  # "ok" | "wrong_answer" | "protocol_error"


class ProverRoundState:
    """Secret state of one uncommitted round; consumed by the response."""

    __slots__ = ("identity", "a", "epsilon", "h", "_responded")

    def __init__(self, identity: IdentityMaterial, a: int, epsilon: Permutation, h: Graph):
        self.identity = identity
        self.a = a
        self.epsilon = epsilon
        self.h = h
        self._responded = False


def prover_commit(
    identity: IdentityMaterial, rng: random.Random = SYSTEM_RANDOM
) -> tuple[ProverRoundState, Commitment]:
    """Pick a side uniformly, relabel it with a fresh random permutation."""
    a = 1 + rng.randrange(2)
    epsilon = random_permutation(identity.n, rng)
    source = identity.public_pair.g1 if a == 1 else identity.public_pair.g2
    h = apply_permutation(epsilon, source)
    return ProverRoundState(identity, a, epsilon, h), Commitment(h)


def prover_respond(state: ProverRoundState, challenge: Challenge) -> Response:
    """Answer the challenge; consumes the round state.

    The response is the permutation mapping H onto the challenged graph:
    the relabelling inverse alone when the sides match, otherwise the
    inverse chained with the secret (or its inverse).
    """
    if state._responded:
        raise RoundStateError("round state already consumed; relabelling must not be reused")
    state._responded = True
    eps_inv = invert(state.epsilon)
    if state.a == challenge.b:
        chi = eps_inv
    elif state.a == 1:  # challenged on side 2
        chi = compose(eps_inv, state.identity.secret)
    else:  # a == 2, challenged on side 1
        chi = compose(eps_inv, invert(state.identity.secret))
    return Response(chi)


def verifier_challenge(rng: random.Random = SYSTEM_RANDOM) -> Challenge:
    return Challenge(1 + rng.randrange(2))


def verifier_verify(pair: PublicPair, h: Graph, challenge: Challenge, response: Response) -> RoundResult:
    """Accept iff the response maps H exactly onto the challenged graph."""
    if h.n != pair.n or response.chi.n != pair.n:
        return RoundResult(False, "protocol_error")
    target = pair.g1 if challenge.b == 1 else pair.g2
    if graphs_equal(apply_permutation(response.chi, h), target):
        return RoundResult(True, "ok")
    return RoundResult(False, "wrong_answer")


class HonestProver:
    """Prover holding the secret; answers every challenge correctly."""

    def __init__(self, identity: IdentityMaterial, rng: random.Random = SYSTEM_RANDOM):
        self.identity = identity
        self.rng = rng
        self._state: ProverRoundState | None = None

    def commit(self) -> Commitment:
        self._state, commitment = prover_commit(self.identity, self.rng)
        return commitment

    def respond(self, challenge: Challenge) -> Response:
        if self._state is None:
            raise RoundStateError("respond before commit")
        state, self._state = self._state, None
        return prover_respond(state, challenge)


class CheatingProver:
    """Adversary knowing only the public pair.

    Optimal no-secret strategy: guess the side that will be challenged,
    commit to a relabelling of it, and answer with the relabelling
    inverse.  The answer is correct exactly when the guess was, so each
    round succeeds with probability 1/2.
    """

    def __init__(self, pair: PublicPair, rng: random.Random = SYSTEM_RANDOM):
        self.pair = pair
        self.rng = rng
        self._epsilon: Permutation | None = None

    def commit(self) -> Commitment:
        guess = 1 + self.rng.randrange(2)
        self._epsilon = random_permutation(self.pair.n, self.rng)
        source = self.pair.g1 if guess == 1 else self.pair.g2
        return Commitment(apply_permutation(self._epsilon, source))

    def respond(self, challenge: Challenge) -> Response:
        if self._epsilon is None:
            raise RoundStateError("respond before commit")
        epsilon, self._epsilon = self._epsilon, None
        return Response(invert(epsilon))


class Verifier:
    """Challenge issuer and checker for one public pair."""

    def __init__(self, pair: PublicPair, rng: random.Random = SYSTEM_RANDOM):
        self.pair = pair
        self.rng = rng

    def challenge(self, commitment: Commitment) -> Challenge:
        if commitment.h.n != self.pair.n:
            raise ProtocolError(f"commitment graph has n={commitment.h.n}, expected {self.pair.n}")
        return verifier_challenge(self.rng)

    def verify(self, commitment: Commitment, challenge: Challenge, response: Response) -> RoundResult:
        return verifier_verify(self.pair, commitment.h, challenge, response)


@dataclass(frozen=True)
class TranscriptRound:
    h: Graph
    b: int
    chi: Permutation
    accepted: bool


@dataclass(frozen=True)
class Transcript:
    rounds: list[TranscriptRound] = field(default_factory=list)
    accepted: bool = False
    failure: str | None = None


def run_session(prover, verifier: Verifier, rounds: int) -> Transcript:
    """Drive commit -> challenge -> respond -> verify; abort at first failure."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    done: list[TranscriptRound] = []
    for _ in range(rounds):
        try:
            commitment = prover.commit()
            challenge = verifier.challenge(commitment)
            response = prover.respond(challenge)
        except ProtocolError:
            return Transcript(done, False, "protocol_error")
        result = verifier.verify(commitment, challenge, response)
        done.append(TranscriptRound(commitment.h, challenge.b, response.chi, result.accepted))
        if not result.accepted:
            return Transcript(done, False, result.cause)
    return Transcript(done, True, None)


def simulate_transcript(pair: PublicPair, rounds: int, rng: random.Random = SYSTEM_RANDOM) -> Transcript:
    """Produce accepting round triples from the public pair alone.

    Works backwards: draw the challenge and the answer first, then
    present the commitment that makes the answer verify.  For an honest
    verifier the output distribution matches real transcripts exactly,
    which is the sense in which transcripts carry zero knowledge.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    done = []
    for _ in range(rounds):
        b = 1 + rng.randrange(2)
        chi = random_permutation(pair.n, rng)
        target = pair.g1 if b == 1 else pair.g2
        h = apply_permutation(invert(chi), target)
        done.append(TranscriptRound(h, b, chi, True))
    return Transcript(done, True, None)
