// Browser-side prover rounds.  Round randomness (side choice and the
// fresh relabelling) comes from the browser CSPRNG, never from the
// derived deterministic stream: reusing a relabelling leaks the secret.

import { applyPermutation, compose, Graph, invert, Permutation } from "./graphs.js";
import { Identity } from "./kdf.js";

function csprngBelow(bound: number): number {
  // rejection sampling over 32-bit words keeps the draw exactly uniform
  const limit = Math.floor(2 ** 32 / bound) * bound;
  const word = new Uint32Array(1);
  for (;;) {
    crypto.getRandomValues(word);
    if (word[0] < limit) return word[0] % bound;
  }
}

export function randomPermutation(n: number): Permutation {
  const mapping = new Int32Array(n);
  for (let i = 0; i < n; i++) mapping[i] = i;
  for (let i = n - 1; i >= 1; i--) {
    const j = csprngBelow(i + 1);
    const tmp = mapping[i];
    mapping[i] = mapping[j];
    mapping[j] = tmp;
  }
  return new Permutation(mapping);
}

export interface RoundState {
  side: 1 | 2;
  epsilon: Permutation;
  h: Graph;
  responded: boolean;
}

export function proverCommit(identity: Identity): RoundState {
  const side = (1 + csprngBelow(2)) as 1 | 2;
  const epsilon = randomPermutation(identity.g1.n);
  const h = applyPermutation(epsilon, side === 1 ? identity.g1 : identity.g2);
  return { side, epsilon, h, responded: false };
}

export function proverRespond(state: RoundState, challenge: number, identity: Identity): Permutation {
  if (challenge !== 1 && challenge !== 2) throw new Error("challenge must be 1 or 2");
  if (state.responded) throw new Error("round state already consumed");
  state.responded = true;
  const epsilonInverse = invert(state.epsilon);
  if (state.side === challenge) return epsilonInverse;
  if (state.side === 1) return compose(epsilonInverse, identity.secret);
  return compose(epsilonInverse, invert(identity.secret));
}

/** Local mirror of the server check, used by tests and the self-test UI. */
export function verifyRound(g1: Graph, g2: Graph, h: Graph, challenge: number, chi: Permutation): boolean {
  const target = challenge === 1 ? g1 : g2;
  if (h.n !== target.n || chi.n !== target.n) return false;
  return applyPermutation(chi, h).equals(target);
}
