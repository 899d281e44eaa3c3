"""Independent brute-force oracle for the 3-meaning / 3-utterance lattice.

Computes every listener/speaker level with plain probability arithmetic (no
log-space, no vectorization) and freezes the numbers into
tests/data/rsa_fixture.json. Written and run before the main implementation
is wired to the test, so the two sides stay independent.

Lattice: three bring-me meanings over objects {a, b, c}
    m0: {category: knife}            groundings {a}       cost 3
    m1: {class: tool}                groundings {a, b}    cost 1
    m2: {}                           groundings {a, b, c} cost 0
utterances = the same three descriptions (u_i has the grounding of m_i).
Literal truth: l(u, m) = [groundings(m) subset groundings(u)].
Prior: P(m) proportional to exp(beta1 * U - beta2 * cost) with utilities
U = (4, 1, 0), beta1 = 3, beta2 = 1.5, alpha = 2, alpha' = 1, k = 10.
"""

import json
import math
from pathlib import Path

GROUNDINGS = [{"a"}, {"a", "b"}, {"a", "b", "c"}]
COSTS = [3.0, 1.0, 0.0]
UTILITIES = [4.0, 1.0, 0.0]
BETA1, BETA2, ALPHA, ALPHA_PRIME, K = 3.0, 1.5, 2.0, 1.0, 10


def normalized(weights):
    total = sum(weights)
    return [w / total if total else 0.0 for w in weights]


def main():
    n = 3
    prior = normalized([math.exp(BETA1 * UTILITIES[i] - BETA2 * COSTS[i]) for i in range(n)])
    lit = [[1.0 if GROUNDINGS[m] <= GROUNDINGS[u] else 0.0 for m in range(n)]
           for u in range(n)]

    # L0 rows: over meanings, per utterance
    listener = [[lit[u][m] * prior[m] for m in range(n)] for u in range(n)]
    listener = [normalized(row) for row in listener]
    levels = {"L0": listener}
    speakers = {}
    for j in range(1, K + 1):
        speaker_cols = []
        for m in range(n):
            col = []
            for u in range(n):
                L = listener[u][m]
                col.append(0.0 if L == 0.0 else math.exp(
                    ALPHA * (math.log(L) - ALPHA_PRIME * COSTS[u])))
            col = normalized(col)
            speaker_cols.append(col)
        # transpose back to utterance-major rows
        speaker = [[speaker_cols[m][u] for m in range(n)] for u in range(n)]
        speakers[f"S{j}"] = speaker
        listener = [normalized([speaker[u][m] * prior[m] for m in range(n)])
                    for u in range(n)]
        levels[f"L{j}"] = listener

    payload = {
        "groundings": [sorted(g) for g in GROUNDINGS],
        "costs": COSTS,
        "utilities": UTILITIES,
        "params": {"beta1": BETA1, "beta2": BETA2, "alpha": ALPHA,
                   "alpha_prime": ALPHA_PRIME, "k": K},
        "prior": prior,
        "listener": levels,
        "speaker": speakers,
    }
    out = Path(__file__).resolve().parents[1] / "tests" / "data" / "rsa_fixture.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload, indent=1) + "\n")
    print(f"wrote {out}")
    print("prior:", [round(p, 6) for p in prior])
    print("S10 row for m0:", [round(speakers['S10'][u][0], 6) for u in range(3)])


if __name__ == "__main__":
    main()
