"""Small phase versus small gain on random feedback loops.

Random pairs of stable systems are drawn.  For each pair the frequency-wise
phase test and the gain test are run and compared with the closed-loop poles.
Whenever either test passes, the loop must be stable; the counts show how
often each test reaches a verdict on its own.

Run with ``python demos/small_phase_campaign.py [n_pairs]``.
"""

import sys
from collections import Counter

from mimophase import feedback, systems
from mimophase.exceptions import HypothesisError


def main(n_pairs=40):
    tally = Counter()
    for seed in range(n_pairs):
        G, H = systems.random_loop_pair(seed)
        try:
            phase = feedback.small_phase_check(G, H, n_axis=800).small_phase_pass
        except HypothesisError:
            phase = None
        gain = feedback.small_gain_check(G, H, n_axis=800, with_oracle=False).small_gain_pass
        stable = feedback.oracle_stable(G, H)
        tally["pairs"] += 1
        tally["stable"] += stable
        tally["phase pass"] += bool(phase)
        tally["gain pass"] += gain
        tally["phase only"] += bool(phase) and not gain
        tally["gain only"] += gain and not phase
        if (phase or gain) and not stable:
            tally["unsound"] += 1
    for key in ("pairs", "stable", "phase pass", "gain pass", "phase only",
                "gain only", "unsound"):
        print(f"{key:12s} {tally[key]}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 40)
