"""Phase as a power angle.

A two-channel sinusoid ``a cos(w t) + b sin(w t)`` drives the biproper 2x2
system.  The angle of the complex power computed from the simulated output is
compared with ``d^* G(jw) d`` for ``d = (a - jb)/sqrt 2``.  Over many input
directions the angles fill the interval between the smallest and largest
matrix phase of ``G(jw)``.

Run with ``python demos/power_check.py``.
"""

import math

import numpy as np

from mimophase import matrix_phase as mp
from mimophase import power, systems
from mimophase.lti import evaluate, to_state_space


def main(omega0=1.0, n_directions=60):
    G = to_state_space(systems.biproper_2x2())
    spec = mp.phases(evaluate(G, 1j * omega0))
    rng = np.random.default_rng(0)
    angles, worst = [], 0.0
    for _ in range(n_directions):
        v = rng.normal(size=4)
        v *= math.sqrt(2) / np.linalg.norm(v)
        r = power.sinusoid_phase_shift_check(G, omega0, v[:2], v[2:], n_window=2 ** 12)
        worst = max(worst, r.discrepancy)
        angles.append(spec.center + np.angle(np.exp(1j * (r.angle_power - spec.center))))
    print(f"matrix phases at w = {omega0:g}: "
          f"[{math.degrees(spec.phi_min):.3f}, {math.degrees(spec.phi_max):.3f}] deg")
    print(f"power angles seen:     [{math.degrees(min(angles)):.3f}, "
          f"{math.degrees(max(angles)):.3f}] deg")
    print(f"largest simulated vs predicted discrepancy {worst:.2e} rad")


if __name__ == "__main__":
    main()
