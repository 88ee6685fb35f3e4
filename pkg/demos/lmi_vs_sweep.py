"""Phase sector from a frequency sweep against the LMI bisection.

The sweep samples the phases on a dense grid, while the LMI route certifies
each sector edge with a semidefinite program and bisects on the edge angle.
The two should agree to within the bisection tolerance plus the small outward
bias of the certificate.

Run with ``python demos/lmi_vs_sweep.py``.
"""

import numpy as np

from mimophase import phase_response as pr
from mimophase import sectored_real as sr
from mimophase import systems
from mimophase.exceptions import NotApplicableError
from mimophase.lti import TransferMatrix


def main():
    eye = np.eye(2)
    rng = np.random.default_rng(7)
    cases = {"lag": systems.first_order_lag(2),
             "lead_lag": TransferMatrix(np.stack([2 * eye, eye], axis=2), [1.0, 1.0])}
    for k in range(3):
        cases[f"random_{k}"] = systems.random_quasi_sectorial(rng, 3, 2)
    cases["biproper_2x2"] = systems.biproper_2x2()
    for name, G in cases.items():
        swept = pr.phi_infty(pr.sweep(G))
        lo, hi = swept.degrees()
        line = f"{name:14s} sweep [{lo:9.4f}, {hi:9.4f}] deg"
        try:
            lmi = sr.phi_infty_lmi(G, sector=swept)
        except NotApplicableError as exc:
            print(f"{line}  lmi: not applicable ({exc})")
            continue
        a, b = lmi.degrees()
        gap = max(abs(a - lo), abs(b - hi))
        print(f"{line}  lmi [{a:9.4f}, {b:9.4f}] deg  gap {gap:.4f} deg")


if __name__ == "__main__":
    main()
