"""MIMO Bode data for the three worked systems.

Each system is swept along the imaginary axis, indented around its axis zeros
and poles, and the phase and singular-value curves are written as CSV and SVG
next to this script.  The phase sector of each system is printed in degrees.

Run with ``python demos/bode_examples.py``.
"""

from pathlib import Path

from mimophase import phase_response as pr
from mimophase import systems
from mimophase.svg import bode_svg

OUT = Path(__file__).with_name("output")


def main():
    OUT.mkdir(exist_ok=True)
    cases = {
        "biproper_2x2": systems.biproper_2x2(),
        "semi_sectorial_3x3": systems.semi_sectorial_3x3(),
        "semi_stable_3x3": systems.semi_stable_3x3(),
    }
    for name, G in cases.items():
        curve = pr.sweep(G)
        sector = pr.phi_infty(curve)
        lo, hi = sector.degrees()
        print(f"{name:20s} rank {curve.rank}  detours at {curve.contour.detour_centers}")
        print(f"{'':20s} phase sector [{lo:.3f}, {hi:.3f}] deg, "
              f"largest step {curve.max_jump:.4f} rad")
        (OUT / f"{name}.csv").write_text(pr.curve_to_csv(curve))
        (OUT / f"{name}.svg").write_text(bode_svg(curve, name))
    print(f"wrote CSV and SVG files to {OUT}")


if __name__ == "__main__":
    main()
