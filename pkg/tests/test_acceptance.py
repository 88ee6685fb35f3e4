"""Acceptance criteria, each run at its stated tolerance and time budget.

Every test records a one-line verdict that the terminal summary prints as
``criterion k: PASS|FAIL``; the assertion then enforces the same verdict.
"""

from __future__ import annotations

import json
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE, random_unitary, sectorial_with_phases
from mimophase import cli, systems
from mimophase import matrix_phase as mp
from mimophase.exceptions import HypothesisError
from mimophase.feedback import (STABLE_THEOREM, sensitivity_sector_check,
                                small_phase_check)
from mimophase.lti import (StateSpace, evaluate, model_to_json, poles, to_state_space,
                           transmission_zeros)
from mimophase.phase_response import AXIS, phi_infty, sweep
from mimophase.power import sinusoid_phase_shift_check
from mimophase.sectored_real import QUASI, SEMI, assemble_kyp_lmi, phi_infty_lmi


def record(k, ok, detail, t0):
    secs = time.perf_counter() - t0
    ACCEPTANCE[k] = (bool(ok), detail, secs)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'} ({secs:.1f} s) {detail}")
    assert ok, detail


def contains(values, targets, tol):
    values = np.asarray(values, dtype=complex)
    return all(values.size and np.min(np.abs(values - t)) <= tol for t in targets)


def random_directions(rng, m, count):
    out = []
    for _ in range(count):
        v = rng.normal(size=2 * m)
        v *= np.sqrt(2) / np.linalg.norm(v)
        out.append((v[:m], v[m:]))
    return out


# ---------------------------------------------------------------------------


def test_criterion_01_biproper_example_sector(ex31, tmp_path, capsys):
    t0 = time.perf_counter()
    path = tmp_path / "ex31.json"
    path.write_text(model_to_json(ex31))
    code = cli.main(["sector", str(path), "--method", "sweep", "--format", "json"])
    out = json.loads(capsys.readouterr().out)["sweep"]
    lo, hi = out["lo_deg"], out["hi_deg"]
    elapsed = time.perf_counter() - t0
    ok = code == 0 and abs(lo + 135) <= 1.5 and abs(hi - 49) <= 1.5 and elapsed < 5
    record(1, ok, f"sector [{lo:.3f}, {hi:.3f}] deg vs [-135, 49] +-1.5; "
                  f"errors {lo + 135:+.3f}, {hi - 49:+.3f}", t0)


def test_criterion_02_semi_sectorial_example(ex32):
    t0 = time.perf_counter()
    zr = transmission_zeros(ex32)
    zeros_ok = contains(zr.finite, [0, 1j, -1j], 1e-6) and zr.zero_at_infinity
    curve = sweep(ex32)
    elapsed = time.perf_counter() - t0
    ok = zeros_ok and curve.rank_constant and curve.max_jump < 0.1 and elapsed < 10
    record(2, ok, f"zeros {np.round(zr.finite, 8).tolist()} inf={zr.zero_at_infinity}; "
                  f"rank_constant={curve.rank_constant}; max jump {curve.max_jump:.4f} rad", t0)


def test_criterion_03_semi_stable_example(ex71):
    t0 = time.perf_counter()
    pr = poles(ex71)
    zr = transmission_zeros(ex71)
    poles_ok = contains(pr.on_axis, [0, 1j, -1j], 1e-6) and len(pr.on_axis) == 3
    zeros_ok = contains(zr.finite, [1j, -1j], 1e-6) and zr.zero_at_infinity
    sec = phi_infty(sweep(ex71))
    finite = np.isfinite(sec.lo) and np.isfinite(sec.hi)
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    curve = sweep(systems.integrator(A))
    mask = curve.axis_mask & np.isfinite(curve.contour.param)
    expected = mp.phases(A).phases - np.pi / 2
    err = float(np.max(np.abs(curve.phases[mask] - expected)))
    elapsed = time.perf_counter() - t0
    ok = poles_ok and zeros_ok and finite and err < 1e-4 and elapsed < 10
    record(3, ok, f"axis poles {np.round(pr.on_axis, 8).tolist()}; zeros "
                  f"{np.round(zr.finite, 8).tolist()} inf={zr.zero_at_infinity}; sector "
                  f"[{np.degrees(sec.lo):.3f}, {np.degrees(sec.hi):.3f}] deg; "
                  f"A/s phase error {err:.2e}", t0)


def test_criterion_04_lmi_sweep_agreement():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        G = systems.random_quasi_sectorial(rng, int(rng.integers(1, 7)), int(rng.integers(1, 4)))
        sw = phi_infty(sweep(G))
        lm = phi_infty_lmi(G, sector=sw)
        worst = max(worst, np.degrees(max(abs(sw.lo - lm.lo), abs(sw.hi - lm.hi))))
    elapsed = time.perf_counter() - t0
    record(4, worst < 1.0 and elapsed < 120,
           f"20 systems, worst endpoint gap {worst:.4f} deg", t0)


def test_criterion_05_small_phase_soundness():
    t0 = time.perf_counter()
    passed = false_pos = hyp = 0
    for seed in range(500):
        G, H = systems.random_loop_pair(seed)
        try:
            rep = small_phase_check(G, H)
        except HypothesisError:
            hyp += 1
            continue
        if rep.small_phase_pass:
            passed += 1
            false_pos += not rep.oracle_stable
    elapsed = time.perf_counter() - t0
    record(5, false_pos == 0 and passed > 0 and elapsed < 120,
           f"500 pairs: {passed} pass, {false_pos} false positives, "
           f"{hyp} outside hypotheses", t0)


def test_criterion_06_passivity_reductions():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    ok = True
    for n, m in ((1, 1), (3, 2), (4, 3)):
        # integer data keeps every product exact, so equality is bitwise
        A, B = rng.integers(-5, 6, (n, n)).astype(float), rng.integers(-5, 6, (n, m)).astype(float)
        C, D = rng.integers(-5, 6, (m, n)).astype(float), rng.integers(-5, 6, (m, m)).astype(float)
        X = rng.integers(-5, 6, (n, n)).astype(float)
        X = X + X.T
        Z = np.zeros((n, n))
        ss = StateSpace(A, B, C, D)
        eps = 0.25
        quasi = assemble_kyp_lmi(ss, 0.0, QUASI).multiplier(eps)
        osp = np.block([[eps * C.T @ C, -C.T + eps * C.T @ D],
                        [-C + eps * D.T @ C, -D - D.T + eps * D.T @ D]])
        semi = assemble_kyp_lmi(ss, 0.0, SEMI).constraint(X, Z)
        prl = np.block([[A.T @ X + X @ A, X @ B - C.T], [B.T @ X - C, -D - D.T]])
        ok &= np.array_equal(quasi, osp) and np.array_equal(semi, prl)
    record(6, ok, "eta = 0 multipliers equal the passivity and positive real blocks "
                  "entrywise" if ok else "entrywise mismatch", t0)


def test_criterion_07_matrix_properties():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    notes = []

    # pseudoinverse phases
    err = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 6))
        r = int(rng.integers(1, n + 1))
        core = sectorial_with_phases(rng, rng.uniform(-1.4, 1.4, r) + rng.uniform(-1.5, 1.5))
        U = random_unitary(rng, n)
        C = U[:, :r] @ core @ U[:, :r].conj().T
        lhs = mp.pinv_phases(mp.phases(C)).phases
        rhs = mp.phases(np.linalg.pinv(C)).phases
        err = max(err, float(np.max(np.abs(lhs - rhs))))
    ok_pinv = err < 1e-6
    notes.append(f"pinv {err:.1e}")

    # convex cone closure
    excess = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 5))
        alpha = rng.uniform(-np.pi, np.pi)
        beta = alpha + rng.uniform(0.05, np.pi - 0.05)
        A = sectorial_with_phases(rng, rng.uniform(alpha, beta, n))
        B = sectorial_with_phases(rng, rng.uniform(alpha, beta, n))
        spec = mp.phases(rng.uniform(0, 3) * A + rng.uniform(0, 3) * B)
        ph = spec.phases + 2 * np.pi * np.round((0.5 * (alpha + beta) - spec.center) / (2 * np.pi))
        excess = max(excess, float(max(ph.max() - beta, alpha - ph.min())))
    ok_cone = excess < 1e-6
    notes.append(f"cone excess {excess:.1e}")

    # product eigenvalue angles
    violations = count_flags = 0
    for _ in range(1000):
        n = int(rng.integers(1, 5))
        A = sectorial_with_phases(rng, rng.uniform(-np.pi / 2, np.pi / 2, n))
        B = sectorial_with_phases(rng, rng.uniform(-np.pi / 2, np.pi / 2, n))
        if rng.uniform() < 0.3 and n > 1:
            U = random_unitary(rng, n)
            A = U[:, :n - 1] @ (U[:, :n - 1].conj().T @ A @ U[:, :n - 1]) @ U[:, :n - 1].conj().T
        rep = mp.product_angle_bounds(A, B)
        violations += int(np.sum(~rep.satisfied))
        count_flags += rep.count_nonzero != rep.rank_product
    ok_prod = violations == 0
    notes.append(f"product violations {violations} (count flags {count_flags})")

    # small phase predicate against random falsification
    rng3 = np.random.default_rng(3)
    A = sectorial_with_phases(rng3, rng3.uniform(-1.2, 1.2, 3))
    spec = mp.phases(A)
    lo_ok, hi_ok = -np.pi - spec.phi_min, np.pi - spec.phi_max
    contradictions = tested = 0
    for frac_lo, frac_hi in ((0.01, 0.99), (0.2, 0.8), (0.001, 0.3), (0.7, 0.999)):
        a = lo_ok + frac_lo * (hi_ok - lo_ok)
        b = min(lo_ok + frac_hi * (hi_ok - lo_ok), a + np.pi)
        if not mp.small_phase_matrix(A, a, b):
            continue
        tested += 1
        for _ in range(2500):
            B = sectorial_with_phases(rng3, rng3.uniform(a, b, 3))
            smin = np.linalg.svd(np.eye(3) + A @ B, compute_uv=False)[-1]
            scale = 1 + np.linalg.norm(A, 2) * np.linalg.norm(B, 2)
            contradictions += smin <= 1e-10 * scale
    ok_pred = contradictions == 0 and tested == 4
    notes.append(f"predicate {tested * 2500} samples, {contradictions} contradictions")

    # unitary similarity
    err_u = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 6))
        C = sectorial_with_phases(rng, rng.uniform(-1.5, 1.5, n) + rng.uniform(-np.pi, np.pi))
        U = random_unitary(rng, n)
        err_u = max(err_u, float(np.max(np.abs(mp.phases(U.conj().T @ C @ U).phases
                                               - mp.phases(C).phases))))
    ok_unit = err_u < 1e-8
    notes.append(f"unitary {err_u:.1e}")

    elapsed = time.perf_counter() - t0
    ok = ok_pinv and ok_cone and ok_prod and ok_pred and ok_unit and elapsed < 60
    record(7, ok, "; ".join(notes), t0)


def test_criterion_08_e_block_regularization():
    t0 = time.perf_counter()
    err = 0.0
    for theta0 in (0.0, np.pi / 4, -np.pi / 3):
        C = np.exp(1j * theta0) * np.array([[1.0, 2.0], [0.0, 1.0]])
        ph = mp.phases(C).phases
        err = max(err, float(np.max(np.abs(ph - (theta0 + np.array([np.pi / 2, -np.pi / 2]))))))
    record(8, err < 1e-3, f"max error {err:.2e} rad", t0)


def test_criterion_09_power_identity(ex31):
    t0 = time.perf_counter()
    worst = 0.0
    outside = 0.0
    lag = systems.first_order_lag()
    r = sinusoid_phase_shift_check(lag, 1.0, [np.sqrt(2)], [0.0])
    worst = max(worst, r.discrepancy)
    spec = mp.phases(evaluate(lag, 1j))
    outside = max(outside, spec.phi_min - r.angle_power, r.angle_power - spec.phi_max)
    G = to_state_space(ex31)
    spec = mp.phases(evaluate(G, 1j))
    for a, b in random_directions(np.random.default_rng(9), 2, 10):
        r = sinusoid_phase_shift_check(G, 1.0, a, b)
        worst = max(worst, r.discrepancy)
        ang = spec.center + np.angle(np.exp(1j * (r.angle_power - spec.center)))
        outside = max(outside, spec.phi_min - ang, ang - spec.phi_max)
    elapsed = time.perf_counter() - t0
    record(9, worst < 1e-3 and outside < 1e-3 and elapsed < 30,
           f"worst discrepancy {worst:.2e} rad; worst excursion outside the phase "
           f"interval {max(outside, 0):.2e} rad", t0)


def test_criterion_10_closed_loop_containment():
    t0 = time.perf_counter()
    checked = violations = 0
    seed = 0
    worst = -np.inf
    while checked < 100:
        G, H = systems.random_loop_pair(seed)
        seed += 1
        try:
            rep = small_phase_check(G, H, with_oracle=False)
        except HypothesisError:
            continue
        if not rep.small_phase_pass or rep.theorem != STABLE_THEOREM:
            continue
        res = sensitivity_sector_check(G, H, report=rep)
        checked += 1
        violations += len(res.violations)
        worst = max(worst, res.max_excess)
    record(10, violations == 0,
           f"{checked} passing pairs (seeds 0-{seed - 1}), {violations} violations, "
           f"largest excess {worst:.2e} rad", t0)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
