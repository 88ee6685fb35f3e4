"""Small phase and small gain tests, the closed-loop oracle, margins and containment."""

import json

import numpy as np
import pytest

from mimophase import feedback as fb
from mimophase import lti, systems
from mimophase import phase_response as pr
from mimophase.exceptions import HypothesisError, UnsupportedBranchError
from mimophase.lti import StateSpace, TransferMatrix


def lag(m=2, a=1.0, k=1.0):
    """``k I / (s + a)``."""
    return StateSpace(-a * np.eye(m), np.eye(m), k * np.eye(m), np.zeros((m, m)))


def lead_lag(m=2, k=1.0):
    """``k (s + 2) / (s + 1) I``."""
    eye = k * np.eye(m)
    return TransferMatrix(np.stack([2 * eye, eye], axis=2), [1.0, 1.0])


def static(D):
    return lti.static_gain(np.atleast_2d(np.asarray(D, dtype=float)))


def characteristic_roots(G, H):
    """Roots of ``det(sI - A_G) det(sI - A_H) det(I + G(s) H(s))``.

    The product is a polynomial of degree ``n_G + n_H``; its coefficients are
    recovered exactly from samples on a circle by a discrete Fourier transform.
    """
    n = G.n_states + H.n_states
    p = np.concatenate([np.linalg.eigvals(G.A), np.linalg.eigvals(H.A)])
    r = 1.5 * np.max(np.abs(p)) + 1.0
    N = n + 1
    s = r * np.exp(2j * np.pi * np.arange(N) / N)
    eye = np.eye(G.m)
    vals = np.array([
        np.prod(x - np.linalg.eigvals(G.A)) * np.prod(x - np.linalg.eigvals(H.A))
        * np.linalg.det(eye + lti.evaluate(G, x) @ lti.evaluate(H, x)) for x in s])
    coeffs = np.fft.fft(vals) / N / r ** np.arange(N)
    return np.polynomial.polynomial.polyroots(coeffs.real)


# ---------------------------------------------------------------------------
# small phase


def test_small_phase_half_lags_pass():
    rep = fb.small_phase_check(lag(k=0.5), lag(k=0.5))
    assert rep.theorem == fb.STABLE_THEOREM
    assert rep.small_phase_pass and rep.oracle_stable and rep.well_posed
    assert np.all(rep.upper_margin > 0) and np.all(rep.lower_margin > 0)


def test_small_phase_strongly_positive_real_with_positive_real():
    rep = fb.small_phase_check(lead_lag(), lag())
    assert rep.small_phase_pass and rep.oracle_stable


def test_small_phase_semi_stable_integrator():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    rep = fb.small_phase_check(systems.integrator(A), static(np.eye(2)))
    assert rep.theorem == fb.SEMI_STABLE_THEOREM
    assert rep.small_phase_pass and rep.oracle_stable
    # phases -pi/2 + 0 away from the excluded pole frequency
    finite = np.isfinite(rep.omega) & (rep.omega > 0)
    np.testing.assert_allclose(rep.upper_margin[finite], 3 * np.pi / 2, atol=1e-6)
    np.testing.assert_allclose(rep.lower_margin[finite], np.pi / 2, atol=1e-6)


def test_small_phase_fail_is_reported_with_worst_frequency():
    G = lti.series(lag(), lti.series(lag(), lag(k=0.5)))
    rep = fb.small_phase_check(G, lag(k=0.5))
    assert not rep.small_phase_pass and rep.small_gain_pass
    assert rep.min_margin < 0
    assert rep.worst_frequency > 1


def test_small_phase_margins_are_positive_when_passing(rng):
    for _ in range(5):
        G = systems.random_quasi_sectorial(rng, 2, 2)
        H = systems.random_quasi_sectorial(rng, 2, 2)
        rep = fb.small_phase_check(G, H)
        if rep.small_phase_pass:
            assert np.all(np.minimum(rep.upper_margin, rep.lower_margin) > fb.DEFAULT_MARGIN_TOL)
            assert rep.oracle_stable


def test_small_phase_zero_factor_constrains_nothing():
    rep = fb.small_phase_check(lag(), static(np.zeros((2, 2))))
    assert rep.small_phase_pass and rep.oracle_stable


def test_small_phase_rejects_unstable_factor():
    G = StateSpace([[1.0]], [[1.0]], [[1.0]], [[0.0]])
    with pytest.raises(HypothesisError) as info:
        fb.small_phase_check(G, static(1.0))
    assert info.value.theorem == fb.STABLE_THEOREM


def test_small_phase_rejects_two_semi_stable_factors():
    with pytest.raises(HypothesisError) as info:
        fb.small_phase_check(systems.integrator(np.eye(2)), systems.integrator(np.eye(2)))
    assert info.value.theorem == fb.SEMI_STABLE_THEOREM


def test_semi_stable_variant_needs_sectorial_stable_factor():
    # diag(1, 0) is semi-sectorial but not sectorial
    with pytest.raises(HypothesisError, match="not frequency-wise sectorial") as info:
        fb.small_phase_check(systems.integrator(np.eye(2)), static(np.diag([1.0, 0.0])),
                             n_axis=600)
    assert info.value.theorem == fb.SEMI_STABLE_THEOREM


def test_small_phase_swaps_factors_when_needed():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    rep = fb.small_phase_check(static(np.eye(2)), systems.integrator(A))
    assert rep.swapped and rep.small_phase_pass


@pytest.mark.parametrize("seed", range(6))
def test_semi_stable_soundness(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 4))
    G = systems.random_semi_stable_pr(rng, m)
    assert lti.poles(G).on_axis.size > 0
    rep = fb.small_phase_check(G, lead_lag(m))
    assert rep.theorem == fb.SEMI_STABLE_THEOREM and rep.small_phase_pass
    p = fb.closed_loop_poles(G, lead_lag(m))
    # no closed-loop eigenvalue in the right half-plane or left on the axis
    assert np.max(p.real) < -1e-8
    assert rep.oracle_stable


# ---------------------------------------------------------------------------
# small gain


def test_small_gain_static():
    assert fb.small_gain_check(static(0.5 * np.eye(2)), static(0.5 * np.eye(2))).small_gain_pass
    assert not fb.small_gain_check(static(1.1 * np.eye(2)), static(1.1 * np.eye(2))).small_gain_pass


def test_small_gain_biproper_example(ex31):
    w = np.concatenate([[0.0], np.geomspace(1e-4, 1e4, 100_000)])
    norm = np.max(np.linalg.norm(lti.evaluate_many(ex31, 1j * w), 2, axis=(1, 2)))
    assert 0.01 * norm < 1
    rep = fb.small_gain_check(ex31, static(0.01 * np.eye(2)))
    assert rep.small_gain_pass
    assert 1 - rep.min_margin == pytest.approx(0.01 * norm, rel=1e-4)


def test_small_gain_with_axis_pole_fails():
    assert not fb.small_gain_check(systems.integrator(np.eye(2)), static(0.1 * np.eye(2))).small_gain_pass


def test_phase_pass_gain_fail():
    rep = fb.small_phase_check(lead_lag(k=2.0), lead_lag(k=2.0))
    assert rep.small_phase_pass and not rep.small_gain_pass and rep.oracle_stable


def test_gain_pass_phase_fail():
    G = lti.series(lag(), lti.series(lag(), lag(k=0.5)))
    rep = fb.small_phase_check(G, lag(k=0.5))
    assert rep.small_gain_pass and not rep.small_phase_pass


# ---------------------------------------------------------------------------
# oracle


def test_closed_loop_matrix_strictly_proper_structure(rng):
    G = systems.random_stable(rng, 3, 2, proper=False)
    H = systems.random_stable(rng, 2, 2, proper=False)
    A, well = fb.closed_loop_matrix(G, H)
    assert well
    expect = np.block([[G.A, -G.B @ H.C], [H.B @ G.C, H.A]])
    np.testing.assert_allclose(A, expect, atol=1e-14)


def test_closed_loop_matrix_static_identity():
    A, well = fb.closed_loop_matrix(static(np.eye(2)), static(np.eye(2)))
    assert well and A.size == 0


def test_closed_loop_matrix_ill_posed():
    with pytest.raises(HypothesisError, match="ill-posed"):
        fb.closed_loop_matrix(static(np.eye(2)), static(-np.eye(2)))
    assert not fb.oracle_stable(static(np.eye(2)), static(-np.eye(2)))


def test_closed_loop_poles_against_determinant_roots():
    rng = np.random.default_rng(5)
    G = systems.random_stable(rng, 2, 2)
    H = systems.random_stable(rng, 2, 2)
    A, _ = fb.closed_loop_matrix(G, H)
    eig = np.sort_complex(np.linalg.eigvals(A))
    roots = np.sort_complex(characteristic_roots(G, H))
    assert eig.size == roots.size
    for z in roots:
        assert np.min(np.abs(eig - z)) < 1e-6


def test_oracle_trivial_cases():
    Z = static(np.zeros((2, 2)))
    assert fb.oracle_stable(Z, Z)
    # 1/s with unit feedback closes to 1/(s+1)
    assert fb.oracle_stable(systems.integrator(np.eye(1)), static(1.0))
    assert not fb.oracle_stable(systems.integrator(np.eye(1)), static(-1.0))


def test_oracle_warns_on_hidden_modes():
    G = StateSpace(np.diag([-1.0, 1.0]), [[1.0], [0.0]], [[1.0, 0.0]], [[0.0]])
    with pytest.warns(UserWarning, match="not minimal"):
        fb.oracle_stable(G, static(1.0))


# ---------------------------------------------------------------------------
# margins and indices


def test_phase_stability_margin_of_half_lag():
    curve = pr.sweep(lag(k=0.5))
    assert fb.phase_stability_margin(curve) == pytest.approx(np.pi / 2, abs=1e-3)


def test_passivity_index_of_lag_is_zero():
    assert fb.angular_passivity_index(pr.sweep(lag())) == pytest.approx(0.0, abs=1e-3)


def test_passivity_index_of_lead_lag():
    w = np.geomspace(1e-4, 1e4, 100_000)
    worst = np.max(np.abs(np.arctan(w / 2) - np.arctan(w)))
    assert worst == pytest.approx(np.arctan(np.sqrt(2)) - np.arctan(np.sqrt(2) / 2), abs=1e-8)
    index = fb.angular_passivity_index(pr.sweep(lead_lag()))
    assert index == pytest.approx(np.pi / 2 - worst, abs=1e-6)


# ---------------------------------------------------------------------------
# destabilizer


def test_destabilizer_minus_identity():
    B = fb.destabilizer_real(-np.eye(2))
    np.testing.assert_allclose(B, np.eye(2))
    np.testing.assert_allclose(np.eye(2) - B, 0, atol=1e-15)


def test_destabilizer_rotation():
    A = np.array([[-1.0, 2.0], [-2.0, -1.0]])
    B = fb.destabilizer_real(A)
    assert np.linalg.svd(np.eye(2) + A @ B, compute_uv=False)[-1] < 1e-10
    assert np.linalg.eigvalsh((B + B.T) / 2)[0] >= -1e-10


def test_destabilizer_accretive_unsupported():
    with pytest.raises(UnsupportedBranchError):
        fb.destabilizer_real(np.eye(2))


def test_destabilizer_random_indefinite(rng):
    for _ in range(200):
        n = int(rng.integers(1, 5))
        A = rng.normal(size=(n, n))
        if np.linalg.eigvalsh((A + A.T) / 2)[0] >= 0:
            continue
        B = fb.destabilizer_real(A)
        assert np.linalg.eigvalsh((B + B.T) / 2)[0] >= -1e-10
        smin = np.linalg.svd(np.eye(n) + A @ B, compute_uv=False)[-1]
        assert smin < 1e-8 * max(1.0, np.linalg.norm(B, 2))


def test_destabilizing_gain_breaks_loop():
    G = lti.static_gain(np.array([[-1.0, 2.0], [-2.0, -1.0]]))
    H = fb.destabilizing_gain(G)
    assert not fb.oracle_stable(G, lti.static_gain(H))


# ---------------------------------------------------------------------------
# closed-loop containment


def test_containment_with_zero_controller():
    rep = fb.sensitivity_sector_check(lag(), static(np.zeros((2, 2))))
    assert rep.pointwise_ok and rep.sector_ok
    assert rep.sector_sg == pytest.approx(rep.sector_g)


def test_containment_lag_pair():
    rep = fb.sensitivity_sector_check(lag(), lag())
    assert rep.pointwise_ok and rep.sector_ok and not rep.violations
    assert rep.max_excess <= 1e-6


def test_containment_random_passing_pairs():
    found = 0
    for seed in range(40):
        G, H = systems.random_loop_pair(seed)
        try:
            rep = fb.small_phase_check(G, H, with_oracle=False)
        except HypothesisError:
            continue
        if rep.theorem != fb.STABLE_THEOREM or not rep.small_phase_pass:
            continue
        cont = fb.sensitivity_sector_check(G, H, report=rep)
        assert not cont.violations, (seed, cont.violations)
        found += 1
        if found == 5:
            break
    assert found == 5


def test_containment_requires_passing_small_phase():
    G = lti.series(lag(), lti.series(lag(), lag(k=0.5)))
    with pytest.raises(HypothesisError):
        fb.sensitivity_sector_check(G, lag(k=0.5))


# ---------------------------------------------------------------------------
# reports


def test_feedback_report_falls_back_to_small_gain():
    num = np.zeros((3, 3, 3))
    num[0, 0] = [1, 2, 1]
    num[1, 1] = [1, 0, -1]
    num[2, 2] = [1, -2, 1]
    G = TransferMatrix(num, [1.0, 2.0, 1.0])
    rep = fb.feedback_report(G, static(0.5 * np.eye(3)))
    assert rep.theorem == "small_gain" and rep.small_phase_pass is None
    assert rep.small_gain_pass and rep.oracle_stable


def test_report_json_roundtrip():
    rep = fb.small_phase_check(systems.integrator(np.eye(2)), static(np.eye(2)))
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["theorem"] == fb.SEMI_STABLE_THEOREM and d["small_phase_pass"] is True
    assert set(d) == {"theorem", "small_phase_pass", "small_gain_pass", "oracle_stable",
                      "well_posed", "worst_frequency", "min_margin", "swapped"}
