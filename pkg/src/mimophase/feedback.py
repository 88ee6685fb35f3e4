"""Feedback stability of the negative-feedback loop ``G # H``.

Phase-based certificates (small phase theorem for stable loops and its
semi-stable generalization), the small gain test, a closed-loop eigenvalue
oracle that decides stability exactly from state-space data, stability
margins, a destabilizing static gain construction and closed-loop sector
containment checks for ``S G`` and ``H S`` with ``S = (I + G H)^{-1}``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import matrix_phase as mp
from .exceptions import (ClassificationError, ConvergenceError, HypothesisError,
                         UnsupportedBranchError)
from .lti import (StateSpace, axis_frequencies, evaluate_many, is_minimal,
                  minimal_realization, poles, to_state_space)
from .phase_response import (AXIS, DEFAULT_EPS, DEFAULT_N_AXIS, DEFAULT_N_DETOUR,
                             PhaseResponseCurve, SectorBound, build_contour, phi_infty,
                             sweep)

__all__ = [
    "FeedbackReport", "SectorContainmentReport", "PointwiseModel",
    "aligned_sweeps", "small_phase_check", "small_gain_check",
    "closed_loop_matrix", "oracle_stable", "closed_loop_poles",
    "phase_stability_margin", "angular_passivity_index", "destabilizer_real",
    "destabilizing_gain", "sensitivity_sector_check", "feedback_report",
    "STABLE_THEOREM", "SEMI_STABLE_THEOREM",
]

STABLE_THEOREM = "small_phase"
SEMI_STABLE_THEOREM = "small_phase_semi_stable"
DEFAULT_MARGIN_TOL = 1e-6


class PointwiseModel:
    """Model known only through its frequency response.

    Parameters
    ----------
    fn : callable
        Maps an array of ``N`` complex points to an ``(N, m, m)`` array.
    m : int
    """

    def __init__(self, fn, m, label=""):
        self._fn = fn
        self.m = m
        self.label = label

    def evaluate_many(self, s):
        return self._fn(np.atleast_1d(np.asarray(s, dtype=complex)))


def _loop_models(G, H):
    def S(s):
        g = evaluate_many(G, s)
        h = evaluate_many(H, s)
        m = g.shape[-1]
        return np.linalg.inv(np.eye(m) + g @ h), g, h

    def sg(s):
        Sv, g, _ = S(s)
        return Sv @ g

    def hs(s):
        Sv, _, h = S(s)
        return h @ Sv

    return PointwiseModel(sg, G.m, "SG"), PointwiseModel(hs, G.m, "HS")


def _axis_info(model):
    if isinstance(model, PhaseResponseCurve):
        c = model.contour
        return np.array(c.zero_freqs), np.array(c.pole_freqs), c.zero_at_infinity
    return axis_frequencies(model)


def union_contour(models, eps=DEFAULT_EPS, n_axis=DEFAULT_N_AXIS, n_detour=DEFAULT_N_DETOUR):
    """One contour that indents around the axis zeros and poles of every model."""
    zeros, pls, zinf = [], [], False
    for mdl in models:
        z, p, zi = _axis_info(mdl)
        zeros.extend(z)
        pls.extend(p)
        zinf = zinf or zi
    return build_contour(None, eps=eps, n_axis=n_axis, n_detour=n_detour,
                         zeros=zeros, poles=pls, zero_at_infinity=zinf)


def aligned_sweeps(G, H, eps=DEFAULT_EPS, n_axis=DEFAULT_N_AXIS,
                   n_detour=DEFAULT_N_DETOUR, tol=mp.DEFAULT_TOL):
    """Sweep ``G`` and ``H`` on their union contour.

    Curves may be passed instead of models; they are re-swept on the union
    contour using the model stored in the curve.
    """
    mG = G.model if isinstance(G, PhaseResponseCurve) else G
    mH = H.model if isinstance(H, PhaseResponseCurve) else H
    contour = union_contour([G, H], eps, n_axis, n_detour)
    return sweep(mG, contour, tol), sweep(mH, contour, tol)


@dataclass(frozen=True)
class FeedbackReport:
    """Verdicts and per-frequency margins for ``G # H``.

    ``upper_margin = pi - (phi_max(G) + phi_max(H))`` and
    ``lower_margin = (phi_min(G) + phi_min(H)) + pi`` at each compared axis
    frequency ``omega``.  ``swapped`` records that the roles of ``G`` and
    ``H`` were exchanged to meet the hypotheses (the loop is symmetric).
    """

    theorem: str
    small_phase_pass: bool | None
    small_gain_pass: bool | None
    oracle_stable: bool | None
    well_posed: bool | None
    omega: np.ndarray = field(compare=False, default=None)
    upper_margin: np.ndarray = field(compare=False, default=None)
    lower_margin: np.ndarray = field(compare=False, default=None)
    gain_product: np.ndarray = field(compare=False, default=None)
    worst_frequency: float = np.nan
    min_margin: float = np.nan
    swapped: bool = False

    def to_dict(self):
        return {
            "theorem": self.theorem,
            "small_phase_pass": self.small_phase_pass,
            "small_gain_pass": self.small_gain_pass,
            "oracle_stable": self.oracle_stable,
            "well_posed": self.well_posed,
            "worst_frequency": _json_float(self.worst_frequency),
            "min_margin": _json_float(self.min_margin),
            "swapped": self.swapped,
        }


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    if np.isnan(x):
        return None
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _pole_kind(model):
    """'stable', 'semi_stable' or 'unstable' (from a minimal realization)."""
    if isinstance(model, PhaseResponseCurve):
        if model.contour.pole_freqs:
            return "semi_stable"
        model = model.model
    if isinstance(model, PointwiseModel):
        return "stable"
    rep = poles(model, minimal=True)
    if rep.stable:
        return "stable"
    return "semi_stable" if rep.semi_stable else "unstable"


def _phase_ends(curve, mask):
    """Largest and smallest phase at the masked points.

    A zero factor has no phases and constrains nothing: its largest phase is
    ``-inf`` and its smallest ``+inf``.
    """
    n = int(np.sum(mask))
    if curve.phases.shape[1] == 0:
        return np.full(n, -np.inf), np.full(n, np.inf)
    return curve.phases[mask, 0], curve.phases[mask, -1]


def _sector(curve):
    """Phase sector, empty (``lo = inf``, ``hi = -inf``) for a zero factor."""
    if curve.rank == 0:
        return SectorBound(np.inf, -np.inf)
    return phi_infty(curve)


def small_phase_check(G, H, tol=DEFAULT_MARGIN_TOL, eps=DEFAULT_EPS,
                      n_axis=DEFAULT_N_AXIS, n_detour=DEFAULT_N_DETOUR,
                      phase_tol=mp.DEFAULT_TOL, with_oracle=True):
    """Small phase test for the loop ``G # H``.

    Stable loops need one frequency-wise quasi-sectorial and one
    frequency-wise semi-sectorial factor.  If one factor has
    imaginary-axis poles (semi-stable), the other must be stable and
    frequency-wise sectorial; pole frequencies are then excluded from the
    comparison.  The test passes iff ``phi_max(G) + phi_max(H) < pi`` and
    ``phi_min(G) + phi_min(H) > -pi`` with margin above ``tol`` at every
    compared axis frequency.

    Raises
    ------
    HypothesisError
        The factors do not meet the hypotheses of either variant.
    """
    kinds = (_pole_kind(G), _pole_kind(H))
    if "unstable" in kinds:
        raise HypothesisError("small phase theorem needs poles in the closed left "
                              "half-plane only", theorem=STABLE_THEOREM)
    if kinds == ("semi_stable", "semi_stable"):
        raise HypothesisError("semi-stable small phase theorem allows imaginary-axis "
                              "poles in one factor only", theorem=SEMI_STABLE_THEOREM)
    theorem = SEMI_STABLE_THEOREM if "semi_stable" in kinds else STABLE_THEOREM
    try:
        cG, cH = aligned_sweeps(G, H, eps, n_axis, n_detour, phase_tol)
    except (ClassificationError, ConvergenceError) as exc:
        raise HypothesisError(f"{theorem} hypotheses failed: {exc}", theorem=theorem) from exc
    swapped = False
    if theorem == STABLE_THEOREM:
        if not cG.quasi_everywhere:
            if not cH.quasi_everywhere:
                raise HypothesisError(
                    f"{theorem} hypotheses failed: neither factor is frequency-wise "
                    "quasi-sectorial", theorem=theorem)
            cG, cH, swapped = cH, cG, True
    else:
        if kinds[1] == "semi_stable":
            cG, cH, swapped = cH, cG, True
        if not cH.sectorial_everywhere:
            raise HypothesisError(
                f"{theorem} hypotheses failed: the stable factor is not "
                "frequency-wise sectorial", theorem=theorem)
    mask = cG.contour.kind == AXIS
    omega = cG.contour.param[mask]
    gmax, gmin = _phase_ends(cG, mask)
    hmax, hmin = _phase_ends(cH, mask)
    up = np.pi - (gmax + hmax)
    lo = (gmin + hmin) + np.pi
    both = np.minimum(up, lo)
    k = int(np.argmin(both))
    passed = bool(both[k] > tol)
    gain = cG.sigmas[mask, 0] * cH.sigmas[mask, 0]
    oracle = well = None
    if with_oracle:
        oracle, well = _oracle_if_possible(G, H)
    return FeedbackReport(theorem, passed, bool(np.all(gain < 1)), oracle, well,
                          omega, up, lo, gain, float(omega[k]), float(both[k]), swapped)


def _oracle_if_possible(G, H):
    mG = G.model if isinstance(G, PhaseResponseCurve) else G
    mH = H.model if isinstance(H, PhaseResponseCurve) else H
    if isinstance(mG, PointwiseModel) or isinstance(mH, PointwiseModel):
        return None, None
    _, well = closed_loop_matrix(mG, mH, check=False)
    return (oracle_stable(mG, mH) if well else False), well


def small_gain_check(G, H, eps=DEFAULT_EPS, n_axis=DEFAULT_N_AXIS,
                     n_detour=DEFAULT_N_DETOUR, with_oracle=False):
    """Passes iff ``sigma_max(G) sigma_max(H) < 1`` at every axis point.

    Only singular values are needed, so neither factor has to be
    semi-sectorial.  Imaginary-axis poles make the product unbounded.
    """
    mG = G.model if isinstance(G, PhaseResponseCurve) else G
    mH = H.model if isinstance(H, PhaseResponseCurve) else H
    contour = union_contour([G, H], eps, n_axis, n_detour)
    mask = contour.kind == AXIS
    omega = contour.param[mask]
    pts = contour.points[mask]
    gain = (np.linalg.norm(evaluate_many(mG, pts), 2, axis=(1, 2))
            * np.linalg.norm(evaluate_many(mH, pts), 2, axis=(1, 2)))
    if contour.pole_freqs:
        gain = np.append(gain, np.inf)
        omega = np.append(omega, contour.pole_freqs[0])
    k = int(np.argmax(gain))
    oracle = well = None
    if with_oracle:
        oracle, well = _oracle_if_possible(mG, mH)
    return FeedbackReport("small_gain", None, bool(gain[k] < 1), oracle, well,
                          omega, None, None, gain, float(omega[k]), float(1 - gain[k]))


def closed_loop_matrix(G, H, check=True):
    """State matrix of the negative-feedback interconnection.

    With ``u1 = -y2`` and ``u2 = y1`` the algebraic loop is eliminated through
    ``E = I + D_H D_G``.

    Returns
    -------
    A_cl : ndarray
    well_posed : bool

    Raises
    ------
    HypothesisError
        The loop is ill-posed and ``check`` is true.
    """
    g, h = to_state_space(G), to_state_space(H)
    m = g.m
    E = np.eye(m) + h.D @ g.D
    scale = max(1.0, np.linalg.norm(h.D, 2) * np.linalg.norm(g.D, 2))
    well = bool(abs(np.linalg.det(E)) > 1e-12 * scale ** m)
    if not well:
        if check:
            raise HypothesisError("feedback loop is ill-posed: I + D_H D_G is singular",
                                  theorem="well_posedness")
        return np.zeros((0, 0)), False
    Einv = np.linalg.inv(E)
    K1 = -Einv @ h.D @ g.C
    K2 = -Einv @ h.C
    A = np.block([
        [g.A + g.B @ K1, g.B @ K2],
        [h.B @ (g.C + g.D @ K1), h.A + h.B @ g.D @ K2],
    ])
    return A, well


def closed_loop_poles(G, H, minimal=True):
    """Eigenvalues of the closed-loop state matrix."""
    if minimal:
        G, H = minimal_realization(G), minimal_realization(H)
    A, _ = closed_loop_matrix(G, H)
    return np.linalg.eigvals(A) if A.size else np.array([], dtype=complex)


def oracle_stable(G, H, tol=1e-8):
    """Ground-truth stability of ``G # H`` from closed-loop eigenvalues.

    Both models are reduced to minimal realizations first; a state-space input
    that is not minimal triggers a warning, since hidden modes are invisible
    to the transfer-level loop.  Ill-posed loops are reported unstable.
    """
    for mdl, name in ((G, "G"), (H, "H")):
        if isinstance(mdl, StateSpace) and not is_minimal(mdl):
            warnings.warn(f"{name} realization is not minimal; the oracle uses its "
                          "minimal part", UserWarning, stacklevel=2)
    g, h = minimal_realization(G), minimal_realization(H)
    A, well = closed_loop_matrix(g, h, check=False)
    if not well:
        return False
    if A.size == 0:
        return True
    return bool(np.max(np.linalg.eigvals(A).real) < -tol)


def phase_stability_margin(curve_gh):
    """``pi - max(|phi_min|, |phi_max|)`` of the loop transfer ``G H``."""
    sec = phi_infty(curve_gh)
    return float(np.pi - max(abs(sec.lo), abs(sec.hi)))


def angular_passivity_index(curve):
    """``pi/2 - max(|phi_min|, |phi_max|)``; positive for strongly positive real systems."""
    sec = phi_infty(curve)
    return float(np.pi / 2 - max(abs(sec.lo), abs(sec.hi)))


def destabilizer_real(A):
    """Real accretive ``B`` making ``I + A B`` singular.

    Applies when the Hermitian part of ``A`` has a negative eigenvalue
    ``mu``: ``B = -(mu I + (A - A^T)/2)^{-1}``.

    Raises
    ------
    UnsupportedBranchError
        ``A`` is accretive (``mu >= 0``); that case needs a real generalized
        sectorial factorization, which is not implemented.
    """
    A = np.asarray(A)
    if np.iscomplexobj(A):
        if np.any(A.imag != 0):
            raise ValueError("A must be real")
        A = A.real
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    mu = float(np.linalg.eigvalsh((A + A.T) / 2)[0])
    if mu >= 0:
        raise UnsupportedBranchError(
            f"A is accretive (smallest Hermitian-part eigenvalue {mu:.3g} >= 0); the "
            "accretive but not quasi-strictly accretive branch is not supported")
    B = -np.linalg.inv(mu * np.eye(n) + (A - A.T) / 2)
    return B


def destabilizing_gain(G, at="dc"):
    """Static accretive gain ``H = B`` with ``I + G(s0) B`` singular at ``s0 in {0, inf}``.

    ``G(s0)`` must be real with an indefinite or negative definite Hermitian
    part (completely non-accretive branch).
    """
    s0 = 0.0 if at == "dc" else np.inf
    A = evaluate_many(G, [s0])[0]
    return destabilizer_real(A.real if np.allclose(A.imag, 0) else A)


@dataclass(frozen=True)
class SectorContainmentReport:
    """Pointwise and sector-level inclusions for ``S G`` and ``H S``.

    ``violations`` lists ``(which, omega, excess)`` triples; an empty list
    means every inclusion held within tolerance.
    """

    pointwise_ok: bool
    sector_ok: bool
    violations: tuple
    sector_sg: tuple
    sector_hs: tuple
    sector_g: tuple
    sector_h: tuple
    max_excess: float


def sensitivity_sector_check(G, H, tol=1e-6, eps=DEFAULT_EPS, n_axis=DEFAULT_N_AXIS,
                             n_detour=DEFAULT_N_DETOUR, report=None):
    """Closed-loop phase containment for ``S G`` and ``H S``.

    At every axis frequency the phase interval of ``S G`` must lie in
    ``[min(phi_min G, -phi_max H), max(phi_max G, -phi_min H)]`` and that of
    ``H S`` in ``[min(-phi_max G, phi_min H), max(-phi_min G, phi_max H)]``;
    over all frequencies the sector of ``S G`` must lie in the hull of the
    sector of ``G`` and the negated sector of ``H`` (and symmetrically for
    ``H S``).

    Raises
    ------
    HypothesisError
        The small phase test for the stable loop fails.
    """
    rep = report or small_phase_check(G, H, eps=eps, n_axis=n_axis,
                                      n_detour=n_detour, with_oracle=False)
    if rep.theorem != STABLE_THEOREM or not rep.small_phase_pass:
        raise HypothesisError("closed-loop sector containment requires a passing "
                              "small phase test for a stable loop", theorem=STABLE_THEOREM)
    if rep.swapped:
        G, H = H, G
    mG = G.model if isinstance(G, PhaseResponseCurve) else G
    mH = H.model if isinstance(H, PhaseResponseCurve) else H
    SG, HS = _loop_models(mG, mH)
    contour = union_contour([mG, mH], eps, n_axis, n_detour)
    cG, cH = sweep(mG, contour), sweep(mH, contour)
    cSG, cHS = sweep(SG, contour), sweep(HS, contour)
    mask = contour.kind == AXIS
    w = contour.param[mask]
    gmax, gmin = _phase_ends(cG, mask)
    hmax, hmin = _phase_ends(cH, mask)
    violations = []
    excess_all = -np.inf

    def check(name, curve, lo, hi):
        nonlocal excess_all
        if curve.rank == 0:
            return
        vmax, vmin = _phase_ends(curve, mask)
        ex = np.maximum(vmax - hi, lo - vmin)
        excess_all = max(excess_all, float(np.max(ex)))
        for k in np.flatnonzero(ex > tol):
            violations.append((name, float(w[k]), float(ex[k])))

    check("SG", cSG, np.minimum(gmin, -hmax), np.maximum(gmax, -hmin))
    check("HS", cHS, np.minimum(-gmax, hmin), np.maximum(-gmin, hmax))
    pointwise_ok = not violations
    sG, sH, sSG, sHS = (_sector(c) for c in (cG, cH, cSG, cHS))
    sector_ok = True
    lo_sg, hi_sg = min(sG.lo, -sH.hi), max(sG.hi, -sH.lo)
    lo_hs, hi_hs = min(-sG.hi, sH.lo), max(-sG.lo, sH.hi)
    for name, s, lo, hi in (("SG_sector", sSG, lo_sg, hi_sg), ("HS_sector", sHS, lo_hs, hi_hs)):
        if s.lo > s.hi:
            continue
        ex = max(s.hi - hi, lo - s.lo)
        excess_all = max(excess_all, ex)
        if ex > tol:
            sector_ok = False
            violations.append((name, np.nan, float(ex)))
    return SectorContainmentReport(
        pointwise_ok, sector_ok, tuple(violations), (sSG.lo, sSG.hi), (sHS.lo, sHS.hi),
        (sG.lo, sG.hi), (sH.lo, sH.hi), excess_all)


def feedback_report(G, H, eps=DEFAULT_EPS, n_axis=DEFAULT_N_AXIS,
                    n_detour=DEFAULT_N_DETOUR, tol=DEFAULT_MARGIN_TOL):
    """Small phase, small gain and oracle verdicts in one report.

    If the small phase hypotheses fail, ``small_phase_pass`` is ``None`` and
    the small gain verdict is still reported.
    """
    try:
        return small_phase_check(G, H, tol, eps, n_axis, n_detour)
    except HypothesisError:
        return small_gain_check(G, H, eps, n_axis, n_detour, with_oracle=True)
