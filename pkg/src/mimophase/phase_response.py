"""Phase responses along the (indented) imaginary axis.

A :class:`Contour` traverses the upper half of the imaginary axis from
``s = 0`` upward, taking right half-plane semicircular detours of radius
``eps`` around imaginary-axis zeros and poles, and a large arc of radius
``1/eps`` back to the positive real axis when infinity is a zero.
:func:`sweep` evaluates the phases at every point and tracks the phase center
continuously; :func:`phi_infty` extracts the phase sector over the axis.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import matrix_phase as mp
from .exceptions import (ClassificationError, ContourError, ConvergenceError, NegativeDCError,
                         SingularityError)
from .lti import axis_frequencies, evaluate_many

__all__ = [
    "AXIS", "DETOUR", "INFINITY_ARC", "Contour", "PhaseResponseCurve",
    "SectorBound", "SystemClass", "build_contour", "sweep", "phi_infty",
    "hinf_norm", "sigma_response", "classify_system", "curve_to_csv",
    "DEFAULT_EPS", "DEFAULT_N_AXIS", "DEFAULT_N_DETOUR",
]

AXIS, DETOUR, INFINITY_ARC = 0, 1, 2
_SEGMENT_NAMES = {AXIS: "axis", DETOUR: "detour", INFINITY_ARC: "infinity_arc"}

DEFAULT_EPS = 1e-3
# 600 points per decade over [1e-4, 1e4]
DEFAULT_N_AXIS = 4800
DEFAULT_N_DETOUR = 64
AXIS_RANGE = (1e-4, 1e4)
JUMP_GUARD = np.pi / 2
MAX_REFINE = 3
START_TOL = 1e-6


@dataclass(frozen=True)
class Contour:
    """Ordered points of the indented upper imaginary axis.

    ``kind[k]`` is one of :data:`AXIS`, :data:`DETOUR`, :data:`INFINITY_ARC`.
    ``param[k]`` is the frequency for axis points and the angle ``theta`` for
    detour and arc points; ``center[k]`` is the detoured frequency (``nan``
    elsewhere).
    """

    points: np.ndarray = field(compare=False)
    kind: np.ndarray = field(compare=False)
    param: np.ndarray = field(compare=False)
    center: np.ndarray = field(compare=False)
    eps: float
    zero_freqs: tuple = ()
    pole_freqs: tuple = ()
    zero_at_infinity: bool = False

    @property
    def detour_centers(self):
        bound = 1 / self.eps if self.zero_at_infinity else np.inf
        return tuple(_merge_centers(self.zero_freqs + self.pole_freqs, bound))

    def __len__(self):
        return self.points.size


def _merge_centers(freqs, bound):
    """Sorted frequencies below ``bound`` with near-duplicates merged."""
    centers = []
    for c in sorted(x for x in freqs if x < bound):
        if not centers or c - centers[-1] > 1e-6 * (1 + c):
            centers.append(c)
    return centers


def _point(kind, param, center, eps):
    if kind == AXIS:
        return np.inf + 0j if np.isinf(param) else 1j * param
    if kind == DETOUR:
        return 1j * center + eps * np.exp(1j * param)
    return np.exp(1j * param) / eps


def build_contour(model=None, eps=DEFAULT_EPS, n_axis=DEFAULT_N_AXIS,
                  n_detour=DEFAULT_N_DETOUR, include_poles=True, zeros=None,
                  poles=None, zero_at_infinity=None, axis_range=AXIS_RANGE):
    """Indented contour for ``model``.

    Parameters
    ----------
    model : StateSpace or TransferMatrix, optional
        Imaginary-axis zeros, poles and a zero at infinity are extracted
        from it unless given explicitly through ``zeros``, ``poles`` and
        ``zero_at_infinity`` (non-negative frequencies).
    eps : float
        Detour radius; the infinity arc has radius ``1/eps``.
    n_axis : int
        Number of logarithmically spaced axis points.
    n_detour : int
        Points per detour.

    Raises
    ------
    ContourError
        Two detours overlap or a detour would cross ``s = 0``.

    Notes
    -----
    When infinity is a zero, axis zeros and poles at frequencies of at least
    ``1/eps`` are enclosed by the infinity arc and get no detour of their own.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if model is not None and (zeros is None or poles is None or zero_at_infinity is None):
        zf, pf, zinf = axis_frequencies(model)
        zeros = zf if zeros is None else zeros
        poles = pf if poles is None else poles
        zero_at_infinity = zinf if zero_at_infinity is None else zero_at_infinity
    zeros = tuple(float(x) for x in (zeros if zeros is not None else ()))
    poles = tuple(float(x) for x in (poles if poles is not None else ())) if include_poles else ()
    zinf = bool(zero_at_infinity)
    # with a zero at infinity, axis points beyond the arc radius lie inside
    # the excluded region (typically split-off copies of the infinite zero)
    centers = _merge_centers(zeros + poles, 1 / eps if zinf else np.inf)
    for a, b in zip(centers, centers[1:]):
        if b - a <= 2 * eps:
            raise ContourError(f"detours at {a} and {b} overlap; use eps < {(b - a) / 2:.3g}")
    if centers and 0 < centers[0] <= eps:
        raise ContourError(f"detour at {centers[0]} crosses s = 0; use a smaller eps")
    if zinf and centers and centers[-1] + eps >= 1 / eps:
        raise ContourError("detour reaches the infinity arc; use a smaller eps")

    lo, hi = axis_range
    has_zero_detour = bool(centers) and centers[0] == 0.0
    start = eps if has_zero_detour else lo
    end = 1 / eps if zinf else hi
    if end <= start:
        raise ContourError("axis range is empty for this eps")
    w = np.geomspace(start, end, n_axis)
    if not has_zero_detour:
        w = np.concatenate([[0.0], w])
    for c in centers:
        if c > 0:
            w = w[np.abs(w - c) >= eps]

    # assemble (kind, param, center, sort key) tuples in traversal order
    rows = [(AXIS, x, np.nan, x) for x in w]
    if has_zero_detour:
        th = np.linspace(0, np.pi / 2, n_detour)
        # sort key below every axis frequency
        rows += [(DETOUR, t, 0.0, -1.0 + t / 10) for t in th]
    for c in centers:
        if c > 0:
            th = np.linspace(-np.pi / 2, np.pi / 2, n_detour)
            rows += [(DETOUR, t, c, c + eps * np.sin(t)) for t in th]
    if zinf:
        th = np.linspace(np.pi / 2, 0, n_detour)
        rows += [(INFINITY_ARC, t, np.nan, end + 1 + (np.pi / 2 - t)) for t in th]
    else:
        rows.append((AXIS, np.inf, np.nan, np.inf))
    rows.sort(key=lambda r: r[3])
    kind = np.array([r[0] for r in rows], dtype=int)
    param = np.array([r[1] for r in rows], dtype=float)
    center = np.array([r[2] for r in rows], dtype=float)
    pts = np.array([_point(k, p, c, eps) for k, p, c in zip(kind, param, center)])
    return Contour(pts, kind, param, center, float(eps), tuple(zeros), tuple(poles), zinf)


# ---------------------------------------------------------------------------
# raw spectra and branch selection


@dataclass
class _Raw:
    phases: np.ndarray      # descending, principal center
    kind: str
    theta0: float = np.nan  # rotated Hermitian center
    p: int = 0
    q: int = 0


def _raw_spectra(Gs, tol, points):
    ph_batch, ok = mp.sectorial_phases_batch(Gs, tol)
    if ph_batch.shape[1]:
        c = 0.5 * (ph_batch[:, 0] + ph_batch[:, -1])
        ph_batch = ph_batch + (mp.wrap_angle(c) - c)[:, None]
    raws = []
    for k, G in enumerate(Gs):
        if ok[k]:
            raws.append(_Raw(ph_batch[k], mp.SECTORIAL))
            continue
        try:
            spec = mp.phases(G, tol)
        except ClassificationError as exc:
            arc = mp.support_arc(G, tol)
            raise ClassificationError(
                f"G(s) is not semi-sectorial at s = {points[k]} (field angle "
                f"{arc.delta:.4g} rad)", field_angle=arc.delta, location=points[k]) from exc
        kind = spec.classification.kind
        if kind == mp.ROTATED_HERMITIAN:
            q = int(np.sum(np.isclose(spec.phases, spec.center + np.pi / 2)))
            raws.append(_Raw(spec.phases, kind, spec.center, spec.rank - q, q))
        else:
            raws.append(_Raw(spec.phases, kind))
    return raws


def _candidates(raw, target):
    """Phase vectors of ``raw`` on branches near phase center ``target``."""
    if raw.kind == mp.ROTATED_HERMITIAN:
        j0 = np.round((target - raw.theta0) / np.pi)
        out = []
        for j in (j0 - 1, j0, j0 + 1):
            t0 = raw.theta0 + j * np.pi
            pos, neg = (raw.p, raw.q) if int(j) % 2 == 0 else (raw.q, raw.p)
            out.append(np.array([t0 + np.pi / 2] * neg + [t0 - np.pi / 2] * pos))
        return out
    if raw.phases.size == 0:
        return [raw.phases]
    c = 0.5 * (raw.phases[0] + raw.phases[-1])
    j0 = np.round((target - c) / (2 * np.pi))
    return [raw.phases + 2 * np.pi * j for j in (j0 - 1, j0, j0 + 1)]


def _center(ph):
    return 0.5 * (ph[0] + ph[-1]) if ph.size else np.nan


def _select_branch(raw, target):
    cands = _candidates(raw, target)
    return min(cands, key=lambda ph: abs(_center(ph) - target))


def _start_branch(raw, where):
    ph = raw.phases
    if raw.kind == mp.ROTATED_HERMITIAN:
        ph = _select_branch(raw, 0.0)
    c = _center(ph)
    c = mp.wrap_angle(c)
    ph = _select_branch(raw, c)
    if abs(abs(c) - np.pi) < START_TOL:
        raise NegativeDCError(
            f"phase center at the first contour point s = {where} is pi; "
            "analyze -G instead")
    if abs(c) > START_TOL:
        raise ClassificationError(
            f"phase center at the first contour point s = {where} is {c:.6g}, "
            "expected 0")
    return ph


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class PhaseResponseCurve:
    """Tracked phase response on a contour.

    ``phases[k]`` is the descending phase vector of ``G(points[k])`` on the
    branch that keeps ``gamma`` continuous; ``sigmas[k]`` the singular values.
    """

    contour: Contour
    values: np.ndarray = field(compare=False)
    phases: np.ndarray = field(compare=False)
    gamma: np.ndarray = field(compare=False)
    sigmas: np.ndarray = field(compare=False)
    kinds: tuple = ()
    rank: int = 0
    rank_constant: bool = True
    sectorial_everywhere: bool = False
    quasi_everywhere: bool = False
    model: object = field(default=None, compare=False, repr=False)
    tol: float = mp.DEFAULT_TOL

    @property
    def points(self):
        return self.contour.points

    @property
    def axis_mask(self):
        return self.contour.kind == AXIS

    @property
    def max_jump(self):
        """Largest change of the phase vector between adjacent points."""
        if len(self.phases) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.phases, axis=0))))


def _refine_contour(contour, bad):
    """Insert a midpoint before each index in ``bad`` (same-segment neighbours only)."""
    kind, param, center = contour.kind, contour.param, contour.center
    ins = []
    for k in bad:
        a, b = k - 1, k
        if kind[a] != kind[b] or not (np.isnan(center[a]) and np.isnan(center[b])
                                      or center[a] == center[b]):
            continue
        if kind[a] == AXIS:
            if np.isinf(param[b]):
                continue
            mid = np.sqrt(param[a] * param[b]) if param[a] > 0 else param[b] / 2
        else:
            mid = 0.5 * (param[a] + param[b])
        ins.append((k, kind[a], mid, center[a]))
    if not ins:
        return None
    idx = np.array([i[0] for i in ins])
    kind = np.insert(kind, idx, [i[1] for i in ins])
    param = np.insert(param, idx, [i[2] for i in ins])
    center = np.insert(center, idx, [i[3] for i in ins])
    pts = np.array([_point(k, p, c, contour.eps) for k, p, c in zip(kind, param, center)])
    return Contour(pts, kind, param, center, contour.eps, contour.zero_freqs,
                   contour.pole_freqs, contour.zero_at_infinity)


def _track(raws, points):
    """Choose branches so the phase center is continuous.

    Runs of points that are not rotated Hermitian only admit ``2 pi`` shifts,
    so nearest-branch selection along a run is an unwrap of the principal
    centers; rotated Hermitian points are handled one at a time.
    """
    N = len(raws)
    out = [None] * N
    gam = np.empty(N)
    out[0] = _start_branch(raws[0], points[0])
    gam[0] = _center(out[0])
    bad = []
    k = 1
    while k < N:
        if raws[k].kind == mp.ROTATED_HERMITIAN or raws[k].phases.size == 0:
            ph = _select_branch(raws[k], gam[k - 1])
            out[k], gam[k] = ph, _center(ph)
            if abs(gam[k] - gam[k - 1]) >= JUMP_GUARD:
                bad.append(k)
            k += 1
            continue
        e = k
        while (e < N and raws[e].kind != mp.ROTATED_HERMITIAN
               and raws[e].phases.size == raws[k].phases.size):
            e += 1
        P = np.array([r.phases for r in raws[k:e]])
        c = 0.5 * (P[:, 0] + P[:, -1])
        g = np.unwrap(np.concatenate([[gam[k - 1]], c]))
        P = P + (g[1:] - c)[:, None]
        gam[k:e] = g[1:]
        out[k:e] = list(P)
        bad.extend((k + np.flatnonzero(np.abs(np.diff(g)) >= JUMP_GUARD)).tolist())
        k = e
    return np.array(out), gam, bad


def _ranks(svals, tol):
    top = svals[:, :1]
    return np.sum(svals > tol * np.where(top > 0, top, 1.0), axis=1) * (top[:, 0] > 0)


def sweep(model, contour=None, tol=mp.DEFAULT_TOL, **contour_kw):
    """Phase response of ``model`` along ``contour``.

    Each point is classified and its phases computed; a sequential pass then
    shifts every spectrum by multiples of ``2 pi`` (or ``pi`` for rotated
    Hermitian points, which swaps the roles of ``theta0 +- pi/2``) so the
    phase center varies continuously from 0.  Adjacent centers differing by
    ``pi/2`` or more trigger up to three local refinements.

    Raises
    ------
    ClassificationError
        A point is not semi-sectorial, the starting phase center is not 0,
        or the numeric rank changes along the contour.
    ConvergenceError
        The phase center still jumps after refinement.
    """
    if contour is None:
        contour = build_contour(model, **contour_kw)
    for attempt in range(MAX_REFINE + 1):
        Gs = evaluate_many(model, contour.points)
        svals = np.linalg.svd(Gs, compute_uv=False)
        ranks = _ranks(svals, tol)
        change = np.flatnonzero(np.diff(ranks))
        if change.size:
            k = change[0]
            raise ClassificationError(
                "not frequency-wise semi-sectorial: rank changes from "
                f"{ranks[k]} at s = {contour.points[k]} to {ranks[k + 1]} at "
                f"s = {contour.points[k + 1]}", location=(contour.points[k], contour.points[k + 1]))
        raws = _raw_spectra(Gs, tol, contour.points)
        phases, gam, bad = _track(raws, contour.points)
        if not bad:
            break
        if attempt == MAX_REFINE:
            k = bad[0]
            raise ConvergenceError(
                f"phase center jumps by {abs(gam[k] - gam[k - 1]):.3g} rad between "
                f"s = {contour.points[k - 1]} and s = {contour.points[k]} after "
                f"{MAX_REFINE} refinements")
        refined = _refine_contour(contour, bad)
        if refined is None:
            k = bad[0]
            raise ConvergenceError(
                f"phase center jumps by {abs(gam[k] - gam[k - 1]):.3g} rad across "
                f"a segment boundary at s = {contour.points[k]}")
        contour = refined
    kinds = tuple(r.kind for r in raws)
    return PhaseResponseCurve(
        contour=contour, values=Gs, phases=phases, gamma=gam, sigmas=svals,
        kinds=kinds, rank=int(ranks[0]), rank_constant=True,
        sectorial_everywhere=all(k == mp.SECTORIAL for k in kinds),
        quasi_everywhere=all(k in (mp.SECTORIAL, mp.QUASI_SECTORIAL) for k in kinds),
        model=model, tol=tol)


# ---------------------------------------------------------------------------
# sector extraction


@dataclass(frozen=True)
class SectorBound:
    lo: float
    hi: float

    @property
    def spread(self):
        return self.hi - self.lo

    def degrees(self):
        return np.degrees(self.lo), np.degrees(self.hi)


def _phases_near(model, omegas, target, tol, rank=None):
    """Phase vectors at ``j omega`` on the branch nearest ``target``.

    Stops at the first point whose numeric rank differs from ``rank`` or whose
    phase center jumps by the guard angle; returns the phases computed so far.
    """
    s = np.where(np.isinf(omegas), np.inf + 0j, 1j * np.asarray(omegas, dtype=float))
    try:
        Gs = evaluate_many(model, s)
    except SingularityError:
        return np.zeros((0, rank or 0))
    if rank is not None:
        r = _ranks(np.linalg.svd(Gs, compute_uv=False), tol)
        bad = np.flatnonzero(r != rank)
        if bad.size:
            Gs, s = Gs[:bad[0]], s[:bad[0]]
    out = []
    try:
        raws = _raw_spectra(Gs, tol, s)
    except (ClassificationError, ConvergenceError):
        raws = []
        for G, pt in zip(Gs, s):
            try:
                raws.extend(_raw_spectra(G[None], tol, [pt]))
            except (ClassificationError, ConvergenceError):
                break
    for r in raws:
        ph = _select_branch(r, target)
        if abs(_center(ph) - target) >= JUMP_GUARD:
            break
        out.append(ph)
        target = _center(ph)
    if not out:
        return np.zeros((0, rank or 0))
    return np.array(out)


def _axis_neighbours(curve, idx):
    """Frequencies bracketing axis point ``idx`` and the limits beyond the grid.

    Returns ``(left, right, left_limit, right_limit)`` where a limit is
    ``None`` if the neighbour is an ordinary axis point, and otherwise the
    frequency the axis approaches there (a detour center, 0 or ``inf``).
    """
    c = curve.contour
    n = len(c)
    w = c.param[idx]
    left = right = w
    left_lim = right_lim = None
    if idx > 0 and c.kind[idx - 1] == AXIS:
        left = c.param[idx - 1]
    elif idx > 0 and c.kind[idx - 1] == DETOUR:
        left_lim = c.center[idx - 1]
    elif idx == 0 and w > 0:
        left_lim = 0.0
    if idx + 1 < n and c.kind[idx + 1] == AXIS:
        right = c.param[idx + 1]
    elif idx + 1 < n and c.kind[idx + 1] == DETOUR:
        right_lim = c.center[idx + 1]
    elif np.isfinite(w):
        right_lim = np.inf
    return left, right, left_lim, right_lim


def _local_extreme(curve, idx, which, rtol=1e-4, max_iter=30):
    """Refine an axis extremum of ``phi_max`` (which=0) or ``phi_min`` (which=-1)."""
    model = curve.model
    sign = 1.0 if which == 0 else -1.0
    best = sign * curve.phases[idx, which]
    if model is None:
        return sign * best
    lo_w, hi_w, _, _ = _axis_neighbours(curve, idx)
    target = curve.gamma[idx]
    for it in range(max_iter):
        if not (np.isfinite(lo_w) and np.isfinite(hi_w)) or hi_w <= lo_w:
            break
        grid = (np.geomspace(lo_w, hi_w, 17) if lo_w > 0 else np.linspace(lo_w, hi_w, 17))
        ph = _phases_near(model, grid, target, curve.tol, curve.rank)
        if len(ph) < len(grid):
            break
        vals = sign * ph[:, which]
        k = int(np.argmax(vals))
        new = max(best, float(vals[k]))
        done = new - best < rtol and it > 0
        best = new
        lo_w = grid[max(k - 1, 0)]
        hi_w = grid[min(k + 1, len(grid) - 1)]
        if done:
            break
    return sign * best


def _tail(curve, idx, which, limit):
    """Best value of the tracked phase following the axis from point ``idx`` toward ``limit``."""
    model = curve.model
    sign = 1.0 if which == 0 else -1.0
    w0 = curve.contour.param[idx]
    if model is None:
        return -np.inf
    k = np.arange(1, 9)
    if np.isinf(limit):
        grid = w0 * 10.0 ** k
    else:
        grid = limit + (w0 - limit) * 10.0 ** (-k)
    ph = _phases_near(model, grid, curve.gamma[idx], curve.tol, curve.rank)
    if len(ph) == 0:
        return -np.inf
    return float(np.max(sign * ph[:, which]))


def phi_infty(curve, rtol=1e-4):
    """Phase sector over the axis part of the contour.

    Detour and infinity-arc points are excluded.  The arg-extremum is
    refined locally until it moves by less than ``rtol``; when it sits next
    to an indentation or at an end of the grid, the axis is followed further
    toward that end while the rank stays constant.
    """
    ax = np.flatnonzero(curve.axis_mask)
    if ax.size == 0 or curve.rank == 0:
        return SectorBound(np.nan, np.nan)
    out = []
    for which in (0, -1):
        sign = 1.0 if which == 0 else -1.0
        vals = sign * curve.phases[ax, which]
        idx = int(ax[int(np.argmax(vals))])
        best = sign * _local_extreme(curve, idx, which, rtol)
        _, _, left_lim, right_lim = _axis_neighbours(curve, idx)
        for lim in (left_lim, right_lim):
            if lim is not None:
                best = max(best, _tail(curve, idx, which, lim))
        out.append(sign * best)
    return SectorBound(lo=float(out[1]), hi=float(out[0]))


def sigma_response(curve):
    """Singular values at every contour point, shape ``(N, m)``."""
    return curve.sigmas


def hinf_norm(curve, rtol=1e-6):
    """Supremum of the largest singular value over the axis points.

    Infinite when the contour detours around imaginary-axis poles.
    """
    if curve.contour.pole_freqs:
        return np.inf
    ax = np.flatnonzero(curve.axis_mask)
    w = curve.contour.param[ax]
    smax = curve.sigmas[ax, 0]
    k = int(np.argmax(smax))
    best = float(smax[k])
    model = curve.model
    if model is None:
        return best
    lo_w = w[k - 1] if k > 0 else w[k]
    hi_w = w[k + 1] if k + 1 < len(w) else w[k]
    for _ in range(40):
        if not np.isfinite(hi_w) or hi_w <= lo_w:
            break
        grid = np.geomspace(lo_w, hi_w, 17) if lo_w > 0 else np.linspace(lo_w, hi_w, 17)
        s = np.linalg.norm(evaluate_many(model, 1j * grid), 2, axis=(1, 2))
        j = int(np.argmax(s))
        new = max(best, float(s[j]))
        done = new - best <= rtol * new
        best = new
        lo_w, hi_w = grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)]
        if done and _ > 2:
            break
    return best


@dataclass(frozen=True)
class SystemClass:
    frequency_wise_sectorial: bool
    sectorial: bool
    semi_sectorial: bool
    quasi_sectorial: bool
    positive_real: bool
    negative_imaginary: bool
    sector: SectorBound


def classify_system(curve, tol=1e-6, sector=None):
    """Sector-based classification flags of a swept system."""
    sec = phi_infty(curve) if sector is None else sector
    spread = sec.hi - sec.lo
    fws = curve.sectorial_everywhere
    return SystemClass(
        frequency_wise_sectorial=fws,
        sectorial=bool(fws and spread < np.pi - tol),
        semi_sectorial=bool(spread <= np.pi + tol),
        quasi_sectorial=bool(curve.quasi_everywhere and spread < np.pi - tol),
        positive_real=bool(sec.lo >= -np.pi / 2 - tol and sec.hi <= np.pi / 2 + tol),
        negative_imaginary=bool(sec.lo >= -np.pi - tol and sec.hi <= tol),
        sector=sec,
    )


def curve_to_csv(curve):
    """CSV text with one row per contour point (angles in radians)."""
    m = curve.phases.shape[1]
    ms = curve.sigmas.shape[1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["omega", "segment", "re_s", "im_s", "gamma"]
               + [f"phi_{i + 1}" for i in range(m)]
               + [f"sigma_{i + 1}" for i in range(ms)] + ["classification"])
    c = curve.contour
    for k in range(len(c)):
        s = c.points[k]
        w.writerow([repr(float(c.param[k])), _SEGMENT_NAMES[int(c.kind[k])],
                    repr(float(s.real)), repr(float(s.imag)), repr(float(curve.gamma[k]))]
                   + [repr(float(x)) for x in curve.phases[k]]
                   + [repr(float(x)) for x in curve.sigmas[k]] + [curve.kinds[k]])
    return buf.getvalue()
