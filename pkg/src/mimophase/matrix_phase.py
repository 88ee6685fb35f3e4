"""Phases of complex square matrices.

Classification into sectorial / quasi-sectorial / rotated Hermitian /
semi-sectorial matrices, phase spectra, numerical range geometry and the
matrix-level phase inequalities that underpin the small phase theorem.

Conventions
-----------
* ``C = H + jK`` with ``H = (C + C^*)/2`` and ``K = (C - C^*)/(2j)``, both
  Hermitian.  The Hermitian part of ``e^{-j theta} C`` is
  ``cos(theta) H + sin(theta) K``.
* Phases are returned sorted in descending order.  The phase center is the
  midpoint of the extreme phases and is placed in ``(-pi, pi]`` (principal
  values); continuity across parameter families is handled by callers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from .exceptions import ClassificationError, ConvergenceError

__all__ = [
    "SECTORIAL", "QUASI_SECTORIAL", "SEMI_SECTORIAL", "ROTATED_HERMITIAN",
    "NOT_SEMI_SECTORIAL", "DEFAULT_TOL", "SupportArc", "Classification",
    "PhaseSpectrum", "ProductAngleReport", "hermitian_part", "skew_part",
    "numeric_rank", "support_arc", "classify", "phases",
    "sectorial_phases_batch", "regularized_phases",
    "numerical_range_boundary", "quasi_sectorial_test", "pinv_phases",
    "product_angle_bounds", "small_phase_matrix", "wrap_angle",
    "matrix_to_json", "matrix_from_json",
]

SECTORIAL = "sectorial"
QUASI_SECTORIAL = "quasi_sectorial"
SEMI_SECTORIAL = "semi_sectorial"
ROTATED_HERMITIAN = "rotated_hermitian"
NOT_SEMI_SECTORIAL = "none"

DEFAULT_TOL = 1e-9
SCAN_POINTS = 720
ARC_ATOL = 1e-10
# regularization schedule: ratio 10 in delta, extrapolated in sqrt(delta)
REG_DELTAS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
REG_WINDOW = 4
REG_ATOL = 1e-6
# tolerance on the kernel coupling of e^{-ja}C + e^{ja}C^* (relative to |C|)
_COUPLING_TOL = 1e-8
# floor used when locating the edges of a degenerate (closed) arc
_EDGE_NOISE = 1e-13


def wrap_angle(x):
    """Map angles into ``(-pi, pi]``."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    y = np.where(y == -np.pi, np.pi, y)
    return float(y) if np.ndim(y) == 0 else y


def _as_matrix(C):
    C = np.asarray(C, dtype=complex)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {C.shape}")
    if not np.all(np.isfinite(C)):
        raise ValueError("matrix has non-finite entries")
    return C


def hermitian_part(C):
    C = np.asarray(C, dtype=complex)
    return (C + np.swapaxes(C, -1, -2).conj()) / 2


def skew_part(C):
    """Hermitian ``K`` such that ``C = hermitian_part(C) + 1j * K``."""
    C = np.asarray(C, dtype=complex)
    return (C - np.swapaxes(C, -1, -2).conj()) / 2j


def numeric_rank(C, tol=DEFAULT_TOL):
    """Number of singular values above ``tol * sigma_max``."""
    s = linalg.svdvals(np.asarray(C, dtype=complex))
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


@dataclass(frozen=True)
class SupportArc:
    """Rotations ``theta`` for which ``Herm(e^{-j theta} C)`` is positive definite.

    When ``nonempty`` the open interval ``(theta_lo, theta_hi)`` is that set;
    its endpoints equal ``phi_max - pi/2`` and ``phi_min + pi/2``.
    ``delta`` is the field angle of ``C``.
    """

    theta_lo: float
    theta_hi: float
    delta: float
    nonempty: bool
    degenerate: bool = False


@dataclass(frozen=True)
class Classification:
    kind: str
    numeric_rank: int

    @property
    def is_sectorial(self):
        return self.kind == SECTORIAL

    @property
    def is_quasi_sectorial(self):
        return self.kind in (SECTORIAL, QUASI_SECTORIAL)

    @property
    def is_semi_sectorial(self):
        return self.kind != NOT_SEMI_SECTORIAL


@dataclass(frozen=True)
class PhaseSpectrum:
    """Phases of a semi-sectorial matrix, sorted descending."""

    phases: np.ndarray = field(compare=False)
    center: float
    rank: int
    classification: Classification

    @property
    def phi_max(self):
        return float(self.phases[0]) if self.rank else -np.inf

    @property
    def phi_min(self):
        return float(self.phases[-1]) if self.rank else np.inf

    @property
    def spread(self):
        return self.phi_max - self.phi_min if self.rank else 0.0

    def shifted(self, delta):
        """Same spectrum on another branch (all phases moved by ``delta``)."""
        return PhaseSpectrum(self.phases + delta, self.center + delta,
                             self.rank, self.classification)


# ---------------------------------------------------------------------------
# rotation scans


def _min_eig_rotations(C, thetas):
    H = hermitian_part(C)
    K = skew_part(C)
    th = np.asarray(thetas, dtype=float)
    M = np.cos(th)[:, None, None] * H + np.sin(th)[:, None, None] * K
    return np.linalg.eigvalsh(M)[:, 0]


def _min_eig_at(C, theta):
    return float(_min_eig_rotations(C, [theta])[0])


def _edge(f, grid, vals, seed, direction, level, atol=ARC_ATOL):
    """Boundary of ``{f > level}`` walking from ``seed`` toward ``direction``.

    The bracket comes from the precomputed scan ``vals`` on the periodic
    ``grid``; it is then closed by bisection on ``f``.
    """
    n = grid.size
    h = grid[1] - grid[0]
    pos = (seed - grid[0]) / h
    j = int(np.floor(pos)) + 1 if direction > 0 else int(np.ceil(pos)) - 1
    inside = seed
    for _ in range(n):
        if vals[j % n] <= level:
            break
        inside = grid[0] + j * h
        j += direction
    outside = grid[0] + j * h
    while abs(outside - inside) > atol:
        mid = 0.5 * (inside + outside)
        if f(mid) > level:
            inside = mid
        else:
            outside = mid
    return 0.5 * (inside + outside)


def _superlevel_arc(C, level, scale, edge_level=None):
    """Arc ``{theta : lambda_min(Herm(e^{-j theta}C)) / scale > level}``.

    Existence is decided at ``level``; the endpoints are then located at
    ``edge_level`` (default ``level``).  Returns ``(lo, hi)`` with ``lo`` in
    ``[-pi, pi)`` and ``hi > lo``, the string ``"circle"`` if the whole circle
    qualifies, or ``None``.
    """
    if edge_level is None:
        edge_level = level
    f = lambda th: _min_eig_at(C, th) / scale  # noqa: E731
    grid = np.linspace(-np.pi, np.pi, SCAN_POINTS, endpoint=False)
    h = grid[1] - grid[0]
    vals = _min_eig_rotations(C, grid) / scale
    above = vals > level
    if above.all():
        return "circle"
    if above.any():
        # roll so that index 0 is outside, split into runs and keep the best
        shift = int(np.flatnonzero(~above)[0])
        v = np.roll(vals, -shift)
        edges = np.diff(np.roll(above, -shift).astype(int))
        starts = np.flatnonzero(edges == 1) + 1
        ends = np.flatnonzero(edges == -1)
        if len(ends) < len(starts):
            ends = np.append(ends, SCAN_POINTS - 1)
        best = max(range(len(starts)), key=lambda i: v[starts[i]:ends[i] + 1].max())
        k = starts[best] + shift + int(np.argmax(v[starts[best]:ends[best] + 1]))
        seed = grid[0] + k * h
    else:
        k = int(np.argmax(vals))
        res = optimize.minimize_scalar(
            lambda th: -f(th), bounds=(grid[k] - h, grid[k] + h),
            method="bounded", options={"xatol": 1e-13})
        if -res.fun <= level:
            return None
        seed = float(res.x)
    if f(seed) <= edge_level:
        return None
    lo = _edge(f, grid, vals, seed, -1, edge_level)
    hi = _edge(f, grid, vals, seed, 1, edge_level)
    lo_w = wrap_angle(lo)
    if lo_w == np.pi:
        lo_w = -np.pi
    return lo_w, lo_w + (hi - lo)


def support_arc(C, tol=DEFAULT_TOL):
    """Open arc of rotations making the Hermitian part positive definite.

    Endpoints are located by a 720-point scan of
    ``lambda_min(Herm(e^{-j theta} C))`` followed by bisection to ``1e-10``.

    Examples
    --------
    >>> arc = support_arc(np.eye(2))
    >>> round(arc.theta_lo, 8), round(arc.theta_hi, 8), round(arc.delta, 8)
    (-1.57079633, 1.57079633, 0.0)
    """
    C = _as_matrix(C)
    scale = np.linalg.norm(C, 2)
    if scale == 0:
        return SupportArc(-np.pi, np.pi, 0.0, True, degenerate=True)
    arc = _superlevel_arc(C, tol, scale, edge_level=0.0)
    if arc is not None and arc != "circle":
        lo, hi = arc
        return SupportArc(lo, hi, max(0.0, np.pi - (hi - lo)), True)
    psd = _superlevel_arc(C, -tol, scale, edge_level=-_EDGE_NOISE)
    if psd is None:
        delta = 2 * np.pi
    else:
        delta = max(0.0, np.pi - (psd[1] - psd[0]))
    return SupportArc(np.nan, np.nan, delta, False)


def _rotation_to_hermitian(C, tol=1e-8):
    """``theta`` with ``e^{-j theta} C`` Hermitian (defined mod pi), or None."""
    Ch = C.conj().T
    nrm = np.vdot(C, C).real
    zeta = np.vdot(C, Ch) / nrm
    if abs(abs(zeta) - 1) > tol:
        return None
    if np.linalg.norm(Ch - zeta * C) > tol * np.sqrt(nrm):
        return None
    return -np.angle(zeta) / 2


def _trace_test(C, tol, scale):
    # trace(C)/n lies in W(C), so its direction is inside the cone of any
    # sectorial C and makes the rotated Hermitian part positive definite
    tr = np.trace(C)
    if tr == 0:
        return False
    return _min_eig_at(C, np.angle(tr)) > tol * scale


def quasi_sectorial_test(C, alpha, tol=DEFAULT_TOL):
    """Largest ``eps`` with ``e^{-j alpha}C + e^{j alpha}C^* - eps C^*C >= 0``.

    Returns ``(holds, eps)`` where ``holds = eps > tol``.  On the kernel of
    ``C`` the left-hand side must vanish identically, otherwise no ``eps``
    exists and ``(False, -inf)`` is returned.

    Examples
    --------
    >>> quasi_sectorial_test(np.eye(2), 0.0)
    (True, 2.0)
    """
    C = _as_matrix(C)
    scale = np.linalg.norm(C, 2)
    if scale == 0:
        return True, np.inf
    L = np.exp(-1j * alpha) * C + np.exp(1j * alpha) * C.conj().T
    _, s, Vh = linalg.svd(C)
    r = int(np.sum(s > tol * s[0]))
    V = Vh.conj().T
    Vr, N = V[:, :r], V[:, r:]
    if N.shape[1] and np.linalg.norm(L @ N, 2) > _COUPLING_TOL * scale:
        return False, -np.inf
    Lr = Vr.conj().T @ L @ Vr
    dinv = 1.0 / s[:r]
    Mr = dinv[:, None] * Lr * dinv[None, :]
    eps = float(np.linalg.eigvalsh(hermitian_part(Mr))[0])
    return bool(eps > tol), eps


def classify(C, tol=DEFAULT_TOL):
    """Strongest applicable class of ``C`` and its numeric rank.

    Examples
    --------
    >>> classify([[1, 0], [0, 0]]).kind
    'quasi_sectorial'
    >>> classify([[1, 1], [-1, 0]]).kind
    'semi_sectorial'
    """
    C = _as_matrix(C)
    scale = np.linalg.norm(C, 2)
    if scale == 0:
        return Classification(QUASI_SECTORIAL, 0)
    rank = numeric_rank(C, tol)
    if _trace_test(C, tol, scale):
        return Classification(SECTORIAL, rank)
    arc = _superlevel_arc(C, tol, scale)
    if arc is not None and arc != "circle":
        return Classification(SECTORIAL, rank)
    psd = _superlevel_arc(C, -tol, scale)
    if psd is None:
        return Classification(NOT_SEMI_SECTORIAL, rank)
    theta = _rotation_to_hermitian(C)
    if theta is not None:
        ev = np.linalg.eigvalsh(hermitian_part(np.exp(-1j * theta) * C))
        if ev[0] >= -tol * scale or ev[-1] <= tol * scale:
            return Classification(QUASI_SECTORIAL, rank)
        return Classification(ROTATED_HERMITIAN, rank)
    alpha = 0.5 * (psd[0] + psd[1])
    holds, _ = quasi_sectorial_test(C, alpha, tol)
    return Classification(QUASI_SECTORIAL if holds else SEMI_SECTORIAL, rank)


# ---------------------------------------------------------------------------
# phase computations


def _batch_core(Cs, theta, scale, tol):
    """Phases of each ``Cs[k]`` using rotation ``theta[k]``; mask of successes."""
    rot = np.exp(-1j * theta)[:, None, None] * Cs
    H = hermitian_part(rot)
    K = skew_part(rot)
    ok = np.linalg.eigvalsh(H)[:, 0] > tol * scale
    m = Cs.shape[-1]
    out = np.full((Cs.shape[0], m), np.nan)
    if not ok.any():
        return out, ok
    L = np.linalg.cholesky(H[ok])
    Linv = np.linalg.inv(L)
    M = Linv @ K[ok] @ np.swapaxes(Linv, -1, -2).conj()
    t = np.linalg.eigvalsh(hermitian_part(M))
    out[ok] = theta[ok][:, None] + np.arctan(t[:, ::-1])
    return out, ok


def _best_rotation_batch(Cs, n_angles=72):
    """Coarse maximizer of ``lambda_min(Herm(e^{-j theta} C))`` for each matrix."""
    th = np.linspace(-np.pi, np.pi, n_angles, endpoint=False)
    H = hermitian_part(Cs)
    K = skew_part(Cs)
    M = (np.cos(th)[None, :, None, None] * H[:, None]
         + np.sin(th)[None, :, None, None] * K[:, None])
    lam = np.linalg.eigvalsh(M)[..., 0]
    return th[np.argmax(lam, axis=1)]


def sectorial_phases_batch(Cs, tol=DEFAULT_TOL):
    """Phases of a stack of matrices, for those that are sectorial.

    The rotation is first taken along ``trace(C)`` (valid whenever the field
    angle is below ``pi/2``), then from a coarse scan of rotations, and the
    result is recomputed at the phase center for conditioning.

    Parameters
    ----------
    Cs : (N, m, m) array_like
    tol : float
        Relative positive-definiteness threshold.

    Returns
    -------
    phases : (N, m) ndarray
        Descending phases on an arbitrary ``2 pi`` branch, ``nan`` rows where
        the matrix is not recognised as sectorial.
    ok : (N,) bool ndarray
    """
    Cs = np.asarray(Cs, dtype=complex)
    scale = np.linalg.norm(Cs, 2, axis=(-2, -1))
    safe = np.where(scale > 0, scale, 1.0)
    theta = np.angle(np.trace(Cs, axis1=-2, axis2=-1))
    ph, ok = _batch_core(Cs, theta, safe, tol)
    retry = ~ok & (scale > 0)
    if retry.any():
        th2 = _best_rotation_batch(Cs[retry])
        ph2, ok2 = _batch_core(Cs[retry], th2, safe[retry], tol)
        ph[retry] = ph2
        ok[retry] = ok2
    ok &= scale > 0
    if ok.any():
        center = 0.5 * (ph[ok, 0] + ph[ok, -1])
        ph2, ok2 = _batch_core(Cs[ok], center, scale[ok], tol)
        sub = ph[ok]
        sub[ok2] = ph2[ok2]
        ph[ok] = sub
    ph[~ok] = np.nan
    return ph, ok


def _principal(ph):
    c = 0.5 * (ph[0] + ph[-1])
    c_new = wrap_angle(c)
    return ph + (c_new - c), c_new


def _sectorial_phases(C, tol):
    ph, ok = sectorial_phases_batch(C[None], tol)
    if ok[0]:
        return ph[0]
    scale = np.linalg.norm(C, 2)
    arc = _superlevel_arc(C, tol, scale, edge_level=0.0) if scale > 0 else None
    if arc is None or arc == "circle":
        return None
    mid = np.array([0.5 * (arc[0] + arc[1])])
    ph, ok = _batch_core(C[None], mid, np.array([scale]), tol)
    return ph[0] if ok[0] else None


def _rotated_hermitian_phases(C, tol):
    scale = np.linalg.norm(C, 2)
    theta = _rotation_to_hermitian(C)
    # choose the center theta0 (defined mod pi) in (-pi/2, pi/2]
    theta0 = theta + np.pi / 2
    theta0 = theta0 - np.pi * np.floor((theta0 + np.pi / 2) / np.pi)
    if theta0 <= -np.pi / 2:
        theta0 += np.pi
    Hm = hermitian_part(np.exp(-1j * (theta0 - np.pi / 2)) * C)
    ev = np.linalg.eigvalsh(Hm)
    p = int(np.sum(ev > tol * scale))
    q = int(np.sum(ev < -tol * scale))
    return np.array([theta0 + np.pi / 2] * q + [theta0 - np.pi / 2] * p), theta0


def regularized_phases(C, tol=DEFAULT_TOL, deltas=REG_DELTAS, atol=REG_ATOL):
    """Phases of a semi-sectorial matrix as the limit of regularized phases.

    ``C + delta |C| e^{j gamma0} I`` is sectorial for ``delta > 0`` when
    ``gamma0`` points into the closed cone ``W'(C)``.  Its phases converge
    like ``sqrt(delta)`` (Jordan-type blocks reach ``gamma0 +- pi/2`` at that
    rate, sectorial parts like ``delta``), so the values on a geometric
    schedule are extrapolated to ``delta = 0`` by a cubic in ``sqrt(delta)``
    through a sliding window of four points; two successive extrapolations
    within ``atol`` are accepted.  The ``n - rank`` phases
    nearest ``gamma0`` come from the kernel and are discarded.

    Raises
    ------
    ClassificationError
        ``C`` is not semi-sectorial.
    ConvergenceError
        Extrapolated values disagree by more than ``atol`` through the whole
        schedule.
    """
    C = _as_matrix(C)
    n = C.shape[0]
    scale = np.linalg.norm(C, 2)
    if scale == 0:
        return np.array([])
    r = numeric_rank(C, tol)
    psd = _superlevel_arc(C, -tol, scale)
    if psd is None:
        raise ClassificationError("matrix is not semi-sectorial",
                                  field_angle=2 * np.pi)
    if psd == "circle":
        gamma0 = 0.0
    else:
        gamma0 = 0.5 * (psd[0] + psd[1])

    def at(delta):
        Cd = C + delta * scale * np.exp(1j * gamma0) * np.eye(n)
        ph = _sectorial_phases(Cd, tol)
        if ph is None:
            raise ConvergenceError(f"regularized matrix not sectorial at delta={delta}")
        ph = gamma0 + wrap_angle(ph - gamma0)
        if r < n:
            keep = np.argsort(np.abs(ph - gamma0))[n - r:]
            ph = ph[keep]
        return np.sort(ph)[::-1]

    hs, vals, extrap = [], [], []
    for d in deltas:
        hs.append(np.sqrt(d))
        vals.append(at(d))
        if len(hs) < REG_WINDOW:
            continue
        h = np.array(hs[-REG_WINDOW:])
        # Lagrange weights of the cubic through the window, evaluated at h = 0
        w = np.array([np.prod([h[j] / (h[j] - h[i]) for j in range(REG_WINDOW) if j != i])
                      for i in range(REG_WINDOW)])
        extrap.append(w @ np.array(vals[-REG_WINDOW:]))
        if len(extrap) >= 2 and np.max(np.abs(extrap[-1] - extrap[-2])) <= atol:
            return extrap[-1]
    raise ConvergenceError(
        f"regularization did not converge for schedule {deltas}; last two "
        f"iterates {extrap[-2] if len(extrap) > 1 else None} and "
        f"{extrap[-1] if extrap else None}",
        iterates=extrap[-2:])


def phases(C, tol=DEFAULT_TOL):
    """Phase spectrum of a semi-sectorial matrix.

    Sectorial matrices are handled by the congruence ``e^{-j gamma}C = H + jK``
    with ``H > 0``: the phases are ``gamma + arctan`` of the eigenvalues of
    ``H^{-1/2} K H^{-1/2}``.  Quasi-sectorial matrices are first compressed to
    their range; rotated Hermitian matrices get copies of ``theta0 +- pi/2``
    with ``theta0`` in ``(-pi/2, pi/2]``; the remaining semi-sectorial
    matrices go through :func:`regularized_phases`.

    Examples
    --------
    >>> np.round(phases(np.diag([1, 2])).phases, 12)
    array([0., 0.])
    """
    C = _as_matrix(C)
    cls = classify(C, tol)
    kind = cls.kind
    if cls.numeric_rank == 0:
        return PhaseSpectrum(np.array([]), np.nan, 0, cls)
    if kind == NOT_SEMI_SECTORIAL:
        raise ClassificationError(
            "matrix is not semi-sectorial (field angle 2*pi)",
            field_angle=2 * np.pi)
    if kind == ROTATED_HERMITIAN:
        ph, theta0 = _rotated_hermitian_phases(C, tol)
        return PhaseSpectrum(ph, float(theta0), len(ph), cls)
    ph = None
    if kind == SECTORIAL:
        ph = _sectorial_phases(C, tol)
    elif kind == QUASI_SECTORIAL:
        U, s, _ = linalg.svd(C)
        Ur = U[:, :cls.numeric_rank]
        ph = _sectorial_phases(Ur.conj().T @ C @ Ur, tol)
    if ph is None:
        ph = regularized_phases(C, tol)
    ph = np.sort(ph)[::-1]
    ph, center = _principal(ph)
    return PhaseSpectrum(ph, float(center), len(ph), cls)


def pinv_phases(spec):
    """Phases of the Moore-Penrose inverse: ``phi_i(C^+) = -phi_{r-i+1}(C)``."""
    if spec.rank == 0:
        return spec
    return PhaseSpectrum(-spec.phases[::-1], -spec.center, spec.rank,
                         spec.classification)


def numerical_range_boundary(C, k=256):
    """``k`` boundary points of ``W(C)`` by the support-function method."""
    if k < 8:
        raise ValueError("k must be at least 8")
    C = _as_matrix(C)
    th = 2 * np.pi * np.arange(k) / k
    H = hermitian_part(C)
    K = skew_part(C)
    M = np.cos(th)[:, None, None] * H + np.sin(th)[:, None, None] * K
    _, V = np.linalg.eigh(M)
    v = V[:, :, -1]
    return np.einsum("ki,ij,kj->k", v.conj(), C, v)


@dataclass(frozen=True)
class ProductAngleReport:
    eigenvalues: np.ndarray = field(compare=False)
    angles: np.ndarray = field(compare=False)
    lower: float
    upper: float
    satisfied: np.ndarray = field(compare=False)
    count_nonzero: int
    rank_product: int

    @property
    def all_satisfied(self):
        return bool(np.all(self.satisfied))


def product_angle_bounds(A, B, tol=DEFAULT_TOL, slack=1e-8):
    """Check ``phi_min(A)+phi_min(B) <= angle(lambda_i(AB)) <= phi_max(A)+phi_max(B)``.

    Eigenvalue arguments are taken on the branch
    ``(gamma(A)+gamma(B)-pi, gamma(A)+gamma(B)+pi]``.
    """
    A = _as_matrix(A)
    B = _as_matrix(B)
    sa, sb = phases(A, tol), phases(B, tol)
    if not sa.classification.is_quasi_sectorial:
        raise ClassificationError("A must be quasi-sectorial")
    AB = A @ B
    rank_ab = numeric_rank(AB, tol)
    if sa.rank == 0 or sb.rank == 0:
        empty = np.array([])
        return ProductAngleReport(empty, empty, -np.inf, np.inf,
                                  np.array([], bool), 0, rank_ab)
    lam = linalg.eigvals(AB)
    size = np.linalg.norm(A, 2) * np.linalg.norm(B, 2)
    lam = lam[np.abs(lam) > 1e-7 * size]
    anchor = sa.center + sb.center
    ang = anchor + wrap_angle(np.angle(lam) - anchor)
    lower = sa.phi_min + sb.phi_min
    upper = sa.phi_max + sb.phi_max
    ok = (ang >= lower - slack) & (ang <= upper + slack)
    return ProductAngleReport(lam, ang, lower, upper, ok, len(lam), rank_ab)


def small_phase_matrix(A, alpha, beta, tol=DEFAULT_TOL):
    """Whether ``det(I + AB) != 0`` for every semi-sectorial ``B`` with phases in ``[alpha, beta]``.

    True iff ``[alpha, beta]`` fits, modulo ``2 pi``, inside
    ``(-pi - phi_min(A), pi - phi_max(A))``.
    """
    if beta < alpha:
        raise ValueError("beta must not be smaller than alpha")
    spec = phases(A, tol)
    if not spec.classification.is_quasi_sectorial:
        raise ClassificationError("A must be quasi-sectorial")
    if spec.rank == 0:
        return True
    lo = -np.pi - spec.phi_min
    hi = np.pi - spec.phi_max
    k = np.floor((lo - alpha) / (2 * np.pi)) + 1
    a, b = alpha + 2 * np.pi * k, beta + 2 * np.pi * k
    return bool(a > lo and b < hi)


def matrix_to_json(C):
    """Row-major nested list of ``[re, im]`` pairs."""
    C = np.asarray(C, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in C]


def matrix_from_json(rows):
    """Inverse of :func:`matrix_to_json`; plain real entries are accepted too."""
    out = []
    for row in rows:
        vals = []
        for z in row:
            if isinstance(z, (list, tuple)):
                if len(z) != 2:
                    raise ValueError("complex entries must be [re, im] pairs")
                vals.append(complex(float(z[0]), float(z[1])))
            else:
                vals.append(complex(float(z)))
        out.append(vals)
    return _as_matrix(np.array(out, dtype=complex))
