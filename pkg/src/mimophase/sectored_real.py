"""Sector containment certificates from linear matrix inequalities.

For a state-space model ``(A, B, C, D)`` the frequency-domain condition

    e^{-j eta} G(jw) + e^{j eta} G(jw)^* >= eps G(jw)^* G(jw)   for all w >= 0

is equivalent to the existence of Hermitian ``X`` and ``Y >= 0`` with

    [A B; I 0]^T [[0, X + jY], [X - jY, 0]] [A B; I 0] + M(eta, eps) <= 0,

a generalized KYP inequality for the positive imaginary axis.  Two such
inequalities, one per sector edge, certify that every phase of ``G`` lies in
``(alpha, beta)``.  The strict (stable, quasi-sectorial) variant keeps a
positive ``eps`` per edge; the nonstrict variant with ``eps = 0`` covers
semi-stable semi-sectorial systems.

Complex Hermitian inequalities are embedded into real symmetric ones and
handed to a conic solver through a small affine-LMI contract, so the solver
backend can be swapped without touching the assembly code.  The strict
variant maximizes ``eps`` up to a small cap: an active cap leaves the optimum
in the interior of the remaining inequality, which keeps interior-point
iterates accurate, while an uncapped maximum sits on a degenerate face.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import clarabel
import numpy as np
import scipy.linalg as sla
from scipy import sparse

from .exceptions import NotApplicableError, SolverError
from .lti import StateSpace, evaluate_many, is_minimal, to_state_space
from .phase_response import SectorBound, phi_infty, sweep

__all__ = [
    "QUASI", "SEMI", "LmiProblem", "AffineLmi", "RealSdp", "LmiCertificate",
    "assemble_kyp_lmi", "realify", "realify_matrix",
    "solve_sdp", "check_sector", "check_edge", "phi_infty_lmi",
    "certificate_to_json",
]

QUASI = "quasi"
SEMI = "semi"
QUASI_TOL = 1e-7
# an axis pole pins the semi margin at exactly 0, where the interior-point
# solution is only accurate to about 1e-8; the tight threshold fails safe
SEMI_TOL = -1e-9
EPS_CAP = 1e-2
EPS_FLOOR = -10.0
CERT_TOL = 1e-6
BRACKET = 0.2
_STATUS = {"Solved": "optimal", "AlmostSolved": "optimal_inaccurate",
           "PrimalInfeasible": "infeasible", "AlmostPrimalInfeasible": "infeasible_inaccurate"}


def _check_variant(variant):
    if variant not in (QUASI, SEMI):
        raise ValueError(f"variant must be {QUASI!r} or {SEMI!r}, got {variant!r}")


def _sym_basis(n):
    """Real symmetric basis ``E_ii`` and ``E_ij + E_ji`` (``i < j``)."""
    out = []
    for i in range(n):
        for j in range(i, n):
            E = np.zeros((n, n))
            E[i, j] = E[j, i] = 1.0
            out.append(E)
    return out


def _skew_basis(n):
    """Real skew-symmetric basis ``E_ij - E_ji`` (``i < j``)."""
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n))
            E[i, j], E[j, i] = 1.0, -1.0
            out.append(E)
    return out


def _hermitian_basis(n):
    """Real coordinates of an ``n x n`` Hermitian matrix: ``S`` and ``j K``."""
    return [E.astype(complex) for E in _sym_basis(n)] + [1j * E for E in _skew_basis(n)]


@dataclass(frozen=True)
class LmiProblem:
    """Single-edge KYP inequality ``Y >= 0``, ``KYP(X, Y) + M(eta, eps) <= 0``.

    Attributes
    ----------
    variant : str
        ``"quasi"`` (strict, ``eps`` enters ``M`` linearly) or ``"semi"``.
    eta : float
        Rotation angle of the edge, radians.
    A, B, C, D : ndarray
        Realization the inequality is written for.
    eps : float or None
        Fixed value of ``eps``; ``None`` keeps it a decision variable.  Always
        0 in the semi variant.
    """

    variant: str
    eta: float
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    eps: float | None = None

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.D.shape[0]

    @property
    def dim(self):
        return self.n + self.m

    @property
    def eps_is_variable(self):
        return self.variant == QUASI and self.eps is None

    @property
    def n_vars(self):
        """Real decision variables: ``X`` and ``Y`` (``n^2`` each) plus ``eps``."""
        return 2 * self.n ** 2 + int(self.eps_is_variable)

    def kyp(self, X, Y):
        """``[A B; I 0]^T [[0, X + jY], [X - jY, 0]] [A B; I 0]``."""
        # expanded product: [[A^T P + P^* A, P^* B], [B^T P, 0]] with P = X + jY
        P = np.asarray(X, dtype=complex) + 1j * np.asarray(Y, dtype=complex)
        Ph = P.conj().T
        return np.block([[self.A.T @ P + Ph @ self.A, Ph @ self.B],
                         [self.B.T @ P, np.zeros((self.m, self.m))]])

    def multiplier(self, eps=None):
        """Frequency-weighting block ``M(eta, eps)``."""
        A, B, C, D = self.A, self.B, self.C, self.D
        e = np.exp(1j * self.eta)
        top_right = -e * C.T
        bottom_right = -np.conj(e) * D - e * D.T
        if self.variant == SEMI:
            return np.block([[np.zeros((self.n, self.n)), top_right],
                             [top_right.conj().T, bottom_right]])
        eps = self.eps if eps is None else eps
        if eps is None:
            raise ValueError("eps is a decision variable; pass a value")
        return np.block([[eps * C.T @ C, top_right + eps * C.T @ D],
                         [-np.conj(e) * C + eps * D.T @ C, bottom_right + eps * D.T @ D]])

    def constraint(self, X, Y, eps=None):
        """Left-hand side ``KYP(X, Y) + M(eta, eps)``, to be ``<= 0``."""
        return self.kyp(X, Y) + self.multiplier(eps)

    def residuals(self, X, Y, eps=None):
        """``(lambda_min(Y), lambda_max(KYP + M))``."""
        Y = np.asarray(Y, dtype=complex)
        lhs = self.constraint(X, Y, eps)
        lo = float(np.linalg.eigvalsh(0.5 * (Y + Y.conj().T))[0]) if self.n else 0.0
        hi = float(np.linalg.eigvalsh(0.5 * (lhs + lhs.conj().T))[-1])
        return lo, hi

    def unpack(self, v):
        """Map the real variable vector to ``(X, Y, eps)``."""
        v = np.asarray(v, dtype=float)
        basis = _hermitian_basis(self.n)
        k = len(basis)
        X = sum((c * E for c, E in zip(v[:k], basis)), np.zeros((self.n, self.n), complex))
        Y = sum((c * E for c, E in zip(v[k:2 * k], basis)), np.zeros((self.n, self.n), complex))
        eps = float(v[2 * k]) if self.eps_is_variable else (self.eps or 0.0)
        return X, Y, eps


def assemble_kyp_lmi(ss, eta, variant=QUASI, eps=None):
    """Build the single-edge KYP inequality for ``ss``.

    Parameters
    ----------
    ss : StateSpace or TransferMatrix
        System; transfer matrices are realized first.
    eta : float
        Edge rotation, ``alpha + pi/2`` or ``beta - pi/2``.
    variant : {"quasi", "semi"}
    eps : float, optional
        Fixed ``eps`` for the quasi variant; left as a variable when omitted.

    Returns
    -------
    LmiProblem
    """
    _check_variant(variant)
    ss = to_state_space(ss)
    if variant == SEMI:
        eps = 0.0
    return LmiProblem(variant, float(eta), ss.A, ss.B, ss.C, ss.D,
                      None if eps is None else float(eps))


def realify_matrix(M):
    """``M_R + j M_I`` to ``[[M_R, -M_I], [M_I, M_R]]``."""
    M = np.asarray(M, dtype=complex)
    return np.block([[M.real, -M.imag], [M.imag, M.real]])


@dataclass(frozen=True)
class AffineLmi:
    """Real symmetric inequality ``F0 + sum_k v_k F[k] <= 0``."""

    F0: np.ndarray
    F: np.ndarray

    def evaluate(self, v):
        return self.F0 + np.tensordot(v, self.F, axes=1)


@dataclass(frozen=True)
class RealSdp:
    """Maximize ``c @ v`` subject to affine LMIs and box bounds on ``v``.

    The last variable of a ``semi`` problem is the margin ``t`` that shifts
    the main inequality by ``t I``.
    """

    constraints: tuple
    objective: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    problem: LmiProblem = field(repr=False, compare=False)

    @property
    def n_vars(self):
        return self.objective.size


def realify(problem):
    """Real symmetric SDP equivalent to ``problem``.

    Each Hermitian coordinate of ``X`` and ``Y`` becomes a real variable, and
    each complex inequality doubles in size through :func:`realify_matrix`.
    The objective maximizes ``eps`` (quasi variant) or a uniform shift ``t``
    of the main inequality (semi variant), bounded so the optimum is finite.
    """
    n, d = problem.n, problem.dim
    basis = _hermitian_basis(n)
    zero = problem.kyp(np.zeros((n, n)), np.zeros((n, n)))
    main = [realify_matrix(problem.kyp(E, np.zeros((n, n))) - zero) for E in basis]
    main += [realify_matrix(problem.kyp(np.zeros((n, n)), E) - zero) for E in basis]
    posy = [np.zeros((2 * n, 2 * n))] * len(basis) + [realify_matrix(-E) for E in basis]
    lower = [-np.inf] * (2 * len(basis))
    upper = [np.inf] * (2 * len(basis))
    if problem.eps_is_variable:
        C, D = problem.C, problem.D
        CD = np.hstack([C, D])
        main.append(realify_matrix(CD.T @ CD))
        posy.append(np.zeros((2 * n, 2 * n)))
        lower.append(EPS_FLOOR)
        upper.append(EPS_CAP)
        F0 = realify_matrix(problem.multiplier(0.0))
    else:
        F0 = realify_matrix(problem.multiplier())
    objective = np.zeros(len(main) + (problem.variant == SEMI))
    if problem.variant == SEMI:
        main.append(np.eye(2 * d))
        posy.append(np.zeros((2 * n, 2 * n)))
        lower.append(-np.inf)
        upper.append(EPS_CAP)
        objective[-1] = 1.0
    elif problem.eps_is_variable:
        objective[-1] = 1.0
    cons = [AffineLmi(F0, np.array(main).reshape(-1, 2 * d, 2 * d))]
    if n:
        cons.append(AffineLmi(np.zeros((2 * n, 2 * n)),
                              np.array(posy).reshape(-1, 2 * n, 2 * n)))
    return RealSdp(tuple(cons), objective, np.array(lower), np.array(upper), problem)


def _svec(S):
    """Upper triangle, column-major, off-diagonal entries scaled by ``sqrt 2``."""
    d = S.shape[-1]
    rows, cols = np.triu_indices(d)
    order = np.lexsort((rows, cols))
    rows, cols = rows[order], cols[order]
    w = np.where(rows == cols, 1.0, math.sqrt(2.0))
    return S[..., rows, cols] * w


def solve_sdp(sdp, **settings):
    """Solve ``sdp`` with the Clarabel interior-point solver.

    Each LMI ``F0 + sum_k v_k F_k <= 0`` becomes the cone constraint
    ``svec(-F0) - sum_k v_k svec(F_k)`` in the PSD triangle cone, and finite
    bounds become nonnegative slacks.

    Parameters
    ----------
    sdp : RealSdp
    **settings
        Overrides of Clarabel's default settings.

    Returns
    -------
    status : str
        ``"optimal"``, ``"optimal_inaccurate"``, ``"infeasible"`` or
        ``"infeasible_inaccurate"``.
    v : ndarray or None
        Maximizer, ``None`` when the problem is infeasible.
    value : float
        Optimal objective, ``-inf`` when infeasible.

    Raises
    ------
    SolverError
        Any other solver outcome.
    """
    k = sdp.n_vars
    blocks, rhs, cones = [], [], []
    lo = np.flatnonzero(np.isfinite(sdp.lower))
    hi = np.flatnonzero(np.isfinite(sdp.upper))
    if lo.size + hi.size:
        B = np.zeros((lo.size + hi.size, k))
        B[np.arange(lo.size), lo] = -1.0
        B[lo.size + np.arange(hi.size), hi] = 1.0
        blocks.append(B)
        rhs.append(np.concatenate([-sdp.lower[lo], sdp.upper[hi]]))
        cones.append(clarabel.NonnegativeConeT(B.shape[0]))
    for c in sdp.constraints:
        blocks.append(_svec(c.F).T)
        rhs.append(-_svec(c.F0))
        cones.append(clarabel.PSDTriangleConeT(c.F0.shape[0]))
    A = sparse.csc_matrix(np.vstack(blocks))
    opts = clarabel.DefaultSettings()
    opts.verbose = False
    for name, value in settings.items():
        setattr(opts, name, value)
    try:
        solver = clarabel.DefaultSolver(sparse.csc_matrix((k, k)), -sdp.objective, A,
                                        np.concatenate(rhs), cones, opts)
        sol = solver.solve()
    except (KeyboardInterrupt, SystemExit):
        raise
    except BaseException as exc:
        # internal solver panics surface as BaseException subclasses
        raise SolverError(f"solver aborted: {type(exc).__name__}: {exc}", "aborted") from exc
    status = _STATUS.get(str(sol.status).split(".")[-1])
    if status is None:
        raise SolverError(f"indeterminate solver status {sol.status}", str(sol.status))
    if status.startswith("infeasible"):
        return status, None, -np.inf
    v = np.asarray(sol.x, dtype=float)
    return status, v, float(sdp.objective @ v)


@dataclass(frozen=True)
class LmiCertificate:
    """Outcome of a two-edge sector test.

    Attributes
    ----------
    alpha, beta : float
        Tested sector.
    variant : str
    feasible : bool
        Both edges certified.
    edges : tuple of dict
        Per edge: ``eta``, ``status``, ``margin`` (optimal ``eps`` or ``t``),
        ``X``, ``Y``, ``eps`` in the original coordinates and residuals
        ``min_eig_Y`` and ``max_eig_lmi`` measured on the normalized problem.
    advisory : bool
        True when the realization was not minimal.
    """

    alpha: float
    beta: float
    variant: str
    feasible: bool
    edges: tuple
    advisory: bool = False

    @property
    def margins(self):
        return tuple(e["margin"] for e in self.edges)

    @property
    def X(self):
        return tuple(e["X"] for e in self.edges)

    @property
    def Y(self):
        return tuple(e["Y"] for e in self.edges)

    @property
    def eps(self):
        return tuple(e["eps"] for e in self.edges)

    @property
    def residuals(self):
        return tuple((e["min_eig_Y"], e["max_eig_lmi"]) for e in self.edges)


class _Normalized:
    """Balanced, gain-normalized realization with maps back to the original.

    With ``A_b = T^{-1} A T`` and ``C_b = C T / g`` a solution ``(X_b, Y_b,
    eps_b)`` corresponds to ``X = g T^{-T} X_b T^{-1}`` and ``eps = eps_b / g``.
    """

    def __init__(self, ss):
        ss = to_state_space(ss)
        self.original = ss
        n = ss.A.shape[0]
        if n:
            _, (scale, _) = sla.matrix_balance(ss.A, separate=True, permute=False)
            T = np.diag(scale)
            Ti = np.diag(1.0 / scale)
        else:
            T = Ti = np.eye(0)
        self.T_inv = Ti
        self.g = _gain_scale(ss)
        self.A = Ti @ ss.A @ T
        self.B = Ti @ ss.B
        self.C = ss.C @ T / self.g
        self.D = ss.D / self.g

    def problem(self, eta, variant):
        return assemble_kyp_lmi(StateSpace(self.A, self.B, self.C, self.D), eta, variant)

    def to_original(self, X, Y, eps):
        Ti = self.T_inv
        return (self.g * Ti.T @ X @ Ti, self.g * Ti.T @ Y @ Ti, eps / self.g)


def _gain_scale(ss):
    """Peak largest singular value on a log grid, ignoring non-finite samples."""
    w = np.concatenate([[0.0], np.logspace(-3, 3, 121)])
    with np.errstate(all="ignore"):
        try:
            Gs = evaluate_many(ss, np.append(1j * w, np.inf), check=False)
        except np.linalg.LinAlgError:
            return 1.0
    s = np.linalg.norm(np.nan_to_num(Gs, nan=0.0, posinf=0.0, neginf=0.0), 2, axis=(1, 2))
    s = s[np.isfinite(s) & (s < 1e12)]
    g = float(s.max()) if s.size else 0.0
    return g if g > 1e-12 else 1.0


def _edge(norm, eta, variant):
    """Solve one edge problem; return ``(feasible, info)``."""
    prob = norm.problem(eta, variant)
    status, v, value = solve_sdp(realify(prob))
    info = dict(eta=float(eta), status=status, margin=value)
    if v is None:
        info.update(X=None, Y=None, eps=None, min_eig_Y=None, max_eig_lmi=None)
        return False, info
    X, Y, eps = prob.unpack(v[:prob.n_vars])
    lo, hi = prob.residuals(X, Y, eps)
    if variant == QUASI:
        solved = value > QUASI_TOL
    else:
        solved = value >= SEMI_TOL
    verified = lo >= -CERT_TOL and hi <= CERT_TOL
    Xo, Yo, eo = norm.to_original(X, Y, eps)
    info.update(X=Xo, Y=Yo, eps=eo, min_eig_Y=lo, max_eig_lmi=hi, verified=verified)
    return bool(solved and verified), info


def check_edge(ss, eta, variant=QUASI):
    """Feasibility of the single-edge inequality at ``eta`` for ``ss``."""
    _check_variant(variant)
    ok, info = _edge(_Normalized(ss), eta, variant)
    return ok, info


def check_sector(ss, alpha, beta, variant=QUASI):
    """Certify that every phase of ``ss`` lies in the sector ``(alpha, beta)``.

    Parameters
    ----------
    ss : StateSpace or TransferMatrix
        Stable quasi-sectorial system (``"quasi"``) or semi-stable
        semi-sectorial system (``"semi"``, closed sector).
    alpha, beta : float
        Sector edges with ``0 < beta - alpha <= pi``.
    variant : {"quasi", "semi"}

    Returns
    -------
    LmiCertificate

    Raises
    ------
    ValueError
        Invalid sector width.
    SolverError
        The solver failed or returned an indeterminate status.
    """
    _check_variant(variant)
    if not 0 < beta - alpha <= math.pi + 1e-12:
        raise ValueError("sector width must satisfy 0 < beta - alpha <= pi")
    ss = to_state_space(ss)
    advisory = not is_minimal(ss)
    if advisory:
        warnings.warn("check_sector: realization is not minimal; certificate is advisory",
                      UserWarning, stacklevel=2)
    norm = _Normalized(ss)
    ok1, e1 = _edge(norm, alpha + math.pi / 2, variant)
    ok2, e2 = _edge(norm, beta - math.pi / 2, variant)
    return LmiCertificate(float(alpha), float(beta), variant, ok1 and ok2, (e1, e2), advisory)


def _bisect(feasible, good, bad, tol):
    """Shrink ``[good, bad]`` (either order) to width ``tol``; returns the feasible end."""
    while abs(bad - good) > tol:
        mid = 0.5 * (good + bad)
        if feasible(mid):
            good = mid
        else:
            bad = mid
    return good


def phi_infty_lmi(ss, tol=1e-4, variant=QUASI, sector=None, n_axis=1200):
    """Phase sector ``Phi_inf`` by bisection on the edge angle ``eta``.

    The set of ``eta`` for which the single-edge inequality holds is the
    interval ``(phi_max - pi/2, phi_min + pi/2)``.  Both ends are bracketed
    from a sweep estimate and bisected to ``tol``.

    Parameters
    ----------
    ss : StateSpace or TransferMatrix
    tol : float
        Bisection tolerance, radians.
    variant : {"quasi", "semi"}
    sector : SectorBound, optional
        Sweep estimate used for the brackets; computed when omitted.
    n_axis : int
        Axis resolution of that sweep.

    Returns
    -------
    SectorBound

    Raises
    ------
    NotApplicableError
        Spread of at least ``pi``, or no feasible ``eta`` found.
    """
    _check_variant(variant)
    ss = to_state_space(ss)
    if not is_minimal(ss):
        warnings.warn("phi_infty_lmi: realization is not minimal; result is advisory",
                      UserWarning, stacklevel=2)
    if sector is None:
        sector = phi_infty(sweep(ss, n_axis=n_axis))
    if sector.spread >= math.pi:
        raise NotApplicableError(
            f"phase spread {sector.spread:.6f} rad is not below pi; no single edge "
            "inequality can hold")
    norm = _Normalized(ss)

    def feasible(eta):
        # an undecided solve is treated as uncertified, which only widens the sector
        try:
            return _edge(norm, eta, variant)[0]
        except SolverError:
            return False

    lo_est = sector.hi - math.pi / 2
    hi_est = sector.lo + math.pi / 2
    mid = 0.5 * (lo_est + hi_est)
    if not feasible(mid):
        raise NotApplicableError("no feasible edge angle near the sweep estimate")
    ends = []
    for est, step in ((lo_est, -BRACKET), (hi_est, BRACKET)):
        good = est - step
        if (good - mid) * step <= 0 or not feasible(good):
            good = mid
        bad = est + step
        for _ in range(8):
            if not feasible(bad):
                break
            good, bad = bad, bad + step
        else:
            raise NotApplicableError("feasible edge interval does not close")
        ends.append(_bisect(feasible, good, bad, tol))
    return SectorBound(ends[1] - math.pi / 2, ends[0] + math.pi / 2)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return {"real": x.real.tolist(), "imag": x.imag.tolist()}
        return x.tolist()
    if isinstance(x, (np.floating, float)):
        return None if not np.isfinite(x) else float(x)
    return x


def certificate_to_json(cert):
    """Serialize a certificate with realified variables and residuals."""
    edges = []
    for e in cert.edges:
        item = {k: _jsonable(v) for k, v in e.items() if k not in ("X", "Y")}
        for k in ("X", "Y"):
            item[k] = None if e[k] is None else realify_matrix(e[k]).tolist()
        edges.append(item)
    return json.dumps({"alpha": cert.alpha, "beta": cert.beta, "variant": cert.variant,
                       "feasible": cert.feasible, "advisory": cert.advisory,
                       "edges": edges}, sort_keys=True, indent=2)
