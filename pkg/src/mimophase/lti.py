"""Real-rational proper square MIMO models.

Two immutable representations are supported: :class:`StateSpace` and
:class:`TransferMatrix` (entrywise numerators over one common denominator,
coefficients in ascending powers of ``s``).  Everything else in the package
accepts either through :func:`evaluate_many` and :func:`to_state_space`.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import linalg

from .exceptions import ModelParseError, SingularityError

__all__ = [
    "StateSpace", "TransferMatrix", "SystemModel", "PoleReport", "ZeroReport",
    "evaluate", "evaluate_many", "tf_to_ss", "ss_to_tf", "to_state_space",
    "minimal_realization", "is_minimal", "poles", "transmission_zeros",
    "residue", "series", "negate", "static_gain", "axis_frequencies",
    "model_from_json", "model_to_json", "model_from_dict", "model_to_dict",
    "POLE_DISTANCE",
]

POLE_DISTANCE = 1e-12
# imaginary-axis snapping tolerance for poles and zeros
AXIS_SNAP = 1e-6


def _real_matrix(x, shape=None, name="matrix"):
    a = np.asarray(x, dtype=float)
    if shape is not None:
        a = a.reshape(shape)
    if a.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True)
class StateSpace:
    """``G(s) = C (sI - A)^{-1} B + D`` with ``m`` inputs and ``m`` outputs."""

    A: np.ndarray = field(compare=False)
    B: np.ndarray = field(compare=False)
    C: np.ndarray = field(compare=False)
    D: np.ndarray = field(compare=False)
    label: str = ""

    def __post_init__(self):
        D = _real_matrix(self.D, name="D")
        m = D.shape[0]
        if D.shape != (m, m):
            raise ValueError(f"D must be square, got {D.shape}")
        A = np.asarray(self.A, dtype=float)
        n = 0 if A.size == 0 else A.shape[0]
        A = _real_matrix(A, (n, n), "A")
        B = _real_matrix(self.B, (n, m), "B")
        C = _real_matrix(self.C, (m, n), "C")
        for name, val in zip("ABCD", (A, B, C, D)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def n_states(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.D.shape[0]


@dataclass(frozen=True)
class TransferMatrix:
    """``G(s) = N(s) / d(s)`` with ``num[i, j, k]`` the ``s**k`` coefficient of ``N_ij``."""

    num: np.ndarray = field(compare=False)
    den: np.ndarray = field(compare=False)
    label: str = ""

    def __post_init__(self):
        den = np.trim_zeros(np.asarray(self.den, dtype=float).ravel(), "b")
        if den.size == 0:
            raise ValueError("denominator is identically zero")
        num = np.asarray(self.num, dtype=float)
        if num.ndim == 2:
            num = num[:, :, None]
        if num.ndim != 3 or num.shape[0] != num.shape[1]:
            raise ValueError("num must be an m x m array of coefficient lists")
        if not (np.all(np.isfinite(num)) and np.all(np.isfinite(den))):
            raise ValueError("coefficients must be finite")
        d = den.size - 1
        extra = num[:, :, d + 1:]
        if extra.size and np.any(extra != 0):
            raise ValueError("transfer matrix is improper (numerator degree exceeds denominator)")
        out = np.zeros(num.shape[:2] + (d + 1,))
        k = min(num.shape[2], d + 1)
        out[:, :, :k] = num[:, :, :k]
        out.setflags(write=False)
        den.setflags(write=False)
        object.__setattr__(self, "num", out)
        object.__setattr__(self, "den", den)

    @property
    def m(self):
        return self.num.shape[0]

    @property
    def degree(self):
        return self.den.size - 1


SystemModel = Union[StateSpace, TransferMatrix]


# ---------------------------------------------------------------------------
# evaluation


def _model_poles(model):
    if isinstance(model, StateSpace):
        return np.linalg.eigvals(model.A) if model.n_states else np.array([])
    if model.degree == 0:
        return np.array([])
    return P.polyroots(model.den)


def evaluate_many(model, s, check=True):
    """``G(s_k)`` for every entry of ``s``; returns shape ``(N, m, m)``.

    ``s = inf`` evaluates the direct feedthrough.

    Raises
    ------
    SingularityError
        A point lies within ``1e-12`` of a pole.
    """
    if callable(getattr(model, "evaluate_many", None)):
        return model.evaluate_many(s)
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    inf = np.isinf(s)
    fin = ~inf
    m = model.m
    out = np.empty((s.size, m, m), dtype=complex)
    if check and fin.any():
        p = _model_poles(model)
        if p.size:
            dist = np.min(np.abs(s[fin][:, None] - p[None, :]), axis=1)
            bad = np.argmin(dist)
            if dist[bad] < POLE_DISTANCE:
                raise SingularityError(
                    f"evaluation point {s[fin][bad]} is {dist[bad]:.3g} from a pole",
                    distance=float(dist[bad]))
    if isinstance(model, StateSpace):
        out[inf] = model.D
        if fin.any():
            n = model.n_states
            if n == 0:
                out[fin] = model.D
            else:
                sf = s[fin]
                M = sf[:, None, None] * np.eye(n) - model.A
                X = np.linalg.solve(M, np.broadcast_to(model.B, (sf.size, n, m)))
                out[fin] = model.C @ X + model.D
        return out
    d = model.degree
    out[inf] = model.num[:, :, d] / model.den[d]
    if fin.any():
        sf = s[fin]
        numv = P.polyval(sf, np.moveaxis(model.num, 2, 0))  # (m, m, N)
        denv = P.polyval(sf, model.den)
        out[fin] = np.moveaxis(numv / denv, 2, 0)
    return out


def evaluate(model, s):
    """``G(s)`` as an ``(m, m)`` complex array."""
    return evaluate_many(model, [s])[0]


# ---------------------------------------------------------------------------
# realizations


def tf_to_ss(tf):
    """Block controllable companion realization with ``m * deg(den)`` states.

    Examples
    --------
    >>> ss = tf_to_ss(TransferMatrix([[[1.0]]], [1.0, 1.0]))
    >>> ss.A, ss.B, ss.C, ss.D
    (array([[-1.]]), array([[1.]]), array([[1.]]), array([[0.]]))
    """
    m, d = tf.m, tf.degree
    lead = tf.den[d]
    D = tf.num[:, :, d] / lead
    if d == 0:
        return StateSpace(np.zeros((0, 0)), np.zeros((0, m)), np.zeros((m, 0)), D, tf.label)
    a = tf.den / lead
    R = (tf.num[:, :, :d] - D[:, :, None] * tf.den[None, None, :d]) / lead
    n = m * d
    A = np.zeros((n, n))
    A[: n - m, m:] = np.eye(n - m)
    for k in range(d):
        A[n - m:, k * m:(k + 1) * m] = -a[k] * np.eye(m)
    B = np.zeros((n, m))
    B[n - m:] = np.eye(m)
    C = np.concatenate([R[:, :, k] for k in range(d)], axis=1)
    return StateSpace(A, B, C, D, tf.label)


def to_state_space(model):
    return model if isinstance(model, StateSpace) else tf_to_ss(model)


def ss_to_tf(ss):
    """Transfer form with the characteristic polynomial of ``A`` as denominator.

    Numerators are recovered by interpolation on a circle enclosing the
    spectrum of ``A`` (a discrete Fourier transform of ``G(s) det(sI - A)``).
    """
    n, m = ss.n_states, ss.m
    if n == 0:
        return TransferMatrix(ss.D[:, :, None].copy(), [1.0], ss.label)
    den = np.poly(ss.A)[::-1].real
    rad = 1.5 * max(1.0, np.max(np.abs(np.linalg.eigvals(ss.A))))
    N = n + 1
    pts = rad * np.exp(2j * np.pi * (np.arange(N) + 0.5) / N)
    vals = evaluate_many(ss, pts) * P.polyval(pts, den)[:, None, None]
    # c_k = (1/N) sum_l v_l (pts_l)^{-k}
    powers = pts[:, None] ** (-np.arange(N))[None, :]
    coef = np.einsum("lij,lk->ijk", vals, powers) / N
    return TransferMatrix(coef.real, den, ss.label)


def _orth(M, tol):
    if M.size == 0:
        return np.zeros((M.shape[0], 0))
    U, s, _ = linalg.svd(M, full_matrices=False)
    return U[:, s > tol]


def _reachable_basis(A, B, tol):
    n = A.shape[0]
    basis = _orth(B, tol)
    new = basis
    while basis.shape[1] < n and new.shape[1]:
        W = A @ new
        for _ in range(2):
            W = W - basis @ (basis.T @ W)
        new = _orth(W, tol)
        basis = np.hstack([basis, new])
    return basis


def minimal_realization(model, tol=1e-9):
    """Remove uncontrollable and unobservable modes by orthogonal projection.

    Builds an orthonormal basis of the reachable subspace (block Krylov with
    re-orthogonalization), restricts to it, then repeats on the dual system.
    ``tol`` is relative to ``max(1, |A|, |B|, |C|)``.
    """
    ss = to_state_space(model)
    if ss.n_states == 0:
        return ss
    scale = max(1.0, np.linalg.norm(ss.A, 2), np.linalg.norm(ss.B, 2), np.linalg.norm(ss.C, 2))
    V = _reachable_basis(ss.A, ss.B, tol * scale)
    A, B, C = V.T @ ss.A @ V, V.T @ ss.B, ss.C @ V
    W = _reachable_basis(A.T, C.T, tol * scale)
    return StateSpace(W.T @ A @ W, W.T @ B, C @ W, ss.D, ss.label)


def is_minimal(model, tol=1e-9):
    """Whether the state-space form has full controllability and observability rank."""
    ss = to_state_space(model)
    return minimal_realization(ss, tol).n_states == ss.n_states


# ---------------------------------------------------------------------------
# poles, zeros, residues


@dataclass(frozen=True)
class PoleReport:
    all: np.ndarray = field(compare=False)
    on_axis: np.ndarray = field(compare=False)
    semi_stable: bool
    stable: bool


def poles(model, tol=1e-7, minimal=None):
    """Poles, imaginary-axis poles and semi-stability.

    State-space input uses the eigenvalues of ``A`` as given; transfer input is
    realized and reduced to a minimal realization first (``minimal``
    overrides either default).
    """
    if minimal is None:
        minimal = not isinstance(model, StateSpace)
    ss = minimal_realization(model) if minimal else to_state_space(model)
    p = np.linalg.eigvals(ss.A) if ss.n_states else np.array([], dtype=complex)
    p = np.sort_complex(p.astype(complex))
    axis = np.abs(p.real) <= tol
    on = p[axis].imag * 1j
    return PoleReport(p, on, bool(np.all(p.real <= tol)), bool(np.all(p.real < -tol)))


@dataclass(frozen=True)
class ZeroReport:
    finite: np.ndarray = field(compare=False)
    zero_at_infinity: bool
    normal_rank: int
    normal_rank_deficient: bool


def _normal_rank(model, rng, tol=1e-9):
    pts = (rng.normal(size=4) + 1j * rng.normal(size=4)) * 3
    return max(np.linalg.matrix_rank(G, tol=tol * max(1.0, np.linalg.norm(G, 2)))
               for G in evaluate_many(model, pts))


def _pencil_zeros(ss):
    n, m = ss.n_states, ss.m
    if n == 0:
        return np.array([], dtype=complex)
    M = np.block([[ss.A, ss.B], [ss.C, ss.D]])
    N = np.zeros_like(M)
    N[:n, :n] = np.eye(n)
    w = linalg.eigvals(M, N)
    big = 1e7 * (1.0 + np.linalg.norm(M, 2))
    return w[np.isfinite(w) & (np.abs(w) < big)]


def transmission_zeros(model, tol=1e-9, seed=0):
    """Finite transmission zeros and whether ``s = inf`` is a zero.

    The model is first reduced to a minimal realization (coincident poles and
    zeros, e.g. a zero sitting on an axis pole, cancel in the determinant of
    the transfer form but not in the realization).  Finite zeros are the
    finite generalized eigenvalues of ``([[A, B], [C, D]], diag(I, 0))``;
    ``s = inf`` is a zero when ``rank D`` is below the normal rank.

    If ``G`` has deficient normal rank ``r < m``, the zeros are those of two
    random ``r x r`` compressions that agree within ``1e-6``.
    """
    rng = np.random.default_rng(seed)
    ss = minimal_realization(model)
    m = ss.m
    r = _normal_rank(ss, rng, tol)
    dscale = max(1.0, np.linalg.norm(ss.D, 2)) if ss.D.size else 1.0
    rank_d = np.linalg.matrix_rank(ss.D, tol=1e-9 * dscale) if np.any(ss.D) else 0
    if r == m:
        z = _pencil_zeros(ss)
    else:
        sets = []
        for _ in range(2):
            L = rng.normal(size=(r, m))
            R = rng.normal(size=(m, r))
            sub = minimal_realization(StateSpace(ss.A, ss.B @ R, L @ ss.C, L @ ss.D @ R))
            sets.append(_pencil_zeros(sub))
        z = np.array([w for w in sets[0]
                      if sets[1].size and np.min(np.abs(sets[1] - w)) < 1e-6], dtype=complex)
    z = np.sort_complex(z.astype(complex))
    return ZeroReport(z, bool(rank_d < r), int(r), bool(r < m))


def axis_frequencies(model, include_poles=True, snap=AXIS_SNAP):
    """Non-negative frequencies of imaginary-axis zeros and (optionally) poles.

    Returns ``(zero_freqs, pole_freqs, zero_at_infinity)``.  Values within
    ``snap`` (relative to ``1 + |s|``) of the axis are snapped onto it and
    near-duplicates are merged.
    """
    zr = transmission_zeros(model)
    zf = _axis_points(zr.finite, snap)
    pf = _axis_points(poles(model, minimal=True).all, snap) if include_poles else np.array([])
    return zf, pf, zr.zero_at_infinity


def _axis_points(vals, snap):
    vals = np.asarray(vals, dtype=complex)
    on = vals[np.abs(vals.real) <= snap * (1 + np.abs(vals))]
    w = np.sort(np.abs(on.imag))
    out = []
    for x in w:
        if x <= snap:
            x = 0.0
        if not out or x - out[-1] > snap * (1 + x):
            out.append(x)
    return np.array(out)


def _pole_order_tf(tf, p, rtol=1e-8):
    """Multiplicity of ``p`` as a root of the denominator and the deflated quotient."""
    q = tf.den.astype(complex)
    k = 0
    while q.size > 1:
        size = np.sum(np.abs(q) * np.maximum(1.0, abs(p)) ** np.arange(q.size))
        if abs(P.polyval(p, q)) > rtol * size:
            break
        q, _ = P.polydiv(q, np.array([-p, 1.0]))
        k += 1
    return k, q


def residue(model, omega0, eps=1e-4):
    """Residue ``lim_{s -> j omega0} (s - j omega0) G(s)`` at a simple pole.

    Transfer input uses exact deflation of the denominator.  State-space input
    uses Richardson extrapolation of ``e G(j omega0 + e)`` over
    ``e in {eps, eps/2, eps/4}``.

    Raises
    ------
    SingularityError
        The pole has order greater than one.
    """
    p = 1j * omega0
    if isinstance(model, TransferMatrix):
        k, q = _pole_order_tf(model, p)
        if k == 0:
            return np.zeros((model.m, model.m), dtype=complex)
        num = model.num.astype(complex)
        # (s-p) G = N(s) / (q(s) (s-p)^{k-1}); lower derivatives of N must vanish
        derivs = []
        for j in range(k):
            coeffs = P.polyder(num, j, axis=2) if j else num
            if coeffs.shape[2] == 0:
                v = np.zeros((model.m, model.m), dtype=complex)
            else:
                v = P.polyval(p, np.moveaxis(coeffs, 2, 0)).astype(complex)
            derivs.append(v)
        scale = max(1.0, np.max(np.abs(num)))
        for j in range(k - 1):
            if np.max(np.abs(derivs[j])) > 1e-8 * scale * max(1.0, abs(p)) ** num.shape[2]:
                raise SingularityError(
                    f"pole at {p} has order {k - j} > 1 (estimated by deflation)")
        return derivs[k - 1] / (math.factorial(k - 1) * P.polyval(p, q))

    def f(e):
        return e * evaluate(model, p + e)

    f1, f2, f4 = f(eps), f(eps / 2), f(eps / 4)
    n1, n2, n4 = (np.linalg.norm(x) for x in (f1, f2, f4))
    if n4 > 1.5 * n2 and n2 > 1.5 * n1:
        order = 1 + np.log2(n4 / n2)
        raise SingularityError(f"pole at {p} has estimated order {order:.2f} > 1")
    r1 = 2 * f2 - f1
    r2 = 2 * f4 - f2
    return (4 * r2 - r1) / 3


# ---------------------------------------------------------------------------
# interconnection helpers


def series(G, H):
    """State-space form of the product ``G(s) H(s)`` (``H`` acts first)."""
    g, h = to_state_space(G), to_state_space(H)
    ng, nh = g.n_states, h.n_states
    A = np.block([[h.A, np.zeros((nh, ng))], [g.B @ h.C, g.A]])
    B = np.vstack([h.B, g.B @ h.D])
    C = np.hstack([g.D @ h.C, g.C])
    return StateSpace(A, B, C, g.D @ h.D)


def negate(model):
    if isinstance(model, TransferMatrix):
        return TransferMatrix(-model.num, model.den, model.label)
    return StateSpace(model.A, model.B, -model.C, -model.D, model.label)


def static_gain(D, label=""):
    D = np.asarray(D, dtype=float)
    m = D.shape[0]
    return StateSpace(np.zeros((0, 0)), np.zeros((0, m)), np.zeros((m, 0)), D, label)


# ---------------------------------------------------------------------------
# JSON


def _parse_real_matrix(rows, name):
    try:
        a = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelParseError(f"field '{name}' is not a real matrix: {exc}") from exc
    if a.size == 0:
        return a.reshape(0, 0) if a.ndim < 2 else a
    if a.ndim != 2:
        raise ModelParseError(f"field '{name}' must be a two-dimensional array")
    return a


def model_from_dict(obj):
    """Build a model from the JSON object schema (see :func:`model_from_json`)."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ModelParseError("model must be an object with a 'kind' field")
    kind = obj["kind"]
    label = str(obj.get("label", ""))
    try:
        if kind == "state_space":
            missing = [k for k in "ABCD" if k not in obj]
            if missing:
                raise ModelParseError(f"state_space model missing fields {missing}")
            D = _parse_real_matrix(obj["D"], "D")
            m = D.shape[0]
            A = _parse_real_matrix(obj["A"], "A")
            n = A.shape[0] if A.size else 0
            B = _parse_real_matrix(obj["B"], "B").reshape(n, m)
            C = _parse_real_matrix(obj["C"], "C").reshape(m, n)
            return StateSpace(A.reshape(n, n), B, C, D, label)
        if kind == "transfer_common_den":
            if "num" not in obj or "den" not in obj:
                raise ModelParseError("transfer_common_den model needs 'num' and 'den'")
            num = obj["num"]
            m = len(num)
            if m == 0 or any(len(row) != m for row in num):
                raise ModelParseError("num must be a square array of coefficient lists")
            k = max(len(c) for row in num for c in row)
            arr = np.zeros((m, m, max(k, 1)))
            for i, row in enumerate(num):
                for j, c in enumerate(row):
                    arr[i, j, :len(c)] = np.asarray(c, dtype=float)
            return TransferMatrix(arr, np.asarray(obj["den"], dtype=float), label)
    except ModelParseError:
        raise
    except (TypeError, ValueError) as exc:
        raise ModelParseError(f"invalid {kind} model: {exc}") from exc
    raise ModelParseError(f"unknown model kind {kind!r}")


def model_from_json(text):
    """Parse a model from JSON text.

    Schemas::

        {"kind": "state_space", "A": [[...]], "B": [[...]], "C": [[...]], "D": [[...]]}
        {"kind": "transfer_common_den", "num": [[[c0, c1, ...], ...], ...], "den": [c0, c1, ...]}

    Coefficients are ascending in ``s``.  Syntax errors carry line and column.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"malformed JSON: {exc.msg}", line=exc.lineno,
                              column=exc.colno) from exc
    return model_from_dict(obj)


def model_to_dict(model):
    if isinstance(model, StateSpace):
        d = {"kind": "state_space", "A": model.A.tolist(), "B": model.B.tolist(),
             "C": model.C.tolist(), "D": model.D.tolist()}
    else:
        d = {"kind": "transfer_common_den", "num": model.num.tolist(),
             "den": model.den.tolist()}
    if model.label:
        d["label"] = model.label
    return d


def model_to_json(model):
    return json.dumps(model_to_dict(model), sort_keys=True)


def warn_if_not_minimal(model, context):
    """Emit a ``UserWarning`` when the realization has hidden modes."""
    ss = to_state_space(model)
    if not is_minimal(ss):
        warnings.warn(f"{context}: realization is not minimal; results are advisory",
                      UserWarning, stacklevel=3)
        return False
    return True
