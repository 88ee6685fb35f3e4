"""Time-domain view of phase: Hilbert transform, simulation and complex power.

For a power signal ``u`` driving ``G`` with output ``y`` the real and reactive
powers are

    P = <u, y>,    Q = -<H u, y>,

where ``<., .>`` is the time-averaged inner product and ``H`` the Hilbert
transform.  For ``u(t) = a cos(w0 t) + b sin(w0 t)`` the complex power
``S = P + jQ`` equals ``d^* G(j w0) d`` with ``d = (a - jb)/sqrt 2``, so the
angle of ``S`` is a phase shift that always lies between the extreme matrix
phases of ``G(j w0)``.  Under this sign convention a lagging output gives a
negative angle.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .exceptions import SingularityError
from .lti import evaluate, to_state_space

__all__ = [
    "SampledSignal", "PowerReport", "PhaseShiftReport", "hilbert", "simulate",
    "complex_power", "sinusoid", "sinusoid_phase_shift_check",
    "signal_from_csv", "signal_to_csv", "report_to_json", "DT_FACTOR",
]

DT_FACTOR = 0.1
TRANSIENT_TAUS = 5.0


@dataclass(frozen=True)
class SampledSignal:
    """Uniformly sampled vector signal.

    Attributes
    ----------
    samples : ndarray, shape (N, m)
    dt : float
        Sampling interval in seconds.
    t0 : float
        Time of the first sample.
    """

    samples: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise ValueError("samples must be an (N, m) array")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "samples", x)

    @property
    def n_samples(self):
        return self.samples.shape[0]

    @property
    def m(self):
        return self.samples.shape[1]

    @property
    def t(self):
        return self.t0 + self.dt * np.arange(self.n_samples)

    @property
    def duration(self):
        return self.n_samples * self.dt

    def window(self, start):
        """Samples with ``t >= start``."""
        k = max(0, int(math.ceil((start - self.t0) / self.dt - 1e-9)))
        return SampledSignal(self.samples[k:], self.dt, self.t0 + k * self.dt)


@dataclass(frozen=True)
class PowerReport:
    """Real, reactive and complex power with the angle of ``S``."""

    P: float
    Q: float

    @property
    def S(self):
        return complex(self.P, self.Q)

    @property
    def angle(self):
        return math.atan2(self.Q, self.P)


def hilbert(x):
    """Hilbert transform through the ``-j sgn(omega)`` multiplier.

    The signal is treated as one period of a periodic signal; the DC bin and,
    for even lengths, the Nyquist bin are set to zero.
    """
    N = x.n_samples
    X = np.fft.fft(x.samples, axis=0)
    mult = np.zeros(N, dtype=complex)
    half = (N - 1) // 2
    mult[1:half + 1] = -1j
    mult[N - half:] = 1j
    out = np.fft.ifft(X * mult[:, None], axis=0).real
    return SampledSignal(out, x.dt, x.t0)


def simulate(ss, u, x0=None, hold=None):
    """Response of ``ss`` to ``u`` under a zero-order hold.

    ``(A, B)`` is discretized exactly through the matrix exponential of
    ``[[A, B], [0, 0]] dt``; ``y_k = C x_k + D u_k``.  A warning suggests a
    smaller ``dt`` when ``dt >= 0.1 / |lambda|_max``.

    Parameters
    ----------
    ss : StateSpace or TransferMatrix
    u : SampledSignal
    x0 : array_like, optional
        Initial state, zero by default.
    hold : SampledSignal, optional
        Values held on each interval ``[t_k, t_k + dt)``; ``u`` itself by
        default.  Holding midpoint samples of a smooth input removes the
        half-sample delay of a plain hold.
    """
    ss = to_state_space(ss)
    n, m = ss.A.shape[0], ss.m
    if u.m != m:
        raise ValueError(f"input has {u.m} channels, system has {m}")
    dt = u.dt
    if n:
        lam = np.max(np.abs(np.linalg.eigvals(ss.A)))
        if lam > 0 and dt >= DT_FACTOR / lam:
            warnings.warn(f"dt = {dt:g} does not resolve the fastest mode; "
                          f"use dt < {DT_FACTOR / lam:g}", UserWarning, stacklevel=2)
    uk = u.samples
    if n == 0:
        return SampledSignal(uk @ ss.D.T, dt, u.t0)
    M = np.zeros((n + m, n + m))
    M[:n, :n] = ss.A
    M[:n, n:] = ss.B
    E = sla.expm(M * dt)
    Ad, Bd = E[:n, :n], E[:n, n:]
    xs = np.empty((u.n_samples, n))
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float)
    drive = (uk if hold is None else hold.samples) @ Bd.T
    for k in range(u.n_samples):
        xs[k] = x
        x = Ad @ x + drive[k]
    return SampledSignal(xs @ ss.C.T + uk @ ss.D.T, dt, u.t0)


def complex_power(u, y, discard=0.0):
    """``P = <u, y>`` and ``Q = -<H u, y>`` over the samples after ``discard``.

    The Hilbert transform is applied to the retained window only, so the
    window should span whole periods of the input.
    """
    if u.n_samples != y.n_samples or u.m != y.m:
        raise ValueError("u and y must have equal shapes")
    if discard >= u.duration:
        raise ValueError("discard must be shorter than the signal")
    uw, yw = u.window(u.t0 + discard), y.window(y.t0 + discard)
    P = float(np.mean(np.sum(uw.samples * yw.samples, axis=1)))
    Q = -float(np.mean(np.sum(hilbert(uw).samples * yw.samples, axis=1)))
    return PowerReport(P, Q)


def sinusoid(a, b, omega0, dt, n_samples, t0=0.0):
    """``u(t) = a cos(omega0 t) + b sin(omega0 t)`` sampled on ``n_samples`` points."""
    t = t0 + dt * np.arange(n_samples)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    return SampledSignal(np.outer(np.cos(omega0 * t), a) + np.outer(np.sin(omega0 * t), b),
                         dt, t0)


@dataclass(frozen=True)
class PhaseShiftReport:
    """Simulated complex power against the frequency-response prediction."""

    omega0: float
    a: np.ndarray
    b: np.ndarray
    power: PowerReport
    predicted: complex
    dt: float
    discard: float

    @property
    def angle_power(self):
        return self.power.angle

    @property
    def angle_predicted(self):
        return float(np.angle(self.predicted))

    @property
    def discrepancy(self):
        return abs(float(np.angle(np.exp(1j * (self.angle_power - self.angle_predicted)))))

    def to_dict(self):
        return {"omega0": self.omega0, "a": self.a.tolist(), "b": self.b.tolist(),
                "P": self.power.P, "Q": self.power.Q, "angle_power": self.angle_power,
                "predicted_real": self.predicted.real, "predicted_imag": self.predicted.imag,
                "angle_predicted": self.angle_predicted, "discrepancy": self.discrepancy,
                "dt": self.dt, "discard": self.discard}


def sinusoid_phase_shift_check(ss, omega0, a, b, periods=8, n_window=2 ** 16):
    """Compare the angle of the simulated complex power with ``d^* G(j w0) d``.

    The simulation holds the input at interval midpoints and starts from the
    sinusoidal steady state ``x0 = Re[(j w0 I - A)^{-1} B (a - jb)]``; the
    transient window of five slowest time constants is still discarded.

    Parameters
    ----------
    ss : StateSpace or TransferMatrix
        Stable system.
    omega0 : float
        Input frequency, finite and positive.
    a, b : array_like
        Cosine and sine amplitudes with ``||[a; b]|| = sqrt 2``.
    periods : int
        Whole periods in the averaging window.
    n_window : int
        Samples in the averaging window, a power of two.

    Returns
    -------
    PhaseShiftReport

    Raises
    ------
    SingularityError
        ``j omega0`` is a pole.
    """
    ss = to_state_space(ss)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if not omega0 > 0 or not math.isfinite(omega0):
        raise ValueError("omega0 must be finite and positive")
    if abs(np.hypot(np.linalg.norm(a), np.linalg.norm(b)) - math.sqrt(2)) > 1e-9:
        raise ValueError("the direction must satisfy ||[a; b]|| = sqrt(2)")
    if n_window & (n_window - 1):
        raise ValueError("n_window must be a power of two")
    try:
        G0 = evaluate(ss, 1j * omega0)
    except SingularityError as exc:
        raise SingularityError(f"resonance: j{omega0:g} is a pole", exc.distance) from exc
    d = (a - 1j * b) / math.sqrt(2)
    predicted = complex(d.conj() @ G0 @ d)
    period = 2 * math.pi / omega0
    dt = periods * period / n_window
    lam = np.linalg.eigvals(ss.A) if ss.A.size else np.zeros(0)
    slow = np.min(np.abs(lam.real)) if lam.size else np.inf
    discard = 0.0
    if lam.size and slow > 0:
        discard = math.ceil(TRANSIENT_TAUS / slow / period) * period
    n_discard = int(round(discard / dt))
    u = sinusoid(a, b, omega0, dt, n_discard + n_window)
    mid = sinusoid(a, b, omega0, dt, n_discard + n_window, t0=0.5 * dt)
    x0 = None
    if lam.size:
        n = ss.A.shape[0]
        x0 = np.linalg.solve(1j * omega0 * np.eye(n) - ss.A, ss.B @ (a - 1j * b)).real
    y = simulate(ss, u, x0=x0, hold=mid)
    power = complex_power(u, y, discard=n_discard * dt)
    return PhaseShiftReport(float(omega0), a, b, power, predicted, dt, n_discard * dt)


def signal_from_csv(text):
    """Parse ``t, u1, ..., um`` rows (an optional header row is skipped)."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    try:
        float(rows[0][0])
    except ValueError:
        rows = rows[1:]
    data = np.array(rows, dtype=float)
    t = data[:, 0]
    dt = float(np.mean(np.diff(t)))
    if not np.allclose(np.diff(t), dt, rtol=1e-6, atol=1e-12):
        raise ValueError("samples are not uniformly spaced")
    return SampledSignal(data[:, 1:], dt, float(t[0]))


def signal_to_csv(x):
    """Inverse of :func:`signal_from_csv` with a header row."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"u{i + 1}" for i in range(x.m)])
    for t, row in zip(x.t, x.samples):
        w.writerow([repr(float(t))] + [repr(float(v)) for v in row])
    return buf.getvalue()


def report_to_json(report):
    """JSON form of a :class:`PhaseShiftReport`."""
    return json.dumps(report.to_dict(), sort_keys=True, indent=2)
