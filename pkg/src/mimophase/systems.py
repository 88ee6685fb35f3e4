"""Reference models and random model generators.

The three fixed models are the benchmark systems used throughout the tests
and demos; coefficients are stored in ascending powers of ``s``.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import block_diag

from .lti import StateSpace, TransferMatrix, evaluate_many, series

__all__ = [
    "biproper_2x2", "semi_sectorial_3x3", "semi_stable_3x3", "integrator",
    "first_order_lag", "random_stable", "random_quasi_sectorial",
    "random_semi_stable_pr", "random_loop_pair",
]


def _tf(desc_num, desc_den, label):
    """Build from numerators/denominator given in descending powers."""
    d = len(desc_den) - 1
    m = len(desc_num)
    num = np.zeros((m, m, d + 1))
    for i, row in enumerate(desc_num):
        for j, c in enumerate(row):
            c = np.asarray(c, dtype=float)[::-1]
            num[i, j, :len(c)] = c
    return TransferMatrix(num, np.asarray(desc_den, dtype=float)[::-1], label)


def biproper_2x2():
    """Stable biproper 2x2 system; its phase sector is about [-136.1, 45.2] degrees."""
    return _tf(
        [[[23, 17, 29, 16], [-27, -3, 14, 14]],
         [[-21, -1, 16, 14], [29, 19, 30, 16]]],
        [4, 5, 2, 1], "biproper_2x2")


def semi_sectorial_3x3():
    """Stable 3x3 system, frequency-wise semi-sectorial, zeros at 0, +-j and infinity."""
    n11 = [12, 81, 152, 119, 110]
    n12 = [-6, -6, 10, 22, 100]
    n13 = [0, -30, -32, 22, -20]
    n22 = [9, 48, 125, 152, 140]
    n23 = [-6, -36, -22, 44, 80]
    n33 = [6, 60, 146, 152, 200]
    return _tf([[n11, n12, n13], [n12, n22, n23], [n13, n23, n33]],
               [1, 14, 47, 76, 60], "semi_sectorial_3x3")


def semi_stable_3x3():
    """Semi-stable 3x3 system with poles at 0, +-j and zeros at +-j, infinity."""
    n11 = [12, 20, 39, 25, 19, 5]
    n12 = [12, 16, 18, 26, 14, 10]
    n13 = [0, -28, -12, -38, -8, -10]
    n22 = [18, 56, 60, 76, 34, 20]
    n23 = [-12, -44, -30, -64, -22, -20]
    n33 = [24, 50, 63, 70, 37, 20]
    return _tf([[n11, n12, n13], [n12, n22, n23], [n13, n23, n33]],
               [2, 1, 3, 1, 1, 0], "semi_stable_3x3")


def integrator(K):
    """``K / s``."""
    K = np.asarray(K, dtype=float)
    m = K.shape[0]
    return StateSpace(np.zeros((m, m)), np.eye(m), K, np.zeros((m, m)), "integrator")


def first_order_lag(m=1, a=1.0):
    """``I / (s + a)``."""
    return StateSpace(-a * np.eye(m), np.eye(m), np.eye(m), np.zeros((m, m)), "first_order_lag")


def random_stable(rng, n, m, proper=True, margin=0.1):
    """Random asymptotically stable state-space model."""
    A = rng.normal(size=(n, n))
    shift = np.max(np.linalg.eigvals(A).real) + margin + rng.uniform(0, 1)
    A = A - shift * np.eye(n)
    B = rng.normal(size=(n, m))
    C = rng.normal(size=(m, n))
    D = rng.normal(size=(m, m)) if proper else np.zeros((m, m))
    return StateSpace(A, B, C, D)


def random_quasi_sectorial(rng, n, m):
    """Random stable model with a strictly sectorial feedthrough.

    ``G = D + C (sI - A)^{-1} B`` with ``Herm(e^{-j c} D)`` comfortably
    positive definite and a small dynamic part, so the phase response stays
    in an open half-plane and ``G(j omega)`` is sectorial at every frequency.
    """
    A = rng.normal(size=(n, n))
    A = A - (np.max(np.linalg.eigvals(A).real) + 0.5 + rng.uniform(0, 1)) * np.eye(n)
    B = rng.normal(size=(n, m))
    C = rng.normal(size=(m, n))
    R = rng.normal(size=(m, m))
    D = R @ R.T + m * np.eye(m) + 0.5 * (lambda S: S - S.T)(rng.normal(size=(m, m)))
    # scale the dynamic part below the margin of Herm(D)
    w = np.concatenate([[0.0], np.logspace(-3, 3, 200)])
    gmax = np.max(np.linalg.norm(evaluate_many(StateSpace(A, B, C, np.zeros((m, m))), 1j * w),
                                 2, axis=(1, 2)))
    hmin = np.linalg.eigvalsh((D + D.T) / 2)[0]
    k = rng.uniform(0.3, 0.95) * hmin / gmax
    return StateSpace(A, k * B, C, D)


def random_semi_stable_pr(rng, m, with_resonance=True):
    """Random semi-stable system ``K0/s [+ K1 s/(s^2 + w^2)] + stable part``.

    Residues are positive semi-definite and the stable part is strictly
    positive real, so the result is positive real with imaginary-axis poles.
    """
    def psd(rank):
        F = rng.normal(size=(m, rank))
        return F @ F.T

    blocks_A, blocks_B, blocks_C = [], [], []
    # K0 = F0 F0^T with F0 of full column rank keeps the realization minimal
    r = int(rng.integers(1, m + 1))
    F0 = rng.normal(size=(m, r))
    blocks_A.append(np.zeros((r, r)))
    blocks_B.append(F0.T)
    blocks_C.append(F0)
    if with_resonance:
        w = rng.uniform(0.5, 3.0)
        K1 = psd(m)
        F1 = np.linalg.cholesky(K1)
        # s / (s^2 + w^2) realized with two states per channel
        Ar = np.kron(np.array([[0.0, w], [-w, 0.0]]), np.eye(m))
        Br = np.vstack([F1.T, np.zeros((m, m))])
        Cr = np.hstack([F1, np.zeros((m, m))])
        blocks_A.append(Ar)
        blocks_B.append(Br)
        blocks_C.append(Cr)
    # strictly positive real stable part: (I / (s + a)) scaled by PSD plus PD feedthrough
    a = rng.uniform(0.5, 2.0)
    K2 = psd(m) + 0.1 * np.eye(m)
    F2 = np.linalg.cholesky(K2)
    blocks_A.append(-a * np.eye(m))
    blocks_B.append(F2.T)
    blocks_C.append(F2)
    A = block_diag(*blocks_A)
    B = np.vstack(blocks_B)
    C = np.hstack(blocks_C)
    R = rng.normal(size=(m, m))
    D = 0.1 * (R @ R.T) + 0.1 * np.eye(m)
    return StateSpace(A, B, C, D, "semi_stable_pr")


def random_loop_pair(seed):
    """Seeded pair ``(G, H)`` of stable square models for feedback campaigns.

    ``G`` is quasi-sectorial; ``H`` is quasi-sectorial followed by up to three
    first-order lags, so phases range from comfortably inside the small phase
    region to well outside it.  Every fifth seed draws a general random ``H``,
    which usually breaks the sectoriality hypotheses.
    """
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 4))
    G = random_quasi_sectorial(rng, int(rng.integers(1, 5)), m)
    if seed % 5 == 4:
        return G, random_stable(rng, int(rng.integers(1, 4)), m)
    H = random_quasi_sectorial(rng, int(rng.integers(1, 5)), m)
    a = rng.uniform(0.2, 5.0)
    for _ in range(int(rng.integers(0, 4))):
        H = series(H, first_order_lag(m, a))
    return G, H
