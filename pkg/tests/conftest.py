"""Shared fixtures, random matrix generators and the acceptance summary."""

from __future__ import annotations

import warnings

import numpy as np
import pytest
from scipy import optimize

from mimophase import systems

# criterion number -> (passed, detail, seconds); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail, secs = ACCEPTANCE[k]
        terminalreporter.write_line(
            f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  ({secs:6.1f} s)  {detail}")


@pytest.fixture(autouse=True)
def _quiet_minimality_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*not minimal.*")
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def ex31():
    return systems.biproper_2x2()


@pytest.fixture(scope="session")
def ex32():
    return systems.semi_sectorial_3x3()


@pytest.fixture(scope="session")
def ex71():
    return systems.semi_stable_3x3()


def random_unitary(rng, n):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def sectorial_with_phases(rng, ph):
    """``T^* diag(e^{j ph}) T`` for a random well-conditioned ``T``."""
    n = len(ph)
    T = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) + 2 * np.eye(n)
    return T.conj().T @ np.diag(np.exp(1j * np.asarray(ph))) @ T


def sampled_angle_range(C, rng, n=100_000, polish=False):
    """Extreme arguments of ``x^* C x`` over random unit vectors.

    Angles are measured around the mean direction of the samples.  With
    ``polish`` the best sample at each end is refined by BFGS on the angle
    as a function of the real and imaginary parts of ``x``.
    """
    m = C.shape[0]
    X = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
    q = np.einsum("ki,ij,kj->k", X.conj(), C, X)
    ref = np.angle(np.mean(q / np.abs(q)))

    def ang(V):
        v = np.einsum("ki,ij,kj->k", V.conj(), C, V)
        return ref + np.angle(v * np.exp(-1j * ref))

    a = ang(X)
    ends = []
    for sign in (-1, 1):
        x = X[np.argmax(sign * a)]
        best = sign * ang(x[None])[0]
        if polish:
            res = optimize.minimize(
                lambda z: -sign * ang((z[:m] + 1j * z[m:])[None])[0],
                np.concatenate([x.real, x.imag]), method="BFGS", options={"gtol": 1e-12})
            best = max(best, -res.fun)
        ends.append(sign * best)
    return ends[0], ends[1]


def doubled_angle_phases(C, rng):
    """Phases of a sectorial ``C`` from ``angle(eig(C^{-*} C)) / 2``.

    With ``C = T^* D T`` the matrix ``C^{-*} C`` is similar to ``D^{-*} D``,
    whose eigenvalues are ``e^{2 j phi_i}``.  Halving leaves a ``pi``
    ambiguity, resolved by the midpoint of the sampled angle range, which is
    within half the (sub-``pi``) spread of every phase.
    """
    lam = np.linalg.eigvals(np.linalg.solve(C.conj().T, C))
    half = np.angle(lam) / 2
    ref = 0.5 * sum(sampled_angle_range(C, rng, 20_000))
    half = half + np.pi * np.round((ref - half) / np.pi)
    return np.sort(half)[::-1]
