"""Spectrum, resolvent norms and closed-form mode oracles.

The generalized eigenproblem K x = mu B x is whitened through the Cholesky
factor B = G G^T into the ordinary problem for C = G^{-1} K G^{-T}, which
is similar to the generator restricted to the discrete space and, crucially,
isometric in the energy norm: 2-norms of whitened objects are energy norms
of the originals. The resolvent norm along the imaginary axis is therefore

    R(lambda) = 1 / sigma_min(i lambda I - C).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fem import StateVector, SystemPencil
from .model import DampingCase


class FactorizationFailure(RuntimeError):
    """B is not symmetric positive definite to working precision."""


class EmptySpectrum(RuntimeError):
    """The pencil has no eigenvalues (zero-size system)."""


class NonpositiveParameter(ValueError):
    """A closed-form oracle was called outside its domain."""


@dataclass
class SpectrumReport:
    """All 2N eigenvalues plus the two scalars the stability theory cares
    about: the spectral abscissa and the distance of the spectrum to the
    imaginary axis."""

    eigenvalues: np.ndarray
    abscissa: float
    min_axis_distance: float
    regime: DampingCase


@dataclass
class ResolventTable:
    lambdas: np.ndarray
    norms: np.ndarray

    @property
    def sup(self) -> float:
        return float(np.max(self.norms))


def _whiten(pencil: SystemPencil):
    """Cholesky factor G of B and the whitened matrix C = G^{-1} K G^{-T}."""
    try:
        g = scipy.linalg.cholesky(pencil.B, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise FactorizationFailure(f"B admits no Cholesky factorization: {exc}") from exc
    y = scipy.linalg.solve_triangular(g, pencil.K, lower=True)
    c = scipy.linalg.solve_triangular(g, y.T, lower=True).T
    return g, c


def _sorted_eigenvalues(mu: np.ndarray) -> np.ndarray:
    # canonical order: ascending real part, then ascending imaginary part;
    # LAPACK's native order is implementation-defined and must not leak
    # into reports.
    return mu[np.lexsort((mu.imag, mu.real))]


def eigenvalues(pencil: SystemPencil) -> SpectrumReport:
    """Whitened eigensolve of the pencil (K, B)."""
    if pencil.n_positions == 0:
        raise EmptySpectrum("pencil has no degrees of freedom")
    _, c = _whiten(pencil)
    mu = _sorted_eigenvalues(scipy.linalg.eigvals(c))
    return SpectrumReport(
        eigenvalues=mu,
        abscissa=float(np.max(mu.real)),
        min_axis_distance=float(np.min(np.abs(mu.real))),
        regime=pencil.regime,
    )


def spectral_abscissa(pencil: SystemPencil) -> float:
    return eigenvalues(pencil).abscissa


def slowest_mode(pencil: SystemPencil):
    """Eigenpair with the largest real part, energy-normalized.

    Returns (mu, y_re, y_im) where y_re + i y_im is the eigenvector scaled
    to unit energy. Ties break lexicographically by (Re, Im), so of a
    conjugate pair the upper half-plane member is returned; the phase is
    fixed by rotating the largest-magnitude component onto the positive
    real axis. Meaningful in a dissipative regime; without damping the
    largest real part is numerically zero and the returned mode is simply
    one of the undamped oscillations.
    """
    if pencil.n_positions == 0:
        raise EmptySpectrum("pencil has no degrees of freedom")
    g, c = _whiten(pencil)
    mu, vecs = scipy.linalg.eig(c)
    pick = np.lexsort((mu.imag, mu.real))[-1]
    z = vecs[:, pick]
    x = scipy.linalg.solve_triangular(g, z.astype(np.complex128), lower=True, trans="T")
    e = 0.5 * np.vdot(x, pencil.B @ x).real
    x = x / math.sqrt(e)
    k = int(np.argmax(np.abs(x)))
    phase = x[k] / abs(x[k])
    x = x / phase
    n = pencil.n_positions
    y_re = StateVector(x[:n].real.copy(), x[n:].real.copy())
    y_im = StateVector(x[:n].imag.copy(), x[n:].imag.copy())
    return complex(mu[pick]), y_re, y_im


def resolvent_norm(pencil: SystemPencil, lam: float) -> float:
    """Energy-norm of the resolvent at the axis point i*lam.

    Returns +inf (rather than raising) when i*lam is an eigenvalue to
    working precision.
    """
    if not np.isfinite(lam):
        raise NonpositiveParameter(f"lambda must be finite, got {lam}")
    _, c = _whiten(pencil)
    return _axis_norm(c, float(lam))


def _axis_norm(c: np.ndarray, lam: float) -> float:
    t = 1j * lam * np.eye(c.shape[0]) - c
    smin = float(scipy.linalg.svdvals(t)[-1])
    return math.inf if smin == 0.0 else 1.0 / smin


def resolvent_sweep(
    pencil: SystemPencil, lambda_min: float, lambda_max: float, steps: int
) -> ResolventTable:
    """Resolvent norms on a uniform grid of axis points.

    The pencil is real, so the norm is even in lambda; values are computed
    for |lambda| and mirrored, which halves the work on symmetric grids
    without changing any value.
    """
    if int(steps) != steps or steps < 2:
        raise NonpositiveParameter(f"steps must be an integer >= 2, got {steps}")
    if not (np.isfinite(lambda_min) and np.isfinite(lambda_max)) or lambda_max <= lambda_min:
        raise NonpositiveParameter(
            f"need lambda_min < lambda_max, got [{lambda_min}, {lambda_max}]"
        )
    _, c = _whiten(pencil)
    grid = np.linspace(lambda_min, lambda_max, int(steps))
    cache: dict[float, float] = {}
    norms = np.empty(grid.shape[0])
    for i, lam in enumerate(grid):
        key = abs(float(lam))
        if key not in cache:
            cache[key] = _axis_norm(c, key)
        norms[i] = cache[key]
    return ResolventTable(lambdas=grid, norms=norms)


# --- closed-form oracles ---------------------------------------------------

def string_modes_closed_form(beta: float, length: float, k: int):
    """Eigenvalue pair of mode k of the pinned damped string.

    Roots of mu^2 + beta*mu + (k*pi/length)^2 = 0; returned as
    (plus-branch, minus-branch).
    """
    if not np.isfinite(length) or length <= 0:
        raise NonpositiveParameter(f"length must be > 0, got {length}")
    if not np.isfinite(beta) or beta < 0:
        raise NonpositiveParameter(f"beta must be finite and >= 0, got {beta}")
    if int(k) != k or k < 1:
        raise NonpositiveParameter(f"mode index must be an integer >= 1, got {k}")
    omega = k * math.pi / length
    disc = 0.25 * beta * beta - omega * omega
    if disc >= 0:
        root = math.sqrt(disc)
        return (complex(-0.5 * beta + root), complex(-0.5 * beta - root))
    root = math.sqrt(-disc)
    return (complex(-0.5 * beta, root), complex(-0.5 * beta, -root))


def beam_clamped_free_frequencies(length: float, count: int) -> np.ndarray:
    """First `count` natural angular frequencies of a clamped-free beam.

    The wavenumbers kappa_j solve 1 + cos(kappa) cosh(kappa) = 0; each is
    bracketed by (2j-1)pi/2 -/+ 1 and bisected to 1e-12. Frequencies are
    (kappa_j / length)^2. The bisection runs on the bounded equivalent
    cos(kappa) + sech(kappa), which has the same sign everywhere.
    """
    if not np.isfinite(length) or length <= 0:
        raise NonpositiveParameter(f"length must be > 0, got {length}")
    if int(count) != count or count < 1:
        raise NonpositiveParameter(f"count must be an integer >= 1, got {count}")

    def g(kappa):
        return math.cos(kappa) + 1.0 / math.cosh(kappa)

    freqs = np.empty(int(count))
    for j in range(1, int(count) + 1):
        lo = (2 * j - 1) * math.pi / 2 - 1.0
        hi = (2 * j - 1) * math.pi / 2 + 1.0
        flo = g(lo)
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            fmid = g(mid)
            if (flo > 0) == (fmid > 0):
                lo, flo = mid, fmid
            else:
                hi = mid
        kappa = 0.5 * (lo + hi)
        freqs[j - 1] = (kappa / length) ** 2
    return freqs


def eigenvalue_exclusion_determinant(a: float) -> float:
    """cosh(sqrt(a)) + cos(sqrt(a)) for a > 0.

    This is the boundary determinant of the fourth-order problem
    z'''' = a^2 z with z(0) = z''(0) = z'''(0) = 0 and z(1) = z'(1) = 0,
    up to a positive factor. It exceeds 1 for every a > 0, so that problem
    has only the zero solution; this is what rules out purely imaginary
    generator eigenvalues in the string-damped-only regime.
    """
    if not np.isfinite(a) or a <= 0:
        raise NonpositiveParameter(f"a must be finite and > 0, got {a}")
    r = math.sqrt(a)
    if r > 700.0:
        # cosh overflows past ~710; the sum is astronomically above 1
        return math.inf
    return math.cosh(r) + math.cos(r)
