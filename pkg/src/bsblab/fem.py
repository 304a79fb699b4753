"""Conforming finite elements for the beam-string-beam structure.

The beams carry Hermite cubic elements (deflection and slope at every node,
so the broken H^2 regularity is met), the string carries linear elements.
Clamped degrees of freedom at the outer ends are eliminated, and the string
end deflections are identified with the adjacent beam tip deflections, which
enforces displacement continuity exactly. Beam tip slopes stay free; moment
and shear matching at the junctions is natural, it emerges from the weak
form and is never imposed.

Global DOF ordering
-------------------
Beam-1 DOFs come first, node-major with deflection before slope and the
clamped node dropped; then the string interior deflections left to right;
then beam-2 DOFs node-major with its clamped node dropped. The total count
is N = 2*n1 + (n2 - 1) + 2*n3.

The assembled pencil is

    B = [[S, 0], [0, M]],      K = [[0, S], [-S, -D]],

with S the position Gram (beam bending plus string stiffness), M the mass
matrix, and D the damping Gram (rho1 and rho2 times the beam slope Grams
plus beta times the string mass). States y = (p, q) then obey B y' = K y,
the energy is (1/2)(p^T S p + q^T M q), and Re(y^H K y) = -q^H D q holds
exactly, which is the discrete image of the dissipation identity of the
continuous semigroup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.polynomial.legendre import leggauss

from .model import (
    DampingCase,
    InitialData,
    StructureConfig,
    classify_damping,
    validate_config,
)


class ZeroElements(ValueError):
    """An interval was asked to carry fewer elements than it supports."""


class NonpositiveLength(ValueError):
    """An element length must be finite and > 0."""


class IncompatibleInterface(ValueError):
    """Initial data disagrees at a junction beyond tolerance."""


class OutOfDomain(ValueError):
    """Evaluation point lies outside [l0, l3]."""


@dataclass(frozen=True)
class Mesh:
    """Uniform nodes per interval; endpoints coincide with the junctions."""

    n1: int
    n2: int
    n3: int
    nodes1: np.ndarray
    nodes2: np.ndarray
    nodes3: np.ndarray


@dataclass(frozen=True)
class DofMap:
    """Global indices per node; -1 marks an eliminated (clamped) DOF.

    beam1 and beam2 have shape (n+1, 2) with column 0 the deflection and
    column 1 the slope. string has shape (n2+1,); its first and last entries
    alias the adjacent beam tip deflection DOFs.
    """

    n_dofs: int
    beam1: np.ndarray
    string: np.ndarray
    beam2: np.ndarray


@dataclass(frozen=True)
class SystemPencil:
    """Dense matrices of the first-order system B y' = K y."""

    S: np.ndarray
    M: np.ndarray
    D: np.ndarray
    B: np.ndarray
    K: np.ndarray
    regime: DampingCase

    @property
    def n_positions(self) -> int:
        return self.S.shape[0]


@dataclass
class StateVector:
    """Discrete state: position coefficients p and velocity coefficients q.

    Entries may be real or complex (complex states show up when a single
    eigenmode is propagated); both arrays must share one length and hold
    finite entries.
    """

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p)
        q = np.asarray(self.q)
        dtype = np.complex128 if (np.iscomplexobj(p) or np.iscomplexobj(q)) else np.float64
        p = p.astype(dtype, copy=False)
        q = q.astype(dtype, copy=False)
        if p.ndim != 1 or q.ndim != 1 or p.shape != q.shape:
            raise ValueError(
                f"p and q must be 1-d arrays of equal length, got {p.shape} and {q.shape}"
            )
        if not (np.all(np.isfinite(p.real)) and np.all(np.isfinite(p.imag))
                and np.all(np.isfinite(q.real)) and np.all(np.isfinite(q.imag))):
            raise ValueError("state entries must be finite")
        self.p = p
        self.q = q

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.p, self.q])

    @classmethod
    def from_array(cls, y: np.ndarray) -> "StateVector":
        y = np.asarray(y)
        half = y.shape[0] // 2
        return cls(y[:half], y[half:])


def build_mesh(cfg: StructureConfig, n1: int, n2: int, n3: int) -> Mesh:
    """Uniform mesh with n1, n2, n3 elements on the three intervals."""
    validate_config(cfg)
    for name, n in (("n1", n1), ("n2", n2), ("n3", n3)):
        if int(n) != n or n < 1:
            raise ZeroElements(f"{name} must be an integer >= 1, got {n}")
    return Mesh(
        n1=int(n1),
        n2=int(n2),
        n3=int(n3),
        nodes1=np.linspace(cfg.l0, cfg.l1, int(n1) + 1),
        nodes2=np.linspace(cfg.l1, cfg.l2, int(n2) + 1),
        nodes3=np.linspace(cfg.l2, cfg.l3, int(n3) + 1),
    )


def build_dof_map(mesh: Mesh) -> DofMap:
    """Number the free DOFs in the fixed global order.

    Clamping eliminates both DOFs of beam-1 node 0 and beam-2 node n3. The
    string endpoints reuse the beam tip deflection indices, so continuity at
    the junctions is built into the space rather than constrained.
    """
    n1, n2, n3 = mesh.n1, mesh.n2, mesh.n3
    beam1 = np.full((n1 + 1, 2), -1, dtype=int)
    for j in range(1, n1 + 1):
        beam1[j, 0] = 2 * (j - 1)
        beam1[j, 1] = 2 * (j - 1) + 1

    string = np.empty(n2 + 1, dtype=int)
    string[0] = beam1[n1, 0]
    for j in range(1, n2):
        string[j] = 2 * n1 + (j - 1)

    offset = 2 * n1 + (n2 - 1)
    beam2 = np.full((n3 + 1, 2), -1, dtype=int)
    for j in range(n3):
        beam2[j, 0] = offset + 2 * j
        beam2[j, 1] = offset + 2 * j + 1
    string[n2] = beam2[0, 0]

    return DofMap(n_dofs=offset + 2 * n3, beam1=beam1, string=string, beam2=beam2)


# --- element shape functions and matrices ---------------------------------

def hermite_shapes(xi: float, h: float, deriv: int = 0) -> np.ndarray:
    """The four Hermite cubic shape functions (or x-derivatives) at xi.

    xi is the reference coordinate in [0, 1] on an element of length h; the
    DOF order is (deflection left, slope left, deflection right, slope
    right). deriv in {0, 1, 2} selects the value, d/dx, or d2/dx2.
    """
    if deriv == 0:
        return np.array([
            1.0 - 3.0 * xi**2 + 2.0 * xi**3,
            h * (xi - 2.0 * xi**2 + xi**3),
            3.0 * xi**2 - 2.0 * xi**3,
            h * (-(xi**2) + xi**3),
        ])
    if deriv == 1:
        return np.array([
            (-6.0 * xi + 6.0 * xi**2) / h,
            1.0 - 4.0 * xi + 3.0 * xi**2,
            (6.0 * xi - 6.0 * xi**2) / h,
            -2.0 * xi + 3.0 * xi**2,
        ])
    if deriv == 2:
        return np.array([
            (-6.0 + 12.0 * xi) / h**2,
            (-4.0 + 6.0 * xi) / h,
            (6.0 - 12.0 * xi) / h**2,
            (-2.0 + 6.0 * xi) / h,
        ])
    raise ValueError(f"deriv must be 0, 1 or 2, got {deriv}")


def p1_shapes(xi: float, h: float, deriv: int = 0) -> np.ndarray:
    """The two linear shape functions (or x-derivatives) at xi in [0, 1]."""
    if deriv == 0:
        return np.array([1.0 - xi, xi])
    if deriv == 1:
        return np.array([-1.0 / h, 1.0 / h])
    raise ValueError(f"deriv must be 0 or 1, got {deriv}")


_ELEMENT_KINDS = {
    # kind: (shape function, derivative order, quadrature points)
    "beam_bending": (hermite_shapes, 2, 4),
    "beam_slope": (hermite_shapes, 1, 4),
    "beam_mass": (hermite_shapes, 0, 4),
    "string_stiffness": (p1_shapes, 1, 2),
    "string_mass": (p1_shapes, 0, 2),
}


def element_matrices(kind: str, h: float) -> np.ndarray:
    """Local Gram matrix of one element, by Gauss quadrature.

    The 4-point rule on beam elements is exact through polynomial degree 7
    (the mass integrand has degree 6); the 2-point rule on string elements
    is exact through degree 3. So every local matrix is exact up to
    roundoff.
    """
    if kind not in _ELEMENT_KINDS:
        raise ValueError(f"unknown element kind {kind!r}")
    if not np.isfinite(h) or h <= 0:
        raise NonpositiveLength(f"element length must be finite and > 0, got {h}")
    shapes, deriv, npts = _ELEMENT_KINDS[kind]
    pts, wts = leggauss(npts)
    size = 4 if shapes is hermite_shapes else 2
    out = np.zeros((size, size))
    for t, w in zip(pts, wts):
        xi = 0.5 * (t + 1.0)
        n = shapes(xi, h, deriv)
        out += (0.5 * w * h) * np.outer(n, n)
    return out


def _accumulate(matrix: np.ndarray, idx: np.ndarray, local: np.ndarray) -> None:
    keep = idx >= 0
    gi = idx[keep]
    matrix[np.ix_(gi, gi)] += local[np.ix_(keep, keep)]


def assemble_pencil(
    cfg: StructureConfig,
    mesh: Mesh,
    dofs: DofMap,
    element_order: str = "forward",
) -> SystemPencil:
    """Assemble S, M, D and the pencil blocks B, K.

    element_order ("forward" or "reversed") only changes the element
    iteration order; it exists so the order-independence of the summation
    can be certified. Each global entry collects at most two element
    contributions, so the result is bit-identical either way.
    """
    validate_config(cfg)
    if element_order not in ("forward", "reversed"):
        raise ValueError(f"element_order must be 'forward' or 'reversed', got {element_order!r}")

    n = dofs.n_dofs
    S = np.zeros((n, n))
    M = np.zeros((n, n))
    D = np.zeros((n, n))

    def order(count):
        r = range(count)
        return reversed(r) if element_order == "reversed" else r

    for beam, nodes, count, rho in (
        (dofs.beam1, mesh.nodes1, mesh.n1, cfg.rho1),
        (dofs.beam2, mesh.nodes3, mesh.n3, cfg.rho2),
    ):
        for e in order(count):
            h = nodes[e + 1] - nodes[e]
            idx = np.concatenate([beam[e], beam[e + 1]])
            _accumulate(S, idx, element_matrices("beam_bending", h))
            _accumulate(M, idx, element_matrices("beam_mass", h))
            _accumulate(D, idx, rho * element_matrices("beam_slope", h))

    for e in order(mesh.n2):
        h = mesh.nodes2[e + 1] - mesh.nodes2[e]
        idx = np.array([dofs.string[e], dofs.string[e + 1]])
        mass = element_matrices("string_mass", h)
        _accumulate(S, idx, element_matrices("string_stiffness", h))
        _accumulate(M, idx, mass)
        _accumulate(D, idx, cfg.beta * mass)

    return SystemPencil(
        S=S, M=M, D=D, B=_block_b(S, M), K=_block_k(S, D),
        regime=classify_damping(cfg),
    )


def _block_b(S: np.ndarray, M: np.ndarray) -> np.ndarray:
    n = S.shape[0]
    B = np.zeros((2 * n, 2 * n))
    B[:n, :n] = S
    B[n:, n:] = M
    return B


def _block_k(S: np.ndarray, D: np.ndarray) -> np.ndarray:
    n = S.shape[0]
    K = np.zeros((2 * n, 2 * n))
    K[:n, n:] = S
    K[n:, :n] = -S
    K[n:, n:] = -D
    return K


def discretize(cfg: StructureConfig, n1: int, n2: int, n3: int):
    """Convenience: mesh, DOF map and pencil in one call."""
    mesh = build_mesh(cfg, n1, n2, n3)
    dofs = build_dof_map(mesh)
    return mesh, dofs, assemble_pencil(cfg, mesh, dofs)


def assemble_string_pencil(length: float, beta: float, n: int) -> SystemPencil:
    """Isolated string with both ends pinned, for oracle comparisons.

    Linear elements on (0, length); the N = n - 1 interior deflections are
    the DOFs and D = beta * M.
    """
    if not np.isfinite(length) or length <= 0:
        raise NonpositiveLength(f"string length must be > 0, got {length}")
    if beta < 0 or not np.isfinite(beta):
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    if int(n) != n or n < 2:
        raise ZeroElements(f"a pinned string needs n >= 2 elements, got {n}")
    n = int(n)
    idx_of = np.concatenate([[-1], np.arange(n - 1), [-1]])
    h = length / n
    size = n - 1
    S = np.zeros((size, size))
    M = np.zeros((size, size))
    stiff = element_matrices("string_stiffness", h)
    mass = element_matrices("string_mass", h)
    for e in range(n):
        idx = idx_of[e:e + 2]
        _accumulate(S, idx, stiff)
        _accumulate(M, idx, mass)
    D = beta * M
    regime = DampingCase.UDU if beta > 0 else DampingCase.CONSERVATIVE
    return SystemPencil(S=S, M=M, D=D, B=_block_b(S, M), K=_block_k(S, D), regime=regime)


def assemble_beam_pencil(length: float, n: int, rho: float = 0.0) -> SystemPencil:
    """Isolated beam clamped at x = 0 and free at x = length.

    Hermite cubics with the clamped node eliminated, N = 2n DOFs, and
    D = rho times the slope Gram.
    """
    if not np.isfinite(length) or length <= 0:
        raise NonpositiveLength(f"beam length must be > 0, got {length}")
    if rho < 0 or not np.isfinite(rho):
        raise ValueError(f"rho must be finite and >= 0, got {rho}")
    if int(n) != n or n < 1:
        raise ZeroElements(f"n must be an integer >= 1, got {n}")
    n = int(n)
    idx_of = np.full((n + 1, 2), -1, dtype=int)
    for j in range(1, n + 1):
        idx_of[j] = (2 * (j - 1), 2 * (j - 1) + 1)
    h = length / n
    size = 2 * n
    S = np.zeros((size, size))
    M = np.zeros((size, size))
    D = np.zeros((size, size))
    bend = element_matrices("beam_bending", h)
    mass = element_matrices("beam_mass", h)
    slope = element_matrices("beam_slope", h)
    for e in range(n):
        idx = np.concatenate([idx_of[e], idx_of[e + 1]])
        _accumulate(S, idx, bend)
        _accumulate(M, idx, mass)
        _accumulate(D, idx, rho * slope)
    regime = DampingCase.CONSERVATIVE if rho == 0 else DampingCase.OTHER
    return SystemPencil(S=S, M=M, D=D, B=_block_b(S, M), K=_block_k(S, D), regime=regime)


# --- initial data ----------------------------------------------------------

_INTERFACE_TOL = 1e-12


def _fd_slope(f, x: float, delta: float, side: int) -> float:
    # 4th-order finite differences; side -1/0/+1 picks backward/central/forward
    # so the stencil never leaves the member's interval.
    if side == 0:
        return (f(x - 2 * delta) - 8 * f(x - delta) + 8 * f(x + delta) - f(x + 2 * delta)) / (12 * delta)
    s = float(side)
    pts = [f(x + s * k * delta) for k in range(5)]
    return s * (-25 * pts[0] / 12 + 4 * pts[1] - 3 * pts[2] + 4 * pts[3] / 3 - pts[4] / 4) / delta


def _beam_nodal(profile: Any, nodes: np.ndarray, label: str):
    """Nodal (values, slopes) for one beam profile."""
    if isinstance(profile, tuple) and len(profile) == 2:
        a, b = profile
        if callable(a) and callable(b):
            values = np.array([float(a(float(x))) for x in nodes])
            slopes = np.array([float(b(float(x))) for x in nodes])
        else:
            values = np.asarray(a, dtype=float)
            slopes = np.asarray(b, dtype=float)
            if values.shape != nodes.shape or slopes.shape != nodes.shape:
                raise ValueError(
                    f"{label}: nodal arrays must have shape {nodes.shape}, "
                    f"got {values.shape} and {slopes.shape}"
                )
        return values, slopes
    if callable(profile):
        values = np.array([float(profile(float(x))) for x in nodes])
        h = float(nodes[1] - nodes[0])
        delta = 1e-3 * h
        slopes = np.empty_like(values)
        for j, x in enumerate(nodes):
            side = 1 if j == 0 else (-1 if j == len(nodes) - 1 else 0)
            slopes[j] = _fd_slope(profile, float(x), delta, side)
        return values, slopes
    raise TypeError(
        f"{label}: expected a callable, a (value, slope) callable pair, "
        f"or a (values, slopes) array pair"
    )


def _string_nodal(profile: Any, nodes: np.ndarray, label: str) -> np.ndarray:
    if callable(profile):
        return np.array([float(profile(float(x))) for x in nodes])
    values = np.asarray(profile, dtype=float)
    if values.shape != nodes.shape:
        raise ValueError(f"{label}: nodal array must have shape {nodes.shape}, got {values.shape}")
    return values


def _check_junction(left: float, right: float, where: str) -> None:
    if abs(left - right) > _INTERFACE_TOL * max(1.0, abs(left), abs(right)):
        raise IncompatibleInterface(
            f"initial data disagrees at {where}: {left!r} vs {right!r}"
        )


def _check_clamped(value: float, slope: float, scale: float, where: str) -> None:
    # looser than the junction tolerance: slopes may come from the
    # fourth-order difference fallback, whose rounding error is ~1e-12
    # of the profile scale, while genuine violations are order one
    tol = 1e-8 * max(1.0, scale)
    if abs(value) > tol or abs(slope) > tol:
        raise IncompatibleInterface(
            f"initial data must vanish (value and slope) at {where}, "
            f"got value {value!r}, slope {slope!r}"
        )


def interpolate(data: InitialData, mesh: Mesh, dofs: DofMap) -> StateVector:
    """Nodal interpolant of initial data in the discrete space.

    Junction values must agree within 1e-12 (relative, floored at an
    absolute 1e-12); the shared DOF then takes the beam-side value. The
    data must vanish, in value and slope, at the clamped outer ends: the
    discrete space contains nothing else, and projecting silently would
    misrepresent the data. Cubic beam profiles given with exact slopes
    and affine string profiles are reproduced exactly.
    """
    out = {}
    for tag, (u, v, w) in (("displacement", (data.u0, data.v0, data.w0)),
                           ("velocity", (data.u1, data.v1, data.w1))):
        uv, us = _beam_nodal(u, mesh.nodes1, f"beam-1 {tag}")
        sv = _string_nodal(v, mesh.nodes2, f"string {tag}")
        wv, ws = _beam_nodal(w, mesh.nodes3, f"beam-2 {tag}")
        _check_junction(uv[-1], sv[0], f"the left junction ({tag})")
        _check_junction(sv[-1], wv[0], f"the right junction ({tag})")
        _check_clamped(uv[0], us[0], float(max(np.abs(uv).max(), np.abs(us).max())),
                       f"the clamped left end ({tag})")
        _check_clamped(wv[-1], ws[-1], float(max(np.abs(wv).max(), np.abs(ws).max())),
                       f"the clamped right end ({tag})")
        vec = np.zeros(dofs.n_dofs)
        for j in range(mesh.n1 + 1):
            if dofs.beam1[j, 0] >= 0:
                vec[dofs.beam1[j, 0]] = uv[j]
                vec[dofs.beam1[j, 1]] = us[j]
        for j in range(1, mesh.n2):
            vec[dofs.string[j]] = sv[j]
        for j in range(mesh.n3 + 1):
            if dofs.beam2[j, 0] >= 0:
                vec[dofs.beam2[j, 0]] = wv[j]
                vec[dofs.beam2[j, 1]] = ws[j]
        out[tag] = vec
    return StateVector(p=out["displacement"], q=out["velocity"])


def evaluate_state(y: StateVector, x: float, mesh: Mesh, dofs: DofMap):
    """Displacement and velocity of the discrete state at a point x.

    x must lie in [l0, l3]; junction points belong to the member on their
    left, which is immaterial since the deflection is continuous.
    """
    l0 = mesh.nodes1[0]
    l1 = mesh.nodes1[-1]
    l2 = mesh.nodes2[-1]
    l3 = mesh.nodes3[-1]
    if not np.isfinite(x) or x < l0 or x > l3:
        raise OutOfDomain(f"x = {x} outside [{l0}, {l3}]")

    if x <= l1:
        nodes, table, shapes = mesh.nodes1, dofs.beam1, hermite_shapes
    elif x <= l2:
        nodes, table, shapes = mesh.nodes2, dofs.string, p1_shapes
    else:
        nodes, table, shapes = mesh.nodes3, dofs.beam2, hermite_shapes

    e = int(np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, len(nodes) - 2))
    h = float(nodes[e + 1] - nodes[e])
    xi = (x - float(nodes[e])) / h
    n = shapes(xi, h)
    idx = (np.concatenate([table[e], table[e + 1]])
           if table.ndim == 2 else np.array([table[e], table[e + 1]]))

    def combine(coeffs):
        total = 0.0
        for k, i in enumerate(idx):
            if i >= 0:
                total = total + n[k] * coeffs[i]
        return total

    return combine(y.p), combine(y.q)
