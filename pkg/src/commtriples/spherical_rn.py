"""Bessel-type spherical functions for SO(n) acting on R^n with tau = C^n.

For xi = s e_1 the defining representation splits under the stabilizer
SO(n-1) of xi into blocks V_j with orthogonal projections P_j (three lines
for n = 3, a line plus its complement for n > 3). The spherical function

    Phi_{s,j}(x) = (n / d_j) int_{SO(n)} exp(-i xi . (k x)) k^T P_j k dk

is evaluated here either by cubature (over the sphere after rotating x to
|x| e_1, or directly over the group) or in closed form through the
regularized Bessel ratios R_nu(u) = J_nu(u) / u^nu with u = s|x|:

    Phi_{s,1} = C [R_{n/2-1} P + R_{n/2} (I - nP)]
    Phi_{s,2} = C/(n-1) [R_{n/2-1} (I - P) - R_{n/2} (I - nP)]        n > 3
    Phi_{s,2|3} = C/2 [R_{1/2} (I - P) - R_{3/2} (I - 3P) +- s R_{3/2} I31(x)]   n = 3

with P = x x^T / |x|^2 and C = n 2^{n/2-1} Gamma(n/2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .diffops import InvariantOperator, default_generators, operator_symbol_at, symbol_I31
from .group_geometry import haar_samples, rotation_to, sphere_quadrature, stabilizer_embed
from .numerics import ContractViolation, Quadrature, bessel_ratio
from .group_geometry import HaarSampler

__all__ = [
    "BesselLabel",
    "TrivialLabel",
    "SpectrumPoint",
    "NonEigenvectorError",
    "QuadratureAccuracyWarning",
    "block_dims",
    "projections",
    "phi_closed_form",
    "phi_quadrature",
    "trivial_closed_form",
    "SphericalFunction",
    "spectrum_embed",
    "symbolic_spectrum",
    "spectrum_injectivity_scan",
    "InjectivityReport",
]


class NonEigenvectorError(ArithmeticError):
    """Symbol at -i xi is not scalar on the chosen block."""


class QuadratureAccuracyWarning(UserWarning):
    pass


def block_dims(n: int) -> tuple[int, ...]:
    if n == 3:
        return (1, 1, 1)
    if n > 3:
        return (1, n - 1)
    raise ContractViolation("the defining representation splits without multiplicity only for n >= 3")


@dataclass(frozen=True)
class BesselLabel:
    """Phi_{s,j} on R^n for K = SO(n), tau the defining representation."""

    n: int
    s: float
    j: int

    def __post_init__(self):
        if self.n < 3:
            raise ContractViolation("n must be >= 3")
        if self.s < 0:
            raise ContractViolation("s must be >= 0")
        allowed = (1,) if self.s == 0 else tuple(range(1, len(block_dims(self.n)) + 1))
        if self.j not in allowed:
            raise ContractViolation(f"block index {self.j} not in {allowed} for n={self.n}, s={self.s}")

    @property
    def d_tau(self) -> int:
        return self.n

    @property
    def d_j(self) -> int:
        return self.n if self.s == 0 else block_dims(self.n)[self.j - 1]

    def as_dict(self) -> dict:
        return {"kind": "bessel", "n": self.n, "s": self.s, "j": self.j}


@dataclass(frozen=True)
class TrivialLabel:
    """Zonal spherical function of (SO(n) x| R^n, SO(n)): tau trivial."""

    n: int
    s: float

    d_tau = 1

    def as_dict(self) -> dict:
        return {"kind": "trivial", "n": self.n, "s": self.s}


@dataclass(frozen=True)
class SpectrumPoint:
    coordinates: tuple
    label: object = field(default=None, compare=False)

    def __len__(self):
        return len(self.coordinates)

    def as_dict(self) -> dict:
        return {
            "label": None if self.label is None else self.label.as_dict(),
            "coordinates": {
                "re": [float(np.real(c)) for c in self.coordinates],
                "im": [float(np.imag(c)) for c in self.coordinates],
            },
        }


def _projections_at(y: np.ndarray, n: int) -> list[np.ndarray]:
    # y has shape (..., n) with |y| = 1
    p1 = y[..., :, None] * y[..., None, :]
    rest = np.eye(n) - p1
    if n > 3:
        return [p1.astype(complex), rest.astype(complex)]
    skew = 1j * symbol_I31(y)
    return [p1.astype(complex), 0.5 * (rest + skew), 0.5 * (rest - skew)]


def projections(xi, n: int | None = None) -> list[np.ndarray]:
    """Projections onto the stabilizer blocks of C^n at xi, in the fixed order.

    n > 3: [y y^T, I - y y^T]; n = 3: [y y^T, (I - y y^T + i I31(y))/2,
    (I - y y^T - i I31(y))/2], with y = xi / |xi|.
    """
    xi = np.asarray(xi, dtype=float)
    n = len(xi) if n is None else n
    if len(xi) != n:
        raise ContractViolation("xi must lie in R^n")
    block_dims(n)
    r = np.linalg.norm(xi)
    if r == 0:
        raise ContractViolation("projections are undefined at xi = 0")
    return _projections_at(xi / r, n)


def _norm_and_unit(x: np.ndarray):
    r = np.linalg.norm(x, axis=-1)
    safe = np.where(r > 0, r, 1.0)
    return r, x / safe[..., None]


def phi_closed_form(label: BesselLabel, x) -> np.ndarray:
    """Closed-form Phi_{s,j}(x); broadcasts over leading axes of ``x``."""
    n, s, j = label.n, float(label.s), label.j
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise ContractViolation("point dimension does not match label")
    eye = np.eye(n)
    if s == 0:
        return np.broadcast_to(eye.astype(complex), x.shape[:-1] + (n, n)).copy()
    r, y = _norm_and_unit(x)
    u = s * r
    P = y[..., :, None] * y[..., None, :]
    C = n * 2.0 ** (n / 2.0 - 1.0) * math.gamma(n / 2.0)
    lo = np.asarray(bessel_ratio(n - 2, u))[..., None, None]
    hi = np.asarray(bessel_ratio(n, u))[..., None, None]
    if j == 1:
        out = C * (lo * P + hi * (eye - n * P))
    elif n > 3:
        out = C / (n - 1) * (lo * (eye - P) - hi * (eye - n * P))
    else:
        sign = 1.0 if j == 2 else -1.0
        skew = symbol_I31(x)
        out = 0.5 * C * (lo * (eye - P) - hi * (eye - 3.0 * P) + sign * s * hi * skew)
    out = np.asarray(out, dtype=complex)
    # at the origin P is meaningless; Phi(0) = I by continuity
    at_origin = r == 0
    if np.any(at_origin):
        out[at_origin] = eye
    return out


def trivial_closed_form(label: TrivialLabel, x) -> np.ndarray:
    """int_{S^{n-1}} exp(-i s y.x) dsigma(y) = 2^{n/2-1} Gamma(n/2) R_{n/2-1}(s|x|), as 1x1."""
    n = label.n
    x = np.asarray(x, dtype=float)
    u = label.s * np.linalg.norm(x, axis=-1)
    val = 2.0 ** (n / 2.0 - 1.0) * math.gamma(n / 2.0) * np.asarray(bessel_ratio(n - 2, u))
    return np.asarray(val, dtype=complex)[..., None, None]


def _default_sphere_level(u: float) -> int:
    return int(max(16, math.ceil(1.5 * u) + 16))


def phi_quadrature(label: BesselLabel, x, rule: Quadrature | HaarSampler | None = None,
                   mc_samples: int = 200_000) -> np.ndarray:
    """Phi_{s,j}(x) by cubature.

    With a sphere rule (or none, in which case one is built from s|x|) the
    point is rotated to |x| e_1, the reduced integral
    (n/d_j) int exp(-i s|x| y_1) P_j(y) dsigma(y) is summed, and the result
    is conjugated back. With an SO(n) rule or a HaarSampler the defining
    group integral is summed directly at x. A sphere rule whose exactness
    degree is below the oscillation s|x| triggers QuadratureAccuracyWarning.
    """
    n, s = label.n, float(label.s)
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ContractViolation("phi_quadrature evaluates one point in R^n")
    if s == 0:
        return np.eye(n, dtype=complex)
    r = float(np.linalg.norm(x))
    u = s * r
    if isinstance(rule, HaarSampler):
        rule = rule.rule(mc_samples)
    if rule is not None and rule.domain.startswith("SO("):
        ks = rule.nodes
        if ks.shape[-1] != n:
            raise ContractViolation("group rule dimension does not match label")
        xi = np.zeros(n)
        xi[0] = s
        phase = np.exp(-1j * (ks @ x) @ xi)
        P = projections(xi, n)[label.j - 1]
        conj = np.einsum("kba,bc,kcd->kad", ks, P, ks)
        return (n / label.d_j) * np.tensordot(rule.weights * phase, conj, axes=(0, 0))
    if r == 0:
        return np.eye(n, dtype=complex)
    if rule is None:
        lvl = _default_sphere_level(u)
        rule = sphere_quadrature(n, lvl, inner_level=4)
    elif rule.domain != f"S^{n - 1}":
        raise ContractViolation(f"rule over {rule.domain} cannot integrate over S^{n - 1}")
    axial = rule.meta.get("axial_degree", rule.degree)
    if axial is not None and axial < u:
        warnings.warn(
            f"sphere rule of axial degree {axial} is too coarse for oscillation {u:.3g}",
            QuadratureAccuracyWarning,
            stacklevel=2,
        )
    y = rule.nodes
    c = rule.weights * np.exp(-1j * u * y[:, 0])
    # P_j(y) is a polynomial of degree <= 2 in y, so moments suffice
    m0 = c.sum()
    m1 = c @ y
    m2 = (y.T * c) @ y
    eye = np.eye(n)
    if label.j == 1:
        reduced = m2
    elif n > 3:
        reduced = m0 * eye - m2
    else:
        sign = 1.0 if label.j == 2 else -1.0
        reduced = 0.5 * (m0 * eye - m2 + sign * 1j * symbol_I31(m1))
    reduced = (n / label.d_j) * reduced
    k = rotation_to(x)
    return k @ reduced @ k.T


class SphericalFunction:
    """Callable wrapper evaluating a spherical function on arrays of points."""

    def __init__(self, label, method: str = "closed"):
        self.label = label
        self.method = method
        self.n = label.n
        self.dim = label.n if isinstance(label, BesselLabel) else 1

    def __call__(self, x):
        if isinstance(self.label, TrivialLabel):
            return trivial_closed_form(self.label, x)
        if self.method == "closed":
            return phi_closed_form(self.label, x)
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, self.n)
        vals = np.stack([phi_quadrature(self.label, p) for p in flat])
        return vals.reshape(x.shape[:-1] + (self.n, self.n))

    def __repr__(self):
        return f"SphericalFunction({self.label!r}, method={self.method!r})"


def spectrum_embed(label: BesselLabel, generators: list[InvariantOperator] | None = None,
                   residual_tol: float = 1e-10, seed: int = 0) -> SpectrumPoint:
    """Eigenvalues of each generator on Phi_{s,j}: scalar of Q(-i xi) on V_j."""
    n = label.n
    generators = default_generators(n) if generators is None else generators
    xi = np.zeros(n)
    xi[0] = label.s
    if label.s == 0:
        P = np.eye(n, dtype=complex)
    else:
        P = projections(xi, n)[label.j - 1]
    stab = stabilizer_embed(haar_samples(n - 1, 4, seed=seed))
    coords = []
    for op in generators:
        Q = operator_symbol_at(op, xi)
        if label.s > 0:
            comm = max(np.max(np.abs(Q @ k - k @ Q)) for k in stab)
            if comm > residual_tol * max(1.0, np.max(np.abs(Q))):
                raise ContractViolation(f"{op.name} symbol does not commute with the stabilizer")
        lam = np.trace(Q @ P) / label.d_j
        resid = np.max(np.abs(Q @ P - lam * P))
        if resid > residual_tol:
            raise NonEigenvectorError(f"{op.name} is not scalar on block {label.j} (residual {resid:.3g})")
        lam = complex(lam)
        # exact zeros keep tables clean; symbols here have entries in Z[s, s^2]
        coords.append(complex(0.0 if abs(lam.real) < 1e-300 else lam.real,
                              0.0 if abs(lam.imag) < 1e-14 * max(1.0, abs(lam)) else lam.imag))
    return SpectrumPoint(tuple(coords), label)


def symbolic_spectrum(n: int, j: int):
    """Exact eigenvalue pair (Laplacian, second generator) on V_j, as sympy expressions in s."""
    import sympy as sp

    s = sp.symbols("s", positive=True)
    xi = sp.Matrix([s] + [0] * (n - 1))
    eye = sp.eye(n)
    e1 = sp.Matrix([1] + [0] * (n - 1))
    p1 = e1 * e1.T
    if n == 3:
        skew = sp.Matrix([[0, 0, 0], [0, 0, -1], [0, 1, 0]])
        blocks = [p1, (eye - p1 + sp.I * skew) / 2, (eye - p1 - sp.I * skew) / 2]
        second = -sp.I * sp.Matrix([[0, -xi[2], xi[1]], [xi[2], 0, -xi[0]], [-xi[1], xi[0], 0]])
    else:
        blocks = [p1, eye - p1]
        second = -(xi * xi.T)
    P = blocks[j - 1]
    dj = block_dims(n)[j - 1]
    out = []
    for Q in (-(xi.T * xi)[0, 0] * eye, second):
        lam = sp.simplify((Q * P).trace() / dj)
        if sp.simplify(Q * P - lam * P) != sp.zeros(n, n):
            raise NonEigenvectorError(f"symbolic symbol is not scalar on block {j}")
        out.append(lam)
    return s, tuple(out)


@dataclass
class InjectivityReport:
    points: list
    injective: bool
    collisions: list

    def as_dict(self) -> dict:
        return {
            "injective": self.injective,
            "points": [p.as_dict() for p in self.points],
            "collisions": [[a.as_dict(), b.as_dict()] for a, b in self.collisions],
        }


def spectrum_injectivity_scan(labels, generators=None, tol: float = 1e-12) -> InjectivityReport:
    """Check that distinct labels have distinct eigenvalue tuples."""
    points = [spectrum_embed(lab, generators) for lab in labels]
    collisions = []
    for a, b in combinations(points, 2):
        if len(a) == len(b) and max(abs(p - q) for p, q in zip(a.coordinates, b.coordinates)) <= tol:
            collisions.append((a.label, b.label))
    return InjectivityReport(points, not collisions, collisions)
