"""Rotation-group elements, Haar sampling and cubature on SO(3), spheres and U(1)."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import roots_jacobi

from .numerics import ContractViolation, Quadrature, gauss_legendre

__all__ = [
    "HaarSampler",
    "haar_samples",
    "haar_rule",
    "is_rotation",
    "so3_quadrature",
    "euler_zyz",
    "rotation_to",
    "stabilizer_embed",
    "sphere_quadrature",
    "circle_quadrature",
    "DEFAULT_MC_SAMPLES",
]

DEFAULT_MC_SAMPLES = 200_000


def is_rotation(k, tol: float = 1e-12) -> bool:
    k = np.asarray(k, dtype=float)
    n = k.shape[-1]
    return bool(
        np.max(np.abs(k.T @ k - np.eye(n))) <= tol and abs(np.linalg.det(k) - 1.0) <= tol
    )


def _haar_batch(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    z = rng.standard_normal((count, n, n))
    q, r = np.linalg.qr(z)
    # sign fix on the diagonal of R makes Q Haar distributed on O(n)
    d = np.sign(np.diagonal(r, axis1=1, axis2=2))
    d[d == 0] = 1.0
    q = q * d[:, None, :]
    # map the det = -1 coset onto SO(n) by negating the first column
    neg = np.linalg.det(q) < 0
    q[neg, :, 0] *= -1.0
    return q


class HaarSampler:
    """Seeded stream of Haar-distributed SO(n) matrices.

    Owns its generator; not meant to be shared between threads.
    """

    def __init__(self, n: int, seed: int = 0):
        if n < 1:
            raise ContractViolation("n must be >= 1")
        self.n = n
        self.seed = seed
        self.count = 0
        self._rng = np.random.default_rng(seed)

    def draw(self, count: int) -> np.ndarray:
        if count < 1:
            raise ContractViolation("count must be >= 1")
        out = _haar_batch(self._rng, self.n, count)
        self.count += count
        return out

    def rule(self, count: int = DEFAULT_MC_SAMPLES) -> Quadrature:
        """Equal-weight Monte Carlo rule made of the next ``count`` samples."""
        nodes = self.draw(count)
        return Quadrature(
            nodes,
            np.full(count, 1.0 / count),
            domain=f"SO({self.n})",
            degree=None,
            meta={"kind": "monte-carlo", "seed": self.seed, "samples": count},
        )


def haar_samples(n: int, count: int, seed: int = 0) -> np.ndarray:
    """``count`` i.i.d. Haar samples from SO(n), shape (count, n, n)."""
    return HaarSampler(n, seed).draw(count)


def haar_rule(n: int, count: int = DEFAULT_MC_SAMPLES, seed: int = 0) -> Quadrature:
    return HaarSampler(n, seed).rule(count)


def _rz(a):
    c, s = np.cos(a), np.sin(a)
    out = np.zeros(np.shape(a) + (3, 3))
    out[..., 0, 0], out[..., 0, 1] = c, -s
    out[..., 1, 0], out[..., 1, 1] = s, c
    out[..., 2, 2] = 1.0
    return out


def _ry(b):
    c, s = np.cos(b), np.sin(b)
    out = np.zeros(np.shape(b) + (3, 3))
    out[..., 0, 0], out[..., 0, 2] = c, s
    out[..., 2, 0], out[..., 2, 2] = -s, c
    out[..., 1, 1] = 1.0
    return out


def euler_zyz(alpha, beta, gamma) -> np.ndarray:
    """Rotation R_z(alpha) R_y(beta) R_z(gamma); broadcasts over angle arrays."""
    return _rz(alpha) @ _ry(beta) @ _rz(gamma)


def so3_quadrature(order: int) -> Quadrature:
    """Product rule for normalized Haar measure on SO(3) in ZYZ Euler angles.

    ``order`` equispaced angles for alpha and gamma, ``order`` Gauss-Legendre
    nodes in cos(beta). Matrix coefficients of every irrep of degree at most
    ``order - 1`` are integrated exactly.
    """
    if order < 2:
        raise ContractViolation("order must be >= 2")
    angles = 2.0 * math.pi * np.arange(order) / order
    gl = gauss_legendre(order)
    a, cb, g = np.meshgrid(angles, gl.nodes, angles, indexing="ij")
    _, wb, _ = np.meshgrid(angles, gl.weights, angles, indexing="ij")
    nodes = euler_zyz(a.ravel(), np.arccos(cb.ravel()), g.ravel())
    weights = wb.ravel() / (2.0 * order * order)
    return Quadrature(nodes, weights, domain="SO(3)", degree=order - 1,
                      meta={"kind": "euler-product", "order": order})


def rotation_to(xi) -> np.ndarray:
    """A rotation k in SO(n) with k e_1 = xi / |xi|.

    Householder reflection taking e_1 to xi/|xi|, followed by the reflection
    that flips the last coordinate so the determinant is +1.
    """
    xi = np.asarray(xi, dtype=float)
    n = len(xi)
    norm = np.linalg.norm(xi)
    if norm == 0.0:
        raise ContractViolation("rotation_to needs a nonzero vector")
    y = xi / norm
    e1 = np.zeros(n)
    e1[0] = 1.0
    v = e1 - y
    if np.linalg.norm(v) < 1e-15:
        return np.eye(n)
    if n == 1:
        raise ContractViolation("SO(1) cannot map e_1 to -e_1")
    k = np.eye(n) - 2.0 * np.outer(v, v) / (v @ v)
    k[:, -1] *= -1.0
    return k


def stabilizer_embed(h) -> np.ndarray:
    """Block embedding diag(1, h) of SO(n-1) into the stabilizer of e_1 in SO(n)."""
    h = np.asarray(h, dtype=float)
    m = h.shape[-1]
    out = np.zeros(h.shape[:-2] + (m + 1, m + 1))
    out[..., 0, 0] = 1.0
    out[..., 1:, 1:] = h
    return out


def circle_quadrature(points: int) -> Quadrature:
    """Equispaced rule for normalized measure on U(1); nodes are angles."""
    if points < 1:
        raise ContractViolation("points must be >= 1")
    theta = 2.0 * math.pi * np.arange(points) / points
    return Quadrature(theta, np.full(points, 1.0 / points), domain="U(1)",
                      degree=points - 1)


def sphere_quadrature(n: int, level: int, inner_level: int | None = None) -> Quadrature:
    """Product rule for normalized surface measure on S^{n-1} in R^n.

    Writes y = (u, sqrt(1-u^2) z) with z on S^{n-2}; the axial variable u uses
    ``level`` Gauss-Jacobi nodes for the weight (1-u^2)^{(n-3)/2}, the inner
    sphere is handled recursively with ``inner_level`` (default ``level``).
    Exact for polynomials of degree <= 2*min(level, inner_level) - 1.
    """
    if n < 2:
        raise ContractViolation("n must be >= 2")
    if level < 1:
        raise ContractViolation("level must be >= 1")
    inner_level = level if inner_level is None else inner_level
    if n == 2:
        m = 2 * level
        th = 2.0 * math.pi * np.arange(m) / m
        nodes = np.stack([np.cos(th), np.sin(th)], axis=1)
        return Quadrature(nodes, np.full(m, 1.0 / m), domain="S^1", degree=2 * level - 1)
    a = (n - 3) / 2.0
    u, wu = roots_jacobi(level, a, a)
    wu = wu / wu.sum()
    inner = sphere_quadrature(n - 1, inner_level)
    radial = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    nodes = np.empty((level, len(inner), n))
    nodes[:, :, 0] = u[:, None]
    nodes[:, :, 1:] = radial[:, None, None] * inner.nodes[None, :, :]
    weights = wu[:, None] * inner.weights[None, :]
    degree = min(2 * level - 1, inner.degree)
    return Quadrature(nodes.reshape(-1, n), weights.ravel(), domain=f"S^{n - 1}",
                      degree=degree, meta={"level": level, "inner_level": inner_level,
                                           "axial_degree": 2 * level - 1})
