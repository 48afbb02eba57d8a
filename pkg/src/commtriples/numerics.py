"""Special functions, quadrature rules, finite differences and PSD testing.

Bessel functions are only needed for orders ``nu = two_nu / 2`` with small
``two_nu``; they are computed here with Miller's backward recurrence (stable
for every argument) and a power series for the regularized ratio
``J_nu(u) / u**nu`` near the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Quadrature",
    "ContractViolation",
    "bessel_halfint",
    "bessel_ratio",
    "axial_integral",
    "gauss_legendre",
    "is_psd",
    "central_diff_apply",
    "DEFAULT_FD_STEP",
    "DEFAULT_PSD_TOL",
]

DEFAULT_FD_STEP = 1e-3
DEFAULT_PSD_TOL = 1e-9

# below this argument the ratio J_nu(u)/u^nu is summed from its power series
_SERIES_CUTOFF = 1.0


class ContractViolation(ValueError):
    """Raised when an input breaks a documented precondition."""


@dataclass(frozen=True)
class Quadrature:
    """Nodes and nonnegative weights of a cubature rule.

    ``nodes`` has the rule's points along axis 0: scalars for intervals and
    the circle, unit vectors for spheres, matrices for rotation groups.
    ``degree`` is the polynomial (or band-limit) degree the rule integrates
    exactly, ``None`` for Monte Carlo rules.
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: str
    degree: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.nodes) == 0 or len(self.nodes) != len(self.weights):
            raise ContractViolation("quadrature needs matching, nonempty nodes and weights")

    def __len__(self):
        return len(self.weights)

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum of ``values`` (first axis runs over the nodes)."""
        return np.tensordot(self.weights, values, axes=(0, 0))


def _ratio_series(nu: float, u: np.ndarray) -> np.ndarray:
    # sum_k (-1)^k (u/2)^{2k} / (2^nu k! Gamma(k+nu+1)); only used for u < 1
    q = -(u * u) / 4.0
    term = np.full(u.shape, 1.0 / (2.0**nu * math.gamma(nu + 1.0)))
    total = term.copy()
    for k in range(1, 40):
        term = term * q / (k * (k + nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _bessel_miller(two_nu: int, u: np.ndarray) -> np.ndarray:
    """J_{two_nu/2}(u) for an array of u > 0 by backward recurrence."""
    nu = two_nu / 2.0
    umax = float(np.max(u))
    top = int(max(nu, umax) + 40 + 4 * math.sqrt(max(nu, umax)))
    top += top % 2
    if two_nu % 2:
        top += 0.5
    j_next = np.zeros_like(u)
    j_cur = np.full_like(u, 1e-280)
    wanted = np.zeros_like(u)
    norm = np.zeros_like(u)  # integer orders: J_0 + 2 sum J_2k
    j_half = np.zeros_like(u)
    k = top
    while k > 0.25:
        if abs(k - nu) < 0.25:
            wanted = j_cur.copy()
        if abs(k - 0.5) < 0.25:
            j_half = j_cur.copy()
        # J_{k-1} = (2k/u) J_k - J_{k+1}
        j_next, j_cur = j_cur, (2.0 * k / u) * j_cur - j_next
        k -= 1.0
        if two_nu % 2 == 0 and k > 0.5 and round(k) % 2 == 0:
            norm += 2.0 * j_cur
        big = np.abs(j_cur) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            j_cur, j_next = j_cur * scale, j_next * scale
            wanted, norm, j_half = wanted * scale, norm * scale, j_half * scale
    if abs(nu) < 0.25:
        wanted = j_cur.copy()
    if two_nu % 2 == 0:
        return wanted / (norm + j_cur)
    # half-integer orders end at J_{-1/2}; normalize against whichever of the
    # closed forms for J_{1/2}, J_{-1/2} is larger in magnitude
    amp = np.sqrt(2.0 / (math.pi * u))
    true_half, true_mhalf = amp * np.sin(u), amp * np.cos(u)
    use_half = np.abs(true_half) >= np.abs(true_mhalf)
    return np.where(use_half, wanted * true_half / np.where(use_half, j_half, 1.0),
                    wanted * true_mhalf / np.where(use_half, 1.0, j_cur))


def bessel_halfint(two_nu: int, u: float) -> float:
    """Bessel function of the first kind J_nu(u) with ``nu = two_nu / 2``.

    ``two_nu`` must be a nonnegative integer and ``u`` strictly positive;
    at the origin use :func:`bessel_ratio` instead.
    """
    two_nu = int(two_nu)
    if two_nu < 0:
        raise ContractViolation("only nonnegative orders are supported")
    if not u > 0:
        raise ContractViolation(f"bessel_halfint needs u > 0, got {u!r}")
    return float(bessel_ratio(two_nu, u)) * u ** (two_nu / 2.0)


def bessel_ratio(two_nu: int, u):
    """Regularized ratio J_nu(u) / u**nu, finite at u = 0.

    Accepts scalars or arrays; the ratio is even in ``u``.
    """
    two_nu = int(two_nu)
    if two_nu < 0:
        raise ContractViolation("only nonnegative orders are supported")
    nu = two_nu / 2.0
    arr = np.abs(np.asarray(u, dtype=float))
    flat = arr.ravel()
    out = np.empty_like(flat)
    small = flat < _SERIES_CUTOFF
    if np.any(small):
        out[small] = _ratio_series(nu, flat[small])
    if not np.all(small):
        big = flat[~small]
        out[~small] = _bessel_miller(two_nu, big) / big**nu
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def axial_integral(k: int, u: float) -> complex:
    """The integral of exp(i u cos t) sin(t)**k over [0, pi].

    Evaluated through 2^{k/2} sqrt(pi) Gamma((k+1)/2) J_{k/2}(u) / u^{k/2},
    whose limit at u = 0 is sqrt(pi) Gamma((k+1)/2) / Gamma(k/2 + 1).
    The integrand is symmetric under t -> pi - t, so the value is real.
    """
    if k < 0:
        raise ContractViolation("k must be nonnegative")
    pref = 2.0 ** (k / 2.0) * math.sqrt(math.pi) * math.gamma((k + 1) / 2.0)
    return complex(pref * bessel_ratio(k, u), 0.0)


def gauss_legendre(order: int) -> Quadrature:
    """Gauss-Legendre rule on [-1, 1], exact through degree 2*order - 1."""
    if order < 1:
        raise ContractViolation("order must be >= 1")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return Quadrature(nodes, weights, "interval", degree=2 * order - 1)


def is_psd(M, tol: float = DEFAULT_PSD_TOL) -> bool:
    """True iff the smallest eigenvalue of ``M`` is at least ``-tol * max|M_ij|``.

    ``M`` has to be Hermitian up to the same scaled tolerance; anything else
    is a contract violation rather than a ``False``.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractViolation(f"is_psd needs a square matrix, got shape {M.shape}")
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    thresh = tol * scale
    if np.max(np.abs(M - M.conj().T), initial=0.0) > thresh:
        raise ContractViolation("matrix is not Hermitian within tolerance")
    if scale == 0.0:
        return True
    lam_min = np.linalg.eigvalsh(0.5 * (M + M.conj().T))[0]
    return bool(lam_min >= -thresh)


def _stencil(f: Callable, x: np.ndarray, orders: Sequence[int], h: float):
    axes = [i for i, m in enumerate(orders) for _ in range(m)]
    n = len(x)

    def shifted(*steps):
        y = np.array(x, dtype=float)
        for axis, step in steps:
            y[axis] += step
        return np.asarray(f(y))

    if not axes:
        return shifted()
    if len(axes) == 1:
        (i,) = axes
        return (shifted((i, h)) - shifted((i, -h))) / (2.0 * h)
    i, j = axes
    if i == j:
        return (shifted((i, h)) - 2.0 * shifted() + shifted((i, -h))) / (h * h)
    assert i < n and j < n
    return (
        shifted((i, h), (j, h))
        - shifted((i, h), (j, -h))
        - shifted((i, -h), (j, h))
        + shifted((i, -h), (j, -h))
    ) / (4.0 * h * h)


def central_diff_apply(
    f: Callable,
    x,
    multi_index: Sequence[int],
    h: float = DEFAULT_FD_STEP,
):
    """Partial derivative of ``f`` at ``x`` of the given multi-index.

    Central differences at steps ``h`` and ``h/2`` combined by one Richardson
    step, so the error is O(h^4). ``f`` may return scalars or arrays.
    Total order is limited to 2.
    """
    orders = [int(m) for m in multi_index]
    x = np.asarray(x, dtype=float)
    if len(orders) != len(x):
        raise ContractViolation("multi-index length must match the point dimension")
    if any(m < 0 for m in orders) or sum(orders) > 2:
        raise ContractViolation("total derivative order must be between 0 and 2")
    if not h > 0:
        raise ContractViolation("step must be positive")
    if sum(orders) == 0:
        return np.asarray(f(x))
    coarse = _stencil(f, x, orders, h)
    fine = _stencil(f, x, orders, h / 2.0)
    return (4.0 * fine - coarse) / 3.0
