"""Laguerre-type spherical functions of (U(1) x| H_1, U(1), chi_q).

Conventions
-----------
Group law on H_1 = C x R::

    (z, t)(z', t') = (z + z', t + t' + Im(z conj(z')) / 2)

The Schroedinger-type representation pi_lam acts on the Fock space with
orthonormal basis e_m = w^m / sqrt(m!) and is realized through displacement
operators D(alpha) = exp(alpha a^+ - conj(alpha) a)::

    pi_lam(z, t) = exp(i lam t) D(alpha),
    alpha = sqrt(lam/2) z         (lam > 0)
    alpha = sqrt(|lam|/2) conj(z) (lam < 0)

D(alpha) D(beta) = exp(i Im(alpha conj(beta))) D(alpha + beta) makes this a
representation for the group law above. Each monomial line is U(1)-stable,
so the spherical function of degree m is the diagonal matrix element
exp(i lam t) <D(alpha) e_m, e_m> = exp(i lam t) exp(-|alpha|^2/2) L_m(|alpha|^2).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.special import gammaln

from .group_geometry import circle_quadrature
from .numerics import ContractViolation, Quadrature

__all__ = [
    "HeisenbergPoint",
    "heis_mul",
    "heis_inv",
    "HEIS_IDENTITY",
    "FockTruncation",
    "TruncationError",
    "LaguerreLabel",
    "fock_matrix",
    "displacement_parameter",
    "laguerre_poly",
    "laguerre_closed_form",
    "laguerre_spherical",
    "LaguerreSpherical",
    "verify_heis_functional_equation",
    "laguerre_csv",
    "DEFAULT_TRUNCATION",
]

DEFAULT_TRUNCATION = 48
TAIL_TOL = 1e-10


class TruncationError(ArithmeticError):
    """The truncated Fock matrix misses more than the allowed column mass."""


class HeisenbergPoint(NamedTuple):
    z: complex
    t: float


HEIS_IDENTITY = HeisenbergPoint(0j, 0.0)


def heis_mul(p, q) -> HeisenbergPoint:
    z, t = complex(p[0]), float(p[1])
    w, u = complex(q[0]), float(q[1])
    return HeisenbergPoint(z + w, t + u + 0.5 * (z * w.conjugate()).imag)


def heis_inv(p) -> HeisenbergPoint:
    return HeisenbergPoint(-complex(p[0]), -float(p[1]))


@dataclass(frozen=True)
class LaguerreLabel:
    lam: float
    m: int

    def __post_init__(self):
        if self.lam == 0:
            raise ContractViolation("lam must be nonzero")
        if self.m < 0:
            raise ContractViolation("degree must be >= 0")

    d_tau = 1

    def as_dict(self) -> dict:
        return {"kind": "laguerre", "lam": self.lam, "m": self.m}


@dataclass(frozen=True)
class FockTruncation:
    """Fock basis e_0..e_N for pi_lam; ``degree`` is the largest column used."""

    lam: float
    N: int = DEFAULT_TRUNCATION
    degree: int | None = None

    def __post_init__(self):
        if self.lam == 0:
            raise ContractViolation("lam must be nonzero")
        if self.N < 1:
            raise ContractViolation("N must be >= 1")
        if self.degree is not None and self.N < 4 * self.degree:
            raise ContractViolation(f"N = {self.N} is below 4 * degree = {4 * self.degree}")

    @property
    def checked_columns(self) -> int:
        return self.N // 4 if self.degree is None else self.degree

    def tail_bound(self, z) -> float:
        """Largest missing squared column mass over the checked columns."""
        M = _displacement_matrix(displacement_parameter(self.lam, z), self.N)
        return _tail(M, self.checked_columns)


def displacement_parameter(lam: float, z) -> complex:
    z = complex(z)
    c = math.sqrt(abs(lam) / 2.0)
    return c * z if lam > 0 else c * z.conjugate()


def _displacement_matrix(alpha: complex, N: int) -> np.ndarray:
    # <D e_m, e_{m+a}> = sqrt(m!/(m+a)!) alpha^a exp(-x/2) L_m^{(a)}(x), x = |alpha|^2,
    # and <D e_{m+a}, e_m> = the same with (-conj(alpha))^a; the associated
    # Laguerre values come from the forward recurrence in m, which stays
    # accurate to rounding here (unlike summing the alternating series)
    x = abs(alpha) ** 2
    M = np.zeros((N + 1, N + 1), dtype=complex)
    if alpha == 0:
        np.fill_diagonal(M, 1.0)
        return M
    phase = alpha / abs(alpha)
    for a in range(N + 1):
        m = np.arange(N + 1 - a)
        L = np.empty(len(m))
        L[0] = 1.0
        if len(m) > 1:
            L[1] = 1.0 + a - x
        for k in range(1, len(m) - 1):
            L[k + 1] = ((2 * k + 1 + a - x) * L[k] - (k + a) * L[k - 1]) / (k + 1)
        logp = 0.5 * (gammaln(m + 1) - gammaln(m + a + 1)) + a * math.log(abs(alpha)) - 0.5 * x
        vals = np.exp(logp) * L
        M[m + a, m] = vals * phase**a
        if a:
            M[m, m + a] = vals * (-phase.conjugate()) ** a
    return M


def _tail(M: np.ndarray, columns: int) -> float:
    cols = M[:, : columns + 1]
    return float(np.max(np.abs(1.0 - np.sum(np.abs(cols) ** 2, axis=0))))


def fock_matrix(lam: float, z, trunc: FockTruncation | None = None) -> np.ndarray:
    """Matrix of pi_lam(z, 0) on e_0..e_N: entry (l, m) = <pi_lam(z,0) e_m, e_l>.

    Raises TruncationError when the checked columns lose more than 1e-10 of
    their norm to basis vectors beyond e_N.
    """
    trunc = FockTruncation(lam) if trunc is None else trunc
    if trunc.lam != lam:
        raise ContractViolation("truncation was built for a different lam")
    M = _displacement_matrix(displacement_parameter(lam, z), trunc.N)
    tail = _tail(M, trunc.checked_columns)
    if tail > TAIL_TOL:
        raise TruncationError(
            f"|lam||z|^2 = {abs(lam) * abs(complex(z)) ** 2:.3g} needs more than N = {trunc.N} "
            f"(missing column mass {tail:.2e})"
        )
    return M


def laguerre_poly(m: int, x):
    """L_m(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    prev, cur = np.zeros_like(x), np.ones_like(x)
    for k in range(m):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def laguerre_closed_form(label: LaguerreLabel, z, t):
    """exp(i lam t) exp(-|lam||z|^2/4) L_m(|lam||z|^2/2); broadcasts over z, t."""
    x = 0.5 * abs(label.lam) * np.abs(np.asarray(z)) ** 2
    val = np.exp(1j * label.lam * np.asarray(t, dtype=float)) * np.exp(-0.5 * x) * laguerre_poly(label.m, x)
    return val if np.ndim(val) else complex(val)


def laguerre_spherical(lam: float, m: int, p, trunc: FockTruncation | None = None) -> complex:
    """Spherical function of degree m at p = (z, t), read off the Fock matrix."""
    if m < 0:
        raise ContractViolation("degree must be >= 0")
    trunc = FockTruncation(lam, degree=m) if trunc is None else trunc
    if m > trunc.N:
        raise ContractViolation("degree exceeds the truncation")
    z, t = complex(p[0]), float(p[1])
    if trunc.degree is None:
        trunc = FockTruncation(trunc.lam, trunc.N, degree=min(m, trunc.N // 4))
    M = fock_matrix(lam, z, trunc)
    return complex(np.exp(1j * lam * t) * M[m, m])


class LaguerreSpherical:
    """Callable p -> 1x1 matrix, for use with the shared positive-type checker."""

    def __init__(self, label: LaguerreLabel, N: int = DEFAULT_TRUNCATION):
        self.label = label
        self.trunc = FockTruncation(label.lam, N, degree=label.m)
        self.dim = 1

    def __call__(self, p) -> np.ndarray:
        return np.array([[laguerre_spherical(self.label.lam, self.label.m, p, self.trunc)]])


def verify_heis_functional_equation(phi: Callable, p, q, circle_rule: Quadrature | None = None) -> float:
    """|int_{U(1)} phi(p (e^{i theta} z_q, t_q)) dtheta - phi(q) phi(p)|.

    ``phi`` maps a point to a complex scalar (or 1x1 matrix).
    """
    rule = circle_quadrature(64) if circle_rule is None else circle_rule
    zq, tq = complex(q[0]), float(q[1])
    lhs = 0j
    for theta, w in zip(rule.nodes, rule.weights):
        rotated = HeisenbergPoint(np.exp(1j * theta) * zq, tq)
        lhs += w * complex(np.squeeze(phi(heis_mul(p, rotated))))
    rhs = complex(np.squeeze(phi(q))) * complex(np.squeeze(phi(p)))
    return abs(lhs - rhs)


def laguerre_csv(labels, points, trunc_N: int = DEFAULT_TRUNCATION) -> str:
    """CSV text with columns lam, m, re_z, im_z, t, re_phi, im_phi."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["lam", "m", "re_z", "im_z", "t", "re_phi", "im_phi"])
    for lab in labels:
        trunc = FockTruncation(lab.lam, trunc_N, degree=lab.m)
        for z, t in points:
            z = complex(z)
            val = laguerre_spherical(lab.lam, lab.m, (z, t), trunc)
            writer.writerow([_g(lab.lam), lab.m, _g(z.real), _g(z.imag), _g(t),
                             _g(val.real), _g(val.imag)])
    return buf.getvalue()


def _g(v: float) -> str:
    return format(float(v), ".17g")
