"""Invariant constant-coefficient differential operators on C^n-valued fields.

An operator is stored through its matrix-valued polynomial symbol Q, so that
the operator is Q(d/dx) acting on columns of a matrix-valued field. The
symbols used here are homogeneous of degree 1 or 2, and the coefficient of
each monomial is recovered from Q by polarization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Callable

import numpy as np

from .numerics import DEFAULT_FD_STEP, ContractViolation, central_diff_apply

__all__ = [
    "InvariantOperator",
    "symbol_I31",
    "symbol_In2",
    "laplacian",
    "curl",
    "grad_div",
    "In2_operator",
    "default_generators",
    "apply_operator",
    "compose_apply",
    "operator_symbol_at",
    "algebra_commutativity_probe",
    "CommutatorReport",
    "PROBE_STEP",
]

# nested finite differences of total order 4 lose ~eps/h^4; at h = 1e-2 the
# rounding floor stays near 1e-6
PROBE_STEP = 1e-2


def symbol_I31(x) -> np.ndarray:
    """Skew matrix with I31(x) v = x cross v."""
    x = np.asarray(x)
    if x.shape[-1] != 3:
        raise ContractViolation("I31 is defined on R^3")
    out = np.zeros(x.shape[:-1] + (3, 3), dtype=np.result_type(x, float))
    out[..., 0, 1], out[..., 0, 2] = -x[..., 2], x[..., 1]
    out[..., 1, 0], out[..., 1, 2] = x[..., 2], -x[..., 0]
    out[..., 2, 0], out[..., 2, 1] = -x[..., 1], x[..., 0]
    return out


def symbol_In2(x, n: int | None = None) -> np.ndarray:
    """Traceless symmetric x x^T - |x|^2 I / n."""
    x = np.asarray(x)
    n = x.shape[-1] if n is None else n
    if x.shape[-1] != n or n < 3:
        raise ContractViolation("In2 needs n >= 3 and a point in R^n")
    sq = np.sum(x * x, axis=-1)
    return x[..., :, None] * x[..., None, :] - (sq / n)[..., None, None] * np.eye(n)


@dataclass(frozen=True)
class InvariantOperator:
    """Constant-coefficient operator Q(d/dx) with homogeneous symbol Q.

    ``symbol`` maps a (possibly complex) vector of length ``n`` to a d x d
    matrix and must be a homogeneous polynomial of degree ``degree``.
    """

    name: str
    n: int
    degree: int
    symbol: Callable[[np.ndarray], np.ndarray]
    coefficients: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.degree not in (1, 2):
            raise ContractViolation("only degree 1 and 2 symbols are supported")
        eye = np.eye(self.n)
        coeffs = {}
        if self.degree == 1:
            for i in range(self.n):
                alpha = tuple(int(i == m) for m in range(self.n))
                coeffs[alpha] = np.asarray(self.symbol(eye[i]), dtype=complex)
        else:
            for i, j in combinations_with_replacement(range(self.n), 2):
                alpha = tuple(int(m == i) + int(m == j) for m in range(self.n))
                if i == j:
                    c = self.symbol(eye[i])
                else:
                    c = self.symbol(eye[i] + eye[j]) - self.symbol(eye[i]) - self.symbol(eye[j])
                c = np.asarray(c, dtype=complex)
                if np.any(c != 0):
                    coeffs[alpha] = c
        object.__setattr__(self, "coefficients", coeffs)

    def __call__(self, x) -> np.ndarray:
        return self.symbol(x)


def laplacian(n: int) -> InvariantOperator:
    return InvariantOperator("laplacian", n, 2,
                             lambda x: np.sum(np.asarray(x) ** 2) * np.eye(n))


def curl() -> InvariantOperator:
    return InvariantOperator("curl", 3, 1, symbol_I31)


def grad_div(n: int) -> InvariantOperator:
    """grad div = In2(d) + Laplacian / n, symbol x x^T."""
    return InvariantOperator("grad_div", n, 2, lambda x: np.outer(x, x))


def In2_operator(n: int) -> InvariantOperator:
    return InvariantOperator("In2", n, 2, lambda x: symbol_In2(x, n))


def default_generators(n: int) -> list[InvariantOperator]:
    """(Laplacian, curl) for n = 3 and (Laplacian, grad div) for n > 3."""
    if n < 3:
        raise ContractViolation("generators are defined for n >= 3")
    return [laplacian(n), curl() if n == 3 else grad_div(n)]


def operator_symbol_at(op: InvariantOperator, xi) -> np.ndarray:
    """Q(-i xi), using homogeneity: (-i)^degree Q(xi)."""
    xi = np.asarray(xi, dtype=float)
    return (-1j) ** op.degree * np.asarray(op.symbol(xi), dtype=complex)


def apply_operator(op: InvariantOperator, F: Callable, x, h: float = DEFAULT_FD_STEP):
    """(Q(d/dx) F)(x) for a field F returning vectors or d x d matrices.

    Coefficient matrices act from the left, i.e. on each column of F.
    """
    x = np.asarray(x, dtype=float)
    total = 0
    for alpha, coeff in op.coefficients.items():
        total = total + coeff @ np.asarray(central_diff_apply(F, x, alpha, h), dtype=complex)
    return np.asarray(total)


def compose_apply(ops, F: Callable, x, h: float = DEFAULT_FD_STEP):
    """Apply ops[0] after ops[1] after ... (rightmost acts first) at x."""
    G = F
    for op in reversed(ops[1:]):
        G = (lambda inner, o: (lambda y: apply_operator(o, inner, y, h)))(G, op)
    return apply_operator(ops[0], G, x, h)


@dataclass
class CommutatorReport:
    pairs: list
    max_residual: float
    threshold: float
    passed: bool
    residuals: dict


def random_smooth_field(n: int, rng: np.random.Generator, terms: int = 3):
    """Matrix field sum_k A_k exp(i w_k . x) with random complex A_k, w_k."""
    amps = rng.standard_normal((terms, n, n)) + 1j * rng.standard_normal((terms, n, n))
    freqs = rng.standard_normal((terms, n))

    def F(x):
        phases = np.exp(1j * (freqs @ np.asarray(x)))
        return np.tensordot(phases, amps, axes=(0, 0))

    return F


def algebra_commutativity_probe(ops, trials: int = 5, seed: int = 0,
                                h: float = PROBE_STEP, threshold: float = 1e-4):
    """Max over random fields/points of |(D1 D2 - D2 D1) F(x)| for all pairs."""
    rng = np.random.default_rng(seed)
    residuals = {}
    for a in range(len(ops)):
        for b in range(a + 1, len(ops)):
            worst = 0.0
            for _ in range(trials):
                n = ops[a].n
                F = random_smooth_field(n, rng)
                x = rng.uniform(-1.0, 1.0, n)
                lhs = compose_apply([ops[a], ops[b]], F, x, h)
                rhs = compose_apply([ops[b], ops[a]], F, x, h)
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
            residuals[(ops[a].name, ops[b].name)] = worst
    max_res = max(residuals.values(), default=0.0)
    return CommutatorReport(list(residuals), max_res, threshold, max_res <= threshold, residuals)
