"""Residual checks for equivariance, functional equations, eigenfunctions and positive type.

Matrix residuals are measured in the operator (spectral) norm. Every check
returns a CheckReport whose ``passed`` flag is exactly
``max_residual <= threshold``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .diffops import InvariantOperator, apply_operator
from .group_geometry import DEFAULT_MC_SAMPLES, HaarSampler, rotation_to
from .numerics import DEFAULT_FD_STEP, DEFAULT_PSD_TOL, Quadrature

__all__ = [
    "CheckReport",
    "check_equivariance",
    "check_functional_equation_rn",
    "check_eigenfunction",
    "check_positive_type",
    "psd_defect",
    "opnorm",
]


def opnorm(M) -> float:
    M = np.asarray(M)
    if M.ndim < 2:
        return float(np.max(np.abs(M), initial=0.0))
    return float(np.linalg.norm(M, ord=2))


@dataclass
class CheckReport:
    name: str
    max_residual: float
    threshold: float
    passed: bool = field(init=False)
    samples: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.max_residual = float(self.max_residual)
        self.threshold = float(self.threshold)
        self.passed = bool(self.max_residual <= self.threshold)

    def as_dict(self) -> dict:
        out = {
            "name": self.name,
            "max_residual": self.max_residual,
            "threshold": self.threshold,
            "passed": self.passed,
            "seed": self.metadata.get("seed"),
            "rule": self.metadata.get("rule"),
            "samples": self.samples,
        }
        extra = {k: v for k, v in self.metadata.items() if k not in ("seed", "rule")}
        if extra:
            out["details"] = extra
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def check_equivariance(F: Callable, tau_action: Callable, samples, points, tol: float = 1e-9,
                       name: str = "equivariance", seed=None) -> CheckReport:
    """max over k, x of |F(k x) - tau(k) F(x) tau(k)^{-1}|."""
    samples = np.asarray(samples, dtype=float)
    points = np.asarray(points, dtype=float)
    worst = 0.0
    for x in points:
        Fx = np.asarray(F(x))
        moved = np.asarray(F(samples @ x))
        for k, Fkx in zip(samples, moved):
            t = np.asarray(tau_action(k))
            worst = max(worst, opnorm(Fkx - t @ Fx @ np.linalg.inv(t)))
    return CheckReport(name, worst, tol, samples=len(samples) * len(points),
                       metadata={"seed": seed, "rule": "haar-samples"})


def _rule_name(rule: Quadrature) -> str:
    kind = rule.meta.get("kind", "quadrature")
    if kind == "monte-carlo":
        return f"monte-carlo:{rule.domain}:{len(rule)}"
    return f"{kind}:{rule.domain}:order={rule.meta.get('order', rule.degree)}"


def _conditioned_weight(xp: np.ndarray, ys: np.ndarray) -> np.ndarray:
    # average of tr(k) k^T over k in a coset k0 Stab(x'), which depends only
    # on y = k0 x'/|x'|: with u = x'/|x'|,
    #   (u . y) u y^T + (I - u u^T)(I - y y^T) / (n - 1)
    n = len(xp)
    u = xp / np.linalg.norm(xp)
    proj = np.eye(n) - np.outer(u, u)
    first = (ys @ u)[:, None, None] * u[None, :, None] * ys[:, None, :]
    rest = np.einsum("ab,kbc->kac", proj, np.eye(n) - ys[:, :, None] * ys[:, None, :]) / (n - 1)
    return first + rest


def _fe_monte_carlo(psi, x, xp, ks, tau, variance_reduction):
    n = len(x)
    if not variance_reduction or np.linalg.norm(xp) == 0 or (tau == "defining" and n < 4):
        moved = psi(x[None, :] + ks @ xp)
        if tau == "trivial":
            return moved
        chi = np.trace(ks, axis1=1, axis2=2)
        return n * np.einsum("kba,kbc->kac", ks * chi[:, None, None], moved)
    # antithetic partner: a half-turn in a plane through x flips y . x
    if np.linalg.norm(x) > 0:
        R = rotation_to(x)
    else:
        R = np.eye(n)
    half_turn = R @ np.diag([-1.0, -1.0] + [1.0] * (n - 2)) @ R.T
    r = np.linalg.norm(xp)
    out = 0
    for batch in (ks, half_turn @ ks):
        ys = batch @ (xp / r)
        moved = psi(x[None, :] + r * ys)
        if tau == "trivial":
            out = out + moved
        else:
            out = out + n * np.einsum("kab,kbc->kac", _conditioned_weight(xp, ys), moved)
    return 0.5 * out


def check_functional_equation_rn(psi: Callable, pairs: Sequence, rule=None, tol: float = 1e-6,
                                 tau: str = "defining", seed: int = 0,
                                 mc_samples: int = DEFAULT_MC_SAMPLES,
                                 variance_reduction: bool = True,
                                 bandwidth: float | None = None,
                                 name: str = "functional-equation") -> CheckReport:
    """max over (x, x') of |d_tau int tau(k^-1) psi(x + k x') chi(k) dk - psi(x') psi(x)|.

    ``psi`` must accept a batch of points of shape (m, n) and return (m, d, d).
    ``tau`` is "defining" (d_tau = n, chi = trace) or "trivial" (d_tau = 1).
    ``rule`` is a Quadrature over SO(n) or a HaarSampler; None draws
    ``mc_samples`` Haar samples from ``seed``. For Monte Carlo rules the
    report carries a 3-sigma statistical band; with ``variance_reduction``
    the integrand is averaged exactly over the stabilizer of x' and paired
    with an antithetic half-turn (both leave the integral unchanged).
    ``bandwidth`` (the frequency s of psi), when given, lets a deterministic
    rule whose degree is below the oscillation flag a warning.
    """
    if tau not in ("defining", "trivial"):
        raise ValueError(f"unsupported tau {tau!r}")
    pairs = [(np.asarray(x, dtype=float), np.asarray(xp, dtype=float)) for x, xp in pairs]
    n = len(pairs[0][0]) if pairs else 0
    if rule is None:
        rule = HaarSampler(n, seed)
    if isinstance(rule, HaarSampler):
        seed = rule.seed
        rule = rule.rule(mc_samples)
    mc = rule.meta.get("kind") == "monte-carlo"
    ks = rule.nodes
    worst, band = 0.0, 0.0
    meta = {"seed": seed if mc else None, "rule": _rule_name(rule)}
    if mc:
        meta["variance_reduction"] = bool(variance_reduction)
    if bandwidth is not None and rule.degree is not None and pairs:
        reach = bandwidth * max(np.linalg.norm(x) + np.linalg.norm(xp) for x, xp in pairs)
        if rule.degree < reach:
            meta["warning"] = f"rule degree {rule.degree} below oscillation {reach:.3g}"
    residuals = []
    for x, xp in pairs:
        rhs = np.asarray(psi(xp[None, :]))[0] @ np.asarray(psi(x[None, :]))[0]
        if mc:
            vals = _fe_monte_carlo(psi, x, xp, ks, tau, variance_reduction)
            lhs = vals.mean(axis=0)
            sigma = vals.std(axis=0) / np.sqrt(len(vals))
            band = max(band, 3.0 * float(np.sqrt(np.sum(sigma**2))))
        else:
            moved = psi(x[None, :] + ks @ xp)
            if tau == "trivial":
                lhs = rule.integrate(moved)
            else:
                chi = np.trace(ks, axis1=1, axis2=2)
                lhs = n * np.einsum("k,kba,kbc->ac", rule.weights * chi, ks, moved)
        res = opnorm(lhs - rhs)
        residuals.append(res)
        worst = max(worst, res)
    if mc:
        meta["mc_band_3sigma"] = band
    meta["residuals"] = residuals
    return CheckReport(name, worst, tol, samples=len(rule) * len(pairs), metadata=meta)


def check_eigenfunction(psi: Callable, op: InvariantOperator, expected: complex, points,
                        tol: float = 1e-5, h: float = DEFAULT_FD_STEP,
                        name: str | None = None) -> CheckReport:
    """max over x of |op psi(x) - expected psi(x)|, derivatives by finite differences."""
    worst = 0.0
    points = np.asarray(points, dtype=float)
    for x in points:
        got = apply_operator(op, psi, x, h)
        worst = max(worst, opnorm(got - expected * np.asarray(psi(x))))
    return CheckReport(name or f"eigen:{op.name}", worst, tol, samples=len(points),
                       metadata={"seed": None, "rule": f"central-differences:h={h:g}",
                                 "expected": [float(np.real(expected)), float(np.imag(expected))]})


def psd_defect(M) -> float:
    """Scaled distance from PSD: max of Hermitian defect and -lambda_min, over max|M_ij|.

    ``is_psd(M, tol)`` holds exactly when ``psd_defect(M) <= tol``.
    """
    M = np.asarray(M, dtype=complex)
    scale = float(np.max(np.abs(M), initial=0.0))
    if scale == 0.0:
        return 0.0
    herm = float(np.max(np.abs(M - M.conj().T))) / scale
    lam = float(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[0])
    return max(herm, -lam / scale, 0.0)


def _vector_add(p, q):
    return np.asarray(p) + np.asarray(q)


def _vector_neg(p):
    return -np.asarray(p)


def check_positive_type(F: Callable, point_sets, vector_sets=None, tol: float = DEFAULT_PSD_TOL,
                        mul: Callable = _vector_add, inv: Callable = _vector_neg,
                        identity=None, name: str = "positive-type", seed=None) -> CheckReport:
    """Positive type of F on a group given by ``mul``, ``inv`` and ``identity``.

    For each point set the block matrix (F(x_j x_k^-1))_{jk} must be PSD, as
    must the scalar Gram matrices (<F(x_j x_k^-1) v_k, v_j>) for each supplied
    vector set. On every sampled point it also checks that F(e) is PSD,
    F(x^-1) = F(x)^*, and F(e)^2 - F(x)^* F(x) is PSD.
    """
    point_sets = [list(ps) for ps in point_sets]
    if identity is None:
        identity = np.zeros_like(np.asarray(point_sets[0][0], dtype=float))
    Fe = np.asarray(F(identity), dtype=complex)
    d = Fe.shape[0]
    gram_def = 0.0
    herm_def = 0.0
    bound_def = 0.0
    vec_def = 0.0
    Fe2 = Fe @ Fe
    for idx, ps in enumerate(point_sets):
        m = len(ps)
        block = np.zeros((m * d, m * d), dtype=complex)
        for a, xa in enumerate(ps):
            for b, xb in enumerate(ps):
                block[a * d:(a + 1) * d, b * d:(b + 1) * d] = F(mul(xa, inv(xb)))
        gram_def = max(gram_def, psd_defect(block))
        if vector_sets is not None:
            vs = np.asarray(vector_sets[idx % len(vector_sets)], dtype=complex)
            G = np.einsum("ja,jakb,kb->jk", vs.conj(), block.reshape(m, d, m, d), vs)
            vec_def = max(vec_def, psd_defect(G))
        for x in ps:
            Fx = np.asarray(F(x), dtype=complex)
            Fxi = np.asarray(F(inv(x)), dtype=complex)
            herm_def = max(herm_def, opnorm(Fxi - Fx.conj().T) / max(opnorm(Fx), 1.0))
            gap = Fe2 - Fx.conj().T @ Fx
            lam = float(np.linalg.eigvalsh(0.5 * (gap + gap.conj().T))[0])
            bound_def = max(bound_def, -lam / max(opnorm(Fe2), 1e-300))
    identity_def = psd_defect(Fe)
    props = {
        "gram": gram_def,
        "vector_gram": vec_def,
        "identity_psd": identity_def,
        "hermitian": herm_def,
        "bounded": bound_def,
    }
    worst = max(props.values())
    return CheckReport(name, worst, tol, samples=len(point_sets),
                       metadata={"seed": seed, "rule": "block-gram", "properties": props})
