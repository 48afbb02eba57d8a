"""Highest-weight bookkeeping and multiplicity-free commutativity deciders.

Weights
-------
* ``SU(n)``: Dynkin labels ``a = (a_1, ..., a_{n-1})``, all >= 0. The
  partition form is ``lam_i = a_i + ... + a_{n-1}`` with ``lam_n = 0``.
* ``U(n)``: a weakly decreasing integer n-tuple.
* ``SO(n)``: the standard dominant tuple of length n // 2; for even n the
  last entry may be negative, for odd n all entries are >= 0.

Deciders
--------
A triple (K x| R^n, K, tau) is commutative iff the stabilizer K_x of a
generic point acts on V_tau without multiplicity. For the Heisenberg group
the test is whether the polynomial Fock spaces tensored with tau decompose
without multiplicity under K; for SU(n) this reduces to tau being singular.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, prod

__all__ = [
    "HighestWeight",
    "CommutativityVerdict",
    "InvalidWeightError",
    "UnsupportedTripleError",
    "ConsistencyError",
    "weyl_dim",
    "is_singular",
    "pieri_tensor",
    "sym_power_dim",
    "sigma_tensor_multiplicity_free",
    "MultiplicityCertificate",
    "branch_defining_so",
    "branch_u_to_u",
    "check_triple_rn",
    "check_triple_heisenberg",
    "weight_from_json",
    "weight_to_json",
    "su_to_partition",
    "partition_to_su",
    "defining_weight",
    "trivial_weight",
]

GROUPS = ("SU", "SO", "U")


class InvalidWeightError(ValueError):
    pass


class UnsupportedTripleError(NotImplementedError):
    """No exact decider exists for the requested (K, tau)."""


class ConsistencyError(AssertionError):
    """Enumeration and closed-form criterion disagree."""


@dataclass(frozen=True, order=True)
class HighestWeight:
    group: str
    n: int
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        g, n, c = self.group, self.n, self.coeffs
        if g not in GROUPS:
            raise InvalidWeightError(f"unknown group {g!r}")
        if n < 1:
            raise InvalidWeightError("rank parameter n must be >= 1")
        if g == "SU":
            if len(c) != n - 1 or any(x < 0 for x in c):
                raise InvalidWeightError(f"SU({n}) needs {n - 1} nonnegative Dynkin labels, got {c}")
        elif g == "U":
            if len(c) != n or any(c[i] < c[i + 1] for i in range(n - 1)):
                raise InvalidWeightError(f"U({n}) needs a weakly decreasing {n}-tuple, got {c}")
        else:
            m = n // 2
            if len(c) != m:
                raise InvalidWeightError(f"SO({n}) needs {m} entries, got {c}")
            if n == 2:
                pass  # SO(2) characters: any integer
            elif n % 2:
                if any(c[i] < c[i + 1] for i in range(m - 1)) or (m and c[-1] < 0):
                    raise InvalidWeightError(f"not dominant for SO({n}): {c}")
            else:
                if any(c[i] < c[i + 1] for i in range(m - 2)) or c[m - 2] < abs(c[m - 1]):
                    raise InvalidWeightError(f"not dominant for SO({n}): {c}")

    def __str__(self):
        return f"{self.group}({self.n}){list(self.coeffs)}"

    def as_dict(self) -> dict:
        return {"group": self.group, "n": self.n, "coeffs": list(self.coeffs)}


def weight_to_json(w: HighestWeight) -> str:
    return json.dumps(w.as_dict())


def weight_from_json(data) -> HighestWeight:
    """Parse ``{"group": "SU", "n": 3, "coeffs": [1, 0]}`` (a str or a dict)."""
    if isinstance(data, str):
        data = json.loads(data)
    try:
        return HighestWeight(str(data["group"]), int(data["n"]), tuple(data["coeffs"]))
    except (KeyError, TypeError) as exc:
        raise InvalidWeightError(f"malformed weight {data!r}") from exc


def trivial_weight(group: str, n: int) -> HighestWeight:
    length = {"SU": n - 1, "U": n, "SO": n // 2}[group]
    return HighestWeight(group, n, (0,) * length)


def defining_weight(group: str, n: int) -> HighestWeight:
    w = list(trivial_weight(group, n).coeffs)
    if not w:
        raise InvalidWeightError(f"{group}({n}) has no defining weight in this encoding")
    w[0] = 1
    return HighestWeight(group, n, tuple(w))


def su_to_partition(a) -> tuple:
    a = tuple(a)
    return tuple(sum(a[i:]) for i in range(len(a))) + (0,)


def partition_to_su(lam) -> tuple:
    return tuple(lam[i] - lam[i + 1] for i in range(len(lam) - 1))


def _weyl_gl(lam) -> int:
    n = len(lam)
    num = prod(lam[i] - lam[j] + j - i for i in range(n) for j in range(i + 1, n))
    den = prod(j - i for i in range(n) for j in range(i + 1, n))
    return num // den


def weyl_dim(w: HighestWeight) -> int:
    """Dimension of the irreducible representation with highest weight ``w``."""
    if w.group == "SU":
        return _weyl_gl(su_to_partition(w.coeffs))
    if w.group == "U":
        return _weyl_gl(w.coeffs)
    n, lam = w.n, w.coeffs
    if n <= 2:
        return 1
    m = n // 2
    if n % 2:
        l = [Fraction(lam[i]) + m - i - Fraction(1, 2) for i in range(m)]
        rho = [Fraction(m - i) - Fraction(1, 2) for i in range(m)]
        num = prod((l[i] - l[j]) * (l[i] + l[j]) for i in range(m) for j in range(i + 1, m)) * prod(l)
        den = prod((rho[i] - rho[j]) * (rho[i] + rho[j]) for i in range(m) for j in range(i + 1, m)) * prod(rho)
    else:
        l = [lam[i] + m - 1 - i for i in range(m)]
        rho = [m - 1 - i for i in range(m)]
        num = prod((l[i] - l[j]) * (l[i] + l[j]) for i in range(m) for j in range(i + 1, m))
        den = prod((rho[i] - rho[j]) * (rho[i] + rho[j]) for i in range(m) for j in range(i + 1, m))
    value = Fraction(num) / Fraction(den)
    if value.denominator != 1 or value < 1:
        raise InvalidWeightError(f"Weyl formula gave {value} for {w}")
    return int(value)


def is_singular(w: HighestWeight) -> bool:
    """True iff some Dynkin label vanishes (SU(n) only)."""
    if w.group != "SU":
        raise InvalidWeightError("singularity is decided for SU(n) weights only")
    if w.n < 2:
        raise InvalidWeightError("SU(1) has no roots")
    return any(c == 0 for c in w.coeffs)


def sym_power_dim(n: int, m: int) -> int:
    """Dimension of degree-m polynomials on C^n."""
    return comb(m + n - 1, n - 1)


def _pieri_tuples(a, m):
    # c_1..c_n >= 0 with sum m and c_{j+1} <= a_j
    for c in product(*(range(min(x, m) + 1) for x in a)):
        c0 = m - sum(c)
        if c0 >= 0:
            yield (c0,) + c


def _pieri_pairs(a, m):
    n = len(a) + 1
    for c in _pieri_tuples(a, m):
        b = tuple(a[j] + c[j] - c[j + 1] for j in range(n - 1))
        yield b, c


def pieri_tensor(w: HighestWeight, m: int) -> Counter:
    """Decomposition of S^m(C^n) (x) mu_a for SU(n), keyed by the Dynkin tuple b."""
    if w.group != "SU":
        raise InvalidWeightError("pieri_tensor takes an SU(n) weight")
    if m < 0:
        raise InvalidWeightError("degree must be >= 0")
    return Counter(b for b, _ in _pieri_pairs(w.coeffs, m))


@dataclass
class MultiplicityCertificate:
    multiplicity_free: bool
    closed_form: bool
    m_max: int
    witness: dict | None = None


def _first_duplicate(a, m_max):
    seen = {}
    for m in range(m_max + 1):
        for b, c in _pieri_pairs(a, m):
            if b in seen:
                return {"b": list(b), "first": seen[b], "second": {"m": m, "c": list(c)}}
            seen[b] = {"m": m, "c": list(c)}
    return None


def sigma_tensor_multiplicity_free(w: HighestWeight, m_max: int | None = None) -> MultiplicityCertificate:
    """Is sum_{m <= m_max} S^m(C^n) (x) mu_a free of repeated constituents?

    The enumeration is compared against the closed-form criterion
    ``is_singular``; a disagreement raises ConsistencyError.
    """
    if w.group != "SU":
        raise InvalidWeightError("sigma_tensor_multiplicity_free takes an SU(n) weight")
    m_max = 2 * w.n if m_max is None else m_max
    if m_max < w.n:
        raise InvalidWeightError(f"m_max must be >= n = {w.n}")
    witness = _first_duplicate(w.coeffs, m_max)
    free = witness is None
    closed = is_singular(w)
    if free != closed:
        raise ConsistencyError(f"enumeration says {free}, singularity says {closed} for {w}")
    return MultiplicityCertificate(free, closed, m_max, witness)


def branch_defining_so(n: int) -> Counter:
    """Restriction of C^n from SO(n) to the stabilizer SO(n-1) of e_1."""
    if n < 2:
        raise InvalidWeightError("n must be >= 2")
    if n == 2:
        return Counter({HighestWeight("SO", 1, ()): 2})
    if n == 3:
        return Counter(HighestWeight("SO", 2, (q,)) for q in (1, -1, 0))
    return Counter({defining_weight("SO", n - 1): 1, trivial_weight("SO", n - 1): 1})


def branch_u_to_u(lam) -> Counter:
    """U(n) -> U(n-1) restriction: all interlacing mu (multiplicity one each)."""
    lam = tuple(lam)
    ranges = [range(lam[i + 1], lam[i] + 1) for i in range(len(lam) - 1)]
    return Counter(tuple(mu) for mu in product(*ranges))


def _branch_so(w: HighestWeight) -> Counter:
    # Gelfand-Tsetlin interlacing for SO(n) -> SO(n-1)
    n, lam = w.n, w.coeffs
    if n == 2:
        return Counter({HighestWeight("SO", 1, ()): 1})
    out = Counter()
    if n % 2:
        # SO(2m+1) -> SO(2m): lam_1 >= mu_1 >= lam_2 >= ... >= lam_m >= |mu_m|
        m = n // 2
        ranges = [range(lam[i + 1], lam[i] + 1) for i in range(m - 1)]
        ranges.append(range(-lam[m - 1], lam[m - 1] + 1))
        for mu in product(*ranges):
            out[HighestWeight("SO", n - 1, mu)] += 1
    else:
        # SO(2m) -> SO(2m-1): lam_1 >= mu_1 >= ... >= mu_{m-1} >= |lam_m|
        m = n // 2
        ranges = [range(abs(lam[i + 1]), lam[i] + 1) for i in range(m - 1)]
        for mu in product(*ranges):
            out[HighestWeight("SO", n - 1, mu)] += 1
    return out


@dataclass(frozen=True)
class CommutativityVerdict:
    commutative: bool
    witness: dict | None = field(default=None)
    reason: str = ""

    def __post_init__(self):
        if self.commutative == (self.witness is not None):
            raise ConsistencyError("a witness is required exactly when the triple is not commutative")

    def as_dict(self) -> dict:
        out = {"commutative": self.commutative}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.reason:
            out["reason"] = self.reason
        return out


def _verdict_from_branching(parts: Counter, reason: str) -> CommutativityVerdict:
    repeated = sorted((str(k), v) for k, v in parts.items() if v > 1)
    if not repeated:
        return CommutativityVerdict(True, None, reason)
    rep, mult = repeated[0]
    return CommutativityVerdict(False, {"constituent": rep, "multiplicity": mult}, reason)


def _group_of(K) -> tuple[str, int]:
    if isinstance(K, dict):
        return str(K["group"]), int(K["n"])
    return str(K[0]), int(K[1])


def _tau_weight(group: str, n: int, tau) -> HighestWeight:
    if isinstance(tau, HighestWeight):
        if (tau.group, tau.n) != (group, n):
            raise UnsupportedTripleError(f"tau {tau} is not a representation of {group}({n})")
        return tau
    if tau == "trivial":
        return trivial_weight(group, n)
    if tau == "defining":
        return defining_weight(group, n)
    if isinstance(tau, dict):
        return _tau_weight(group, n, weight_from_json(tau))
    if isinstance(tau, (list, tuple)):
        return HighestWeight(group, n, tuple(tau))
    raise UnsupportedTripleError(f"cannot interpret tau = {tau!r}")


def check_triple_rn(K, tau) -> CommutativityVerdict:
    """Decide commutativity of (K x| R^d, K, tau) from the generic stabilizer.

    Supported: K = SO(n) on R^n with any tau (via interlacing branching to
    the stabilizer SO(n-1) of e_1), and K = SU(n) or U(n) on C^n = R^{2n}
    with any tau (stabilizer SU(n-1), resp. U(n-1)).
    """
    group, n = _group_of(K)
    if group == "SO":
        if n >= 2 and tau == "defining":
            # for n = 2 the real defining representation is two characters, so
            # it is routed here rather than through the weight (1,) = chi_1
            return _verdict_from_branching(branch_defining_so(n),
                                           f"restriction of C^{n} to the stabilizer SO({n - 1})")
        w = _tau_weight("SO", n, tau)
        if n == 1 or all(c == 0 for c in w.coeffs):
            return CommutativityVerdict(True, None, "one-dimensional tau")
        parts = _branch_so(w)
        return _verdict_from_branching(parts, f"restriction of {w} to the stabilizer SO({n - 1})")
    if group == "U":
        w = _tau_weight("U", n, tau)
        if n == 1:
            return CommutativityVerdict(True, None, "U(1) stabilizer is trivial on a line")
        parts = Counter(HighestWeight("U", n - 1, mu) for mu in branch_u_to_u(w.coeffs))
        return _verdict_from_branching(parts, f"restriction of {w} to U({n - 1})")
    if group == "SU":
        w = _tau_weight("SU", n, tau)
        if n == 1:
            return CommutativityVerdict(True, None, "SU(1) is trivial")
        lam = su_to_partition(w.coeffs)
        parts = Counter()
        for mu in branch_u_to_u(lam):
            # SU(n-1) only sees differences of consecutive entries
            parts[HighestWeight("SU", n - 1, partition_to_su(mu))] += 1
        verdict = _verdict_from_branching(parts, f"restriction of {w} to SU({n - 1})")
        if n >= 2 and verdict.commutative != is_singular(w):
            raise ConsistencyError(f"branching and singularity disagree for {w}")
        return verdict
    raise UnsupportedTripleError(f"no decider for K = {group}({n}) acting on R^n")


def check_triple_heisenberg(K, tau, m_max: int | None = None) -> CommutativityVerdict:
    """Decide commutativity of (K x| H_n, K, tau) for K = U(n) or SU(n)."""
    group, n = _group_of(K)
    if group == "U":
        _tau_weight("U", n, tau)
        return CommutativityVerdict(True, None, "U(n) on the Heisenberg group: every tau")
    if group != "SU":
        raise UnsupportedTripleError(f"no Heisenberg decider for K = {group}({n})")
    w = _tau_weight("SU", n, tau)
    if n == 1:
        return CommutativityVerdict(True, None, "SU(1) is trivial")
    cert = sigma_tensor_multiplicity_free(w, m_max)
    # the conjugate grading sees tau through the reversed labels
    dual = HighestWeight("SU", n, tuple(reversed(w.coeffs)))
    cert_dual = sigma_tensor_multiplicity_free(dual, m_max)
    if cert.multiplicity_free and cert_dual.multiplicity_free:
        return CommutativityVerdict(True, None, f"{w} is singular")
    wit = cert.witness or cert_dual.witness
    side = "holomorphic" if cert.witness else "antiholomorphic"
    return CommutativityVerdict(False, {"grading": side, **wit}, f"{w} is regular")
