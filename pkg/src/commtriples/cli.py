"""Command-line interface: deciders, evaluators, verification suites and spectra.

Exit codes: 0 success, 1 a verification failed, 2 usage error,
3 unsupported mathematical input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import diffops, heisenberg, repr_core, spherical_rn, verifiers
from .group_geometry import HaarSampler, circle_quadrature, haar_samples, so3_quadrature
from .numerics import ContractViolation

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNSUPPORTED = 0, 1, 2, 3
DEFAULT_SEED = 20240601
SUITES = ("equivariance", "functional-eq", "eigen", "positive-type", "algebra-commutativity",
          "heisenberg-functional-eq")


class UsageError(Exception):
    pass


def _g(v) -> str:
    return format(float(v), ".17g")


def _load_input(raw: str | None):
    if raw is None:
        raise UsageError("--input is required")
    text = raw
    if not raw.lstrip().startswith(("{", "[")):
        path = Path(raw)
        if not path.exists():
            raise UsageError(f"input {raw!r} is neither JSON nor an existing file")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON input: {exc}") from exc


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


# ---------------------------------------------------------------- check-triple

def cmd_check_triple(args) -> int:
    spec = _load_input(args.input)
    if not isinstance(spec, dict) or not {"H", "K", "tau"} <= set(spec):
        raise UsageError('triple spec needs keys "H", "K" and "tau"')
    H = spec["H"]
    try:
        if H == "Rn":
            verdict = repr_core.check_triple_rn(spec["K"], spec["tau"])
        elif H == "heisenberg":
            verdict = repr_core.check_triple_heisenberg(spec["K"], spec["tau"], spec.get("m_max"))
        else:
            raise repr_core.UnsupportedTripleError(f"unknown H = {H!r}; use \"Rn\" or \"heisenberg\"")
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed triple spec: {exc}") from exc
    _emit(args, _dump(verdict.as_dict()))
    return EXIT_OK


# -------------------------------------------------------------- eval-spherical

def _grid(spec) -> list[float]:
    if isinstance(spec, list):
        return [float(v) for v in spec]
    if isinstance(spec, dict):
        start, stop, step = float(spec["start"]), float(spec["stop"]), float(spec["step"])
        if step <= 0 or stop < start:
            raise UsageError("grid needs start <= stop and step > 0")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    raise UsageError("grid must be a list or {start, stop, step}")


def _bessel_rows(spec):
    n, s = int(spec["n"]), float(spec["s"])
    js = spec.get("j", 1)
    js = list(range(1, len(spherical_rn.block_dims(n)) + 1)) if js == "all" else (
        [int(js)] if not isinstance(js, list) else [int(j) for j in js])
    direction = np.asarray(spec.get("direction", [1.0] + [0.0] * (n - 1)), dtype=float)
    if direction.shape != (n,) or np.linalg.norm(direction) == 0:
        raise UsageError("direction must be a nonzero vector of length n")
    direction = direction / np.linalg.norm(direction)
    radii = _grid(spec.get("r", {"start": 0.0, "stop": 3.0, "step": 0.1}))
    header = ["n", "s", "j", "r", "entry_row", "entry_col", "re", "im",
              "re_quadrature", "im_quadrature", "agreement"]
    rows = []
    for j in js:
        label = spherical_rn.BesselLabel(n, s, j)
        for r in radii:
            x = r * direction
            closed = spherical_rn.phi_closed_form(label, x)
            quad = spherical_rn.phi_quadrature(label, x)
            agree = float(np.max(np.abs(closed - quad)))
            for a in range(n):
                for b in range(n):
                    c, q = closed[a, b], quad[a, b]
                    rows.append([n, _g(s), j, _g(r), a + 1, b + 1, _g(c.real), _g(c.imag),
                                 _g(q.real), _g(q.imag), _g(agree)])
    return header, rows


def _laguerre_rows(spec, trunc_N):
    lam, m = float(spec["lam"]), int(spec["m"])
    label = heisenberg.LaguerreLabel(lam, m)
    pts = spec.get("points")
    if pts is None:
        pts = [[r, 0.0, 0.0] for r in _grid(spec.get("r", {"start": 0.0, "stop": 3.0, "step": 0.1}))]
    text = heisenberg.laguerre_csv([label], [(complex(p[0], p[1]), p[2]) for p in pts], trunc_N)
    reader = list(csv.reader(io.StringIO(text)))
    return reader[0], reader[1:]


def cmd_eval_spherical(args) -> int:
    spec = _load_input(args.input)
    try:
        kind = spec.get("kind", "bessel")
        if kind == "bessel":
            header, rows = _bessel_rows(spec)
        elif kind == "laguerre":
            header, rows = _laguerre_rows(spec, args.trunc_N)
        else:
            raise UsageError(f"unknown label kind {kind!r}")
    except (KeyError, TypeError, ContractViolation) as exc:
        raise UsageError(f"label/grid mismatch: {exc}") from exc
    if args.format == "json":
        records = [dict(zip(header, row)) for row in rows]
        _emit(args, _dump(records))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        _emit(args, buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------- verify

def _labels(n: int, svals):
    dims = spherical_rn.block_dims(n)
    return [spherical_rn.BesselLabel(n, s, j) for s in svals for j in range(1, len(dims) + 1)]


def _suite_equivariance(args, rng, defect):
    reports = []
    ks = haar_samples(args.n, 50, seed=args.seed)
    pts = rng.normal(size=(10, args.n))
    for label in _labels(args.n, (0.5, 1.0, 3.0)):
        F = spherical_rn.SphericalFunction(label)
        if defect:
            F = (lambda f: (lambda x: f(x) + np.asarray(x)[..., 0, None, None] * np.eye(args.n)))(F)
        reports.append(verifiers.check_equivariance(
            F, lambda k: k, ks, pts, tol=args.tol or 1e-9, name=f"equivariance:{_tag(label)}",
            seed=args.seed))
    return reports


def _tag(label) -> str:
    if isinstance(label, spherical_rn.BesselLabel):
        return f"n={label.n},s={label.s:g},j={label.j}"
    if isinstance(label, spherical_rn.TrivialLabel):
        return f"n={label.n},s={label.s:g},tau=trivial"
    return f"lam={label.lam:g},m={label.m}"


def _suite_functional_eq(args, rng, defect):
    n = args.n
    reports = []
    if n == 3:
        rule, tol = so3_quadrature(args.quad_order), args.tol or 1e-6
    else:
        rule, tol = None, args.tol or 1e-3
    labels = _labels(n, (1.0, 2.0)) + [spherical_rn.TrivialLabel(n, 1.0)]
    for label in labels:
        pairs = [(rng.normal(size=n), rng.normal(size=n)) for _ in range(10)]
        F = spherical_rn.SphericalFunction(label)
        if defect:
            F = (lambda f, d: (lambda x: f(x) + 0.05 * np.eye(d)))(F, F.dim)
        tau = "trivial" if isinstance(label, spherical_rn.TrivialLabel) else "defining"
        r = rule if rule is not None else HaarSampler(n, args.seed)
        reports.append(verifiers.check_functional_equation_rn(
            F, pairs, r, tol=tol, tau=tau, seed=args.seed, mc_samples=args.mc_samples,
            bandwidth=label.s, name=f"functional-eq:{_tag(label)}"))
    return reports


def _suite_eigen(args, rng, defect):
    n = args.n
    reports = []
    pts = rng.normal(size=(5, n))
    for label in _labels(n, (1.0,)):
        point = spherical_rn.spectrum_embed(label)
        F = spherical_rn.SphericalFunction(label)
        for op, lam in zip(diffops.default_generators(n), point.coordinates):
            expected = 2.0 * lam if defect else lam
            reports.append(verifiers.check_eigenfunction(
                F, op, expected, pts, tol=args.tol or 1e-5, name=f"eigen:{op.name}:{_tag(label)}"))
    return reports


def _suite_positive_type(args, rng, defect):
    n = args.n
    reports = []
    for label in _labels(n, (0.5, 1.0, 3.0)):
        F = spherical_rn.SphericalFunction(label)
        if defect:
            flip = np.diag([1.0] + [-1.0] * (n - 1))
            F = (lambda f: (lambda x: flip if not np.any(x) else f(x)))(F)
        sets = [rng.normal(size=(6, n)) for _ in range(30)]
        vecs = [rng.normal(size=(6, n)) + 1j * rng.normal(size=(6, n)) for _ in range(30)]
        reports.append(verifiers.check_positive_type(
            F, sets, vecs, tol=args.tol or 1e-9, name=f"positive-type:{_tag(label)}", seed=args.seed))
    for lam, m in ((1.0, 0), (1.0, 1), (2.0, 2), (-1.0, 1)):
        label = heisenberg.LaguerreLabel(lam, m)
        F = heisenberg.LaguerreSpherical(label, args.trunc_N)
        if defect:
            F = (lambda f: (lambda p: np.array([[-1.0 + 0j]]) if p == heisenberg.HEIS_IDENTITY else f(p)))(F)
        # differences of points must stay inside the range resolved by the truncation
        sets = [[heisenberg.HeisenbergPoint(complex(*(0.5 * rng.normal(size=2))), float(rng.normal()))
                 for _ in range(6)] for _ in range(10)]
        reports.append(verifiers.check_positive_type(
            F, sets, None, tol=args.tol or 1e-9, mul=heisenberg.heis_mul, inv=heisenberg.heis_inv,
            identity=heisenberg.HEIS_IDENTITY, name=f"positive-type:heisenberg:{_tag(label)}",
            seed=args.seed))
    return reports


def _suite_algebra(args, rng, defect):
    if defect:
        raise UsageError("algebra-commutativity has no defect fixture")
    n = args.n
    ops = diffops.default_generators(n)
    rep = diffops.algebra_commutativity_probe(ops, trials=5, seed=args.seed,
                                              threshold=args.tol or 1e-4)
    out = [verifiers.CheckReport("algebra-commutativity:" + ",".join(o.name for o in ops),
                                 rep.max_residual, rep.threshold, samples=5,
                                 metadata={"seed": args.seed, "rule": f"central-differences:h={diffops.PROBE_STEP:g}"})]
    if n == 3:
        # grad div = Laplacian + curl curl (symbol identity x x^T = |x|^2 I + I31(x)^2)
        worst = 0.0
        for _ in range(5):
            F = diffops.random_smooth_field(3, rng)
            x = rng.uniform(-1, 1, 3)
            lhs = diffops.apply_operator(diffops.grad_div(3), F, x)
            rhs = diffops.apply_operator(diffops.laplacian(3), F, x) + diffops.compose_apply(
                [diffops.curl(), diffops.curl()], F, x)
            worst = max(worst, verifiers.opnorm(lhs - rhs))
        out.append(verifiers.CheckReport("operator-identity:grad_div=laplacian+curl_curl", worst,
                                         args.tol or 1e-5, samples=5,
                                         metadata={"seed": args.seed, "rule": "central-differences:h=0.001"}))
    return out


def _suite_heisenberg(args, rng, defect):
    reports = []
    rule = circle_quadrature(64)
    for lam in (1.0, 2.0):
        for m in (0, 1, 2):
            label = heisenberg.LaguerreLabel(lam, m)
            coarse = heisenberg.LaguerreSpherical(label, args.trunc_N)
            fine = heisenberg.LaguerreSpherical(label, args.trunc_N + 8)
            phi = (lambda f: (lambda p: f(p)[0, 0] + 0.01))(coarse) if defect else (lambda p, f=coarse: f(p)[0, 0])
            worst, drift = 0.0, 0.0
            for _ in range(10):
                p = (complex(*(0.5 * rng.normal(size=2))), float(rng.normal()))
                q = (complex(*(0.5 * rng.normal(size=2))), float(rng.normal()))
                worst = max(worst, heisenberg.verify_heis_functional_equation(phi, p, q, rule))
                drift = max(drift, abs(coarse(p)[0, 0] - fine(p)[0, 0]), abs(coarse(q)[0, 0] - fine(q)[0, 0]))
            reports.append(verifiers.CheckReport(
                f"heisenberg-functional-eq:{_tag(label)}", worst, args.tol or 1e-6, samples=10,
                metadata={"seed": args.seed, "rule": "circle:64", "truncation_drift": drift,
                          "truncation_stable": drift <= 1e-10}))
    return reports


_SUITE_FUNCS = {
    "equivariance": _suite_equivariance,
    "functional-eq": _suite_functional_eq,
    "eigen": _suite_eigen,
    "positive-type": _suite_positive_type,
    "algebra-commutativity": _suite_algebra,
    "heisenberg-functional-eq": _suite_heisenberg,
}


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    if args.n < 3:
        raise UsageError("--n must be >= 3")
    reports = []
    for name in names:
        # one generator per suite keeps each suite's draws independent of the others
        rng = np.random.default_rng([args.seed, SUITES.index(name)])
        if args.defect and name == "algebra-commutativity" and args.suite == "all":
            continue
        reports.extend(_SUITE_FUNCS[name](args, rng, args.defect))
    passed = all(r.passed for r in reports)
    summary = {"suite": args.suite, "n": args.n, "seed": args.seed, "passed": passed,
               "reports": [r.as_dict() for r in reports]}
    _emit(args, _dump(summary))
    return EXIT_OK if passed else EXIT_FAIL


# -------------------------------------------------------------------- spectrum

def cmd_spectrum(args) -> int:
    spec = _load_input(args.input)
    try:
        n = int(spec["n"])
        svals = [float(s) for s in spec.get("s", [])]
        js = spec.get("j", "all")
        labels = []
        for s in svals:
            allowed = range(1, len(spherical_rn.block_dims(n)) + 1) if s > 0 else (1,)
            for j in (allowed if js == "all" else [int(j) for j in js]):
                labels.append(spherical_rn.BesselLabel(n, s, j))
    except (KeyError, TypeError, ValueError, ContractViolation) as exc:
        raise UsageError(f"bad spectrum grid: {exc}") from exc
    report = spherical_rn.spectrum_injectivity_scan(labels)
    out = {"n": n, "pairwise_distinct": report.injective,
           "points": [p.as_dict() for p in report.points],
           "collisions": report.as_dict()["collisions"]}
    _emit(args, _dump(out))
    return EXIT_OK


# ---------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="inline JSON or a path to a JSON file")
    common.add_argument("--output", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"random seed (default {DEFAULT_SEED})")
    common.add_argument("--tol", type=float, default=None, help="override the suite threshold")
    common.add_argument("--quad-order", type=int, default=24, help="SO(3) Euler-angle rule order")
    common.add_argument("--mc-samples", type=int, default=200_000, help="Haar samples for SO(n), n >= 4")
    common.add_argument("--trunc-N", type=int, default=heisenberg.DEFAULT_TRUNCATION,
                        help="Fock-space truncation degree")

    parser = argparse.ArgumentParser(
        prog="commtriples",
        description="Commutative triples (K x| H, K, tau) for H = R^n and the Heisenberg group: "
                    "decide commutativity, evaluate spherical functions, verify their properties.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "check-triple", parents=[common],
        help="decide whether a triple is commutative",
        description="Decide commutativity. Over R^n the triple is commutative iff the stabilizer "
                    "of a generic point acts on V_tau without multiplicity; over the Heisenberg "
                    "group iff the polynomial Fock spaces tensored with tau are multiplicity free "
                    "under K (for SU(n): iff tau is singular). Input: "
                    '{"H": "Rn"|"heisenberg", "K": {"group": "SO", "n": 3}, "tau": "defining"}.')
    p.set_defaults(func=cmd_check_triple)

    p = sub.add_parser(
        "eval-spherical", parents=[common],
        help="tabulate a spherical function on a grid",
        description="Tabulate the Bessel-type spherical functions Phi_{s,j} of (SO(n) x| R^n, "
                    "SO(n), C^n) along a ray, by closed form and by sphere cubature with their "
                    "difference, or the Laguerre-type functions on the Heisenberg group. Input: "
                    '{"n": 4, "s": 1, "j": 1|"all", "r": {"start": 0, "stop": 3, "step": 0.1}} or '
                    '{"kind": "laguerre", "lam": 1, "m": 0, "points": [[re_z, im_z, t], ...]}.')
    p.set_defaults(func=cmd_eval_spherical, format="csv")

    p = sub.add_parser(
        "verify", parents=[common],
        help="run a verification suite",
        description="Check the defining properties of spherical functions: K-equivariance, the "
                    "functional equation d_tau int tau(k^-1) Phi(x k y) chi_tau(k) dk = "
                    "Phi(y) Phi(x), joint eigenfunction equations for the invariant operators, "
                    "positive type, commutativity of the operator algebra, and the functional "
                    "equation on the Heisenberg group. Exit 0 iff every check passes.")
    p.add_argument("--suite", required=True, choices=SUITES + ("all",))
    p.add_argument("--n", type=int, default=3, help="dimension of R^n (default 3)")
    p.add_argument("--defect", action="store_true",
                   help="inject a known defect (negative control); the suite must then fail")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser(
        "spectrum", parents=[common],
        help="eigenvalue embedding of spherical functions",
        description="Map each Phi_{s,j} to its eigenvalues under the generating invariant "
                    "operators (Laplacian and curl for n = 3, Laplacian and grad div for n > 3) "
                    "and report whether the map is injective on the grid. Input: "
                    '{"n": 4, "s": [1, 2], "j": "all"}.')
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (repr_core.UnsupportedTripleError, heisenberg.TruncationError) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (repr_core.InvalidWeightError, ContractViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
