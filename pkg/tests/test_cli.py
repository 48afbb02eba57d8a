import csv
import io
import json

import numpy as np
import pytest

from commtriples.cli import EXIT_FAIL, EXIT_OK, EXIT_UNSUPPORTED, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCheckTriple:
    @pytest.mark.parametrize("spec,commutative", [
        ({"H": "Rn", "K": {"group": "SO", "n": 3}, "tau": "defining"}, True),
        ({"H": "Rn", "K": {"group": "SO", "n": 2}, "tau": "defining"}, False),
        ({"H": "heisenberg", "K": {"group": "U", "n": 2}, "tau": [1, 0]}, True),
        ({"H": "heisenberg", "K": {"group": "SU", "n": 3}, "tau": {"group": "SU", "n": 3, "coeffs": [1, 0]}}, True),
        ({"H": "heisenberg", "K": {"group": "SU", "n": 3}, "tau": [1, 1]}, False),
    ])
    def test_verdicts(self, capsys, spec, commutative):
        code, out, _ = run(capsys, "check-triple", "--input", json.dumps(spec))
        verdict = json.loads(out)
        assert code == EXIT_OK and verdict["commutative"] is commutative
        assert ("witness" in verdict) is (not commutative)

    def test_unsupported(self, capsys):
        spec = {"H": "heisenberg", "K": {"group": "SO", "n": 4}, "tau": "defining"}
        assert run(capsys, "check-triple", "--input", json.dumps(spec))[0] == EXIT_UNSUPPORTED

    @pytest.mark.parametrize("raw", ['{"H": "Rn"', '{"H": "Rn"}', "no-such-file.json",
                                     '{"H": "Rn", "K": {"group": "SU", "n": 3}, "tau": [1, -1]}'])
    def test_usage_errors(self, capsys, raw):
        assert run(capsys, "check-triple", "--input", raw)[0] == EXIT_USAGE

    def test_input_from_file(self, capsys, tmp_path):
        path = tmp_path / "triple.json"
        path.write_text(json.dumps({"H": "Rn", "K": {"group": "SO", "n": 5}, "tau": "defining"}))
        out_path = tmp_path / "verdict.json"
        code, out, _ = run(capsys, "check-triple", "--input", str(path), "--output", str(out_path))
        assert code == EXIT_OK and out == ""
        assert json.loads(out_path.read_text())["commutative"] is True

    def test_argparse_errors_exit_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--suite", "nonsense"])
        assert exc.value.code == 2


class TestEvalSpherical:
    def test_default_grid(self, capsys):
        code, out, _ = run(capsys, "eval-spherical", "--input", '{"n": 4, "s": 1, "j": 1}')
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == EXIT_OK and len(rows) == 31 * 16
        assert max(float(r["agreement"]) for r in rows) < 1e-10
        first = rows[0]
        assert float(first["r"]) == 0.0 and float(first["re"]) == 1.0

    def test_transposed_blocks_in_three_dimensions(self, capsys):
        code, out, _ = run(capsys, "eval-spherical", "--input",
                           '{"n": 3, "s": 1.5, "j": [2, 3], "r": [0.7], "direction": [1, 2, 2]}')
        rows = list(csv.DictReader(io.StringIO(out)))
        by_j = {j: np.array([complex(float(r["re"]), float(r["im"])) for r in rows if r["j"] == str(j)])
                for j in (2, 3)}
        # the two rotating blocks differ only in the sign of their skew part
        assert np.allclose(by_j[3].reshape(3, 3), by_j[2].reshape(3, 3).T, atol=1e-15)

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "eval-spherical", "--format", "json", "--input",
                           '{"n": 3, "s": 1, "j": "all", "r": [0.5]}')
        assert code == EXIT_OK and len(json.loads(out)) == 27

    def test_laguerre(self, capsys):
        code, out, _ = run(capsys, "eval-spherical", "--input",
                           '{"kind": "laguerre", "lam": 1, "m": 1, "points": [[0, 0, 0.5], [0.4, 0.3, 0]]}')
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == EXIT_OK and len(rows) == 2
        assert float(rows[0]["re_phi"]) == pytest.approx(np.cos(0.5), abs=1e-15)

    @pytest.mark.parametrize("raw", ['{"n": 4, "s": 1, "j": 3}', '{"n": 3, "s": 1, "direction": [1, 0]}',
                                     '{"kind": "other"}', '{"n": 3, "s": 1, "r": {"start": 1, "stop": 0, "step": 0.1}}'])
    def test_bad_labels(self, capsys, raw):
        assert run(capsys, "eval-spherical", "--input", raw)[0] == EXIT_USAGE

    def test_laguerre_beyond_truncation(self, capsys):
        raw = '{"kind": "laguerre", "lam": 2, "m": 0, "points": [[5, 0, 0]]}'
        assert run(capsys, "eval-spherical", "--input", raw)[0] == EXIT_UNSUPPORTED


class TestVerify:
    @pytest.mark.parametrize("suite", ["equivariance", "eigen", "algebra-commutativity", "heisenberg-functional-eq"])
    def test_suites_pass(self, capsys, suite):
        code, out, _ = run(capsys, "verify", "--suite", suite)
        summary = json.loads(out)
        assert code == EXIT_OK and summary["passed"]
        assert all(r["max_residual"] <= r["threshold"] for r in summary["reports"])

    @pytest.mark.parametrize("suite", ["equivariance", "eigen", "positive-type", "heisenberg-functional-eq"])
    def test_defects_fail(self, capsys, suite):
        code, out, _ = run(capsys, "verify", "--suite", suite, "--defect")
        assert code == EXIT_FAIL and not json.loads(out)["passed"]

    def test_seed_changes_draws(self, capsys):
        a = run(capsys, "verify", "--suite", "equivariance", "--seed", "1")[1]
        b = run(capsys, "verify", "--suite", "equivariance", "--seed", "2")[1]
        c = run(capsys, "verify", "--suite", "equivariance", "--seed", "1")[1]
        assert a == c and a != b

    def test_tolerance_override(self, capsys):
        code, out, _ = run(capsys, "verify", "--suite", "eigen", "--tol", "1e-30")
        assert code == EXIT_FAIL

    def test_small_n_rejected(self, capsys):
        assert run(capsys, "verify", "--suite", "eigen", "--n", "2")[0] == EXIT_USAGE


class TestSpectrum:
    def test_three_dimensional(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--input", '{"n": 3, "s": [1], "j": "all"}')
        data = json.loads(out)
        pts = [tuple(p["coordinates"]["re"]) for p in data["points"]]
        assert code == EXIT_OK and data["pairwise_distinct"]
        assert pts == [(-1.0, 0.0), (-1.0, -1.0), (-1.0, 1.0)]

    def test_empty_grid(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--input", '{"n": 4, "s": []}')
        assert code == EXIT_OK and json.loads(out)["points"] == []

    def test_bad_grid(self, capsys):
        assert run(capsys, "spectrum", "--input", '{"n": 4, "s": [1], "j": [5]}')[0] == EXIT_USAGE
