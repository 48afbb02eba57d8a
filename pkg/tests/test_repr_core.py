import itertools
import json
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from commtriples.repr_core import (
    CommutativityVerdict,
    ConsistencyError,
    HighestWeight,
    InvalidWeightError,
    UnsupportedTripleError,
    branch_defining_so,
    branch_u_to_u,
    check_triple_heisenberg,
    check_triple_rn,
    defining_weight,
    is_singular,
    partition_to_su,
    pieri_tensor,
    sigma_tensor_multiplicity_free,
    su_to_partition,
    sym_power_dim,
    trivial_weight,
    weight_from_json,
    weight_to_json,
    weyl_dim,
)
from oracles import decompose, gl_character, multiply, su_dim_bruteforce, sym_character

SMALL_SU = [(n, a) for n in (2, 3, 4) for a in itertools.product(range(3), repeat=n - 1)]


class TestWeights:
    def test_validation(self):
        with pytest.raises(InvalidWeightError):
            HighestWeight("SU", 3, (1,))
        with pytest.raises(InvalidWeightError):
            HighestWeight("SU", 3, (1, -1))
        with pytest.raises(InvalidWeightError):
            HighestWeight("U", 3, (0, 1, 2))
        with pytest.raises(InvalidWeightError):
            HighestWeight("SO", 5, (1, 2))
        with pytest.raises(InvalidWeightError):
            HighestWeight("SO", 4, (1, 2))
        with pytest.raises(InvalidWeightError):
            HighestWeight("Sp", 4, (1, 0))

    def test_even_orthogonal_allows_negative_last_entry(self):
        assert HighestWeight("SO", 4, (2, -2)).coeffs == (2, -2)

    def test_json_round_trip(self):
        w = HighestWeight("SU", 4, (1, 0, 2))
        assert weight_from_json(weight_to_json(w)) == w
        assert weight_from_json({"group": "U", "n": 2, "coeffs": [3, -1]}) == HighestWeight("U", 2, (3, -1))

    def test_malformed_json(self):
        with pytest.raises(InvalidWeightError):
            weight_from_json({"group": "SU", "coeffs": [1]})

    def test_partition_round_trip(self):
        assert su_to_partition((1, 0, 2)) == (3, 2, 2, 0)
        assert partition_to_su((3, 2, 2, 0)) == (1, 0, 2)

    def test_defining_and_trivial(self):
        assert defining_weight("SO", 5).coeffs == (1, 0)
        assert trivial_weight("SU", 3).coeffs == (0, 0)
        with pytest.raises(InvalidWeightError):
            defining_weight("SO", 1)


class TestDimensions:
    @pytest.mark.parametrize("n,a", SMALL_SU)
    def test_su_matches_tableaux(self, n, a):
        assert weyl_dim(HighestWeight("SU", n, a)) == su_dim_bruteforce(a)

    @pytest.mark.parametrize("w,dim", [
        (("SU", 3, (1, 1)), 8), (("SU", 3, (3, 0)), 10), (("SU", 4, (0, 1, 0)), 6),
        (("U", 3, (2, 1, 1)), 3), (("U", 2, (0, -3)), 4),
        (("SO", 3, (2,)), 5), (("SO", 5, (1, 0)), 5), (("SO", 5, (2, 0)), 14), (("SO", 5, (1, 1)), 10),
        (("SO", 4, (1, 1)), 3), (("SO", 4, (1, -1)), 3), (("SO", 4, (1, 0)), 4),
        (("SO", 6, (1, 0, 0)), 6), (("SO", 6, (1, 1, 1)), 10), (("SO", 7, (1, 1, 1)), 35),
        (("SO", 8, (1, 1, 0, 0)), 28), (("SO", 2, (5,)), 1),
    ])
    def test_known_dimensions(self, w, dim):
        assert weyl_dim(HighestWeight(*w)) == dim

    @given(st.integers(1, 6), st.integers(0, 8))
    def test_symmetric_power(self, n, m):
        assert sym_power_dim(n, m) == sum(sym_character(m, n).values())


class TestPieri:
    @pytest.mark.parametrize("n,a", SMALL_SU)
    @pytest.mark.parametrize("m", [0, 1, 2, 3])
    def test_against_character_product(self, n, a, m):
        lam = su_to_partition(a)
        expected = decompose(multiply(gl_character(lam, n), sym_character(m, n)), n)
        assert pieri_tensor(HighestWeight("SU", n, a), m) == expected

    @given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 3), min_size=n - 1, max_size=n - 1))),
           st.integers(0, 4))
    def test_dimension_is_conserved(self, na, m):
        n, a = na
        w = HighestWeight("SU", n, tuple(a))
        parts = pieri_tensor(w, m)
        total = sum(c * weyl_dim(HighestWeight("SU", n, b)) for b, c in parts.items())
        assert total == weyl_dim(w) * sym_power_dim(n, m)

    def test_rejects_other_groups(self):
        with pytest.raises(InvalidWeightError):
            pieri_tensor(HighestWeight("U", 2, (1, 0)), 1)


class TestMultiplicityFree:
    @pytest.mark.parametrize("n,a", [(n, a) for n in (2, 3, 4) for a in itertools.product(range(4), repeat=n - 1)])
    def test_singular_weights_are_multiplicity_free(self, n, a):
        w = HighestWeight("SU", n, a)
        cert = sigma_tensor_multiplicity_free(w, m_max=n + 2)
        assert cert.multiplicity_free == is_singular(w) == cert.closed_form

    def test_witness_is_genuine(self):
        w = HighestWeight("SU", 3, (1, 1))
        cert = sigma_tensor_multiplicity_free(w)
        wit = cert.witness
        assert not cert.multiplicity_free
        b = tuple(wit["b"])
        assert wit["first"]["m"] <= wit["second"]["m"]
        # the shared constituent really occurs in both degrees, or twice in one
        counts = [pieri_tensor(w, wit[k]["m"])[b] for k in ("first", "second")]
        assert all(c >= 1 for c in counts)
        if wit["first"]["m"] == wit["second"]["m"]:
            assert counts[0] >= 2

    def test_small_m_max_rejected(self):
        with pytest.raises(InvalidWeightError):
            sigma_tensor_multiplicity_free(HighestWeight("SU", 4, (0, 0, 0)), m_max=2)

    def test_singular_needs_su(self):
        with pytest.raises(InvalidWeightError):
            is_singular(HighestWeight("U", 2, (1, 0)))


class TestBranching:
    @pytest.mark.parametrize("n", [3, 4, 5, 8])
    def test_defining_restriction_dimension(self, n):
        parts = branch_defining_so(n)
        assert sum(c * weyl_dim(w) for w, c in parts.items()) == n

    def test_two_dimensional_defining(self):
        assert branch_defining_so(2) == Counter({HighestWeight("SO", 1, ()): 2})

    @pytest.mark.parametrize("lam", [(2, 1, 0), (3, 3, 1, 0), (1, 0), (4, 2, 2, -1)])
    def test_unitary_restriction_dimension(self, lam):
        parts = branch_u_to_u(lam)
        total = sum(weyl_dim(HighestWeight("U", len(lam) - 1, mu)) for mu in parts)
        assert total == weyl_dim(HighestWeight("U", len(lam), lam))
        assert set(parts.values()) == {1}


class TestDeciders:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_orthogonal_defining_is_commutative(self, n):
        v = check_triple_rn({"group": "SO", "n": n}, "defining")
        assert v.commutative and v.witness is None

    def test_orthogonal_plane_is_not_commutative(self):
        v = check_triple_rn(("SO", 2), "defining")
        assert not v.commutative
        assert v.witness == {"constituent": "SO(1)[]", "multiplicity": 2}

    @pytest.mark.parametrize("w", [(2,), (3,)])
    def test_orthogonal_three_space_any_tau(self, w):
        assert check_triple_rn(("SO", 3), list(w)).commutative

    @pytest.mark.parametrize("n,w", [(4, (1, 1)), (5, (1, 1)), (5, (2, 0)), (6, (1, 1, 0)), (7, (2, 1, 0))])
    def test_orthogonal_interlacing_is_multiplicity_free(self, n, w):
        assert check_triple_rn(("SO", n), list(w)).commutative

    def test_trivial_tau(self):
        assert check_triple_rn(("SU", 3), "trivial").commutative
        assert check_triple_rn(("SO", 7), "trivial").commutative

    @pytest.mark.parametrize("n,a", SMALL_SU)
    def test_unitary_special_on_complex_space(self, n, a):
        v = check_triple_rn(("SU", n), list(a))
        assert v.commutative == is_singular(HighestWeight("SU", n, a))
        assert (v.witness is None) == v.commutative

    def test_full_unitary_is_commutative(self):
        assert check_triple_rn(("U", 3), [3, 1, 0]).commutative

    def test_heisenberg_unitary_always(self):
        assert check_triple_heisenberg(("U", 3), [2, 1, 0]).commutative

    @pytest.mark.parametrize("n,a", SMALL_SU)
    def test_heisenberg_special_unitary(self, n, a):
        v = check_triple_heisenberg(("SU", n), list(a))
        assert v.commutative == is_singular(HighestWeight("SU", n, a))
        if not v.commutative:
            assert v.witness["grading"] in ("holomorphic", "antiholomorphic")

    def test_heisenberg_regular_adjoint(self):
        v = check_triple_heisenberg({"group": "SU", "n": 3}, {"group": "SU", "n": 3, "coeffs": [1, 1]})
        assert not v.commutative and "b" in v.witness

    def test_unsupported(self):
        with pytest.raises(UnsupportedTripleError):
            check_triple_heisenberg(("SO", 4), "defining")
        with pytest.raises(UnsupportedTripleError):
            check_triple_rn(("Sp", 2), "defining")
        with pytest.raises(UnsupportedTripleError):
            check_triple_rn(("SU", 3), HighestWeight("SU", 4, (1, 0, 0)))
        with pytest.raises(UnsupportedTripleError):
            check_triple_rn(("SU", 3), 3.5)

    def test_verdict_consistency(self):
        with pytest.raises(ConsistencyError):
            CommutativityVerdict(True, {"x": 1})
        with pytest.raises(ConsistencyError):
            CommutativityVerdict(False, None)

    def test_verdict_json(self):
        v = check_triple_rn(("SO", 2), "defining")
        assert json.loads(json.dumps(v.as_dict()))["commutative"] is False
