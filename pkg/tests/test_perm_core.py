import collections
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import brute_perms, perm_pairs, perms
from permtypical.perm_core import (
    CycleType,
    Permutation,
    all_cycle_types,
    all_permutations,
    apply,
    apply_inverse,
    compose,
    conjugate,
    cycle_decompose,
    cycle_type,
    fixed_points,
    format_cycles,
    format_image,
    from_cycles,
    identity,
    inverse,
    is_derangement,
    parse_cycles,
    parse_image,
    random_permutation,
    random_with_cycle_type,
    same_cycle_type,
    standard_from_lengths,
    standard_permutation,
)


def orbit_lengths(image):
    """Independent cycle-length oracle: follow orbits on a 0-indexed list."""
    n = len(image)
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        length, j = 0, s
        while not seen[j]:
            seen[j] = True
            j = image[j] - 1
            length += 1
        out.append(length)
    return out


class TestConstruction:
    def test_identity_image(self):
        assert identity(3).image == (1, 2, 3)

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation((1, 1, 2))
        with pytest.raises(ValueError):
            Permutation((0, 1, 2))

    def test_from_cycles_forward_reading(self):
        p = from_cycles(5, [(1, 2, 5), (3, 4)])
        assert [p(i) for i in (1, 2, 5, 3, 4)] == [2, 5, 1, 4, 3]

    def test_from_cycles_rejects_overlap(self):
        with pytest.raises(ValueError):
            from_cycles(4, [(1, 2), (2, 3)])

    def test_as_array_zero_based(self):
        assert from_cycles(3, [(1, 2)]).as_array().tolist() == [1, 0, 2]


class TestAlgebra:
    def test_compose_by_hand(self):
        p, q = Permutation((2, 3, 1)), Permutation((2, 1, 3))
        assert compose(p, q).image == (3, 2, 1)

    def test_inverse_by_hand(self):
        assert inverse(Permutation((3, 1, 2))).image == (2, 3, 1)

    def test_inverse_identity(self):
        assert inverse(identity(6)) == identity(6)

    @given(perms())
    def test_identity_laws(self, p):
        e = identity(p.n)
        assert compose(e, p) == p
        assert compose(p, e) == p

    @given(perms())
    def test_inverse_law(self, p):
        assert compose(p, inverse(p)) == identity(p.n)
        assert compose(inverse(p), p) == identity(p.n)

    @given(perms(), perms(n=5), perms(n=5))
    def test_associative(self, _, a, b):
        c = compose(a, b)
        assert compose(compose(a, b), c) == compose(a, compose(b, c))

    @given(perm_pairs())
    def test_compose_pointwise(self, pq):
        p, q = pq
        r = compose(p, q)
        assert all(r(i) == p(q(i)) for i in range(1, p.n + 1))

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            compose(identity(3), identity(4))

    @given(perm_pairs())
    def test_conjugation_preserves_cycle_type(self, pq):
        p, s = pq
        assert cycle_type(conjugate(p, s)) == cycle_type(p)


class TestAction:
    @given(perms())
    def test_identity_action(self, p):
        y = list(range(10, 10 + p.n))
        assert apply(identity(p.n), y) == y
        assert apply_inverse(identity(p.n), y) == y

    @given(perm_pairs())
    def test_composition_is_contravariant(self, pq):
        p, q = pq
        y = [f"y{i}" for i in range(1, p.n + 1)]
        assert apply(compose(p, q), y) == apply(q, apply(p, y))

    @given(perms())
    def test_round_trip(self, p):
        y = list(range(p.n))
        assert apply_inverse(p, apply(p, y)) == y
        assert apply(p, apply_inverse(p, y)) == y

    def test_five_point_example(self):
        p = parse_cycles("(1 2 5)(3 4)")
        assert apply_inverse(p, [1, 2, 3, 4, 5]) == [5, 1, 4, 3, 2]

    def test_seven_point_standard_example(self):
        pi = standard_from_lengths([3, 2], 2)
        alpha = [f"a{i}" for i in range(1, 8)]
        assert apply(inverse(pi), alpha) == ["a3", "a1", "a2", "a5", "a4", "a6", "a7"]

    def test_apply_length_mismatch(self):
        with pytest.raises(ValueError):
            apply(identity(3), [1, 2])


class TestCycles:
    def test_example_image(self):
        cycles, ct = cycle_decompose(Permutation((5, 1, 4, 3, 2)))
        assert cycles == [(1, 5, 2), (3, 4)]
        assert (ct.m, ct.c, ct.lengths) == (0, 2, (2, 3))

    def test_identity_has_no_cycles(self):
        cycles, ct = cycle_decompose(identity(6))
        assert cycles == []
        assert (ct.m, ct.c, ct.lengths) == (6, 0, ())
        assert cycle_type(identity(5)) == CycleType(5, 5, ())

    def test_two_transpositions(self):
        cycles, ct = cycle_decompose(Permutation((2, 1, 4, 3)))
        assert cycles == [(1, 2), (3, 4)]
        assert ct == CycleType(4, 0, (2, 2))

    @given(perms(max_n=10))
    def test_matches_orbit_oracle(self, p):
        ct = cycle_type(p)
        lengths = orbit_lengths(p.image)
        assert ct.m == lengths.count(1)
        assert list(ct.lengths) == sorted(v for v in lengths if v > 1)
        assert ct.m + sum(ct.lengths) == p.n

    @given(perms(max_n=10))
    def test_cycles_reconstruct_permutation(self, p):
        cycles, _ = cycle_decompose(p)
        assert from_cycles(p.n, cycles) == p

    @given(perms())
    def test_inverse_keeps_type(self, p):
        assert cycle_type(inverse(p)) == cycle_type(p)
        assert same_cycle_type(p, inverse(p))

    def test_same_cycle_type_examples(self):
        assert same_cycle_type(parse_cycles("(1 2 3)"), parse_cycles("(1 3 2)"))
        assert not same_cycle_type(parse_cycles("(1 2)", 3), parse_cycles("(1 2 3)"))

    def test_cycle_type_validation(self):
        with pytest.raises(ValueError):
            CycleType(5, 1, (1, 3))
        with pytest.raises(ValueError):
            CycleType(5, 1, (2, 3))
        assert CycleType.of(2, [3, 2]).lengths == (2, 3)
        assert str(CycleType.of(0, [3, 2])) == "(0,2,[2, 3])"


class TestStandard:
    def test_example_ordering(self):
        p = standard_from_lengths([3, 2], 2)
        assert format_cycles(p, with_fixed=True) == "(1 2 3)(4 5)(6)(7)"
        assert fixed_points(p) == {6, 7}

    def test_sorted_representative(self):
        p = standard_permutation(CycleType.of(2, [3, 2]))
        assert format_cycles(p) == "(1 2)(3 4 5)"

    def test_all_fixed_is_identity(self):
        assert standard_permutation(CycleType(4, 4, ())) == identity(4)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_type_round_trip_exhaustive(self, n):
        for ct in all_cycle_types(n):
            assert cycle_type(standard_permutation(ct)) == ct

    @pytest.mark.parametrize("n", range(1, 7))
    def test_cycle_types_match_brute_force(self, n):
        seen = {cycle_type(p) for p in brute_perms(n)}
        assert seen == set(all_cycle_types(n))

    def test_class_sizes_sum_to_factorial(self):
        n = 6
        counts = collections.Counter(cycle_type(p) for p in all_permutations(n))
        for ct, size in counts.items():
            # |class| = n! / (m! prod_l l^{a_l} a_l!)
            mult = collections.Counter(ct.lengths)
            denom = math.factorial(ct.m)
            for length, a in mult.items():
                denom *= length**a * math.factorial(a)
            assert size == math.factorial(n) // denom
        assert sum(counts.values()) == math.factorial(n)


class TestFixedPoints:
    def test_examples(self):
        assert fixed_points(identity(4)) == {1, 2, 3, 4}
        assert not is_derangement(identity(4))
        assert fixed_points(Permutation((2, 1, 4, 3))) == frozenset()
        assert is_derangement(Permutation((2, 1, 4, 3)))
        assert fixed_points(Permutation((1, 3, 2))) == {1}
        assert not is_derangement(Permutation((1, 3, 2)))

    @given(perms())
    def test_fixed_count_matches_type(self, p):
        assert len(fixed_points(p)) == cycle_type(p).m
        assert is_derangement(p) == (cycle_type(p).m == 0)


class TestRandom:
    def test_random_with_cycle_type(self, rng):
        ct = CycleType.of(2, [3, 2, 2])
        for _ in range(50):
            assert cycle_type(random_with_cycle_type(ct, rng)) == ct

    def test_random_with_cycle_type_is_uniform_over_class(self):
        rng = np.random.default_rng(3)
        ct = CycleType.of(1, [3])
        draws = collections.Counter(random_with_cycle_type(ct, rng) for _ in range(8000))
        # the class of 3-cycles with one fixed point in S_4 has 8 members
        assert len(draws) == 8
        assert max(draws.values()) - min(draws.values()) < 250

    def test_random_permutation_seeded(self):
        a = random_permutation(9, np.random.default_rng(1))
        b = random_permutation(9, np.random.default_rng(1))
        assert a == b

    def test_all_permutations_count(self):
        assert len(list(all_permutations(5))) == 120


class TestText:
    def test_parse_image(self):
        assert parse_image("5 1 4 3 2") == Permutation((5, 1, 4, 3, 2))

    def test_parse_image_names_bad_token(self):
        with pytest.raises(ValueError, match="'x'"):
            parse_image("1 x 2")

    def test_parse_cycles_with_n(self):
        p = parse_cycles("(1 2)", n=4)
        assert p.image == (2, 1, 3, 4)

    def test_parse_cycles_bad_token(self):
        with pytest.raises(ValueError, match="'a'"):
            parse_cycles("(1 a)")
        with pytest.raises(ValueError):
            parse_cycles("(1 2) junk")

    def test_identity_format(self):
        assert format_cycles(identity(3)) == "()"

    @given(perms(max_n=12))
    def test_round_trips(self, p):
        assert parse_image(format_image(p)) == p
        assert parse_cycles(format_cycles(p), p.n) == p
        assert parse_cycles(format_cycles(p, with_fixed=True)) == p

    @given(st.integers(1, 6))
    def test_str_is_cycle_form(self, n):
        assert str(identity(n)) == "()"
