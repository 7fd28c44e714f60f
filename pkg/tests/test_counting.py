import collections
import itertools
import math

import pytest
from hypothesis import given, strategies as st

from conftest import brute_perms
from permtypical.counting import (
    CountBounds,
    bell_count_bounds,
    bell_count_table,
    bell_rate_target,
    count_fixed_point_perms,
    derangements,
    exact_bell_count,
    exact_kfold_derangements,
    fixed_point_count_bounds,
    kfold_bounds,
    log2_int,
    multinomial,
    normalized_log_bell_count,
    normalized_log_fixed_count,
    unrestricted_multiplier,
)
from permtypical.errors import InfeasibleEnumeration
from permtypical.partitions import (
    BellSignature,
    PermutationVector,
    bell_signature,
    signatures,
)
from permtypical.perm_core import fixed_points, identity


def brute_fixed_histogram(n):
    return collections.Counter(len(fixed_points(p)) for p in brute_perms(n))


def brute_kfold(n, k):
    """Tuples (pi_2..pi_k) pairwise disagreeing everywhere, with pi_1 = id."""
    ident = tuple(range(1, n + 1))
    images = list(itertools.permutations(range(1, n + 1)))
    total = 0
    for rest in itertools.product(images, repeat=k - 1):
        rows = (ident,) + rest
        if all(len({r[i] for r in rows}) == k for i in range(n)):
            total += 1
    return total


def brute_bell_histogram(n, k):
    ident = identity(n)
    hist = collections.Counter()
    for rest in itertools.product(brute_perms(n), repeat=k - 1):
        hist[bell_signature(PermutationVector((ident,) + rest)).counts] += 1
    return hist


def ln_fixed_count(n, m):
    """Independent log-count oracle: ln N_m = ln C(n, m) + ln !(n-m) with
    !j = j!/e up to an exponentially small correction."""
    j = n - m
    ln_der = 0.0 if j == 0 else math.lgamma(j + 1) - 1.0
    return math.lgamma(n + 1) - math.lgamma(m + 1) - math.lgamma(j + 1) + ln_der


class TestDerangements:
    def test_base_cases(self):
        assert derangements(0) == 1
        assert derangements(1) == 0

    @pytest.mark.parametrize("n", range(1, 8))
    def test_brute_force(self, n):
        assert derangements(n) == brute_fixed_histogram(n)[0]

    def test_small_values(self):
        assert derangements(4) == brute_fixed_histogram(4)[0] == 9
        assert derangements(5) == brute_fixed_histogram(5)[0] == 44

    @given(st.integers(1, 150))
    def test_nearest_integer_formula(self, n):
        # !n = round(n!/e), evaluated in exact rational arithmetic
        from fractions import Fraction

        inv_e = sum(Fraction((-1) ** j, math.factorial(j)) for j in range(n + 1))
        assert derangements(n) == math.factorial(n) * inv_e


class TestFixedPointCounts:
    @pytest.mark.parametrize("n", range(1, 8))
    def test_brute_force_all_m(self, n):
        hist = brute_fixed_histogram(n)
        for m in range(n + 1):
            assert count_fixed_point_perms(n, m) == hist.get(m, 0)
        assert sum(count_fixed_point_perms(n, m) for m in range(n + 1)) == math.factorial(n)

    def test_examples(self):
        assert count_fixed_point_perms(5, 2) == 20
        for n in range(2, 9):
            assert count_fixed_point_perms(n, n) == 1
            assert count_fixed_point_perms(n, n - 1) == 0

    def test_bound_examples(self):
        b = fixed_point_count_bounds(5, 2)
        assert (b.lower, b.exact, b.upper) == (20, 20, 125)
        b = fixed_point_count_bounds(4, 0)
        assert (b.lower, b.exact, b.upper) == (math.factorial(4) // 4, 9, 256)

    @pytest.mark.parametrize("n", range(1, 10))
    def test_sandwich(self, n):
        for m in range(n + 1):
            b = fixed_point_count_bounds(n, m)
            assert b.holds()
            if m < n - 1:
                assert b.lower * math.factorial(m) * (n - m) == math.factorial(n)
            elif m == n - 1:
                assert b.lower == b.exact == 0
            assert b.upper == n ** (n - m)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            count_fixed_point_perms(3, 4)


class TestNormalizedFixed:
    def test_all_fixed_is_zero(self):
        for n in (2, 10, 100):
            assert normalized_log_fixed_count(n, n) == 0.0

    def test_one_fewer_is_minus_inf(self):
        assert normalized_log_fixed_count(10, 9) == -math.inf

    @pytest.mark.parametrize("n,m", [(50, 25), (100, 50), (200, 100), (100, 0), (300, 7)])
    def test_against_lgamma_oracle(self, n, m):
        oracle = ln_fixed_count(n, m) / (n * math.log(n))
        assert normalized_log_fixed_count(n, m) == pytest.approx(oracle, rel=1e-9)

    def test_half_fixed_converges(self):
        err = {n: abs(normalized_log_fixed_count(n, n // 2) - 0.5) for n in (50, 100, 200)}
        assert err[200] < err[100] < err[50]
        assert err[200] <= 0.1

    def test_no_fixed_at_hundred(self):
        # the rate approaches 1 only like 1 - 1/ln n; at n = 100 it sits
        # near 0.788, which the log-gamma oracle confirms
        value = normalized_log_fixed_count(100, 0)
        oracle = (math.lgamma(101) - 1.0) / (100 * math.log(100))
        assert value == pytest.approx(oracle, abs=1e-9)
        assert 0.78 < value < 0.80

    def test_log2_int_large(self):
        x = math.factorial(2000)
        assert log2_int(x) == pytest.approx(math.lgamma(2001) / math.log(2), rel=1e-12)
        assert log2_int(0) == -math.inf
        with pytest.raises(ValueError):
            log2_int(-1)


class TestKfold:
    @pytest.mark.parametrize("n", range(1, 7))
    def test_two_fold_is_derangement(self, n):
        assert exact_kfold_derangements(n, 2) == derangements(n)

    def test_examples(self):
        assert exact_kfold_derangements(3, 3) == brute_kfold(3, 3) == 2
        assert exact_kfold_derangements(1, 2) == 0

    @pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 6) for k in (1, 2, 3) if k <= n])
    def test_sandwich_against_brute_force(self, n, k):
        b = kfold_bounds(n, k)
        assert b.exact == brute_kfold(n, k)
        assert b.holds()
        assert b.lower == math.factorial(n - k + 1) ** (k - 1)
        assert b.upper == derangements(n) ** (k - 1)

    def test_bound_examples(self):
        b = kfold_bounds(3, 3)
        assert (b.lower, b.exact, b.upper) == (1, 2, 4)
        b = kfold_bounds(4, 2)
        assert (b.lower, b.exact, b.upper) == (6, 9, 9)

    def test_four_fold_small(self):
        assert exact_kfold_derangements(4, 4) == brute_kfold(4, 4)

    def test_guard(self):
        with pytest.raises(InfeasibleEnumeration):
            exact_kfold_derangements(12, 3)
        b = kfold_bounds(12, 3)
        assert b.exact is None and b.lower <= b.upper

    def test_k_above_n(self):
        assert exact_kfold_derangements(2, 3) == 0
        with pytest.raises(ValueError):
            kfold_bounds(2, 3)


class TestBellCounts:
    @pytest.mark.parametrize("n,k", [(1, 2), (3, 2), (4, 2), (2, 3), (3, 3)])
    def test_table_matches_brute_force(self, n, k):
        assert bell_count_table(n, k) == dict(brute_bell_histogram(n, k))

    def test_examples(self):
        assert exact_bell_count(4, 2, BellSignature.of(2, (4, 0))) == derangements(4) == 9
        assert exact_bell_count(4, 2, BellSignature.of(2, (0, 4))) == 1
        assert exact_bell_count(3, 3, BellSignature.of(3, (3, 0, 0, 0, 0))) == exact_kfold_derangements(3, 3)

    def test_bound_examples(self):
        b = bell_count_bounds(4, 2, BellSignature.of(2, (4, 0)))
        assert (b.lower, b.exact, b.upper) == (9, 9, 256)
        b = bell_count_bounds(4, 2, BellSignature.of(2, (0, 4)))
        assert (b.lower, b.exact, b.upper) == (1, 1, 1)

    @pytest.mark.parametrize("n", range(1, 5))
    def test_sandwich_all_signatures(self, n):
        total = 0
        for sig in signatures(n, 3):
            b = bell_count_bounds(n, 3, sig)
            assert b.holds(), (sig, b)
            total += b.exact
        assert total == math.factorial(n) ** 2

    @pytest.mark.parametrize("n", range(1, 6))
    def test_pair_table_is_fixed_point_histogram(self, n):
        table = bell_count_table(n, 2)
        for m in range(n + 1):
            assert table.get((n - m, m), 0) == count_fixed_point_perms(n, m)

    def test_single_sequence(self):
        assert bell_count_table(5, 1) == {(5,): 1}

    def test_guard(self):
        with pytest.raises(InfeasibleEnumeration):
            bell_count_table(9, 3)

    def test_unrestricted_multiplier(self):
        n = 3
        full = collections.Counter()
        for vec in itertools.product(brute_perms(n), repeat=2):
            full[bell_signature(PermutationVector(vec)).counts] += 1
        for counts, c in bell_count_table(n, 2).items():
            assert full[counts] == c * unrestricted_multiplier(n)

    def test_multinomial(self):
        assert multinomial(4, (2, 1, 1)) == 12
        with pytest.raises(ValueError):
            multinomial(4, (2, 1))


class TestBellRates:
    def test_pair_limits(self):
        assert bell_rate_target(2, [1.0, 0.0]) == 1.0
        assert bell_rate_target(2, [0.0, 1.0]) == 0.0

    def test_unique_vector_rate_is_zero(self):
        r = normalized_log_bell_count(6, 2, BellSignature.of(2, (0, 6)))
        assert (r.lower, r.exact, r.upper) == (0.0, 0.0, 0.0)

    def test_half_split_brackets_target(self):
        n = 100
        sig = BellSignature.of(2, (50, 50))
        r = normalized_log_bell_count(n, 2, sig)
        target = bell_rate_target(2, sig.weights())
        assert target == 0.5
        assert r.exact is None
        assert r.lower - 0.15 <= target <= r.upper + 0.15
        # oracle: lower = C(100,50) * !50, upper = C(100,50) * 100^50
        lower_oracle = (math.lgamma(101) - 2 * math.lgamma(51) + math.lgamma(51) - 1) / (n * math.log(n))
        upper_oracle = (math.lgamma(101) - 2 * math.lgamma(51) + 50 * math.log(n)) / (n * math.log(n))
        assert r.lower == pytest.approx(lower_oracle, rel=1e-9)
        assert r.upper == pytest.approx(upper_oracle, rel=1e-9)

    def test_rates_bracket_exact(self):
        for sig in signatures(4, 3):
            r = normalized_log_bell_count(4, 3, sig)
            if r.exact is not None and r.exact != -math.inf:
                assert r.lower <= r.exact <= r.upper


class TestCountBounds:
    def test_to_dict(self):
        d = CountBounds(lower=1, exact=2, upper=4).to_dict()
        assert d["lower"] == 1 and d["exact"] == 2 and d["upper"] == 4
        assert d["log10_upper"] == pytest.approx(math.log10(4))
        assert "exact" not in CountBounds(lower=1, upper=4).to_dict()

    def test_huge_log10(self):
        b = fixed_point_count_bounds(3000, 0)
        assert b.log10_upper == pytest.approx(3000 * math.log10(3000), rel=1e-12)
