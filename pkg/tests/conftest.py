import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from permtypical.perm_core import Permutation

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def perms(draw, min_n=1, max_n=8, n=None):
    size = n if n is not None else draw(st.integers(min_n, max_n))
    return Permutation(tuple(draw(st.permutations(range(1, size + 1)))))


@st.composite
def perm_pairs(draw, min_n=1, max_n=8):
    size = draw(st.integers(min_n, max_n))
    return draw(perms(n=size)), draw(perms(n=size))


def brute_perms(n):
    """Every permutation of [1, n] straight from itertools."""
    return [Permutation(t) for t in itertools.permutations(range(1, n + 1))]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def brute_typicality_prob(d, pv, n, eps):
    """Sum over every outcome of n i.i.d. columns, each coordinate permuted
    by ``z[i] = x[pi(i)]``, of the outcome weight when all cell frequencies
    are within eps (exact rationals, closed inequality)."""
    cells = list(np.ndindex(d.probs.shape))
    target = {c: Fraction(repr(float(d.probs[c]))) for c in cells}
    e = Fraction(repr(float(eps)))
    total = 0.0
    for outcome in itertools.product(range(len(cells)), repeat=n):
        weight = 1.0
        for c in outcome:
            weight *= float(d.probs[cells[c]])
        if weight == 0.0:
            continue
        rows = [[cells[c][ell] for c in outcome] for ell in range(d.k)]
        permuted = [[row[p(i) - 1] for i in range(1, n + 1)] for row, p in zip(rows, pv)]
        counts = dict.fromkeys(cells, 0)
        for i in range(n):
            counts[tuple(r[i] for r in permuted)] += 1
        if all(abs(Fraction(counts[c], n) - target[c]) <= e for c in cells):
            total += weight
    return total
