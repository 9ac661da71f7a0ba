import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holefree.geometry import (
    BudgetExceeded,
    DimensionError,
    affine_dimension,
    deep_below_2d,
    general_position,
    high_above,
    high_above_witness,
    interior_contains,
    intersection_heights,
    is_generic_pair,
    lies_above,
    negligible_on,
    orientation,
)


def hull_2d(P):
    P = sorted(set(P))
    if len(P) < 3:
        return P

    def cr(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lo, hi = [], []
    for p in P:
        while len(lo) >= 2 and cr(lo[-2], lo[-1], p) <= 0:
            lo.pop()
        lo.append(p)
    for p in reversed(P):
        while len(hi) >= 2 and cr(hi[-2], hi[-1], p) <= 0:
            hi.pop()
        hi.append(p)
    return lo[:-1] + hi[:-1]


def interior_oracle_2d(S, x):
    H = hull_2d([tuple(map(F, p)) for p in S])
    if len(H) < 3:
        return False
    x = tuple(map(F, x))
    for a, b in zip(H, H[1:] + H[:1]):
        if (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) <= 0:
            return False
    return True


small = st.integers(-6, 6)
pt2 = st.tuples(small, small)


# --- orientation / dimension ---------------------------------------------------------

def test_orientation_examples():
    assert orientation([(0, 0), (1, 0), (0, 1)]) == 1
    assert orientation([(0, 0), (1, 1), (2, 2)]) == 0
    assert orientation([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]) == 1


def test_orientation_dimension_mismatch():
    with pytest.raises(DimensionError):
        orientation([(0, 0), (1, 0, 0), (0, 1)])


@given(st.lists(pt2, min_size=3, max_size=3), st.integers(0, 2), st.integers(0, 2))
def test_orientation_swap_flips(P, i, j):
    if i == j:
        return
    Q = list(P)
    Q[i], Q[j] = Q[j], Q[i]
    assert orientation(Q) == -orientation(P)


def test_affine_dimension_examples():
    assert affine_dimension([]) == -1
    assert affine_dimension([(2, 3)]) == 0
    assert affine_dimension([(0, 0), (1, 0), (2, 0)]) == 1
    assert affine_dimension([(0, 0, 0), (1, 0, 0), (0, 1, 0), (F(1, 3), F(1, 3), 5)]) == 3


# --- interior --------------------------------------------------------------------------

def test_interior_examples():
    T = [(0, 0), (3, 0), (0, 3)]
    assert interior_contains(T, (1, 1))
    assert not interior_contains(T, (1, 0))
    assert not interior_contains([(0, 0), (1, 1), (2, 2)], (1, 1))


def test_interior_3d_simplex():
    S = [(0, 0, 0), (4, 0, 0), (0, 4, 0), (0, 0, 4)]
    assert interior_contains(S, (1, 1, 1))
    assert not interior_contains(S, (1, 1, 0))
    assert not interior_contains(S, (2, 2, 2))


@settings(max_examples=300)
@given(st.lists(pt2, min_size=1, max_size=7), pt2)
def test_interior_matches_hull_oracle(S, x):
    assert interior_contains(S, x) == interior_oracle_2d(S, x)


@settings(max_examples=150)
@given(st.lists(pt2, min_size=3, max_size=6), pt2,
       st.tuples(*[st.integers(-3, 3)] * 4).filter(lambda m: m[0] * m[3] - m[1] * m[2] != 0),
       st.tuples(st.fractions(-5, 5, max_denominator=7), st.fractions(-5, 5, max_denominator=7)))
def test_interior_affine_invariant(S, x, m, t):
    a, b, c, d = m

    def f(p):
        return (a * p[0] + b * p[1] + t[0], c * p[0] + d * p[1] + t[1])

    assert interior_contains(S, x) == interior_contains([f(p) for p in S], f(x))


# --- general position ------------------------------------------------------------------------

def test_general_position_examples():
    assert general_position([(0, 0), (1, 0), (0, 1)])
    assert not general_position([(0, 0), (1, 1), (2, 2)])
    assert general_position([(0, 0), (1, 0), (1, 1), (0, 1)])


def brute_general_position(S):
    d = len(S[0])
    for j in range(2, min(len(S), d + 1) + 1):
        for A in itertools.combinations(S, j):
            if affine_dimension(A) != j - 1:
                return False
    return True


@settings(max_examples=200)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4)),
                min_size=2, max_size=7, unique=True))
def test_general_position_matches_bruteforce_3d(S):
    assert general_position(S) == brute_general_position(S)


@settings(max_examples=200)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=2, max_size=8, unique=True))
def test_general_position_matches_bruteforce_2d(S):
    assert general_position(S) == brute_general_position(S)


# --- generic pairs -----------------------------------------------------------------------------

def test_generic_pair_examples():
    assert is_generic_pair([(0, 0), (1, 1)], [(2, 0)])
    assert not is_generic_pair([(0, 0), (0, 1)], [(2, 0)])
    assert is_generic_pair([(0, 0), (1, 0)], [(5, 3)])


def test_generic_pair_size_error():
    with pytest.raises(ValueError):
        is_generic_pair([(0, 0)], [(1, 1)])


def test_lies_above_examples():
    assert lies_above([(0, 5), (1, 5)], [(0, 0)])
    assert not lies_above([(0, 0)], [(0, 5), (1, 5)])
    assert lies_above([(0, 0, 4), (1, 0, 4), (0, 1, 4)], [(F(1, 3), F(1, 3), 0)])


def test_lies_above_rejects_nongeneric():
    with pytest.raises(ValueError):
        lies_above([(0, 0), (0, 1)], [(2, 0)])


def random_pair(rng, d):
    s = rng.randint(1, d)
    S = [tuple(rng.randint(-4, 4) for _ in range(d)) for _ in range(s)]
    T = [tuple(rng.randint(-4, 4) for _ in range(d)) for _ in range(d + 1 - s)]
    return S, T


@pytest.mark.parametrize("d", [2, 3, 4])
def test_lies_above_matches_rational_solve_and_is_antisymmetric(d):
    rng = random.Random(d)
    seen = 0
    for _ in range(600):
        S, T = random_pair(rng, d)
        if not is_generic_pair(S, T):
            continue
        seen += 1
        hs, ht, _ = intersection_heights(S, T)
        assert lies_above(S, T) == (hs > ht)
        if hs == ht:
            # the spans meet: neither side lies above the other
            assert not lies_above(S, T) and not lies_above(T, S)
        else:
            assert lies_above(S, T) != lies_above(T, S)
    assert seen > 50


# --- high above ----------------------------------------------------------------------------------

def test_high_above_examples():
    assert high_above([(0, 10), (1, 10)], [(0, 0), (1, 0)])
    assert high_above([(0, 0)], [(1, 0)])
    assert not high_above([(0, 0), (1, 10)], [(0, 10), (1, 0)])


def test_high_above_equals_line_definition_planar():
    rng = random.Random(7)
    for _ in range(1000):
        A = [(rng.randint(0, 6), rng.randint(-5, 5)) for _ in range(rng.randint(1, 4))]
        B = [(rng.randint(0, 6), rng.randint(-5, 5)) for _ in range(rng.randint(1, 4))]
        assert high_above(A, B) == deep_below_2d(B, A)


def brute_high_above(A, B):
    d = len((A + B)[0])
    for s in range(1, d + 1):
        for S in itertools.combinations(A, s):
            for T in itertools.combinations(B, d + 1 - s):
                if is_generic_pair(S, T):
                    hs, ht, _ = intersection_heights(S, T)
                    if not hs > ht:
                        return False
    return True


@pytest.mark.parametrize("d", [2, 3])
def test_high_above_matches_enumeration(d):
    rng = random.Random(100 + d)
    for _ in range(150):
        A = [tuple(rng.randint(0, 4) for _ in range(d - 1)) + (rng.randint(0, 9),)
             for _ in range(rng.randint(1, 4))]
        B = [tuple(rng.randint(0, 4) for _ in range(d - 1)) + (rng.randint(-5, 4),)
             for _ in range(rng.randint(1, 4))]
        assert high_above(A, B) == brute_high_above(A, B)


def test_high_above_hereditary():
    rng = random.Random(3)
    checked = 0
    for _ in range(300):
        A = [(rng.randint(0, 5), rng.randint(0, 5), rng.randint(8, 12)) for _ in range(4)]
        B = [(rng.randint(0, 5), rng.randint(0, 5), rng.randint(-2, 2)) for _ in range(4)]
        if high_above(A, B):
            checked += 1
            for a in range(1, 5):
                for b in range(1, 5):
                    assert high_above(A[:a], B[:b])
    assert checked > 5


def test_high_above_witness_is_violating():
    A, B = [(0, 0), (1, 10)], [(0, 10), (1, 0)]
    w = high_above_witness(A, B)
    assert w is not None
    assert set(w.S) <= set(A) and set(w.T) <= set(B)
    assert is_generic_pair(w.S, w.T) and not lies_above(w.S, w.T)


def test_high_above_budget():
    A = [(x, 100 + x * x) for x in range(30)]
    B = [(x, -x * x) for x in range(30)]
    with pytest.raises(BudgetExceeded):
        high_above_witness(A, B, max_pairs=10)


# --- negligible ------------------------------------------------------------------------------

def test_negligible_identity_and_homothety():
    D = [(0, 0), (4, 0), (0, 4), (1, 1), (2, 1)]
    subs = [list(c) for c in itertools.combinations(range(5), 3)]
    assert negligible_on(D, D, subs).ok
    assert negligible_on(D, [(2 * x, 2 * y) for x, y in D], subs).ok


def test_negligible_violation_example():
    D = [(0, 0), (2, 0), (0, 2), (F(1, 2), F(1, 2))]
    I = [(0, 0), (2, 0), (0, 2), (5, 5)]
    r = negligible_on(D, I, [[0, 1, 2]])
    assert not r.ok
    assert [tuple(v[1]) if isinstance(v[1], tuple) else v[1] for v in r.violations]


def test_negligible_malformed():
    with pytest.raises(ValueError):
        negligible_on([(0, 0), (1, 1)], [(0, 0)], [[0, 1]])


def test_interior_by_section_matches_hull_oracle():
    from holefree.geometry import interior_by_section

    rng = random.Random(77)
    for _ in range(300):
        d = rng.choice([2, 3])
        S = [tuple(rng.randint(-4, 4) for _ in range(d)) for _ in range(rng.randint(1, 9))]
        x = tuple(rng.randint(-3, 3) for _ in range(d))
        assert interior_by_section(S, x) == interior_contains(S, x)
