import random
from fractions import Fraction

import pytest

from orbitgcd.errors import BudgetExceededError, DomainError
from orbitgcd.maps import (INFINITY, Mobius, ProjPoint, RationalMap, compose,
                           conjugate, digit_count, evaluate, fiber_polynomial,
                           iterate, self_compose)
from orbitgcd.polys import Polynomial

X2 = RationalMap([0, 0, 1])
X2P1 = RationalMap([1, 0, 1])
X3X = RationalMap([0, 1, 0, 1])
ONE_OVER_X = RationalMap([1], [0, 1])


def rand_map(rng, deg):
    while True:
        num = [rng.randint(-4, 4) for _ in range(deg + 1)]
        den = [rng.randint(-4, 4) for _ in range(rng.randint(0, deg) + 1)]
        num[-1] = num[-1] or 1
        den[-1] = den[-1] or 1
        try:
            f = RationalMap(num, den)
        except DomainError:
            continue
        if f.degree == max(len(num), len(den)) - 1:
            return f


def test_evaluate_examples():
    assert evaluate(X2, 3) == ProjPoint(9)
    assert evaluate(X2, INFINITY) == INFINITY
    assert evaluate(RationalMap([1, 0, 1], [0, 1]), 0) == INFINITY
    assert evaluate(ONE_OVER_X, 0) == INFINITY
    assert evaluate(ONE_OVER_X, INFINITY) == ProjPoint(0)


def test_iterate_examples():
    assert [p.value for p in iterate(X3X, 2, 2)] == [2, 10, 1010]
    assert iterate(X2, ProjPoint(7), 0) == [ProjPoint(7)]
    assert [p.value for p in iterate(X2, 125, 2)] == [125, 15625, 244140625]


def test_iterate_budget_error_carries_counts():
    with pytest.raises(BudgetExceededError) as err:
        iterate(X2, 10, 64, digit_budget=100)
    assert err.value.digits is not None and err.value.digits > 100
    assert err.value.steps is not None
    assert err.value.partial is not None


def test_self_compose_examples():
    assert self_compose(X2, 3) == RationalMap([0] * 8 + [1])
    assert self_compose(X2P1, 2) == RationalMap([2, 0, 2, 0, 1])
    assert self_compose(ONE_OVER_X, 2) == RationalMap([0, 1])
    with pytest.raises(BudgetExceededError):
        self_compose(X2, 5, degree_budget=16)


def test_self_compose_matches_naive_polynomial_composition():
    # symbolic-expansion oracle: plain coefficient composition for polynomials
    rng = random.Random(9)
    for _ in range(20):
        coeffs = [rng.randint(-3, 3) for _ in range(rng.randint(2, 3))] + [rng.randint(1, 3)]
        poly = Polynomial(coeffs)
        f = RationalMap(poly)
        naive = poly.compose(poly)
        assert self_compose(f, 2) == RationalMap(naive)


def test_compose_iterate_agreement_spec_property():
    rng = random.Random(101)
    for _ in range(100):
        f = rand_map(rng, rng.randint(2, 3))
        depth = rng.randint(1, 3)
        if f.degree**depth > 64:
            continue
        fd = self_compose(f, depth)
        point = ProjPoint(Fraction(rng.randint(-9, 9), rng.randint(1, 9)))
        assert evaluate(fd, point) == iterate(f, point, depth)[-1]


def test_lowest_terms_representation_unique():
    a = RationalMap(Polynomial([Fraction(1, 2), 0, 1]), Polynomial([Fraction(3, 2)]))
    b = RationalMap(Polynomial([1, 0, 2]), Polynomial([3]))
    assert a == b
    # denominator leading coefficient positive
    c = RationalMap(Polynomial([1, 0, 2]), Polynomial([-3]))
    assert c.den.leading > 0
    # joint content stripped, common polynomial factor cancelled
    d = RationalMap(Polynomial([0, 2, 0, 2]), Polynomial([0, 4]))   # (2x^3+2x)/(4x)
    assert d == RationalMap(Polynomial([1, 0, 1]), Polynomial([2]))


def test_degenerate_and_invalid_maps_rejected():
    with pytest.raises(DomainError):
        RationalMap([1])                     # constant map, degree 0
    with pytest.raises(DomainError):
        RationalMap([0, 1], [0, 0])          # zero denominator
    with pytest.raises(DomainError):
        RationalMap(Polynomial.zero(), Polynomial([1]))


def test_conjugate_examples():
    assert conjugate(X2, Mobius.identity()) == X2
    assert conjugate(X2, Mobius.translation(1)) == RationalMap([2, -2, 1])
    rng = random.Random(77)
    for _ in range(30):
        f = rand_map(rng, 2)
        m = Mobius(rng.randint(1, 3), rng.randint(-2, 2), rng.randint(0, 1),
                   rng.randint(1, 3)) if rng.random() < 0.7 else Mobius.inversion()
        conj = conjugate(f, m)
        assert conj.degree == f.degree
        assert conjugate(conj, m.inverse()) == f


def test_mobius_algebra():
    m = Mobius(2, 1, 1, 1)
    assert (m @ m.inverse()).apply(Fraction(5)) == ProjPoint(5)
    assert Mobius.inversion().apply(0) == INFINITY
    assert Mobius.inversion().apply(INFINITY) == ProjPoint(0)
    with pytest.raises(DomainError):
        Mobius(1, 2, 2, 4)
    assert m.to_map().degree == 1


def test_fiber_polynomial_cases():
    poly, inf_mult = fiber_polynomial(X2, 1)
    assert poly == Polynomial([-1, 0, 1]) and inf_mult == 0
    poly, inf_mult = fiber_polynomial(RationalMap([1, 0, 1], [0, 1]), INFINITY)
    assert poly == Polynomial([0, 1]) and inf_mult == 1
    # fiber of infinity under a polynomial is only infinity itself
    poly, inf_mult = fiber_polynomial(X3X, INFINITY)
    assert poly.degree == 0 and inf_mult == 3


def test_orbit_digit_growth_soft():
    # degree-d growth: digit counts roughly multiply by d each step
    orbit = iterate(X3X, 5, 7)
    digits = [digit_count(p.value.numerator) for p in orbit]
    for i in range(2, len(digits) - 1):
        assert digits[i + 1] > digits[i]
        ratio = digits[i + 1] / digits[i]
        assert 2.0 < ratio < 4.0


def test_digit_count_exact():
    rng = random.Random(4)
    for _ in range(500):
        n = rng.randint(0, 10**12)
        assert digit_count(n) == len(str(n))
    assert digit_count(10**5000) == 5001
    assert digit_count(10**5000 - 1) == 5000
    assert digit_count(-(10**100)) == 101
