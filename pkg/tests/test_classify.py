import random
from fractions import Fraction

import pytest

from orbitgcd.classify import (CHEBYSHEV_CONJUGATE, NOT_SPECIAL,
                               POWER_CONJUGATE, chebyshev_polynomial, commutes,
                               is_exceptional, is_preperiodic, mult_indep,
                               probe_genericity, special_form)
from orbitgcd.errors import BudgetExceededError, DomainError
from orbitgcd.maps import (INFINITY, Mobius, ProjPoint, RationalMap, conjugate,
                           iterate)
from orbitgcd.polys import Polynomial

X2 = RationalMap([0, 0, 1])
X2P1 = RationalMap([1, 0, 1])
X2M1 = RationalMap([-1, 0, 1])
X3X = RationalMap([0, 1, 0, 1])


def test_exceptional_examples():
    assert is_exceptional(X2, 0) is True
    assert is_exceptional(X2, INFINITY) is True
    assert is_exceptional(X2M1, 0) is False
    assert is_exceptional(X2, 1) is False
    assert is_exceptional(X3X, INFINITY) is True
    with pytest.raises(DomainError):
        is_exceptional(RationalMap([0, 1]), 0)


def test_exceptional_swap_pair():
    # 1/x^2 swaps 0 and infinity; both are exceptional
    inv_sq = RationalMap([1], [0, 0, 1])
    assert is_exceptional(inv_sq, 0) is True
    assert is_exceptional(inv_sq, INFINITY) is True
    assert is_exceptional(inv_sq, 1) is False


def test_exceptional_singleton_second_fiber_but_infinite_backward_orbit():
    # f = 6/(3 - x^2): f^{-1}(2) = {0}, f^{-1}(0) = {oo}, yet f^{-1}(oo) has
    # two points, so 2 is not exceptional even though f^{-2}(2) is a singleton
    f = RationalMap([6], [3, 0, -1])
    assert is_exceptional(f, 2) is False


def test_exceptional_mobius_invariance():
    rng = random.Random(19)
    cases = [(X2, ProjPoint(0)), (X2, INFINITY), (X2M1, ProjPoint(0)),
             (X2, ProjPoint(1)), (X3X, INFINITY)]
    for f, alpha in cases:
        base = is_exceptional(f, alpha)
        for _ in range(10):
            kind = rng.randrange(3)
            if kind == 0:
                m = Mobius.translation(Fraction(rng.randint(-3, 3)))
            elif kind == 1:
                m = Mobius.dilation(Fraction(rng.randint(1, 4)))
            else:
                m = Mobius.inversion()
            image = m.apply(alpha)
            assert is_exceptional(conjugate(f, m), image) == base


def test_preperiodic_examples():
    assert is_preperiodic(X2, 1) is True
    assert is_preperiodic(X2M1, 0) is True
    assert is_preperiodic(X2, 3) is False
    assert is_preperiodic(X2, Fraction(1, 2)) is False
    assert is_preperiodic(X2, INFINITY) is True


def test_mult_indep_examples_and_invariances():
    assert mult_indep(125, 25) is False
    assert mult_indep(2, 3) is True
    assert mult_indep(6, 12) is True
    assert mult_indep(1, 5) is False
    assert mult_indep(-1, 5) is False
    with pytest.raises(DomainError):
        mult_indep(0, 3)
    rng = random.Random(21)
    for _ in range(100):
        a = Fraction(rng.randint(2, 50), rng.randint(1, 9))
        b = Fraction(rng.randint(2, 50), rng.randint(1, 9))
        if abs(a) == 1 or abs(b) == 1:
            continue
        base = mult_indep(a, b)
        assert mult_indep(b, a) == base
        assert mult_indep(1 / a, b) == base
        k = rng.choice([2, 3, -2])
        assert mult_indep(a**k, b) == base


def test_special_form_examples():
    assert special_form(Polynomial([0, 0, 0, 1])).tag == POWER_CONJUGATE
    res = special_form(Polynomial([-2, 0, 1]))
    assert res.tag == CHEBYSHEV_CONJUGATE and res.witness is not None
    res = special_form(Polynomial([0, 1, 0, 1]))
    assert res.tag == NOT_SPECIAL and not res.caveat
    with pytest.raises(DomainError):
        special_form(Polynomial([1, 1]))


def test_special_form_recognizes_hidden_conjugates():
    rng = random.Random(31)
    for d in (2, 3, 4):
        for _ in range(10):
            u = Fraction(rng.randint(1, 5), rng.randint(1, 3))
            v = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            m = Mobius.affine(u, v)
            for target, tag in ((Polynomial.monomial(d), POWER_CONJUGATE),
                                (chebyshev_polynomial(d), CHEBYSHEV_CONJUGATE)):
                conj = conjugate(RationalMap(target), m.inverse())
                poly = Polynomial(conj.num.coeffs).scale(
                    Fraction(1, conj.den.coeff(0)))
                got = special_form(poly)
                assert got.tag == tag, (d, u, v, tag)
                # witness verified by exact conjugation
                back = conjugate(RationalMap(poly), got.witness)
                assert back == RationalMap(target)


def test_special_form_caveat_cases():
    # 2x^3 ~ x^3 only via scale sqrt(2); -x^3 ~ x^3 only via imaginary scale
    assert special_form(Polynomial([0, 0, 0, 2])) == \
        special_form(Polynomial([0, 0, 0, 2]))
    res = special_form(Polynomial([0, 0, 0, 2]))
    assert res.tag == NOT_SPECIAL and res.caveat
    res = special_form(Polynomial([0, 0, 0, -1]))
    assert res.tag == NOT_SPECIAL and res.caveat
    # T_3 scaled by sqrt(2): 2x^3 - 3x
    res = special_form(Polynomial([0, -3, 0, 2]))
    assert res.tag == NOT_SPECIAL and res.caveat
    # a genuinely non-special cubic has no caveat
    res = special_form(Polynomial([0, 1, 0, 1]))
    assert not res.caveat


def test_chebyshev_polynomial_recurrence_and_defining_property():
    assert chebyshev_polynomial(2) == Polynomial([-2, 0, 1])
    assert chebyshev_polynomial(3) == Polynomial([0, -3, 0, 1])
    assert chebyshev_polynomial(4) == Polynomial([2, 0, -4, 0, 1])
    # T_d(z + 1/z) = z^d + 1/z^d at sample rational z
    for d in (2, 3, 4, 5):
        td = chebyshev_polynomial(d)
        for z in (Fraction(2), Fraction(3, 2), Fraction(-5, 3)):
            assert td.evaluate(z + 1 / z) == z**d + 1 / z**d


def test_commutes_examples():
    assert commutes(Polynomial([0, -1]), Polynomial([0, 1, 0, 1]), 1) == 1
    assert commutes(Polynomial([0, 0, 1]), Polynomial([0, 0, 1]), 1) == 1
    assert commutes(Polynomial([1, 1]), Polynomial([0, 0, 1]), 3) is None
    # h commutes with f^2 but not f: h = x^2, f = -x^3 (f^2 = x^9)
    assert commutes(Polynomial([0, 0, 1]), Polynomial([0, 0, 0, -1]), 2) == 2
    with pytest.raises(BudgetExceededError):
        commutes(Polynomial([1, 0, 1]), Polynomial([0] * 8 + [1]), 5,
                 degree_budget=100)


def test_probe_detects_odd_symmetry_relation():
    rel = probe_genericity(X3X, X3X, 1, -1, 1, 8, seed=7)
    assert rel is not None
    assert rel.polynomial.terms == {(1, 0): 1, (0, 1): 1}
    assert rel.degree_bound == 1 and rel.points_tested == 8


def test_probe_detects_power_relation():
    rel = probe_genericity(X2, X2, 125, 25, 3, 12, seed=7)
    assert rel is not None
    # x^2 = y^3 up to sign/scaling
    terms = rel.polynomial.terms
    assert set(terms) == {(2, 0), (0, 3)}
    assert terms[(2, 0)] == -terms[(0, 3)]


def test_probe_returns_none_for_generic_pair():
    assert probe_genericity(X2P1, X2M1, 1, 2, 4, 12, seed=7) is None


def test_probe_never_returns_unverified_relation():
    rng = random.Random(47)
    configs = [
        (X3X, X3X, ProjPoint(1), ProjPoint(-1), 1, 8),
        (X2, X2, ProjPoint(125), ProjPoint(25), 3, 12),
        (X2, X2, ProjPoint(2), ProjPoint(4), 2, 10),      # y = x^2 relation
        (X2P1, X2M1, ProjPoint(1), ProjPoint(2), 3, 10),  # none expected
    ]
    for f, g, a, b, deg_max, n_points in configs:
        rel = probe_genericity(f, g, a, b, deg_max, n_points,
                               seed=rng.randrange(10**6))
        if rel is None:
            continue
        xs = iterate(f, a, n_points)
        ys = iterate(g, b, n_points)
        for n in range(1, n_points + 1):
            assert rel.polynomial.evaluate(xs[n].value, ys[n].value) == 0


def test_probe_seed_determinism():
    r1 = probe_genericity(X2, X2, 125, 25, 3, 12, seed=11)
    r2 = probe_genericity(X2, X2, 125, 25, 3, 12, seed=11)
    assert r1.polynomial == r2.polynomial


def test_probe_partial_result_under_tight_budget():
    # when the digit budget truncates the exact orbits the probe degrades to
    # the points actually collected instead of failing
    rel = probe_genericity(X3X, X3X, 1, -1, 1, 8, seed=7, digit_budget=60)
    assert rel is not None
    assert rel.polynomial.terms == {(1, 0): 1, (0, 1): 1}
    assert 1 <= rel.points_tested < 8


def test_special_form_negative_scale_witness():
    # conjugation with a negative scale factor is found and verified
    m = Mobius.affine(Fraction(-1, 2), Fraction(3))
    conj = conjugate(RationalMap(chebyshev_polynomial(3)), m.inverse())
    poly = Polynomial(conj.num.coeffs).scale(Fraction(1, conj.den.coeff(0)))
    got = special_form(poly)
    assert got.tag == CHEBYSHEV_CONJUGATE
    assert conjugate(RationalMap(poly), got.witness) == RationalMap(chebyshev_polynomial(3))
