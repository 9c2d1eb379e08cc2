import math
import random
from fractions import Fraction

import mpmath
import pytest

from orbitgcd.errors import DomainError, PartialFactorizationError
from orbitgcd.exact import (LogValue, Place, factor, is_prime, log_gcd_places,
                            next_prime, v_plus, valuation)


def trial_division_oracle(n):
    """Independent factorization: plain incremental trial division."""
    assert n != 0
    sign = 1 if n > 0 else -1
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return sign, tuple(out)


def test_factor_spec_examples():
    assert factor(1).sign == 1 and factor(1).factors == ()
    assert factor(15624).factors == trial_division_oracle(15624)[1]
    assert factor(15624).factors == ((2, 3), (3, 2), (7, 1), (31, 1))
    neg = factor(-24)
    assert neg.sign == -1 and neg.factors == ((2, 3), (3, 1))


def test_factor_zero_rejected():
    with pytest.raises(DomainError):
        factor(0)


def test_factor_roundtrip_random_64bit():
    rng = random.Random(99)
    for _ in range(1000):
        n = rng.randint(-(2**64), 2**64)
        if n == 0:
            continue
        fac = factor(n)
        assert fac.value() == n
        assert all(is_prime(p) for p, _ in fac.factors)
        primes = [p for p, _ in fac.factors]
        assert primes == sorted(primes) and len(set(primes)) == len(primes)


def test_factor_matches_trial_division_oracle():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(2, 10**9)
        sign, fac = trial_division_oracle(n)
        assert factor(n).factors == fac


def test_factor_budget_exhaustion_reports_partial():
    hard = (2**61 - 1) * (2305843009213693967) * 12
    with pytest.raises(PartialFactorizationError) as err:
        factor(hard, budget=10)
    assert err.value.cofactor is not None
    assert err.value.cofactor > 1
    recovered = err.value.partial.value() * err.value.cofactor
    assert recovered == hard


def test_is_prime_edges():
    assert not is_prime(1) and is_prime(2) and is_prime(3)
    assert not is_prime(561)          # Carmichael
    assert is_prime(2**61 - 1)
    assert not is_prime(2**67 - 1)    # Mersenne composite
    assert next_prime(10**6) == 1000003


def test_valuation_examples():
    assert valuation(5, Fraction(1, 25)) == -2
    assert valuation(3, 18) == 2
    assert valuation(7, Fraction(10, 3)) == 0
    with pytest.raises(DomainError):
        valuation(3, 0)


def test_valuation_additivity_random():
    rng = random.Random(5)
    for _ in range(300):
        p = rng.choice([2, 3, 5, 7, 11])
        x = Fraction(rng.randint(1, 10**6), rng.randint(1, 10**6))
        y = Fraction(rng.randint(1, 10**6), rng.randint(1, 10**6))
        assert valuation(p, x * y) == valuation(p, x) + valuation(p, y)


def test_v_plus_adopted_convention():
    # v+ is large when x is p-adically small (divisible by p); at the
    # archimedean place it is max(0, -log|x|)
    assert v_plus(Place.finite(3), 9).finite == {3: Fraction(2)}
    assert v_plus(Place.finite(3), Fraction(1, 9)).finite == {}
    assert v_plus(Place.finite(5), 25).finite == {5: Fraction(2)}
    assert v_plus(Place.finite(5), Fraction(1, 25)).finite == {}
    arch = v_plus(Place.arch(), Fraction(1, 2))
    with mpmath.workprec(128):
        assert abs(arch.arch - mpmath.log(2)) < mpmath.mpf(2) ** -100
    assert v_plus(Place.arch(), 2).arch == 0
    with pytest.raises(DomainError):
        v_plus(Place.finite(3), 0)


def test_v_plus_unit_invariance():
    # multiplying by a p'-unit leaves v_plus at p unchanged
    rng = random.Random(11)
    for _ in range(200):
        p = rng.choice([2, 3, 5, 7])
        x = Fraction(rng.randint(1, 9999), rng.randint(1, 9999))
        unit_candidates = [q for q in (2, 3, 5, 7, 11) if q != p]
        u = Fraction(rng.choice(unit_candidates)) ** rng.randint(-3, 3)
        assert v_plus(Place.finite(p), x).finite == v_plus(Place.finite(p), x * u).finite


def test_place_validation():
    with pytest.raises(DomainError):
        Place.finite(6)
    assert Place.arch().is_finite is False
    assert Place.finite(7).prime == 7


def euclid_exponents(a, b):
    g = math.gcd(abs(a), abs(b))
    out = {}
    d = 2
    while d * d <= g:
        while g % d == 0:
            out[d] = out.get(d, 0) + 1
            g //= d
        d += 1
    if g > 1:
        out[g] = out.get(g, 0) + 1
    return {p: Fraction(e) for p, e in out.items()}


def test_log_gcd_places_examples():
    assert log_gcd_places(12, 18).finite == {2: Fraction(1), 3: Fraction(1)}
    assert log_gcd_places(1, 987654) .finite == {}
    assert log_gcd_places(15624, 624).finite == {2: Fraction(3), 3: Fraction(1)}
    with pytest.raises(DomainError):
        log_gcd_places(0, 5)


def test_log_gcd_places_euclid_oracle():
    rng = random.Random(2024)
    for _ in range(1000):
        a = rng.randint(-10**6, 10**6) or 1
        b = rng.randint(-10**6, 10**6) or 1
        assert log_gcd_places(a, b).finite == euclid_exponents(a, b)


def test_logvalue_arithmetic_and_equality():
    a = LogValue.from_finite({2: 3, 3: 1})
    b = LogValue.from_finite({2: -3, 5: 2})
    s = a + b
    assert s.finite == {3: Fraction(1), 5: Fraction(2)}   # zero entry dropped
    assert (a - a).finite == {}
    scaled = a.scale(Fraction(1, 2))
    assert scaled.finite == {2: Fraction(3, 2), 3: Fraction(1, 2)}
    assert a.close_to(LogValue.from_finite({2: 3, 3: 1}))
    assert not a.close_to(b)
    total = float(a.total())
    assert abs(total - (3 * math.log(2) + math.log(3))) < 1e-12


def test_logvalue_minimum_precision_enforced():
    with pytest.raises(DomainError):
        LogValue({}, mpmath.mpf(0), prec=32)
