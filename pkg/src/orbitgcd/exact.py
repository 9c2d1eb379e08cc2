"""Exact arithmetic over the rationals: certified prime factorization,
p-adic valuations, and the local size functions v+ that every height
computation in this package is built from.

Conventions
-----------
All rationals are ``fractions.Fraction`` values (always in lowest terms,
positive denominator).  A place of Q is either a finite place, indexed by
a prime p, or the archimedean place.  The local size of a nonzero rational
x at a finite place is

    v_plus(p, x) = max(0, v_p(x)) * log p,

i.e. it is large exactly when x is p-adically small (divisible by a high
power of p), and zero when p divides the denominator.  At the archimedean
place it is max(0, -log|x|).  Summing min(v_plus(a), v_plus(b)) over the
finite places of two integers recovers log gcd(|a|, |b|) exactly, which is
the identity the symbolic :class:`LogValue` type exists to make testable.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DomainError, PartialFactorizationError

Rational = Fraction

DEFAULT_ARCH_PREC = 128           # bits carried by archimedean parts
TRIAL_DIVISION_BOUND = 10**6
DEFAULT_FACTOR_BUDGET = 1 << 22   # total rho iterations allowed per factor() call

# 12-base deterministic Miller-Rabin is a primality proof below this bound.
_MR_CERTIFIED_LIMIT = 3317044064679887385961981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


# --- small prime cache (process wide, lock guarded, semantically invisible) ---

_sieve_lock = threading.Lock()
_sieve_limit = 0
_sieve_primes: list[int] = []


def small_primes(limit: int) -> list[int]:
    """Primes below ``limit`` from a cached segmentless sieve."""
    global _sieve_limit, _sieve_primes
    with _sieve_lock:
        if limit > _sieve_limit:
            size = max(limit, 2 * _sieve_limit, 1 << 16)
            flags = bytearray([1]) * size
            flags[0:2] = b"\x00\x00"
            for i in range(2, math.isqrt(size - 1) + 1):
                if flags[i]:
                    flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
            _sieve_primes = [i for i, f in enumerate(flags) if f]
            _sieve_limit = size
        return [p for p in _sieve_primes if p < limit]


def _mr_witness(a: int, n: int) -> bool:
    # True if a proves n composite.
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x in (1, n - 1):
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def _strong_lucas_prp(n: int) -> bool:
    # Strong Lucas probable-prime test with Selfridge parameters.
    if n % 2 == 0 or n < 3:
        return n == 2
    s = math.isqrt(n)
    if s * s == n:
        return False
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -(D + 2) if D > 0 else -(D - 2)
    P, Q = 1, (1 - D) // 4
    d, r = n + 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    # Lucas sequence by binary ladder on (U, V, Q^k).
    U, V, qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * qk) % n
        qk = qk * qk % n
        if bit == "1":
            U, V = (P * U + V) % n, (D * U + P * V) % n
            if U % 2:
                U += n
            if V % 2:
                V += n
            U, V = U // 2 % n, V // 2 % n
            qk = qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(r - 1):
        V = (V * V - 2 * qk) % n
        if V == 0:
            return True
        qk = qk * qk % n
    return False


def _jacobi(a: int, n: int) -> int:
    assert n > 0 and n % 2 == 1
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return 1 if n == 1 else result


def is_prime(n: int) -> bool:
    """Primality test: deterministic (12-base Miller-Rabin, a proof below
    ~3.3e24); BPSW above that bound, which has no known counterexample.
    """
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    if any(_mr_witness(a, n) for a in _MR_BASES):
        return False
    if n < _MR_CERTIFIED_LIMIT:
        return True
    return _strong_lucas_prp(n)


def next_prime(n: int) -> int:
    """Least prime strictly greater than n."""
    k = n + 1
    if k <= 2:
        return 2
    if k % 2 == 0:
        k += 1
    while not is_prime(k):
        k += 2
    return k


# --- factorization ---


@dataclass(frozen=True)
class Factorization:
    """sign * prod(p^e) with primes strictly increasing; reconstructs the
    input exactly."""

    sign: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        out = self.sign
        for p, e in self.factors:
            out *= p**e
        return out

    def exponents(self) -> dict[int, int]:
        return dict(self.factors)


def _pollard_brent(n: int, rng: random.Random, budget: int) -> tuple[int, int]:
    """Return (factor, iterations_used); factor == n signals failure."""
    if n % 2 == 0:
        return 2, 0
    used = 0
    while used < budget:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g, r, q = 1, 1, 1
        x = ys = y
        while g == 1 and used < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            used += r
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                used += min(m, r - k)
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1 and used < budget:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
                used += 1
        if 1 < g < n:
            return g, used
    return n, used


def _iroot(n: int, k: int) -> int:
    # floor k-th root by Newton iteration
    if n < 2:
        return n
    x = 1 << (n.bit_length() // k + 1)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _perfect_power(n: int) -> tuple[int, int]:
    """(root, exponent) with root**exponent == n, exponent prime (or 1).

    A prime exponent suffices: the caller re-examines the root, so nested
    powers unwind one prime at a time."""
    for k in small_primes(n.bit_length() + 1):
        r = _iroot(n, k)
        if r > 1 and r**k == n:
            return r, k
    return n, 1


def factor(n: int, budget: int = DEFAULT_FACTOR_BUDGET) -> Factorization:
    """Certified prime factorization of a nonzero integer.

    Trial division up to 10^6, then Brent's variant of Pollard rho with a
    deterministic seed.  Every reported prime passes :func:`is_prime`.  If
    the rho budget runs out a :class:`PartialFactorizationError` is raised
    carrying the certified part; composites are never silently reported.

    >>> factor(15624).factors
    ((2, 3), (3, 2), (7, 1), (31, 1))
    """
    if n == 0:
        raise DomainError("factor(0) is undefined")
    sign = 1 if n > 0 else -1
    m = abs(n)
    found: dict[int, int] = {}
    for p in small_primes(TRIAL_DIVISION_BOUND):
        if p * p > m:
            break
        while m % p == 0:
            found[p] = found.get(p, 0) + 1
            m //= p
    if m > 1 and (m < TRIAL_DIVISION_BOUND**2 or is_prime(m)):
        # either below the trial-division frontier squared (hence prime) or
        # directly certified
        found[m] = found.get(m, 0) + 1
        m = 1
    rng = random.Random(0xC0FFEE)
    remaining = budget
    stack = [m] if m > 1 else []
    while stack:
        c = stack.pop()
        if c == 1:
            continue
        if is_prime(c):
            found[c] = found.get(c, 0) + 1
            continue
        root, exp = _perfect_power(c)
        if exp > 1:
            stack.extend([root] * exp)
            continue
        g, used = _pollard_brent(c, rng, remaining)
        remaining -= used
        if g == c or remaining <= 0:
            partial = Factorization(sign, tuple(sorted(found.items())))
            residue = c
            for other in stack:
                residue *= other
            raise PartialFactorizationError(
                f"factoring budget exhausted with composite cofactor of "
                f"{residue.bit_length()} bits",
                partial=partial,
                cofactor=residue,
            )
        stack.append(g)
        stack.append(c // g)
    return Factorization(sign, tuple(sorted(found.items())))


# --- places and valuations ---


@dataclass(frozen=True)
class Place:
    """A place of Q: ``Place.finite(p)`` for a prime p, ``Place.arch()``
    for the archimedean place.  Finite places always carry a verified prime."""

    prime: int | None = None

    def __post_init__(self):
        if self.prime is not None and not is_prime(self.prime):
            raise DomainError(f"{self.prime} is not prime")

    @classmethod
    def finite(cls, p: int) -> "Place":
        return cls(p)

    @classmethod
    def arch(cls) -> "Place":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.prime is not None

    def __repr__(self):
        return f"Place({self.prime})" if self.is_finite else "Place(oo)"


def valuation(p: int, x) -> int:
    """v_p(x) for nonzero rational x: exponent of p in the numerator minus
    exponent in the denominator.

    >>> valuation(5, Fraction(1, 25))
    -2
    """
    x = Fraction(x)
    if x == 0:
        raise DomainError("valuation of 0 is +infinity; handle upstream")
    v = 0
    num, den = abs(x.numerator), x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


# --- symbolic log values ---


def _log_mpf(value: Fraction, prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return mpmath.log(mpmath.mpf(value.numerator)) - mpmath.log(
            mpmath.mpf(value.denominator)
        )


@dataclass(frozen=True)
class LogValue:
    """A formal sum sum_p c_p * log p with exact rational coefficients,
    plus a floating archimedean term carried at a stated precision.

    The finite part never stores zero coefficients, so identities like
    Eq.-of-gcd decompositions can be asserted as dict equality with zero
    tolerance.  Arithmetic on the archimedean parts is done at the larger
    of the two operands' precisions.
    """

    finite: dict[int, Fraction]
    arch: mpmath.mpf
    prec: int = DEFAULT_ARCH_PREC

    def __post_init__(self):
        if self.prec < DEFAULT_ARCH_PREC:
            raise DomainError(f"archimedean precision {self.prec} below minimum")
        cleaned = {p: Fraction(c) for p, c in self.finite.items() if c != 0}
        object.__setattr__(self, "finite", cleaned)
        with mpmath.workprec(self.prec):
            object.__setattr__(self, "arch", mpmath.mpf(self.arch))

    @classmethod
    def zero(cls, prec: int = DEFAULT_ARCH_PREC) -> "LogValue":
        return cls({}, mpmath.mpf(0), prec)

    @classmethod
    def from_finite(cls, coeffs: dict[int, int | Fraction],
                    prec: int = DEFAULT_ARCH_PREC) -> "LogValue":
        return cls({p: Fraction(c) for p, c in coeffs.items()}, mpmath.mpf(0), prec)

    def __add__(self, other: "LogValue") -> "LogValue":
        coeffs = dict(self.finite)
        for p, c in other.finite.items():
            coeffs[p] = coeffs.get(p, Fraction(0)) + c
        prec = max(self.prec, other.prec)
        with mpmath.workprec(prec):
            return LogValue(coeffs, self.arch + other.arch, prec)

    def __neg__(self) -> "LogValue":
        return LogValue({p: -c for p, c in self.finite.items()}, -self.arch, self.prec)

    def __sub__(self, other: "LogValue") -> "LogValue":
        return self + (-other)

    def scale(self, k) -> "LogValue":
        k = Fraction(k)
        with mpmath.workprec(self.prec):
            arch = self.arch * mpmath.mpf(k.numerator) / mpmath.mpf(k.denominator)
        return LogValue({p: c * k for p, c in self.finite.items()}, arch, self.prec)

    def finite_total(self) -> mpmath.mpf:
        with mpmath.workprec(self.prec):
            return mpmath.fsum(
                mpmath.log(p) * mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
                for p, c in self.finite.items()
            )

    def total(self) -> mpmath.mpf:
        with mpmath.workprec(self.prec):
            return self.finite_total() + self.arch

    def drop_arch(self) -> "LogValue":
        return LogValue(dict(self.finite), mpmath.mpf(0), self.prec)

    def close_to(self, other: "LogValue") -> bool:
        """Exact equality on the finite part, archimedean parts within
        2^(-prec/2) of each other."""
        if self.finite != other.finite:
            return False
        prec = min(self.prec, other.prec)
        return abs(self.arch - other.arch) <= mpmath.mpf(2) ** (-(prec // 2))


def v_plus(place: Place, x, prec: int = DEFAULT_ARCH_PREC) -> LogValue:
    """Local size of a nonzero rational at a place.

    Finite p: coefficient max(0, v_p(x)) on log p (so large exactly when x
    is divisible by a high power of p, zero when p divides the
    denominator).  Archimedean: max(0, -log|x|).

    >>> v_plus(Place.finite(3), 9).finite
    {3: Fraction(2, 1)}
    >>> v_plus(Place.finite(3), Fraction(1, 9)).finite
    {}
    """
    x = Fraction(x)
    if x == 0:
        raise DomainError("v_plus(0) is +infinity; handle upstream")
    if place.is_finite:
        v = valuation(place.prime, x)
        return LogValue.from_finite({place.prime: max(0, v)}, prec)
    with mpmath.workprec(prec):
        val = -_log_mpf(abs(x), prec)
        return LogValue({}, val if val > 0 else mpmath.mpf(0), prec)


def log_gcd_places(a: int, b: int, prec: int = DEFAULT_ARCH_PREC) -> LogValue:
    """log gcd(|a|, |b|) as an exact sum over finite places: the finite
    coefficients are the prime exponents of the Euclidean gcd.

    >>> log_gcd_places(12, 18).finite
    {2: Fraction(1, 1), 3: Fraction(1, 1)}
    """
    if a == 0 or b == 0:
        raise DomainError("log_gcd_places needs nonzero integers")
    g = math.gcd(abs(a), abs(b))
    return LogValue.from_finite(factor(g).exponents() if g > 1 else {}, prec)
