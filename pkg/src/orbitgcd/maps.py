"""Rational self-maps of P^1 over Q and their dynamics.

A :class:`RationalMap` is a pair of integer-coefficient polynomials,
coprime in Q[x], jointly primitive (the gcd of all coefficients of both
is 1) and with positive leading denominator coefficient, which makes the
lowest-terms representation unique.  Evaluation is projective via the
degree-d homogenizations, so the point at infinity needs no special
cases.  Orbits are always computed point-wise; symbolic self-composition
exists only for the small depths the depth selector produces, since the
symbolic degree grows like d^D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError, DomainError
from .polys import Polynomial, poly_gcd

DEFAULT_ORBIT_DIGIT_BUDGET = 10**7
DEFAULT_DEGREE_BUDGET = 4096

_LOG10_2 = math.log10(2)


def digit_count(n: int) -> int:
    """Exact decimal digit count, via bit length plus a boundary check (no
    str conversion, which CPython caps for big integers)."""
    if n == 0:
        return 1
    n = abs(n)
    est = max(1, int((n.bit_length() - 1) * _LOG10_2) + 1)
    while 10**est <= n:
        est += 1
    while est > 1 and 10 ** (est - 1) > n:
        est -= 1
    return est


class ProjPoint:
    """A point of P^1(Q): an affine rational in lowest terms, or infinity."""

    __slots__ = ("value",)

    def __init__(self, value=None):
        self.value = None if value is None else Fraction(value)

    @classmethod
    def of(cls, x) -> "ProjPoint":
        return x if isinstance(x, ProjPoint) else cls(x)

    @classmethod
    def infinity(cls) -> "ProjPoint":
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def pair(self) -> tuple[int, int]:
        """Coprime integer homogeneous coordinates (numerator, denominator);
        infinity is (1, 0)."""
        if self.is_infinity:
            return (1, 0)
        return (self.value.numerator, self.value.denominator)

    def __eq__(self, other):
        return isinstance(other, ProjPoint) and self.value == other.value

    def __hash__(self):
        return hash(("ProjPoint", self.value))

    def __repr__(self):
        return "ProjPoint(oo)" if self.is_infinity else f"ProjPoint({self.value})"


INFINITY = ProjPoint.infinity()


class RationalMap:
    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, assume_coprime=False):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = Polynomial.constant(1) if den is None else (
            den if isinstance(den, Polynomial) else Polynomial(den)
        )
        if den.is_zero:
            raise DomainError("denominator polynomial is zero")
        if num.is_zero:
            raise DomainError("numerator polynomial is zero (constant map)")
        if not assume_coprime:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num // g
                den = den // g
        # clear fraction denominators jointly, then strip joint content
        scale = 1
        for c in list(num.coeffs) + list(den.coeffs):
            scale = scale * c.denominator // math.gcd(scale, c.denominator)
        ni = [c * scale for c in num.coeffs]
        di = [c * scale for c in den.coeffs]
        g = 0
        for c in ni + di:
            g = math.gcd(g, abs(c.numerator))
        sign = 1 if di[-1] > 0 else -1
        self.num = Polynomial([c * sign / g for c in ni])
        self.den = Polynomial([c * sign / g for c in di])
        if self.degree < 1:
            raise DomainError("rational map must have degree >= 1")

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other):
        return (isinstance(other, RationalMap)
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RationalMap({self.num!r} / {self.den!r})"

    def form_values(self, r: int, s: int) -> tuple[int, int]:
        """Evaluate the degree-d homogenizations of (num, den) at (r, s)."""
        d = self.degree
        a = b = 0
        rp = [1] * (d + 1)
        spow = [1] * (d + 1)
        for i in range(1, d + 1):
            rp[i] = rp[i - 1] * r
            spow[i] = spow[i - 1] * s
        for i in range(d + 1):
            w = rp[i] * spow[d - i]
            ai = self.num.coeff(i)
            bi = self.den.coeff(i)
            if ai:
                a += ai.numerator * w
            if bi:
                b += bi.numerator * w
        return a, b

    def __call__(self, point) -> ProjPoint:
        return evaluate(self, point)


def form_values_mod(f: RationalMap, r: int, s: int, mod: int) -> tuple[int, int]:
    """Degree-d homogenized (num, den) values at (r, s), reduced mod ``mod``."""
    d = f.degree
    rp = [1] * (d + 1)
    sp = [1] * (d + 1)
    for i in range(1, d + 1):
        rp[i] = rp[i - 1] * r % mod
        sp[i] = sp[i - 1] * s % mod
    a = b = 0
    for i in range(d + 1):
        w = rp[i] * sp[d - i] % mod
        ai = f.num.coeff(i)
        bi = f.den.coeff(i)
        if ai:
            a = (a + ai.numerator * w) % mod
        if bi:
            b = (b + bi.numerator * w) % mod
    return a, b


def evaluate(f: RationalMap, point) -> ProjPoint:
    """Projective evaluation; indeterminacy is impossible because the
    representation is coprime.

    >>> evaluate(RationalMap([1, 0, 1], [0, 1]), ProjPoint(0))  # (x^2+1)/x at 0
    ProjPoint(oo)
    """
    point = ProjPoint.of(point)
    r, s = point.pair()
    a, b = f.form_values(r, s)
    if b == 0:
        return INFINITY
    return ProjPoint(Fraction(a, b))


def iterate(f: RationalMap, point, n: int,
            digit_budget: int = DEFAULT_ORBIT_DIGIT_BUDGET) -> list[ProjPoint]:
    """The orbit [P, f(P), ..., f^n(P)] by repeated point evaluation.

    Orbit values have Theta(d^k) digits, so a cumulative digit budget
    (numerators plus denominators, default 10^7) guards the computation;
    exceeding it raises :class:`BudgetExceededError` with the digit count
    reached and the last completed step.
    """
    if n < 0:
        raise DomainError("iteration count must be >= 0")
    point = ProjPoint.of(point)
    orbit = [point]
    digits = sum(digit_count(c) for c in point.pair())
    for k in range(n):
        point = evaluate(f, point)
        r, s = point.pair()
        digits += digit_count(r) + digit_count(s)
        if digits > digit_budget:
            raise BudgetExceededError(
                f"orbit digit budget exceeded at step {k + 1}: "
                f"{digits} > {digit_budget}",
                partial=orbit, digits=digits, steps=k,
            )
        orbit.append(point)
    return orbit


def compose(outer: RationalMap, inner: RationalMap) -> RationalMap:
    """outer o inner, in lowest terms.

    Coprimality of the homogeneous pairs is preserved under composition
    (a common projective root of the composed pair would be a common root
    of the outer pair at a well-defined image point), so only integer
    content needs stripping.
    """
    do = outer.degree
    p, q = inner.num, inner.den
    # powers of p and q up to do
    ppow = [Polynomial.constant(1)]
    qpow = [Polynomial.constant(1)]
    for _ in range(do):
        ppow.append(ppow[-1] * p)
        qpow.append(qpow[-1] * q)
    num = Polynomial.zero()
    den = Polynomial.zero()
    for i in range(do + 1):
        w = ppow[i] * qpow[do - i]
        ai = outer.num.coeff(i)
        bi = outer.den.coeff(i)
        if ai != 0:
            num = num + w.scale(ai)
        if bi != 0:
            den = den + w.scale(bi)
    return RationalMap(num, den, assume_coprime=True)


def self_compose(f: RationalMap, depth: int,
                 degree_budget: int = DEFAULT_DEGREE_BUDGET) -> RationalMap:
    """f composed with itself ``depth`` times (depth >= 1), lowest terms."""
    if depth < 1:
        raise DomainError("composition depth must be >= 1")
    if f.degree**depth > degree_budget:
        raise BudgetExceededError(
            f"symbolic degree {f.degree}^{depth} exceeds budget {degree_budget}"
        )
    out = f
    for _ in range(depth - 1):
        out = compose(f, out)
    return out


@dataclass(frozen=True)
class Mobius:
    """Invertible map x -> (p*x + q) / (r*x + s) with rational entries."""

    p: Fraction
    q: Fraction
    r: Fraction
    s: Fraction

    def __post_init__(self):
        for name in ("p", "q", "r", "s"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.det == 0:
            raise DomainError("Mobius transformation must have nonzero determinant")

    @property
    def det(self) -> Fraction:
        return self.p * self.s - self.q * self.r

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, t) -> "Mobius":
        return cls(1, t, 0, 1)

    @classmethod
    def dilation(cls, u) -> "Mobius":
        return cls(u, 0, 0, 1)

    @classmethod
    def inversion(cls) -> "Mobius":
        return cls(0, 1, 1, 0)

    @classmethod
    def affine(cls, u, v) -> "Mobius":
        """x -> u*x + v."""
        return cls(u, v, 0, 1)

    def inverse(self) -> "Mobius":
        return Mobius(self.s, -self.q, -self.r, self.p)

    def __matmul__(self, other: "Mobius") -> "Mobius":
        return Mobius(
            self.p * other.p + self.q * other.r,
            self.p * other.q + self.q * other.s,
            self.r * other.p + self.s * other.r,
            self.r * other.q + self.s * other.s,
        )

    def apply(self, point) -> ProjPoint:
        point = ProjPoint.of(point)
        r, s = point.pair()
        a = self.p * r + self.q * s
        b = self.r * r + self.s * s
        if b == 0:
            return INFINITY
        return ProjPoint(a / b)

    def to_map(self) -> RationalMap:
        return RationalMap(Polynomial([self.q, self.p]), Polynomial([self.s, self.r]))


def conjugate(f: RationalMap, m: Mobius) -> RationalMap:
    """m o f o m^{-1}; the degree is preserved."""
    sigma = m.to_map()
    sigma_inv = m.inverse().to_map()
    out = compose(sigma, compose(f, sigma_inv))
    assert out.degree == f.degree
    return out


def fiber_polynomial(f: RationalMap, target) -> tuple[Polynomial, int]:
    """Equation of f^{-1}(target): a primitive integer polynomial whose
    roots are the affine preimages (with multiplicity), plus the
    multiplicity of the fiber at infinity (the degree deficit).

    ``target`` may be a rational or ``INFINITY``.
    """
    target = ProjPoint.of(target)
    d = f.degree
    if target.is_infinity:
        poly = f.den
    else:
        poly = f.num - f.den.scale(target.value)
    if poly.is_zero:
        raise DomainError("fiber polynomial vanished; map is constant?")
    return poly.primitive(), d - poly.degree
