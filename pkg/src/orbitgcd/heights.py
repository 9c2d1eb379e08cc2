"""Heights on P^1(Q): the Weil height, canonical heights with certified
error bounds, and the generalized gcd heights (sums of local minima of
the v+ functions over all places).

The canonical height of P under a degree-d map is the limit of
h(f^n(P)) / d^n.  The per-step discrepancy |h(f(x)) - d*h(x)| is bounded
by an explicit constant computed from the coefficients and the resultant
of the homogenized pair, which turns the limit into a finite computation
with a geometric tail bound.  The orbit heights themselves are evaluated
in renormalized form (log-scale archimedean part plus p-adic gcd
corrections at the primes dividing the resultant), so no doubly
exponential integers are ever materialized; the returned value is still
exactly h(f^N(P)) / d^N up to the stated floating error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import BudgetExceededError, DomainError
from .exact import DEFAULT_ARCH_PREC, LogValue, Place, factor, is_prime
from .linalg import det_fraction, solve_fraction
from .maps import ProjPoint, RationalMap, evaluate, form_values_mod

DEFAULT_MAX_HEIGHT_ITERATIONS = 10_000
_PREPERIODIC_SCAN_LIMIT = 500


@dataclass(frozen=True)
class HeightEstimate:
    """A bracketing estimate: the true limit lies in value +- error_bound."""

    value: mpmath.mpf
    error_bound: mpmath.mpf
    iterations_used: int

    @property
    def is_exact_zero(self) -> bool:
        return self.value == 0 and self.error_bound == 0


@dataclass(frozen=True)
class PlaceSet:
    """A finite, deduplicated set of finite places, stored by prime."""

    primes: frozenset[int]

    def __init__(self, primes=()):
        ps = set()
        for p in primes:
            q = p.prime if isinstance(p, Place) else int(p)
            if q is None or not is_prime(q):
                raise DomainError(f"{p!r} is not a finite place")
            ps.add(q)
        object.__setattr__(self, "primes", frozenset(ps))

    def __contains__(self, p) -> bool:
        return (p.prime if isinstance(p, Place) else p) in self.primes

    def __iter__(self):
        return iter(sorted(self.primes))

    def __le__(self, other) -> bool:
        return self.primes <= other.primes

    def union(self, other) -> "PlaceSet":
        return PlaceSet(self.primes | other.primes)

    def __repr__(self):
        return f"PlaceSet({sorted(self.primes)})"


def weil_height(point, prec: int = DEFAULT_ARCH_PREC) -> mpmath.mpf:
    """log max(|p|, |q|) for p/q in lowest terms; h(oo) = h(0) = 0.

    >>> weil_height(Fraction(3, 2))  # doctest: +ELLIPSIS
    mpf('1.09861...')
    """
    point = ProjPoint.of(point)
    r, s = point.pair()
    m = max(abs(r), abs(s))
    with mpmath.workprec(prec):
        return mpmath.log(mpmath.mpf(m))


# --- discrepancy constant |h(f(x)) - d h(x)| <= C_f ---


def _form_coeffs(f: RationalMap) -> tuple[list[int], list[int]]:
    d = f.degree
    a = [f.num.coeff(i).numerator for i in range(d + 1)]
    b = [f.den.coeff(i).numerator for i in range(d + 1)]
    return a, b


def _sylvester_rows(a: list[int], b: list[int]) -> list[list[int]]:
    # rows indexed by X^k Y^(2d-1-k); unknowns: u_0..u_{d-1}, v_0..v_{d-1}
    d = len(a) - 1
    rows = []
    for k in range(2 * d):
        row = []
        for j in range(d):
            row.append(a[k - j] if 0 <= k - j <= d else 0)
        for j in range(d):
            row.append(b[k - j] if 0 <= k - j <= d else 0)
        rows.append(row)
    return rows


def map_resultant(f: RationalMap) -> int:
    """Resultant of the degree-d homogenizations of (num, den); nonzero
    because the representation is coprime."""
    a, b = _form_coeffs(f)
    det = det_fraction(_sylvester_rows(a, b))
    assert det.denominator == 1
    res = det.numerator
    if res == 0:
        raise DomainError("vanishing resultant: map representation not coprime")
    return res


def _cofactor_height(f: RationalMap) -> tuple[int, int]:
    """(|resultant|, max |coefficient| among the Bezout cofactors expressing
    R*X^(2d-1) and R*Y^(2d-1) through the homogenized pair)."""
    a, b = _form_coeffs(f)
    rows = _sylvester_rows(a, b)
    det = det_fraction(rows)
    res = det.numerator
    if res == 0:
        raise DomainError("vanishing resultant: map representation not coprime")
    n = len(rows)
    hmax = 1
    for target_index in (n - 1, 0):
        rhs = [det if k == target_index else Fraction(0) for k in range(n)]
        sol = solve_fraction(rows, rhs)
        assert sol is not None
        for c in sol:
            hmax = max(hmax, math.ceil(abs(c)))
    return abs(res), hmax


def discrepancy_bound(f: RationalMap, prec: int = DEFAULT_ARCH_PREC) -> mpmath.mpf:
    """A constant C_f with |h(f(x)) - d*h(x)| <= C_f on all of P^1(Q).

    Upper side: coefficient count times height of the coefficients.  Lower
    side: the Bezout identities u*F + v*G = R*X^(2d-1) (and Y^(2d-1)) give
    max(|F|,|G|) >= |R| M^d / (2 d H_u) and bound the gcd of the value
    pair by |R|.  Any finite valid constant is acceptable; tightness is not
    a goal.
    """
    d = f.degree
    if d < 2:
        raise DomainError("discrepancy bound needs degree >= 2")
    a, b = _form_coeffs(f)
    height_f = max(max(abs(c) for c in a), max(abs(c) for c in b))
    _, h_u = _cofactor_height(f)
    with mpmath.workprec(prec):
        upper = mpmath.log((d + 1) * height_f)
        lower = mpmath.log(2 * d * h_u)
        return max(upper, lower)


# --- canonical height ---


def _arch_green_log(f: RationalMap, r0: int, s0: int, n_steps: int, prec: int):
    # log max(|p_N|, |q_N|) of the un-reduced orbit pair, by renormalized
    # floating iteration: p_{n+1} = F(p_n, q_n), homogeneous of degree d.
    d = f.degree
    a, b = _form_coeffs(f)
    with mpmath.workprec(prec):
        x = mpmath.mpf(r0)
        y = mpmath.mpf(s0)
        m = max(abs(x), abs(y))
        slog = mpmath.log(m)
        x, y = x / m, y / m
        for _ in range(n_steps):
            xa = ya = mpmath.mpf(0)
            xp = [mpmath.mpf(1)]
            yp = [mpmath.mpf(1)]
            for i in range(1, d + 1):
                xp.append(xp[-1] * x)
                yp.append(yp[-1] * y)
            for i in range(d + 1):
                w = xp[i] * yp[d - i]
                if a[i]:
                    xa += a[i] * w
                if b[i]:
                    ya += b[i] * w
            m = max(abs(xa), abs(ya))
            slog = d * slog + mpmath.log(m)
            x, y = xa / m, ya / m
        return slog


def _vp_capped(n: int, p: int, cap: int) -> int:
    if n == 0:
        return cap
    v = 0
    while v < cap and n % p == 0:
        n //= p
        v += 1
    return v


def _padic_gcd_exponent(f: RationalMap, r0: int, s0: int, p: int, v_res: int,
                        n_steps: int) -> int:
    # v_p(gcd(p_N, q_N)) for the un-reduced orbit pair.  Each step extracts
    # at most v_p(resultant) powers of p, so fixed precision K suffices.
    d = f.degree
    K = n_steps * v_res + v_res + 1
    mod = p**K
    a, b = r0 % mod, s0 % mod
    gamma = 0
    for _ in range(n_steps):
        va_, vb_ = form_values_mod(f, a, b, mod)
        m = min(_vp_capped(va_, p, K), _vp_capped(vb_, p, K))
        gamma = d * gamma + m
        pm = p**m
        a, b = va_ // pm, vb_ // pm
    return gamma


def canonical_height(f: RationalMap, point, tol,
                     prec: int = DEFAULT_ARCH_PREC,
                     max_iterations: int = DEFAULT_MAX_HEIGHT_ITERATIONS,
                     ) -> HeightEstimate:
    """Canonical height of a point under a degree >= 2 rational map.

    Returns h(f^N(P)) / d^N with N chosen so the geometric tail bound is
    below tol (with headroom d+1, so functional-equation comparisons at
    tolerance 2*tol hold); error_bound <= tol.  Preperiodic points found
    by the exact orbit pre-scan return value 0 with error_bound 0.

    >>> canonical_height(RationalMap([0, 0, 1]), 1, 1e-9).is_exact_zero
    True
    """
    d = f.degree
    if d < 2:
        raise DomainError("canonical height needs degree >= 2")
    tol = float(tol)
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    point = ProjPoint.of(point)
    prec = max(prec, int(-math.log2(tol)) + 64)

    c_f = discrepancy_bound(f, prec)
    with mpmath.workprec(prec):
        h_preperiodic = c_f / (d - 1)
        # exact pre-scan: cycles mean canonical height exactly 0; any orbit
        # value of height above C/(d-1) certifies a wandering point
        seen = set()
        cur = point
        for step in range(_PREPERIODIC_SCAN_LIMIT):
            if cur in seen:
                return HeightEstimate(mpmath.mpf(0), mpmath.mpf(0), step)
            seen.add(cur)
            if weil_height(cur, prec) > h_preperiodic:
                break
            cur = evaluate(f, cur)

        target = mpmath.mpf(tol) / (d + 1)
        n_steps = 0
        while c_f / (mpmath.mpf(d) ** n_steps * (d - 1)) > target:
            n_steps += 1
            if n_steps > max_iterations:
                raise BudgetExceededError(
                    f"needed more than {max_iterations} iterations to reach "
                    f"tolerance {tol}", steps=max_iterations,
                )

        r0, s0 = point.pair()
        work = prec + 64
        slog = _arch_green_log(f, r0, s0, n_steps, work)
        correction = mpmath.mpf(0)
        res = map_resultant(f)
        if abs(res) > 1:
            for p, e in factor(abs(res)).factors:
                gamma = _padic_gcd_exponent(f, r0, s0, p, e, n_steps)
                if gamma:
                    correction += gamma * mpmath.log(mpmath.mpf(p))
        value = (slog - correction) / mpmath.mpf(d) ** n_steps
        err = target + mpmath.mpf(2) ** (-(prec // 2))
        return HeightEstimate(value, err, n_steps)


# --- generalized gcd heights ---


def _arch_vplus(x: Fraction, prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec):
        val = -(mpmath.log(abs(x.numerator)) - mpmath.log(x.denominator))
        return val if val > 0 else mpmath.mpf(0)


def _finite_vplus_exponents(x: Fraction) -> dict[int, int]:
    n = abs(x.numerator)
    return factor(n).exponents() if n > 1 else {}


def hgcd(x, y, prec: int = DEFAULT_ARCH_PREC) -> LogValue:
    """Generalized gcd height: sum over all places of min(v+(x), v+(y)).

    For integers it equals log gcd(|x|, |y|).  A zero argument has
    v+ = +infinity at every place, so the min collapses to the other
    argument; both arguments zero is a domain error (the gcd(0,0) = 0
    convention is the caller's to apply).

    >>> hgcd(Fraction(5, 3), Fraction(10, 7)).finite
    {5: Fraction(1, 1)}
    """
    x, y = Fraction(x), Fraction(y)
    if x == 0 and y == 0:
        raise DomainError("hgcd(0, 0) excluded; callers apply the gcd(0,0)=0 convention")
    if x == 0 or y == 0:
        z = y if x == 0 else x
        return LogValue(
            {p: Fraction(e) for p, e in _finite_vplus_exponents(z).items()},
            _arch_vplus(z, prec), prec,
        )
    g = math.gcd(abs(x.numerator), abs(y.numerator))
    finite = factor(g).exponents() if g > 1 else {}
    arch = min(_arch_vplus(x, prec), _arch_vplus(y, prec))
    return LogValue({p: Fraction(e) for p, e in finite.items()}, arch, prec)


def hgcd_fin(x, y, prec: int = DEFAULT_ARCH_PREC) -> LogValue:
    """hgcd without the archimedean term."""
    return hgcd(x, y, prec).drop_arch()


def hgcd_excluding(places: PlaceSet, x, y, prec: int = DEFAULT_ARCH_PREC) -> LogValue:
    """hgcd restricted to finite places outside ``places``.

    >>> hgcd_excluding(PlaceSet([2, 3]), 12, 18).finite
    {}
    """
    base = hgcd_fin(x, y, prec)
    kept = {p: c for p, c in base.finite.items() if p not in places}
    return LogValue(kept, mpmath.mpf(0), prec)


def bad_places(f_deep: RationalMap, g_deep: RationalMap) -> PlaceSet:
    """Primes dividing a leading coefficient of either map's numerator or
    denominator (the places where top-degree terms can lose integrality).

    >>> sorted(bad_places(RationalMap([1, 0, 6]), RationalMap([0, 0, 1])).primes)
    [2, 3]
    """
    primes: set[int] = set()
    for poly in (f_deep.num, f_deep.den, g_deep.num, g_deep.den):
        lead = abs(poly.leading.numerator)
        if lead > 1:
            primes.update(factor(lead).exponents())
    return PlaceSet(primes)
