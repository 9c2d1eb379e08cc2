"""Classification predicates for the dynamical hypotheses: exceptional
targets, preperiodic starting points, multiplicative independence, power
and Chebyshev normal forms, commuting polynomials, and a desk-scale probe
for polynomial relations along a pair of orbits.

None of these touch algebraic numbers: exceptionality reduces to an exact
multiplicity statement about the two-step fiber, special forms are decided
in depressed normal form with rational affine conjugations, and the
genericity probe screens kernels modulo large primes before verifying any
candidate relation exactly on the rational orbit points.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .bivariate import BivariatePolynomial
from .errors import BudgetExceededError, DomainError, IndeterminateError
from .exact import factor, next_prime
from .heights import canonical_height, discrepancy_bound, weil_height
from .linalg import kernel_modp, rational_reconstruct
from .maps import (DEFAULT_ORBIT_DIGIT_BUDGET, INFINITY, Mobius, ProjPoint,
                   RationalMap, evaluate, fiber_polynomial, form_values_mod,
                   iterate, self_compose)
from .polys import Polynomial, multiplicity_at, radical

POWER_CONJUGATE = "power"
CHEBYSHEV_CONJUGATE = "chebyshev"
NOT_SPECIAL = "not-special"


def is_exceptional(f: RationalMap, target) -> bool:
    """Whether the backward orbit of ``target`` is finite.

    For degree >= 2 the backward orbit is finite exactly when the two-step
    preimage set f^{-2}(target) is the singleton {target}: the fiber
    polynomial of the second iterate must then be a perfect power of
    (x - target) of full degree d^2 (all multiplicity concentrated in one
    rational point), with the infinity deficit accounting for the point at
    infinity.  One pullback step serves as a cheap reject.

    >>> is_exceptional(RationalMap([0, 0, 1]), 0)
    True
    >>> is_exceptional(RationalMap([-1, 0, 1]), 0)
    False
    """
    if f.degree < 2:
        raise DomainError("exceptionality needs degree >= 2")
    target = ProjPoint.of(target)
    fib1, inf1 = fiber_polynomial(f, target)
    distinct1 = (radical(fib1).degree if fib1.degree > 0 else 0) + (1 if inf1 > 0 else 0)
    if distinct1 > 1:
        return False
    f2 = self_compose(f, 2)
    fib2, inf2 = fiber_polynomial(f2, target)
    if target.is_infinity:
        return fib2.degree == 0
    if inf2 > 0:
        return False
    return multiplicity_at(fib2, target.value) == f.degree**2


def is_preperiodic(f: RationalMap, point, budget: int = 64) -> bool:
    """Whether the forward orbit is finite.

    Decides by exact orbit scan (a revisit is a proof; a Weil height above
    C_f/(d-1) certifies positive canonical height, hence wandering) and
    falls back to the certified canonical-height sign test.  Raises
    :class:`IndeterminateError` when neither side can be certified within
    budget; never returns a silent False.
    """
    if f.degree < 2:
        raise DomainError("preperiodicity needs degree >= 2")
    if budget < 1:
        raise DomainError("budget must be >= 1")
    point = ProjPoint.of(point)
    escape = discrepancy_bound(f) / (f.degree - 1)
    seen = set()
    cur = point
    for _ in range(budget):
        if cur in seen:
            return True
        seen.add(cur)
        if weil_height(cur) > escape:
            return False
        cur = evaluate(f, cur)
    if cur in seen:
        return True
    est = canonical_height(f, point, 1e-12)
    if est.is_exact_zero:
        return True
    if est.value - est.error_bound > 0:
        return False
    raise IndeterminateError(
        f"no cycle within budget {budget} and canonical height "
        f"{est.value} +- {est.error_bound} cannot be certified positive"
    )


def _exponent_vector(x: Fraction) -> dict[int, int]:
    vec: dict[int, int] = {}
    num, den = abs(x.numerator), x.denominator
    if num > 1:
        vec.update(factor(num).exponents())
    if den > 1:
        for p, e in factor(den).exponents().items():
            vec[p] = vec.get(p, 0) - e
    return vec


def mult_indep(a, b) -> bool:
    """Multiplicative independence of two nonzero rationals: no relation
    a^m * b^n = 1 with (m, n) != (0, 0).

    Equivalent to the prime exponent vectors being nonzero and not
    rationally parallel; +-1 are torsion and therefore dependent.

    >>> mult_indep(125, 25)
    False
    >>> mult_indep(2, 3)
    True
    """
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise DomainError("multiplicative independence needs nonzero inputs")
    if abs(a) == 1 or abs(b) == 1:
        return False
    va = _exponent_vector(a)
    vb = _exponent_vector(b)
    primes = sorted(set(va) | set(vb))
    for i in range(len(primes)):
        for j in range(i + 1, len(primes)):
            p, q = primes[i], primes[j]
            if va.get(p, 0) * vb.get(q, 0) != va.get(q, 0) * vb.get(p, 0):
                return True
    return False


@dataclass(frozen=True)
class SpecialForm:
    """Outcome of the power/Chebyshev normal form test.

    ``witness`` is the affine conjugation onto the normal form, present
    exactly when the tag is not NOT_SPECIAL and verified by exact
    conjugation.  ``caveat`` marks polynomials whose depressed form matches
    a family but whose conjugation would need an irrational scale factor
    (the search is restricted to rational affine maps).
    """

    tag: str
    witness: Mobius | None = None
    caveat: bool = False


def chebyshev_polynomial(d: int) -> Polynomial:
    """T_d in the normalization T_d(x + 1/x-style), i.e. T_d(2cos t) = 2cos(dt):
    T_2 = x^2 - 2, T_3 = x^3 - 3x."""
    if d < 0:
        raise DomainError("Chebyshev index must be >= 0")
    t0, t1 = Polynomial.constant(2), Polynomial.x()
    if d == 0:
        return t0
    x = Polynomial.x()
    for _ in range(d - 1):
        t0, t1 = t1, x * t1 - t0
    return t1


def _rational_nth_root(c: Fraction, k: int) -> Fraction | None:
    if k <= 0:
        raise DomainError("root index must be positive")
    if c == 0:
        return Fraction(0)
    if c < 0 and k % 2 == 0:
        return None
    sign = -1 if c < 0 else 1
    num, den = abs(c.numerator), c.denominator
    rn = round(num ** (1.0 / k))
    rd = round(den ** (1.0 / k))
    for cand_n in (rn - 1, rn, rn + 1):
        if cand_n > 0 and cand_n**k == num:
            for cand_d in (rd - 1, rd, rd + 1):
                if cand_d > 0 and cand_d**k == den:
                    return Fraction(sign * cand_n, cand_d)
    return None


def _verify_conjugation(poly: Polynomial, sigma: Mobius, target: Polynomial) -> bool:
    from .maps import conjugate

    return conjugate(RationalMap(poly), sigma) == RationalMap(target)


def special_form(poly: Polynomial) -> SpecialForm:
    """Decide conjugacy (by a rational affine map) to x^d or to the
    Chebyshev normal form T_d.

    The polynomial is first depressed by the unique translation killing
    the degree-(d-1) coefficient; the remaining freedom is a scaling, and
    comparing coefficients against the two closed-form families determines
    it (or shows no rational scaling exists, which sets the caveat flag).

    >>> special_form(Polynomial([-2, 0, 1])).tag   # x^2 - 2
    'chebyshev'
    >>> special_form(Polynomial([0, 1, 0, 1])).tag  # x^3 + x
    'not-special'
    """
    d = poly.degree
    if d < 2:
        raise DomainError("special-form test needs degree >= 2")
    cd = poly.leading
    v = poly.coeff(d - 1) / (d * cd)
    dep = poly.compose(Polynomial([-v, 1])) + Polynomial.constant(v)

    # power family: depressed form must be a pure monomial c * x^d, with the
    # scaling u solving u^(d-1) = c
    if all(dep.coeff(k) == 0 for k in range(d)):
        u = _rational_nth_root(dep.leading, d - 1)
        if u is not None:
            sigma = Mobius.affine(u, u * v)
            target = Polynomial.monomial(d)
            if _verify_conjugation(poly, sigma, target):
                return SpecialForm(POWER_CONJUGATE, sigma)
        return SpecialForm(NOT_SPECIAL, None, caveat=True)

    # Chebyshev family: need dep = T_d(u x) / u, i.e. coeff_k = t_k u^(k-1)
    cheb = chebyshev_polynomial(d)
    candidates: list[Fraction] = []
    caveat = False
    if d == 2:
        candidates.append(dep.leading)
    else:
        c_sub = dep.coeff(d - 2)
        if c_sub != 0:
            u_sq = Fraction(-d) * dep.leading / c_sub
            u = _rational_nth_root(u_sq, 2)
            if u is not None:
                candidates.extend([u, -u])
            elif d % 2 == 1:
                # all exponents k-1 are even, so consistency is a statement
                # about u^2 alone; a match here means the conjugation exists
                # but only with an irrational scale
                ok = all(
                    dep.coeff(k)
                    == cheb.coeff(k) * u_sq ** ((k - 1) // 2)
                    if k % 2 == 1
                    else dep.coeff(k) == 0
                    for k in range(d + 1)
                )
                caveat = bool(ok)
            else:
                # d even: u = c_d / (u^2)^((d-2)/2) is forced rational
                denom = u_sq ** ((d - 2) // 2)
                if denom != 0:
                    candidates.append(dep.leading / denom)
    for u in candidates:
        if u == 0:
            continue
        if all(dep.coeff(k) == cheb.coeff(k) * u ** (k - 1) for k in range(d + 1)):
            sigma = Mobius.affine(u, u * v)
            if _verify_conjugation(poly, sigma, cheb):
                return SpecialForm(CHEBYSHEV_CONJUGATE, sigma)
    return SpecialForm(NOT_SPECIAL, None, caveat=caveat)


def commutes(h: Polynomial, f: Polynomial, k_max: int,
             degree_budget: int = 4096) -> int | None:
    """Least 1 <= k <= k_max with h o f^k = f^k o h as an exact polynomial
    identity, or None.

    >>> commutes(Polynomial([0, -1]), Polynomial([0, 1, 0, 1]), 1)  # -x, x^3+x
    1
    """
    if h.degree < 1 or f.degree < 2:
        raise DomainError("need deg h >= 1 and deg f >= 2")
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    fk = f
    for k in range(1, k_max + 1):
        if fk.degree * h.degree > degree_budget:
            raise BudgetExceededError(
                f"symbolic degree {fk.degree * h.degree} exceeds budget at k={k}"
            )
        if h.compose(fk) == fk.compose(h):
            return k
        if k < k_max:
            fk = fk.compose(f)
    return None


# --- genericity probe ---


@dataclass(frozen=True)
class CurveRelation:
    """A verified polynomial relation along the tested orbit window."""

    polynomial: BivariatePolynomial
    degree_bound: int
    points_tested: int


def _monomials(deg_max: int) -> list[tuple[int, int]]:
    return sorted(
        ((i, j) for i in range(deg_max + 1) for j in range(deg_max + 1)),
        key=lambda m: (m[0] + m[1], m[0], m[1]),
    )


def _modp_orbit_rows(f, g, a, b, monomials, deg_max, skip, n_rows, p):
    xr, xs = (c % p for c in a.pair())
    yr, ys = (c % p for c in b.pair())
    rows = []
    for n in range(1, n_rows + 1):
        xr, xs = form_values_mod(f, xr, xs, p)
        yr, ys = form_values_mod(g, yr, ys, p)
        if (xr == 0 and xs == 0) or (yr == 0 and ys == 0):
            return None
        if n in skip:
            continue
        if xs == 0 or ys == 0:
            return None
        xv = xr * pow(xs, -1, p) % p
        yv = yr * pow(ys, -1, p) % p
        xpow = [1]
        ypow = [1]
        for _ in range(deg_max):
            xpow.append(xpow[-1] * xv % p)
            ypow.append(ypow[-1] * yv % p)
        rows.append([xpow[i] * ypow[j] % p for i, j in monomials])
    return rows


def probe_genericity(f: RationalMap, g: RationalMap, a, b,
                     deg_max: int, n_points: int, seed: int = 0,
                     *, screen_margin: int = 8, n_primes: int = 3,
                     digit_budget: int = DEFAULT_ORBIT_DIGIT_BUDGET,
                     ) -> CurveRelation | None:
    """Search for a polynomial relation (box degrees <= deg_max) along the
    paired orbits of a and b.

    Kernels of the monomial matrix are screened modulo ``n_primes`` random
    61-bit primes, iterating the orbits in modular arithmetic from scratch
    over a window extended past the monomial count (so interpolation
    artifacts on short windows die); an empty mod-p kernel certifies there
    is no relation.  Surviving kernel vectors are lifted by rational
    reconstruction and verified exactly at the first ``n_points`` exact
    orbit points; only a verified relation is ever returned.
    """
    if deg_max < 1:
        raise DomainError("deg_max must be >= 1")
    if n_points < 1:
        raise DomainError("n_points must be >= 1")
    a, b = ProjPoint.of(a), ProjPoint.of(b)
    monomials = _monomials(deg_max)
    n_screen = max(n_points, len(monomials) + screen_margin)

    # on budget exhaustion, degrade to the points actually collected
    def _orbit_with_budget(h, start):
        try:
            return iterate(h, start, n_points, digit_budget)
        except BudgetExceededError as err:
            return err.partial
    orbit_a = _orbit_with_budget(f, a)
    orbit_b = _orbit_with_budget(g, b)
    n_usable = min(len(orbit_a), len(orbit_b)) - 1
    if n_usable < 1:
        raise BudgetExceededError(
            "orbit digit budget too small to collect a single probe point"
        )
    skip = {
        n for n in range(1, n_usable + 1)
        if orbit_a[n].is_infinity or orbit_b[n].is_infinity
    }
    exact_points = [
        (orbit_a[n].value, orbit_b[n].value)
        for n in range(1, n_usable + 1) if n not in skip
    ]
    if not exact_points:
        return None

    rng = random.Random(seed)
    collected: list[tuple[int, list[list[int]]]] = []
    for window in (n_screen, n_usable):
        attempts = 0
        while len(collected) < n_primes and attempts < 8 * n_primes:
            attempts += 1
            p = next_prime(rng.randrange(1 << 60, 1 << 61))
            rows = _modp_orbit_rows(f, g, a, b, monomials, deg_max, skip, window, p)
            if rows is None or not rows:
                continue
            basis = kernel_modp(rows, p)
            if not basis:
                return None
            collected.append((p, basis))
        if collected:
            break
    if not collected:
        raise IndeterminateError("mod-p screening failed for every sampled prime")

    candidates: list[BivariatePolynomial] = []
    seen_polys = set()
    for p, basis in collected:
        for vec in basis:
            lifted = [rational_reconstruct(v, p) for v in vec]
            if any(c is None for c in lifted):
                continue
            # clear denominators to a primitive integer vector
            den = 1
            for c in lifted:
                den = den * c.denominator // math.gcd(den, c.denominator)
            ints = [int(c * den) for c in lifted]
            gc = 0
            for c in ints:
                gc = math.gcd(gc, abs(c))
            if gc:
                ints = [c // gc for c in ints]
            poly = BivariatePolynomial({
                m: c for m, c in zip(monomials, ints) if c
            })
            if poly.is_zero or poly in seen_polys:
                continue
            seen_polys.add(poly)
            candidates.append(poly)

    verified = [
        poly for poly in candidates
        if all(poly.evaluate(x, y) == 0 for x, y in exact_points)
    ]
    if not verified:
        return None
    verified.sort(key=lambda poly: (
        len(poly.terms), poly.total_degree(),
        sorted(poly.terms, key=lambda m: (m[0] + m[1], m[0], m[1])),
    ))
    return CurveRelation(verified[0], deg_max, len(exact_points))
