"""Sparse bivariate polynomials over Q, just rich enough for plane-curve
multiplicities and orbit relation checks."""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .errors import DomainError


class BivariatePolynomial:
    __slots__ = ("terms",)

    def __init__(self, terms):
        cleaned = {}
        for (i, j), c in dict(terms).items():
            c = Fraction(c)
            if c != 0:
                cleaned[(int(i), int(j))] = c
        self.terms = cleaned

    @classmethod
    def zero(cls) -> "BivariatePolynomial":
        return cls({})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        if self.is_zero:
            raise DomainError("zero polynomial has no degree")
        return max(i + j for i, j in self.terms)

    def min_total_degree(self) -> int:
        if self.is_zero:
            raise DomainError("zero polynomial has no order")
        return min(i + j for i, j in self.terms)

    def evaluate(self, x, y) -> Fraction:
        x, y = Fraction(x), Fraction(y)
        return sum((c * x**i * y**j for (i, j), c in self.terms.items()),
                   Fraction(0))

    def translate(self, px, py) -> "BivariatePolynomial":
        """The polynomial F(x + px, y + py)."""
        px, py = Fraction(px), Fraction(py)
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in self.terms.items():
            for k in range(i + 1):
                xk = comb(i, k) * px ** (i - k)
                for l in range(j + 1):
                    w = c * xk * comb(j, l) * py ** (j - l)
                    if w != 0:
                        key = (k, l)
                        out[key] = out.get(key, Fraction(0)) + w
        return BivariatePolynomial(out)

    def scale(self, k) -> "BivariatePolynomial":
        k = Fraction(k)
        return BivariatePolynomial({m: c * k for m, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, BivariatePolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if self.is_zero:
            return "BivariatePolynomial(0)"
        parts = []
        for (i, j), c in sorted(self.terms.items(), key=lambda t: (t[0][0] + t[0][1], t[0])):
            mono = "".join(
                (f"x^{i}" if i > 1 else "x" * i, f"y^{j}" if j > 1 else "y" * j)
            )
            parts.append(f"{c}" + ("*" + mono if mono else ""))
        return "BivariatePolynomial(" + " + ".join(parts) + ")"
