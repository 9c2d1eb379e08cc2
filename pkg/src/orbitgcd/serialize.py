"""Stable machine-readable formats: rational strings, polynomial and map
JSON files, run manifests, and gcd-series report emission (JSON and CSV).

Rationals travel as decimal strings "num/den" (or "num"); polynomials as
{"coeffs": ["c0", "c1", ...]} ascending; rational maps as {"num": {...},
"den": {...}} with the denominator optional.  Every emitted report embeds
its manifest; with ORBITGCD_TEST_MODE set, timestamps are normalized so
identical manifests produce identical bytes.
"""

from __future__ import annotations

import csv
import datetime
import io
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .errors import DomainError
from .experiments import GcdSeriesConfig, GcdSeriesReport
from .heights import PlaceSet
from .maps import ProjPoint, RationalMap, digit_count
from .polys import Polynomial

JSON_ELIDE_DIGITS = 10**6
CSV_ELIDE_DIGITS = 10**4


def rational_to_str(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rational_from_str(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise DomainError(f"cannot parse rational from {text!r}: {err}") from err


def point_to_str(point: ProjPoint) -> str:
    return "oo" if point.is_infinity else rational_to_str(point.value)


def point_from_str(text: str) -> ProjPoint:
    text = text.strip()
    if text.lower() in ("oo", "inf", "infinity"):
        return ProjPoint.infinity()
    return ProjPoint(rational_from_str(text))


def poly_to_json(poly: Polynomial) -> dict:
    return {"coeffs": [rational_to_str(c) for c in poly.coeffs]}


def poly_from_json(obj: dict) -> Polynomial:
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise DomainError("polynomial JSON needs a 'coeffs' array")
    return Polynomial([rational_from_str(str(c)) for c in obj["coeffs"]])


def map_to_json(f: RationalMap) -> dict:
    out = {"num": poly_to_json(f.num)}
    if not (f.den.degree == 0 and f.den.coeff(0) == 1):
        out["den"] = poly_to_json(f.den)
    return out


def map_from_json(obj: dict) -> RationalMap:
    if not isinstance(obj, dict):
        raise DomainError("map JSON must be an object")
    if "coeffs" in obj:
        return RationalMap(poly_from_json(obj))
    if "num" not in obj:
        raise DomainError("map JSON needs 'num' (and optionally 'den')")
    num = poly_from_json(obj["num"])
    den = poly_from_json(obj["den"]) if "den" in obj else Polynomial.constant(1)
    return RationalMap(num, den)


def load_map(path: str) -> RationalMap:
    with open(path, "r", encoding="utf-8") as fh:
        return map_from_json(json.load(fh))


def load_poly(path: str) -> Polynomial:
    with open(path, "r", encoding="utf-8") as fh:
        return poly_from_json(json.load(fh))


# --- manifests ---


def _timestamp() -> str:
    if os.environ.get("ORBITGCD_TEST_MODE"):
        return "1970-01-01T00:00:00Z"
    return (datetime.datetime.now(datetime.timezone.utc)
            .replace(microsecond=0).isoformat().replace("+00:00", "Z"))


def build_manifest(command: str, config: dict, seed: int | None = None,
                   budgets: dict | None = None) -> dict:
    return {
        "tool": "orbitgcd",
        "version": __version__,
        "command": command,
        "config": config,
        "seed": seed,
        "budgets": budgets or {},
        "created": _timestamp(),
    }


def config_echo(config: GcdSeriesConfig) -> dict:
    return {
        "f": map_to_json(config.f),
        "g": map_to_json(config.g),
        "a": point_to_str(config.a),
        "b": point_to_str(config.b),
        "alpha": rational_to_str(config.alpha),
        "beta": rational_to_str(config.beta),
        "n_max": config.n_max,
        "epsilon": config.epsilon,
        "exclude": sorted(config.place_exclusions.primes),
        "seed": config.seed,
        "digit_budget": config.digit_budget,
    }


# --- report emission ---


def _int_field(value: int | None, threshold: int) -> object:
    if value is None:
        return None
    digits = digit_count(value)
    if digits >= threshold:
        return {"elided": True, "digits": digits}
    cap = sys.get_int_max_str_digits()
    if cap < digits + 10:
        sys.set_int_max_str_digits(digits + 100)
        try:
            return str(value)
        finally:
            sys.set_int_max_str_digits(cap)
    return str(value)


def report_to_dict(report: GcdSeriesReport, manifest: dict,
                   gcd_digit_threshold: int = JSON_ELIDE_DIGITS) -> dict:
    rows = []
    for row in report.rows:
        rows.append({
            "n": row.n,
            "digits_f": row.digits_f,
            "digits_g": row.digits_g,
            "gcd": _int_field(row.gcd, gcd_digit_threshold),
            "log_gcd": row.log_gcd,
            "ratio": row.ratio,
            "hgcd_fin": row.hgcd_fin,
            "hgcd_S": row.hgcd_excluded,
            "flags": list(row.flags),
        })
    return {
        "manifest": manifest,
        "degree": report.degree,
        "truncated": report.truncated,
        "last_n": report.last_n,
        "ratio_summary": report.ratio_summary,
        "rows": rows,
    }


def report_to_json(report: GcdSeriesReport, manifest: dict) -> str:
    return json.dumps(report_to_dict(report, manifest), indent=2,
                      sort_keys=False) + "\n"


CSV_HEADER = ["n", "digits_f", "digits_g", "gcd", "log_gcd", "ratio",
              "hgcd_fin", "hgcd_S", "flags"]


def report_to_csv(report: GcdSeriesReport,
                  gcd_digit_threshold: int = CSV_ELIDE_DIGITS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in report.rows:
        gcd_field = ""
        if row.gcd is not None:
            digits = digit_count(row.gcd)
            if digits >= gcd_digit_threshold:
                gcd_field = f"elided:digits={digits}:log={row.log_gcd}"
            else:
                gcd_field = _int_field(row.gcd, gcd_digit_threshold)
        writer.writerow([
            row.n,
            "" if row.digits_f is None else row.digits_f,
            "" if row.digits_g is None else row.digits_g,
            gcd_field,
            "" if row.log_gcd is None else repr(row.log_gcd),
            "" if row.ratio is None else repr(row.ratio),
            "" if row.hgcd_fin is None else repr(row.hgcd_fin),
            "" if row.hgcd_excluded is None else repr(row.hgcd_excluded),
            ";".join(row.flags),
        ])
    return buf.getvalue()


def plot_data(report: GcdSeriesReport) -> str:
    """Two-column (n, ratio) text for external plotting."""
    lines = [f"{row.n} {row.ratio!r}" for row in report.rows
             if row.ratio is not None]
    return "\n".join(lines) + "\n"
