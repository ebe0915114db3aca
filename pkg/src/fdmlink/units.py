"""Parsing and formatting of physical quantities with unit suffixes.

Config files state every physical value with an explicit unit (``20MHz``,
``4.7uH``, ``8pF``, ``2kohm``); a bare number where a physical quantity is
expected is rejected.  Values span roughly twelve orders of magnitude in this
domain, so silent unit mistakes are the main input risk.
"""

from __future__ import annotations

import math
import re

__all__ = ["UnitError", "parse_quantity", "format_quantity"]

_PREFIXES = {
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "µ": 1e-6,  # micro sign
    "m": 1e-3,
    "": 1.0,
    "k": 1e3,
    "M": 1e6,
    "G": 1e9,
}

# Longest unit names first so "Hz" wins over "H".
_UNITS = ("Hz", "H", "F", "ohm", "Ohm", "V", "s", "dB", "A", "W")

_CANONICAL = {"Ohm": "ohm"}

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_PATTERN = re.compile(
    rf"^\s*({_NUMBER})\s*([pnuµmkMG]?)({'|'.join(_UNITS)})\s*$"
)
_BARE = re.compile(rf"^\s*({_NUMBER})\s*$")


class UnitError(ValueError):
    """A quantity string is malformed, unitless, or has the wrong dimension."""


def parse_quantity(text: str | float, unit: str) -> float:
    """Parse ``text`` into SI base units, requiring dimension ``unit``.

    ``unit`` is one of ``Hz H F ohm V s dB`` or ``""`` for dimensionless
    fields (which accept bare numbers).  Numeric input is accepted only for
    dimensionless fields.
    """
    if unit == "":
        if isinstance(text, (int, float)):
            return float(text)
        m = _BARE.match(str(text))
        if not m:
            raise UnitError(f"expected a dimensionless number, got {text!r}")
        return float(m.group(1))

    if isinstance(text, (int, float)):
        raise UnitError(
            f"bare number {text!r} where a quantity in {unit} is required; "
            f"write an explicit unit such as '10{unit}'"
        )
    m = _PATTERN.match(text)
    if m is None:
        if _BARE.match(text):
            raise UnitError(
                f"unitless value {text.strip()!r}; a suffix in {unit} is required"
            )
        raise UnitError(f"cannot parse quantity {text!r}")
    mantissa, prefix, got = m.groups()
    got = _CANONICAL.get(got, got)
    if got != unit:
        raise UnitError(f"expected a value in {unit}, got {text.strip()!r}")
    if unit == "dB" and prefix:
        raise UnitError(f"dB values take no SI prefix: {text.strip()!r}")
    return float(mantissa) * _PREFIXES[prefix]


def format_quantity(value: float, unit: str, digits: int = 4) -> str:
    """Format ``value`` with an engineering prefix, e.g. ``1.33uH``."""
    if unit == "" or unit == "dB" or value == 0.0 or not math.isfinite(value):
        return f"{round(value, digits):g}{unit}"
    exp3 = min(3, max(-4, math.floor(math.log10(abs(value)) / 3)))
    for pfx, scale in _PREFIXES.items():
        if pfx in ("µ", "") or scale != 10.0 ** (3 * exp3):
            continue
        return f"{round(value / scale, digits):g}{pfx}{unit}"
    return f"{round(value, digits):g}{unit}"
