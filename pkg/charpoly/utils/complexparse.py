"""Complex literals on the command line: ``a``, ``bi``, ``a+bi``, ``a-bi``.

``j`` is accepted in place of ``i``; a bare ``i`` means 1i. Lists are
comma-separated.
"""

import re

_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"

_REAL = re.compile(rf"^(?P<re>[+-]?{_NUMBER})$")
_IMAG = re.compile(rf"^(?P<im>[+-]?(?:{_NUMBER})?)[ij]$")
_FULL = re.compile(rf"^(?P<re>[+-]?{_NUMBER})(?P<im>[+-](?:{_NUMBER})?)[ij]$")


def _imaginary_part(text: str) -> float:
    if text in ("", "+"):
        return 1.0
    if text == "-":
        return -1.0
    return float(text)


def parse_complex(text: str) -> complex:
    literal = text.strip().replace(" ", "")
    if match := _REAL.match(literal):
        return complex(float(match["re"]), 0.0)
    if match := _IMAG.match(literal):
        return complex(0.0, _imaginary_part(match["im"]))
    if match := _FULL.match(literal):
        return complex(float(match["re"]), _imaginary_part(match["im"]))
    raise ValueError(f"Invalid complex literal {text!r}; expected a, bi, a+bi or a-bi")


def parse_complex_list(text: str) -> tuple[complex, ...]:
    parts = [part for part in text.split(",") if part.strip() != ""]
    return tuple(parse_complex(part) for part in parts)


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as ex:
        raise ValueError(f"Invalid integer list {text!r}") from ex


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as ex:
        raise ValueError(f"Invalid number list {text!r}") from ex


def format_complex(value: complex) -> str:
    return f"{value.real:.17g}{value.imag:+.17g}i"
