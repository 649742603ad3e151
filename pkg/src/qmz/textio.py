"""Text forms of complex numbers and argument vectors.

Accepted scalars: ``a``, ``a+bi``, ``a-bi``, ``bi``, ``-bi`` (also ``i`` and
``-i``) where ``a`` and ``b`` are decimal floats, exponents allowed.
:func:`format_complex` produces the canonical form, and parsing it gives the
same bits back.
"""

from __future__ import annotations

import math
import re

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_FULL = re.compile(
    rf"^(?P<re>[+-]?{_NUM})?(?:(?P<isign>[+-])?(?P<im>{_NUM})?(?P<i>[ij]))?$"
)


class ArgParseError(ValueError):
    def __init__(self, text: str, position: int, reason: str):
        self.text = text
        self.position = position
        self.reason = reason
        super().__init__(f"cannot parse {text!r} at position {position}: {reason}")


def _first_bad(text: str) -> int:
    for end in range(len(text), 0, -1):
        head = text[:end]
        if _FULL.match(head) or _FULL.match(head + "0"):
            return end
    return 0


def parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "")
    if not s:
        raise ArgParseError(text, 0, "empty value")
    m = _FULL.match(s)
    if not m or (m.group("re") is None and m.group("i") is None):
        raise ArgParseError(text, _first_bad(s), "expected a, a+bi, a-bi, bi or -bi")
    if m.group("i") is None:
        return complex(float(m.group("re")), 0.0)
    re_part = m.group("re")
    sign = m.group("isign")
    mag = m.group("im")
    if re_part is not None and sign is None and mag is None:
        # "2i" lands here: the leading number is the imaginary coefficient
        return complex(0.0, float(re_part))
    if re_part is not None and sign is None:
        raise ArgParseError(text, len(re_part), "missing sign before imaginary part")
    im = float(mag) if mag is not None else 1.0
    if sign == "-":
        im = -im
    real = float(re_part) if re_part is not None else 0.0
    z = complex(real, im)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ArgParseError(text, 0, "value overflows")
    return z


def _fmt(x: float) -> str:
    s = repr(float(x))
    if s.endswith(".0"):
        s = s[:-2]
    return s


def format_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0.0:
        return _fmt(z.real + 0.0)
    if z.real == 0.0:
        return _fmt(z.imag) + "i"
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{_fmt(z.real)}{sign}{_fmt(abs(z.imag))}i"


def parse_vector(text: str) -> tuple:
    """Comma-separated complex values."""
    parts = text.split(",")
    out = []
    offset = 0
    for part in parts:
        try:
            out.append(parse_complex(part))
        except ArgParseError as exc:
            raise ArgParseError(text, offset + exc.position, exc.reason) from None
        offset += len(part) + 1
    return tuple(out)


def format_vector(args) -> str:
    return ",".join(format_complex(a) for a in args)


def json_complex(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def json_number(z: complex):
    """Plain float when the imaginary part vanishes, otherwise ``{"re", "im"}``."""
    z = complex(z)
    return z.real if z.imag == 0.0 else json_complex(z)
