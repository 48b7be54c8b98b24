"""Complex literal format shared by the CLI and the JSON interfaces.

Literals are "<re>+<im>i" / "<re>-<im>i" with decimal floats ("0.5+1.2i",
"-0.3-0.7i"); a bare real ("2", "-0.25") and a bare imaginary part ("1.2i",
"i") are accepted.  JSON payloads may alternatively use [re, im] pairs.
"""

from __future__ import annotations

from .errors import DomainError


def parse_complex(text: str | float | int | list | tuple) -> complex:
    if isinstance(text, (int, float)):
        return complex(text)
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise DomainError(f"complex pair must have two entries, got {text!r}")
        return complex(float(text[0]), float(text[1]))
    s = str(text).strip().replace(" ", "")
    if not s:
        raise DomainError("empty complex literal")
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise DomainError(f"bad complex literal {text!r}; expected '<re>+<im>i'") from None


def format_complex(z: complex) -> str:
    re, im = z.real, z.imag
    if im == 0:
        return repr(re)
    sign = "+" if im >= 0 else "-"
    return f"{re!r}{sign}{abs(im)!r}i"
