"""ASCII Poincaré polynomial notation: ``1 + t^2q^-4 + tq^-4``."""
from __future__ import annotations

import re

from .errors import PolyParseError

_COEF = r"(?P<coef>[1-9]\d*)?"
_T = r"(?P<t>t(?:\^(?P<te>-?[1-9]\d*))?)"
_Q = r"(?P<q>q(?:\^(?P<qe>-?[1-9]\d*))?)"
# t before q, or q before t (the tables write negative t powers last)
_TERM_RES = (re.compile(_COEF + _T + "?" + _Q + "?"), re.compile(_COEF + _Q + _T + "?"))


def format_poly(p) -> str:
    terms = p.terms if hasattr(p, "terms") else p
    parts = []
    for (i, q), d in sorted(terms.items(), key=lambda kv: (-kv[0][1], -kv[0][0])):
        tpart = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
        qpart = "" if q == 0 else ("q" if q == 1 else f"q^{q}")
        # knot-table spelling: t first only for positive t with negative q
        body = tpart + qpart if i > 0 and q < 0 else qpart + tpart
        if not body:
            parts.append(str(d))
        else:
            parts.append(body if d == 1 else f"{d}{body}")
    return " + ".join(parts) if parts else "0"


def parse_poly(text: str):
    from .homology import PoincarePolynomial

    if text == "0":
        return PoincarePolynomial({})
    terms: dict = {}
    pos = 0
    while True:
        matches = [r.match(text, pos) for r in _TERM_RES]
        m = max((x for x in matches if x is not None), key=lambda x: x.end(), default=None)
        if m is None or m.end() == pos:
            raise PolyParseError("expected a term", pos)
        coef = int(m.group("coef") or 1)
        i = 0 if m.group("t") is None else int(m.group("te") or 1)
        q = 0 if m.group("q") is None else int(m.group("qe") or 1)
        terms[(i, q)] = terms.get((i, q), 0) + coef
        pos = m.end()
        if pos == len(text):
            break
        if not text.startswith(" + ", pos):
            raise PolyParseError("expected ' + '", pos)
        pos += 3
    return PoincarePolynomial(terms)
