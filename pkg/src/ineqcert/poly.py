"""Exact multivariate polynomials over the rationals modulo a Pythagorean relation.

A :class:`TrigPoly` lives in one of two quotient rings:

* ``trig``: ``Q[s, c, ...] / (s^2 + c^2 - 1)`` where ``s = sin t``, ``c = cos t``
* ``hyp``:  ``Q[s, c, ...] / (c^2 - s^2 - 1)`` where ``s = sinh t``, ``c = cosh t``

The relation is principal, so the normal form is obtained by the single
rewrite ``s^2 -> 1 - c^2`` (resp. ``c^2 - 1``); every stored term has
``s``-degree at most one. Coefficients are :class:`fractions.Fraction`.

Variables beyond ``s`` and ``c``:

====  ==========================================================
a, b  the ratios alpha, beta in ``x = a*k``, ``y = b*k``
x, y  the two nonnegative arguments
k     the half-angle symbol ``cot(t/2)`` (resp. ``coth(t/2)``)
t     the angle ``theta`` (resp. length ``ell``) itself
p     the constant ``pi``
u, v  ``arctan x``, ``arctan y`` (resp. ``arctanh(1/x)``, ``arctanh(1/y)``)
====  ==========================================================
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Mapping, Tuple

VARS: Tuple[str, ...] = ("s", "c", "a", "b", "x", "y", "k", "t", "p", "u", "v")
NVARS = len(VARS)
_INDEX = {name: i for i, name in enumerate(VARS)}
MODES = ("trig", "hyp")

Monomial = Tuple[int, ...]
_ONE: Monomial = (0,) * NVARS


class ModeMismatch(ValueError):
    """Raised when polynomials from different quotient rings are combined."""


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    return mode


def _mono(**exps: int) -> Monomial:
    e = [0] * NVARS
    for name, n in exps.items():
        e[_INDEX[name]] = n
    return tuple(e)


def _grlex_key(m: Monomial):
    return (sum(m), m)


def _s_square(mode: str) -> Dict[Monomial, Fraction]:
    """Replacement for ``s^2`` as a polynomial in ``c``."""
    c2 = _mono(c=2)
    if mode == "trig":
        return {_ONE: Fraction(1), c2: Fraction(-1)}
    return {_ONE: Fraction(-1), c2: Fraction(1)}


def _normalize(terms: Mapping[Monomial, Fraction], mode: str) -> Dict[Monomial, Fraction]:
    out: Dict[Monomial, Fraction] = {}
    sign = 1 if mode == "hyp" else -1  # s^2 = sign*c^2 + (-sign)
    for mono, coef in terms.items():
        if coef == 0:
            continue
        e = mono[0]
        if e < 2:
            out[mono] = out.get(mono, 0) + coef
            continue
        q, r = divmod(e, 2)
        # (sign*c^2 - sign)^q = sum_j C(q,j) (sign c^2)^j (-sign)^(q-j)
        for j in range(q + 1):
            factor = comb(q, j) * sign**j * (-sign) ** (q - j)
            if factor == 0:
                continue
            m = list(mono)
            m[0] = r
            m[1] += 2 * j
            m = tuple(m)
            out[m] = out.get(m, 0) + coef * factor
    return {m: Fraction(cf) for m, cf in out.items() if cf != 0}


class TrigPoly:
    """Polynomial in normal form modulo the mode's Pythagorean relation."""

    __slots__ = ("mode", "terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None, mode: str = "trig",
                 *, normalized: bool = False):
        self.mode = _check_mode(mode)
        terms = terms or {}
        if normalized:
            self.terms = {m: c for m, c in terms.items() if c != 0}
        else:
            self.terms = _normalize(terms, mode)
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, value, mode: str = "trig") -> "TrigPoly":
        if not isinstance(value, (int, Fraction)):
            raise TypeError(f"coefficients must be exact rationals, got {type(value).__name__}")
        value = Fraction(value)
        return cls({_ONE: value} if value else {}, mode, normalized=True)

    @classmethod
    def var(cls, name: str, mode: str = "trig") -> "TrigPoly":
        return cls({_mono(**{name: 1}): Fraction(1)}, mode, normalized=True)

    @classmethod
    def gens(cls, mode: str = "trig"):
        return tuple(cls.var(n, mode) for n in VARS)

    # -- coercion -----------------------------------------------------
    def _coerce(self, other) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            if other.mode != self.mode:
                raise ModeMismatch(f"cannot combine {self.mode} and {other.mode} polynomials")
            return other
        if isinstance(other, (int, Fraction)):
            return TrigPoly.const(other, self.mode)
        return NotImplemented

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return TrigPoly(out, self.mode, normalized=True)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly({m: -c for m, c in self.terms.items()}, self.mode, normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        raw: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(i + j for i, j in zip(m1, m2))
                raw[m] = raw.get(m, 0) + c1 * c2
        return TrigPoly(raw, self.mode)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result = TrigPoly.const(1, self.mode)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        # only division by a nonzero rational constant
        if isinstance(other, (int, Fraction)) and other != 0:
            inv = 1 / Fraction(other)
            return TrigPoly({m: c * inv for m, c in self.terms.items()}, self.mode, normalized=True)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TrigPoly.const(other, self.mode)
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self.mode == other.mode and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.mode, frozenset(self.terms.items())))
        return self._hash

    # -- queries --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == _ONE for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get(_ONE, Fraction(0))

    def variables(self) -> set:
        return {VARS[i] for m in self.terms for i, e in enumerate(m) if e}

    def degree(self, name: str) -> int:
        i = _INDEX[name]
        return max((m[i] for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def leading_term(self) -> Tuple[Monomial, Fraction]:
        m = max(self.terms, key=_grlex_key)
        return m, self.terms[m]

    def normal_form(self) -> "TrigPoly":
        return TrigPoly(self.terms, self.mode)

    def __len__(self):
        return len(self.terms)

    # -- transformations --------------------------------------------
    def subs(self, mapping: Mapping[str, "TrigPoly | int | Fraction"]) -> "TrigPoly":
        """Substitute polynomials for variables and renormalize."""
        vals = {}
        for name, val in mapping.items():
            vals[_INDEX[name]] = val if isinstance(val, TrigPoly) else TrigPoly.const(val, self.mode)
        result = TrigPoly.const(0, self.mode)
        powers: Dict[Tuple[int, int], TrigPoly] = {}
        for mono, coef in self.terms.items():
            rest = list(mono)
            term = TrigPoly.const(coef, self.mode)
            for i, val in vals.items():
                if mono[i]:
                    key = (i, mono[i])
                    if key not in powers:
                        powers[key] = val ** mono[i]
                    term = term * powers[key]
                    rest[i] = 0
            result = result + term * TrigPoly({tuple(rest): Fraction(1)}, self.mode)
        return result

    def swap_mode(self) -> "TrigPoly":
        """Re-read the same coefficients in the other ring (trig <-> hyp)."""
        other = "hyp" if self.mode == "trig" else "trig"
        return TrigPoly(self.terms, other)

    def with_mode(self, mode: str) -> "TrigPoly":
        return TrigPoly(self.terms, mode)

    def evaluate(self, assignment: Mapping[str, object]):
        """Evaluate with numbers of any type supporting + and * (float, mpf, Fraction)."""
        total = 0
        for mono, coef in self.terms.items():
            term = coef.numerator
            den = coef.denominator
            for i, e in enumerate(mono):
                if e:
                    term = term * assignment[VARS[i]] ** e
            total = total + term / den if den != 1 else total + term
        return total

    def content(self) -> Fraction:
        """Signed gcd-like content making the polynomial primitive with positive leading coefficient."""
        if not self.terms:
            return Fraction(1)
        from math import gcd
        nums = 0
        lcm_den = 1
        for c in self.terms.values():
            nums = gcd(nums, c.numerator)
            lcm_den = lcm_den * c.denominator // gcd(lcm_den, c.denominator)
        _, lc = self.leading_term()
        sign = 1 if lc > 0 else -1
        return Fraction(sign * nums, lcm_den)

    def primitive(self) -> "TrigPoly":
        return self / self.content() if self.terms else self

    # -- formatting ---------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"TrigPoly({format_poly(self)!r}, mode={self.mode!r})"


def exact_div(p: TrigPoly, q: TrigPoly) -> TrigPoly | None:
    """Quotient ``p / q`` by long division in the free ring, or None if inexact.

    Both arguments must be normal forms; a returned quotient is verified by
    multiplying back in the quotient ring.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.mode != q.mode:
        raise ModeMismatch("mode mismatch in division")
    rem = dict(p.terms)
    quot: Dict[Monomial, Fraction] = {}
    lm_q, lc_q = q.leading_term()
    while rem:
        lm = max(rem, key=_grlex_key)
        if any(a < b for a, b in zip(lm, lm_q)):
            return None
        shift = tuple(a - b for a, b in zip(lm, lm_q))
        f = rem[lm] / lc_q
        quot[shift] = quot.get(shift, 0) + f
        for m, c in q.terms.items():
            mm = tuple(i + j for i, j in zip(m, shift))
            val = rem.get(mm, 0) - f * c
            if val:
                rem[mm] = val
            else:
                rem.pop(mm, None)
    result = TrigPoly(quot, p.mode)
    if (result * q - p).is_zero():
        return result
    return None


# ---------------------------------------------------------------------------
# textual format:  coef * s^i c^j a^k b^l x^m y^n   joined by " + "
# ---------------------------------------------------------------------------

def _format_mono(mono: Monomial) -> str:
    parts = []
    for i, e in enumerate(mono):
        if e == 1:
            parts.append(VARS[i])
        elif e > 1:
            parts.append(f"{VARS[i]}^{e}")
    return " ".join(parts)


def format_poly(p: TrigPoly) -> str:
    if not p.terms:
        return "0"
    out = []
    for mono in sorted(p.terms, key=_grlex_key, reverse=True):
        coef = p.terms[mono]
        m = _format_mono(mono)
        out.append(f"{coef} * {m}" if m else f"{coef}")
    return " + ".join(out)


_TERM = re.compile(r"^\s*([+-]?\s*\d+(?:/\d+)?)?\s*\*?\s*((?:[a-z](?:\^\d+)?\s*)*)$")
_FACTOR = re.compile(r"([a-z])(?:\^(\d+))?")


def parse_poly(text: str, mode: str = "trig") -> TrigPoly:
    """Parse the textual format produced by :func:`format_poly`.

    Terms are separated by ``+``; a leading ``-`` belongs to the coefficient.
    Variables may be juxtaposed or separated by ``*``.
    """
    text = text.strip()
    if text in ("", "0"):
        return TrigPoly.const(0, mode)
    # binary minus between terms becomes "+ -"
    text = re.sub(r"(?<=[\w)])\s*-\s*", " + -", text)
    terms: Dict[Monomial, Fraction] = {}
    for chunk in text.split("+"):
        chunk = chunk.strip().replace("*", " ")
        if not chunk:
            continue
        neg = False
        while chunk.startswith("-"):
            neg = not neg
            chunk = chunk[1:].lstrip()
        m = re.match(r"^(\d+(?:/\d+)?)?\s*(.*)$", chunk)
        coef = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        body = m.group(2).strip()
        exps = [0] * NVARS
        pos = 0
        body = body.replace(" ", "")
        while pos < len(body):
            fm = _FACTOR.match(body, pos)
            if not fm or fm.group(1) not in _INDEX:
                raise ValueError(f"cannot parse term {chunk!r}")
            exps[_INDEX[fm.group(1)]] += int(fm.group(2) or 1)
            pos = fm.end()
        mono = tuple(exps)
        terms[mono] = terms.get(mono, 0) + (-coef if neg else coef)
    return TrigPoly(terms, mode)


def parse_lines(lines: Iterable[str], mode: str = "trig"):
    """One polynomial per nonblank, non-comment line."""
    return [parse_poly(line, mode) for line in lines if line.strip() and not line.lstrip().startswith("#")]
