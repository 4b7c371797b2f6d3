"""Rational expression trees over the :mod:`ineqcert.poly` variables.

Expressions are built with ordinary operators plus :func:`inv`. Clearing
denominators turns an expression into ``numerator / prod(atoms)`` where every
atom is a registered polynomial (``s``, ``1+c``, ``1+x^2``, ...). The atoms
that were cleared are returned as side conditions: an identity proved for
the numerator holds for the expression only where they do not vanish.

Differentiation knows the chain rule for the transcendental symbols:
``d s/dt = c``, ``d c/dt = -s`` (``+s`` in hyp mode), ``d u/dx = 1/(1+x^2)``
(``-1/(x^2-1)`` in hyp mode, where ``u = arctanh(1/x)``), and so on.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Tuple

from .poly import VARS, TrigPoly, exact_div, parse_poly


class UnsupportedDenominator(ValueError):
    """A denominator did not factor into registered atoms."""


# ---------------------------------------------------------------------------
# expression nodes
# ---------------------------------------------------------------------------

class Expr:
    __slots__ = ()

    def __add__(self, other):
        return Add((self, as_expr(other)))

    def __radd__(self, other):
        return Add((as_expr(other), self))

    def __sub__(self, other):
        return Add((self, Mul((Const(-1), as_expr(other)))))

    def __rsub__(self, other):
        return Add((as_expr(other), Mul((Const(-1), self))))

    def __mul__(self, other):
        return Mul((self, as_expr(other)))

    def __rmul__(self, other):
        return Mul((as_expr(other), self))

    def __neg__(self):
        return Mul((Const(-1), self))

    def __truediv__(self, other):
        other = as_expr(other)
        if isinstance(other, Const):
            return Mul((Const(1 / other.value), self))
        return Mul((self, Inv(other)))

    def __rtruediv__(self, other):
        return Mul((as_expr(other), Inv(self)))

    def __pow__(self, n: int):
        if n < 0:
            return Pow(Inv(self), -n)
        return Pow(self, n)


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def __init__(self, value):
        object.__setattr__(self, "value", Fraction(value))


@dataclass(frozen=True)
class Sym(Expr):
    name: str

    def __post_init__(self):
        if self.name not in VARS:
            raise ValueError(f"unknown symbol {self.name!r}")


@dataclass(frozen=True)
class Add(Expr):
    args: Tuple[Expr, ...]


@dataclass(frozen=True)
class Mul(Expr):
    args: Tuple[Expr, ...]


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    n: int


@dataclass(frozen=True)
class Inv(Expr):
    arg: Expr


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Const(value)
    if isinstance(value, str):
        return Sym(value)
    raise TypeError(f"cannot convert {value!r} to an expression")


def inv(e) -> Expr:
    return Inv(as_expr(e))


def symbols(names: str):
    return tuple(Sym(n) for n in names.split())


def poly_expr(p: TrigPoly) -> Expr:
    """Lift a polynomial into an expression tree."""
    args = []
    for mono, coef in p.terms.items():
        factors: List[Expr] = [Const(coef)]
        for i, e in enumerate(mono):
            if e:
                factors.append(Pow(Sym(VARS[i]), e) if e > 1 else Sym(VARS[i]))
        args.append(Mul(tuple(factors)))
    return Add(tuple(args)) if args else Const(0)


# ---------------------------------------------------------------------------
# atoms
# ---------------------------------------------------------------------------

# Denominator atoms admitted by clear_denominators, in matching order.
# ``D_a`` is 1 + x^2 (resp. x^2 - 1) after x = a*cot(t/2), up to the factor 1+c.
_ATOM_TEXT = {
    "s": "s",
    "1+c": "1 + c",
    "1-c": "1 - c",
    "c": "c",
    "1-a": "1 - a",
    "1-b": "1 - b",
    "a": "a",
    "b": "b",
    "1+x^2": "1 + x^2",
    "1+y^2": "1 + y^2",
    "x^2-1": "x^2 - 1",
    "y^2-1": "y^2 - 1",
    "D_a": "a^2 c - c + a^2 + 1",
    "D_b": "b^2 c - c + b^2 + 1",
    # the same substitution read in the wrong ring (negative controls only)
    "D'_a": "a^2 c + c + a^2 - 1",
    "D'_b": "b^2 c + c + b^2 - 1",
    "1+k^2": "1 + k^2",
    "k^2-1": "k^2 - 1",
}

_ATOM_CACHE: Dict[str, Dict[str, TrigPoly]] = {}


def atoms(mode: str) -> Dict[str, TrigPoly]:
    if mode not in _ATOM_CACHE:
        _ATOM_CACHE[mode] = {name: parse_poly(text, mode) for name, text in _ATOM_TEXT.items()}
    return _ATOM_CACHE[mode]


def factor_over_atoms(p: TrigPoly) -> Tuple[Fraction, Counter]:
    """Write ``p = const * prod(atoms)``; raise if impossible."""
    if p.is_zero():
        raise ZeroDivisionError("denominator is identically zero")
    found: Counter = Counter()
    reg = atoms(p.mode)
    rest = p
    progress = True
    while not rest.is_constant() and progress:
        progress = False
        for name, atom in reg.items():
            q = exact_div(rest, atom)
            if q is not None:
                found[name] += 1
                rest = q
                progress = True
                break
    if not rest.is_constant():
        raise UnsupportedDenominator(f"denominator factor {rest} is not a product of supported atoms")
    return rest.constant_value(), found


# ---------------------------------------------------------------------------
# fractions and clearing
# ---------------------------------------------------------------------------

@dataclass
class RatForm:
    """``num / prod(atom ** mult)``; ``conds`` collects every atom ever inverted."""
    num: TrigPoly
    den: Counter = field(default_factory=Counter)
    conds: frozenset = frozenset()

    def den_poly(self) -> TrigPoly:
        reg = atoms(self.num.mode)
        out = TrigPoly.const(1, self.num.mode)
        for name, n in sorted(self.den.items()):
            out = out * reg[name] ** n
        return out


def _scale_to(f: RatForm, target: Counter) -> TrigPoly:
    reg = atoms(f.num.mode)
    out = f.num
    for name, n in sorted(target.items()):
        extra = n - f.den.get(name, 0)
        if extra:
            out = out * reg[name] ** extra
    return out


def to_ratform(e: Expr, mode: str) -> RatForm:
    if isinstance(e, Const):
        return RatForm(TrigPoly.const(e.value, mode))
    if isinstance(e, Sym):
        return RatForm(TrigPoly.var(e.name, mode))
    if isinstance(e, Add):
        parts = [to_ratform(a, mode) for a in e.args]
        den: Counter = Counter()
        for p in parts:
            for name, n in p.den.items():
                den[name] = max(den[name], n)
        num = TrigPoly.const(0, mode)
        for p in parts:
            num = num + _scale_to(p, den)
        return RatForm(num, den, frozenset().union(*(p.conds for p in parts)))
    if isinstance(e, Mul):
        num = TrigPoly.const(1, mode)
        den: Counter = Counter()
        conds = frozenset()
        for a in e.args:
            p = to_ratform(a, mode)
            num = num * p.num
            den.update(p.den)
            conds |= p.conds
        return RatForm(num, den, conds)
    if isinstance(e, Pow):
        p = to_ratform(e.base, mode)
        return RatForm(p.num ** e.n, Counter({k: v * e.n for k, v in p.den.items()}), p.conds)
    if isinstance(e, Inv):
        p = to_ratform(e.arg, mode)
        const, found = factor_over_atoms(p.num)
        return RatForm(p.den_poly() / const, found, p.conds | frozenset(found))
    raise TypeError(f"unknown node {e!r}")


@dataclass
class Cleared:
    """Numerator after multiplying through by ``prod(factors)``.

    ``side_conditions`` lists every atom that was inverted anywhere in the
    expression, including ones that cancelled before the end.
    """
    numerator: TrigPoly
    factors: List[str]
    side_conditions: List[str]

    def factor_polys(self) -> List[TrigPoly]:
        reg = atoms(self.numerator.mode)
        return [reg[name] for name in self.factors]


def clear_denominators(e: Expr, mode: str) -> Cleared:
    """Numerator polynomial of ``e`` and the atoms cleared from it (with multiplicity)."""
    f = to_ratform(e, mode)
    factors = [name for name, n in sorted(f.den.items()) for _ in range(n)]
    return Cleared(f.num, factors, sorted(f.conds))


def clear_pair(lhs: Expr, rhs: Expr, mode: str) -> Tuple[TrigPoly, TrigPoly, List[str]]:
    """Both sides of ``lhs = rhs`` over one common atom denominator."""
    fl, fr = to_ratform(lhs, mode), to_ratform(rhs, mode)
    den: Counter = Counter()
    for f in (fl, fr):
        for name, n in f.den.items():
            den[name] = max(den[name], n)
    factors = [name for name, n in sorted(den.items()) for _ in range(n)]
    return _scale_to(fl, den), _scale_to(fr, den), factors


def flip_first_coefficient(e: Expr) -> Expr:
    """Negate the first constant in ``e`` whose value is not 0 or -1 (mutation testing)."""
    done = [False]

    def go(node: Expr) -> Expr:
        if done[0]:
            return node
        if isinstance(node, Const):
            if node.value not in (0, -1):
                done[0] = True
                return Const(-node.value)
            return node
        if isinstance(node, Sym):
            return node
        if isinstance(node, Add):
            return Add(tuple(go(a) for a in node.args))
        if isinstance(node, Mul):
            return Mul(tuple(go(a) for a in node.args))
        if isinstance(node, Pow):
            return Pow(go(node.base), node.n)
        if isinstance(node, Inv):
            return Inv(go(node.arg))
        raise TypeError(node)

    out = go(e)
    if not done[0]:
        out = e + 1
    return out


# ---------------------------------------------------------------------------
# substitution and differentiation
# ---------------------------------------------------------------------------

def subs(e: Expr, mapping: Mapping[str, object]) -> Expr:
    mapping = {k: as_expr(v) for k, v in mapping.items()}

    def go(node: Expr) -> Expr:
        if isinstance(node, Sym):
            return mapping.get(node.name, node)
        if isinstance(node, Const):
            return node
        if isinstance(node, Add):
            return Add(tuple(go(a) for a in node.args))
        if isinstance(node, Mul):
            return Mul(tuple(go(a) for a in node.args))
        if isinstance(node, Pow):
            return Pow(go(node.base), node.n)
        if isinstance(node, Inv):
            return Inv(go(node.arg))
        raise TypeError(node)

    return go(e)


def _chain_rules(mode: str) -> Dict[str, Dict[str, Expr]]:
    s, c, x, y, k = (Sym(n) for n in "s c x y k".split())
    if mode == "trig":
        return {
            "s": {"t": c},
            "c": {"t": -s},
            "u": {"x": inv(1 + x**2)},
            "v": {"y": inv(1 + y**2)},
            "k": {"t": Const(Fraction(-1, 2)) * (1 + k**2)},
        }
    return {
        "s": {"t": c},
        "c": {"t": s},
        "u": {"x": -inv(x**2 - 1)},
        "v": {"y": -inv(y**2 - 1)},
        "k": {"t": Const(Fraction(-1, 2)) * (k**2 - 1)},
    }


def diff(e: Expr, var: str, mode: str) -> Expr:
    """Symbolic partial derivative with the mode's chain rules."""
    rules = _chain_rules(mode)

    def go(node: Expr) -> Expr:
        if isinstance(node, Const):
            return Const(0)
        if isinstance(node, Sym):
            if node.name == var:
                return Const(1)
            return rules.get(node.name, {}).get(var, Const(0))
        if isinstance(node, Add):
            return Add(tuple(go(a) for a in node.args))
        if isinstance(node, Mul):
            terms = []
            for i, a in enumerate(node.args):
                da = go(a)
                if isinstance(da, Const) and da.value == 0:
                    continue
                terms.append(Mul(node.args[:i] + (da,) + node.args[i + 1:]))
            return Add(tuple(terms)) if terms else Const(0)
        if isinstance(node, Pow):
            if node.n == 0:
                return Const(0)
            return Mul((Const(node.n), Pow(node.base, node.n - 1), go(node.base)))
        if isinstance(node, Inv):
            return Mul((Const(-1), Pow(node, 2), go(node.arg)))
        raise TypeError(node)

    return go(e)


def evaluate(e: Expr, assignment: Mapping[str, object], convert=float):
    """Numeric evaluation for spot checks; ``convert`` maps rational constants
    into the number type in use (``float``, an mpmath converter, ...)."""
    def go(node):
        if isinstance(node, Const):
            return convert(node.value)
        if isinstance(node, Sym):
            return assignment[node.name]
        if isinstance(node, Add):
            total = convert(Fraction(0))
            for a in node.args:
                total = total + go(a)
            return total
        if isinstance(node, Mul):
            prod = convert(Fraction(1))
            for a in node.args:
                prod = prod * go(a)
            return prod
        if isinstance(node, Pow):
            return go(node.base) ** node.n
        if isinstance(node, Inv):
            return 1 / go(node.arg)
        raise TypeError(node)

    return go(e)
