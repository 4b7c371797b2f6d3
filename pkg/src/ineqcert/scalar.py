"""Closed-form evaluation of the two inequality functions.

``G(theta, x, y)`` on ``0 <= theta <= pi``, ``x, y >= 0``::

    sin^3 * x*y + (cos^3 - 3cos + 2)(x + y) - sin^3 - 6 sin - 6 theta + 6 pi
        - 6 arctan x + 2x/(1+x^2) - 6 arctan y + 2y/(1+y^2)

``F(ell, x, y)`` on ``ell >= 0``, ``x, y >= 1``::

    sinh^3 * x*y - (cosh^3 - 3cosh + 2)(x + y) + sinh^3 - 6 sinh - 6 ell
        + 6 arctanh(1/x) + 2x/(x^2-1) + 6 arctanh(1/y) + 2y/(y^2-1)

Every function accepts floats or :mod:`mpmath` numbers; with ``mpf`` inputs
the whole computation runs in mpmath at the ambient precision. Float
evaluations whose cancellation would cost more than about 1e-12 are
transparently redone in mpmath and rounded back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import mpmath

TRIG = "trig"
HYP = "hyp"
NEAR_SINGULAR = 1e-12
# magnitudes above which float cancellation is not trusted
_BUDGET_G = 1e5
_BUDGET_F = 1e3


class DomainError(ValueError):
    """Input outside the domain of the requested function."""


@dataclass(frozen=True)
class EvalPoint:
    mode: str
    t: float
    x: float
    y: float

    def __post_init__(self):
        if self.mode == TRIG:
            if not (0 <= self.t <= math.pi) or self.x < 0 or self.y < 0:
                raise DomainError(f"trig point needs 0<=theta<=pi, x,y>=0; got {self}")
        elif self.mode == HYP:
            if self.t < 0 or self.x < 1 or self.y < 1:
                raise DomainError(f"hyp point needs ell>=0, x,y>=1; got {self}")
        else:
            raise DomainError(f"unknown mode {self.mode!r}")

    def swapped(self) -> "EvalPoint":
        return EvalPoint(self.mode, self.t, self.y, self.x)


class ScalarResult(NamedTuple):
    value: float
    condition_flag: str = "regular"  # regular | near_singular | at_infinity


class Gradient3(NamedTuple):
    d_t: float
    d_x: float
    d_y: float
    one_sided: bool = False


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _is_mp(*vals) -> bool:
    return any(isinstance(v, (mpmath.mpf, mpmath.mpc)) for v in vals)


def _ns(*vals):
    return mpmath if _is_mp(*vals) else math


def _mp_guarded(fn, magnitude: float, *args):
    """Re-run ``fn`` in mpmath with enough digits to absorb ``magnitude``."""
    digits = 30 + int(math.log10(max(magnitude, 1.0)))
    with mpmath.workdps(digits):
        out = fn(*(mpmath.mpf(a) for a in args))
        if isinstance(out, tuple):
            return tuple(float(v) for v in out)
        return float(out)


def antiderivative(x):
    """``A(x) = int_0^x s^4/(1+s^2)^2 ds = x - 3/2 arctan x + x/(2(1+x^2))``.

    For ``x < 1/2`` the alternating series ``sum (-1)^n (n+1) x^(2n+5)/(2n+5)``
    is summed instead, avoiding the cancellation of the closed form.
    """
    ns = _ns(x)
    if x < 0.5:
        eps = mpmath.mpf(2) ** (-mpmath.mp.prec - 4) if ns is mpmath else 2.0**-60
        x2 = x * x
        power = x2 * x2 * x
        total = 0 * x
        n = 0
        while True:
            term = (n + 1) * power / (2 * n + 5)
            total += term if n % 2 == 0 else -term
            if term <= eps * abs(total) or term == 0:
                break
            power *= x2
            n += 1
        return total
    return x - 1.5 * ns.atan(x) + x / (2 * (1 + x * x)) if ns is math else (
        x - mpmath.mpf(3) / 2 * mpmath.atan(x) + x / (2 * (1 + x * x)))


def hyp_antiderivative(x):
    """``B(x) = 6 arctanh(1/x) + 2x/(x^2-1) - 4x``, decreasing on ``x > 1``
    with ``B'(x) = -4x^4/(x^2-1)^2``."""
    ns = _ns(x)
    return 6 * ns.atanh(1 / x) + 2 * x / ((x - 1) * (x + 1)) - 4 * x


def _half_angle_parts(ns, t):
    sh, ch = ns.sin(t / 2), ns.cos(t / 2)
    s = 2 * sh * ch
    one_minus_c = 2 * sh * sh
    one_plus_c = 2 * ch * ch
    c = one_plus_c - 1 if t > 1.5 else 1 - one_minus_c
    return s, c, one_minus_c, one_plus_c


def _hyp_parts(ns, t):
    sh, ch = ns.sinh(t / 2), ns.cosh(t / 2)
    s = 2 * sh * ch
    c_minus_1 = 2 * sh * sh
    c_plus_1 = 2 * ch * ch
    return s, c_plus_1 - 1, c_minus_1, c_plus_1


# ---------------------------------------------------------------------------
# G and F
# ---------------------------------------------------------------------------

def _G(t, x, y, form="direct"):
    ns = _ns(t, x, y)
    pi = ns.pi
    s, c, omc, opc = _half_angle_parts(ns, t)
    s3 = s * s * s
    head = s3 * x * y - s3 - 6 * s + 6 * (pi - t)
    if form == "direct":
        k_plus = omc * omc * (2 + c)  # cos^3 - 3cos + 2
        tail = (-6 * ns.atan(x) + 2 * x / (1 + x * x)
                - 6 * ns.atan(y) + 2 * y / (1 + y * y))
        return head + k_plus * (x + y) + tail
    if form == "integral":
        k_minus = opc * opc * (2 - c)  # -(cos^3 - 3cos - 2)
        return head - k_minus * (x + y) + 4 * antiderivative(x) + 4 * antiderivative(y)
    raise ValueError(f"unknown form {form!r}")


def _F(t, x, y):
    ns = _ns(t, x, y)
    s, c, cm1, cp1 = _hyp_parts(ns, t)
    s3 = s * s * s
    k = cm1 * cm1 * (c + 2)  # cosh^3 - 3cosh + 2
    return (s3 * x * y - k * (x + y) + s3 - 6 * s - 6 * t
            + 6 * ns.atanh(1 / x) + 2 * x / ((x - 1) * (x + 1))
            + 6 * ns.atanh(1 / y) + 2 * y / ((y - 1) * (y + 1)))


def _magnitude_G(t, x, y):
    s = math.sin(t)
    return abs(s) ** 3 * (x * y + 1) + 4 * (x + y) + 6 * (abs(s) + math.pi + 2 * math.pi)


def _magnitude_F(t, x, y):
    s3 = math.sinh(t) ** 3 if t < 700 else math.inf
    c = math.cosh(t) if t < 700 else math.inf
    big = s3 * (x * y + 1) + (c + 2) * c * c * (x + y) + 6 * t + 2 * x / (x * x - 1) + 2 * y / (y * y - 1)
    return big


def G(theta, x, y, form: str = "direct"):
    """Value of G; floats are guarded against cancellation."""
    if _is_mp(theta, x, y):
        return _G(theta, x, y, form)
    mag = _magnitude_G(theta, x, y)
    if mag > _BUDGET_G:
        return _mp_guarded(lambda *a: _G(*a, form=form), mag, theta, x, y)
    return _G(theta, x, y, form)


def F(ell, x, y):
    """Value of F; ``+inf`` when ``x`` or ``y`` equals 1."""
    if x == 1 or y == 1:
        return math.inf
    if _is_mp(ell, x, y):
        return _F(ell, x, y)
    mag = _magnitude_F(ell, x, y)
    if mag > _BUDGET_F:
        return _mp_guarded(_F, mag, ell, x, y)
    return _F(ell, x, y)


def eval_G(p: EvalPoint, form: str = "direct") -> ScalarResult:
    if p.mode != TRIG:
        raise DomainError("eval_G needs a trig-mode point")
    return ScalarResult(G(p.t, p.x, p.y, form))


def eval_F(p: EvalPoint) -> ScalarResult:
    if p.mode != HYP:
        raise DomainError("eval_F needs a hyp-mode point")
    if p.x == 1 or p.y == 1:
        return ScalarResult(math.inf, "at_infinity")
    flag = "near_singular" if min(p.x, p.y) - 1 < NEAR_SINGULAR else "regular"
    return ScalarResult(F(p.t, p.x, p.y), flag)


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------

def _grad_G(t, x, y):
    ns = _ns(t, x, y)
    s, c, omc, opc = _half_angle_parts(ns, t)
    s2 = s * s
    k_minus = opc * opc * (2 - c)
    qx = x * x / (1 + x * x)
    qy = y * y / (1 + y * y)
    d_t = 3 * s2 * (c * x * y + s * (x + y)) - 3 * k_minus
    d_x = s2 * s * y - k_minus + 4 * qx * qx
    d_y = s2 * s * x - k_minus + 4 * qy * qy
    return d_t, d_x, d_y


def _grad_F(t, x, y):
    ns = _ns(t, x, y)
    s, c, cm1, cp1 = _hyp_parts(ns, t)
    s2 = s * s
    k_minus = cp1 * cp1 * (c - 2)  # cosh^3 - 3cosh - 2
    qx = x * x / ((x - 1) * (x + 1))
    qy = y * y / ((y - 1) * (y + 1))
    d_t = 3 * s2 * (c * x * y - s * (x + y)) + 3 * k_minus
    d_x = s2 * s * y - k_minus - 4 * qx * qx
    d_y = s2 * s * x - k_minus - 4 * qy * qy
    return d_t, d_x, d_y


def grad_G(p: EvalPoint) -> Gradient3:
    """Partials of G. Boundary points give one-sided derivatives, flagged."""
    if p.mode != TRIG:
        raise DomainError("grad_G needs a trig-mode point")
    one_sided = p.t in (0, math.pi) or p.x == 0 or p.y == 0
    if _is_mp(p.t, p.x, p.y):
        return Gradient3(*_grad_G(p.t, p.x, p.y), one_sided)
    mag = _magnitude_G(p.t, p.x, p.y)
    if mag > _BUDGET_G:
        return Gradient3(*_mp_guarded(_grad_G, mag, p.t, p.x, p.y), one_sided)
    return Gradient3(*_grad_G(p.t, p.x, p.y), one_sided)


def grad_F(p: EvalPoint) -> Gradient3:
    if p.mode != HYP:
        raise DomainError("grad_F needs a hyp-mode point")
    if p.x == 1 or p.y == 1:
        raise DomainError("F is singular on x = 1 or y = 1")
    one_sided = p.t == 0
    if _is_mp(p.t, p.x, p.y):
        return Gradient3(*_grad_F(p.t, p.x, p.y), one_sided)
    q = max(p.x, p.y) ** 2 / ((min(p.x, p.y) - 1) * (min(p.x, p.y) + 1))
    mag = _magnitude_F(p.t, p.x, p.y) + 4 * q * q
    if mag > _BUDGET_F:
        return Gradient3(*_mp_guarded(_grad_F, mag, p.t, p.x, p.y), one_sided)
    return Gradient3(*_grad_F(p.t, p.x, p.y), one_sided)


def gradient(p: EvalPoint) -> Gradient3:
    return grad_G(p) if p.mode == TRIG else grad_F(p)


def value(p: EvalPoint) -> float:
    return G(p.t, p.x, p.y) if p.mode == TRIG else F(p.t, p.x, p.y)


def hessian_xy_G(p: EvalPoint):
    """``[[16x^3/(1+x^2)^3, sin^3], [sin^3, 16y^3/(1+y^2)^3]]``."""
    ns = _ns(p.t, p.x, p.y)
    s3 = ns.sin(p.t) ** 3
    gx = p.x / (1 + p.x * p.x)
    gy = p.y / (1 + p.y * p.y)
    return ((16 * gx**3, s3), (s3, 16 * gy**3))


def hessian_xy_F(p: EvalPoint):
    """``[[16x^3/(x^2-1)^3, sinh^3], [sinh^3, 16y^3/(y^2-1)^3]]``."""
    ns = _ns(p.t, p.x, p.y)
    s3 = ns.sinh(p.t) ** 3
    gx = p.x / ((p.x - 1) * (p.x + 1))
    gy = p.y / ((p.y - 1) * (p.y + 1))
    return ((16 * gx**3, s3), (s3, 16 * gy**3))


def hessian(p: EvalPoint):
    """Full 3x3 Hessian in the order (t, x, y)."""
    ns = _ns(p.t, p.x, p.y)
    t, x, y = p.t, p.x, p.y
    if p.mode == TRIG:
        s, c = ns.sin(t), ns.cos(t)
        (hxx, hxy), (_, hyy) = hessian_xy_G(p)
        htt = (6 * s * c * c - 3 * s**3) * x * y + 9 * s * s * c * (x + y) + 9 * s**3
        htx = 3 * s * s * c * y + 3 * s**3
        hty = 3 * s * s * c * x + 3 * s**3
    else:
        s, c = ns.sinh(t), ns.cosh(t)
        (hxx, hxy), (_, hyy) = hessian_xy_F(p)
        htt = (6 * s * c * c + 3 * s**3) * x * y - 9 * s * s * c * (x + y) + 9 * s**3
        htx = 3 * s * s * c * y - 3 * s**3
        hty = 3 * s * s * c * x - 3 * s**3
    return ((htt, htx, hty), (htx, hxx, hxy), (hty, hxy, hyy))


# ---------------------------------------------------------------------------
# equality manifold
# ---------------------------------------------------------------------------

class PointAtInfinity(float):
    """Marker returned for the manifold point at t = 0 (x = y = +inf)."""

    def __new__(cls):
        return super().__new__(cls, math.inf)

    def __repr__(self):
        return "PointAtInfinity()"


def manifold_point(mode: str, t) -> Tuple[float, float]:
    """``(cot(t/2), cot(t/2))`` or ``(coth(t/2), coth(t/2))``.

    ``t = 0`` returns two :class:`PointAtInfinity` markers; ``t = inf`` in
    hyp mode returns the limit ``(1, 1)``.
    """
    ns = _ns(t)
    if t == 0:
        return PointAtInfinity(), PointAtInfinity()
    if mode == TRIG:
        if not 0 < t <= math.pi + 1e-15:
            raise DomainError("trig manifold needs 0 < theta <= pi")
        if ns is math and t == math.pi:
            return 0.0, 0.0
        m = ns.cos(t / 2) / ns.sin(t / 2)
        return m, m
    if mode == HYP:
        if t < 0:
            raise DomainError("hyp manifold needs ell > 0")
        if t == math.inf:
            return 1.0, 1.0
        m = 1 / ns.tanh(t / 2)
        return m, m
    raise DomainError(f"unknown mode {mode!r}")
