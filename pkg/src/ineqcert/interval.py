"""Outward-rounded interval arithmetic and enclosures of G, F and their derivatives.

Rounding is done by nudging: after every floating operation the lower end
moves down and the upper end moves up by a few units in the last place.
Arithmetic moves by one ulp. Transcendentals move by two ulps on the scalar
path (``math``, i.e. the platform libm) and eight on the vectorised path,
whose SIMD kernels are only documented to four ulps.

The same :class:`Interval` class holds scalars or numpy arrays, so the
certifier can push whole batches of boxes through one evaluation.

Enclosures of G and F are assembled from pieces that are monotone (or have
a single known turning point) in one variable. Each such piece is evaluated
at the end points only, which keeps the enclosures tight where G is of
order (pi - theta)^5.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Tuple

import numpy as np

ROUNDING = "outward nudging: 1 ulp per arithmetic op, 2 ulps (libm) / 8 ulps (numpy) per transcendental"

_EPS = 2.0 ** -52
_TINY = 2.0 ** -1000
_ARITH_ULPS = 1
_SCALAR_ULPS = 2
_VECTOR_ULPS = 8


def _is_scalar(v) -> bool:
    return np.ndim(v) == 0


def _dn(v, ulps: int = _ARITH_ULPS):
    v = np.asarray(v, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        out = v - (np.abs(v) * (ulps * _EPS) + _TINY)
    return np.where(np.isfinite(v), out, v)


def _up(v, ulps: int = _ARITH_ULPS):
    v = np.asarray(v, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        out = v + (np.abs(v) * (ulps * _EPS) + _TINY)
    return np.where(np.isfinite(v), out, v)


def _scalar_step(v: float, ulps: int, direction: float) -> float:
    for _ in range(ulps):
        v = math.nextafter(v, direction)
    return v


class DomainViolation(ValueError):
    pass


class Interval:
    """Closed interval ``[lo, hi]``; ``lo``/``hi`` may be floats or equal-shape arrays.

    An interval with ``lo > hi`` is empty. Empty inputs give empty outputs.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)

    # -- construction ------------------------------------------------------
    @classmethod
    def point(cls, v):
        return cls(v, v)

    @classmethod
    def empty(cls, shape=()):
        return cls(np.full(shape, np.inf), np.full(shape, -np.inf))

    @classmethod
    def from_fraction(cls, q: Fraction):
        f = float(q)
        if Fraction(f) == q:
            return cls(f, f)
        return cls(math.nextafter(f, -math.inf), math.nextafter(f, math.inf))

    # -- queries -----------------------------------------------------------
    def is_empty(self):
        return self.lo > self.hi

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    def contains(self, v):
        return (self.lo <= v) & (v <= self.hi)

    def subset_of(self, other: "Interval"):
        return (other.lo <= self.lo) & (self.hi <= other.hi)

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(np.maximum(self.lo, other.lo), np.minimum(self.hi, other.hi))

    def hull(self, other: "Interval") -> "Interval":
        return Interval(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))

    def __getitem__(self, idx):
        return Interval(self.lo[idx], self.hi[idx])

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def _empty_mask(self, other=None):
        m = self.lo > self.hi
        if other is not None:
            m = m | (other.lo > other.hi)
        return m

    def _finish(self, lo, hi, mask):
        if np.any(mask):
            lo = np.where(mask, np.inf, lo)
            hi = np.where(mask, -np.inf, hi)
        return Interval(lo, hi)

    # -- arithmetic --------------------------------------------------------
    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __add__(self, other):
        other = as_interval(other)
        with np.errstate(invalid="ignore"):
            lo, hi = _dn(self.lo + other.lo), _up(self.hi + other.hi)
        return self._finish(lo, hi, self._empty_mask(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-as_interval(other))

    def __rsub__(self, other):
        return as_interval(other) + (-self)

    def __mul__(self, other):
        other = as_interval(other)
        with np.errstate(invalid="ignore"):
            p = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
            # 0 * inf only arises against an exact zero end point; the product is 0 there
            p = [np.where(np.isnan(q), 0.0, q) for q in p]
        lo = np.minimum(np.minimum(p[0], p[1]), np.minimum(p[2], p[3]))
        hi = np.maximum(np.maximum(p[0], p[1]), np.maximum(p[2], p[3]))
        return self._finish(_dn(lo), _up(hi), self._empty_mask(other))

    __rmul__ = __mul__

    def recip(self):
        if np.any((self.lo < 0) & (self.hi > 0)):
            raise DomainViolation("reciprocal of an interval straddling 0")
        with np.errstate(divide="ignore"):
            lo = np.where(self.hi == 0, -np.inf, 1.0 / self.hi)
            hi = np.where(self.lo == 0, np.inf, 1.0 / self.lo)
        return self._finish(_dn(lo), _up(hi), self._empty_mask())

    def __truediv__(self, other):
        return self * as_interval(other).recip()

    def __rtruediv__(self, other):
        return as_interval(other) * self.recip()

    def sqr(self):
        a, b = np.abs(self.lo), np.abs(self.hi)
        straddle = (self.lo <= 0) & (self.hi >= 0)
        lo = np.where(straddle, 0.0, np.minimum(a, b) ** 2)
        hi = np.maximum(a, b) ** 2
        return self._finish(np.maximum(_dn(lo), 0.0), _up(hi), self._empty_mask())

    def __pow__(self, n: int):
        if n == 0:
            return Interval(np.ones_like(self.lo))
        if n == 1:
            return self
        if n == 2:
            return self.sqr()
        if n % 2:
            # odd powers are monotone
            lo, hi = self.lo ** n, self.hi ** n
            return self._finish(_dn(lo, n), _up(hi, n), self._empty_mask())
        return self.sqr() ** (n // 2)

    def clip_lo(self, v):
        return Interval(np.maximum(self.lo, v), self.hi)


def as_interval(v) -> Interval:
    if isinstance(v, Interval):
        return v
    if isinstance(v, Fraction):
        return Interval.from_fraction(v)
    return Interval(v, v)


# ---------------------------------------------------------------------------
# elementary functions
# ---------------------------------------------------------------------------

def _eval_monotone(x: Interval, f_math, f_np, increasing: bool = True) -> Interval:
    if _is_scalar(x.lo):
        if x.lo > x.hi:
            return Interval.empty()
        a, b = f_math(float(x.lo)), f_math(float(x.hi))
        if not increasing:
            a, b = b, a
        return Interval(_scalar_step(a, _SCALAR_ULPS, -math.inf), _scalar_step(b, _SCALAR_ULPS, math.inf))
    with np.errstate(all="ignore"):
        a, b = f_np(x.lo), f_np(x.hi)
    if not increasing:
        a, b = b, a
    return x._finish(_dn(a, _VECTOR_ULPS), _up(b, _VECTOR_ULPS), x._empty_mask())


_PI_LO = math.pi
_PI_HI = math.nextafter(math.pi, 4.0)
PI = Interval(_PI_LO, _PI_HI)
HALF_PI = Interval(_PI_LO / 2, _PI_HI / 2)
_TWO_PI = 2 * math.pi


def _fold(x: Interval, f_math, f_np, max_at: float, min_at: float) -> Interval:
    """sin/cos style: periodic with one max and one min per period."""
    if _is_scalar(x.lo):
        if x.lo > x.hi:
            return Interval.empty()
        a, b = f_math(float(x.lo)), f_math(float(x.hi))
        lo = _scalar_step(min(a, b), _SCALAR_ULPS, -math.inf)
        hi = _scalar_step(max(a, b), _SCALAR_ULPS, math.inf)
    else:
        with np.errstate(all="ignore"):
            a, b = f_np(x.lo), f_np(x.hi)
        lo, hi = _dn(np.minimum(a, b), _VECTOR_ULPS), _up(np.maximum(a, b), _VECTOR_ULPS)
    slack = (np.abs(x.lo) + np.abs(x.hi) + 1.0) * 8 * _EPS

    def hits(at):
        n0 = np.floor((x.lo - at) / _TWO_PI)
        found = np.zeros(np.shape(x.lo), dtype=bool)
        for j in range(3):
            cand = at + _TWO_PI * (n0 + j)
            found |= (cand >= x.lo - slack) & (cand <= x.hi + slack)
        return found | (x.hi - x.lo >= _TWO_PI)

    hi = np.where(hits(max_at), 1.0, np.minimum(hi, 1.0))
    lo = np.where(hits(min_at), -1.0, np.maximum(lo, -1.0))
    return x._finish(lo, hi, x._empty_mask())


def ival_sin(x: Interval) -> Interval:
    return _fold(as_interval(x), math.sin, np.sin, math.pi / 2, -math.pi / 2)


def ival_cos(x: Interval) -> Interval:
    return _fold(as_interval(x), math.cos, np.cos, 0.0, math.pi)


def ival_tan(x: Interval) -> Interval:
    x = as_interval(x)
    if np.any(((x.lo <= -math.pi / 2) | (x.hi >= math.pi / 2)) & ~x.is_empty()):
        raise DomainViolation("tan argument must lie in (-pi/2, pi/2)")
    return _eval_monotone(x, math.tan, np.tan)


def ival_arctan(x: Interval) -> Interval:
    return _eval_monotone(as_interval(x), math.atan, np.arctan)


def ival_sinh(x: Interval) -> Interval:
    return _eval_monotone(as_interval(x), math.sinh, np.sinh)


def ival_cosh(x: Interval) -> Interval:
    x = as_interval(x)
    mag = Interval(np.where((x.lo <= 0) & (x.hi >= 0), 0.0, np.minimum(np.abs(x.lo), np.abs(x.hi))),
                   np.maximum(np.abs(x.lo), np.abs(x.hi)))
    mag = x._finish(mag.lo, mag.hi, x._empty_mask())
    out = _eval_monotone(mag, math.cosh, np.cosh)
    return Interval(np.maximum(out.lo, 1.0), out.hi)


def ival_tanh(x: Interval) -> Interval:
    return _eval_monotone(as_interval(x), math.tanh, np.tanh)


def ival_coth(x: Interval) -> Interval:
    """coth on a positive interval (decreasing)."""
    x = as_interval(x)
    if np.any((x.lo <= 0) & ~x.is_empty()):
        raise DomainViolation("coth needs a positive argument")
    return ival_tanh(x).recip()


def ival_arctanh(x: Interval, strict: bool = False) -> Interval:
    """arctanh; an upper end at 1 gives +inf, anything outside [-1, 1] is a violation.

    With ``strict=False`` an argument leaving [-1, 1] yields the empty interval.
    """
    x = as_interval(x)
    bad = ((x.lo < -1) | (x.hi > 1)) & ~x.is_empty()
    if np.any(bad):
        if strict:
            raise DomainViolation("arctanh argument must lie in [-1, 1]")
        x = x._finish(x.lo, x.hi, bad)

    def f_math(v):
        if v >= 1.0:
            return math.inf
        if v <= -1.0:
            return -math.inf
        return math.atanh(v)

    with np.errstate(divide="ignore"):
        return _eval_monotone(x, f_math, np.arctanh)


def ival_sqrt(x: Interval) -> Interval:
    x = as_interval(x).clip_lo(0.0)
    return _eval_monotone(x, math.sqrt, np.sqrt)


# ---------------------------------------------------------------------------
# one-variable building blocks
# ---------------------------------------------------------------------------

def _monotone(f: Callable[[Interval], Interval], x: Interval, increasing: bool = True) -> Interval:
    """Enclosure of a monotone ``f`` over ``x`` from its interval extension at the end points."""
    a, b = f(Interval(x.lo)), f(Interval(x.hi))
    if increasing:
        return x._finish(a.lo, b.hi, x._empty_mask())
    return x._finish(b.lo, a.hi, x._empty_mask())


def _pole_at_one(f: Callable[[Interval], Interval], x: Interval) -> Interval:
    """Decreasing ``f`` on x >= 1 with a pole (+inf) at x = 1."""
    x = as_interval(x).clip_lo(1.0)
    lo_at, hi_at = x.lo <= 1.0, x.hi <= 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        a = f(Interval(np.where(lo_at, 2.0, x.lo)))
        b = f(Interval(np.where(hi_at, 2.0, x.hi)))
    return x._finish(np.where(hi_at, np.inf, b.lo), np.where(lo_at, np.inf, a.hi), x._empty_mask())


def _unimodal_min(f, x: Interval, turn: Interval) -> Interval:
    """Enclosure of ``f`` that decreases up to ``turn`` and increases after it."""
    a, b = f(Interval(x.lo)), f(Interval(x.hi))
    at_turn = f(turn)
    inside = (x.lo < turn.hi) & (x.hi > turn.lo)
    lo = np.where(inside, np.minimum(np.minimum(a.lo, b.lo), at_turn.lo), np.minimum(a.lo, b.lo))
    return x._finish(lo, np.maximum(a.hi, b.hi), x._empty_mask())


def _series(z: Interval, coeffs) -> Interval:
    """Horner sum of ``sum coeffs[n] z^n`` plus the first omitted term as error bound."""
    acc = as_interval(coeffs[-2])
    for q in reversed(coeffs[:-2]):
        acc = acc * z + as_interval(q)
    n = len(coeffs) - 1
    bound = Interval(np.abs(float(coeffs[-1])) * 1.01) * (z ** n)
    return acc + Interval(-bound.hi, bound.hi)


_A_COEFFS = [Fraction(4 * (-1) ** n * (n + 1), 2 * n + 5) for n in range(41)]
_T_COEFFS = [Fraction((-1) ** m * (3 ** (2 * m + 5) - 27), 4 * math.factorial(2 * m + 5)) for m in range(21)]


def _four_a_point(x: Interval) -> Interval:
    small = np.minimum(x.lo, 0.5)
    xs = Interval(small, np.minimum(x.hi, 0.5))
    ser = _series(xs.sqr(), _A_COEFFS) * (xs ** 5)
    direct = 4 * x - 6 * ival_arctan(x) + 2 * x / (1 + x.sqr())
    use_series = x.hi < 0.5
    return Interval(np.where(use_series, ser.lo, direct.lo), np.where(use_series, ser.hi, direct.hi))


def four_a(x: Interval) -> Interval:
    """``4 * int_0^x s^4/(1+s^2)^2 ds`` for x >= 0 (increasing)."""
    return _monotone(_four_a_point, as_interval(x).clip_lo(0.0))


def _t_trig_point(phi: Interval) -> Interval:
    ps = Interval(np.minimum(phi.lo, 0.25), np.minimum(phi.hi, 0.25))
    ser = _series(ps.sqr(), _T_COEFFS) * (ps ** 5)
    s = ival_sin(phi)
    direct = 6 * phi - s ** 3 - 6 * s
    use_series = phi.hi < 0.25
    return Interval(np.where(use_series, ser.lo, direct.lo), np.where(use_series, ser.hi, direct.hi))


def t_trig(phi: Interval) -> Interval:
    """``-sin^3 - 6 sin + 6 (pi - theta)`` as a function of phi = pi - theta (increasing)."""
    return _monotone(_t_trig_point, phi)


def _k_trig_point(phi: Interval) -> Interval:
    h = ival_sin(phi * 0.5)
    return 4 * h.sqr().sqr() * (2 + ival_cos(phi))


def k_trig(phi: Interval) -> Interval:
    """``(1+cos)^2 (2-cos)`` of theta, written in phi (increasing on [0, pi])."""
    return _monotone(_k_trig_point, phi)


def _q_trig_point(x: Interval) -> Interval:
    r = x.sqr() / (1 + x.sqr())
    return 4 * r.sqr()


def q_trig(x: Interval) -> Interval:
    """``4x^4/(1+x^2)^2`` (increasing on x >= 0)."""
    return _monotone(_q_trig_point, as_interval(x).clip_lo(0.0))


def _q_trig_du_point(x: Interval) -> Interval:
    x2 = x.sqr()
    return 4 * x2 * (x2 / (1 + x2))


def _hyp_sinhalf_sq(ell: Interval) -> Interval:
    return ival_sinh(ell * 0.5).sqr()


def _p_hyp_point(ell: Interval) -> Interval:
    cm1 = 2 * _hyp_sinhalf_sq(ell)  # cosh - 1
    return cm1.sqr() * (cm1 + 3)


def p_hyp(ell: Interval) -> Interval:
    """``cosh^3 - 3cosh + 2 = (cosh-1)^2 (cosh+2)`` (increasing)."""
    return _monotone(_p_hyp_point, ell.clip_lo(0.0))


def _kh_point(ell: Interval) -> Interval:
    cm1 = 2 * _hyp_sinhalf_sq(ell)
    return (cm1 + 2).sqr() * (cm1 - 1)


def k_hyp(ell: Interval) -> Interval:
    """``(1+cosh)^2 (cosh-2)`` (increasing)."""
    return _monotone(_kh_point, ell.clip_lo(0.0))


ELL_STAR = Interval(math.nextafter(math.acosh(2.0), 0.0), math.nextafter(math.acosh(2.0), 4.0))


def _t_hyp_point(ell: Interval) -> Interval:
    s = ival_sinh(ell)
    return s ** 3 - 6 * s - 6 * ell


def t_hyp(ell: Interval) -> Interval:
    """``sinh^3 - 6 sinh - 6 l``; decreasing up to acosh 2, increasing after."""
    return _unimodal_min(_t_hyp_point, ell.clip_lo(0.0), ELL_STAR)


def _h_term_point(x: Interval) -> Interval:
    return 6 * ival_arctanh(1 / x) + 2 * x / ((x - 1) * (x + 1))


def h_term(x: Interval) -> Interval:
    """``6 arctanh(1/x) + 2x/(x^2-1)`` for x >= 1 (decreasing, +inf at 1)."""
    return _pole_at_one(_h_term_point, x)


def _h_term_w_point(w: Interval) -> Interval:
    return 6 * w + ival_sinh(2 * w)


def h_term_w(w: Interval) -> Interval:
    """The same term as a function of w = arctanh(1/x) (increasing)."""
    return _monotone(_h_term_w_point, w)


def _q_hyp_point(x: Interval) -> Interval:
    r = x.sqr() / ((x - 1) * (x + 1))
    return 4 * r.sqr()


def q_hyp(x: Interval) -> Interval:
    """``4x^4/(x^2-1)^2`` (decreasing on x > 1)."""
    return _pole_at_one(_q_hyp_point, x)


SQRT2 = Interval(math.nextafter(math.sqrt(2.0), 0.0), math.nextafter(math.sqrt(2.0), 4.0))


def _q_hyp_dw_point(x: Interval) -> Interval:
    x2 = x.sqr()
    return 4 * x2 * (x2 / ((x - 1) * (x + 1)))


# ---------------------------------------------------------------------------
# boxes and the two functions
# ---------------------------------------------------------------------------

@dataclass
class Box3:
    """A box in the natural coordinates (t, x, y), clipped to the domain."""

    mode: str
    t: Interval
    x: Interval
    y: Interval

    def __post_init__(self):
        self.t, self.x, self.y = as_interval(self.t), as_interval(self.x), as_interval(self.y)
        if self.mode == "trig":
            # pi itself is only representable as the float just below it
            self.t = Interval(np.clip(self.t.lo, 0.0, math.pi), np.clip(self.t.hi, 0.0, math.pi))
            self.x, self.y = self.x.clip_lo(0.0), self.y.clip_lo(0.0)
        elif self.mode == "hyp":
            self.t = self.t.clip_lo(0.0)
            self.x, self.y = self.x.clip_lo(1.0), self.y.clip_lo(1.0)
        else:
            raise ValueError(f"unknown mode {self.mode!r}")

    @classmethod
    def from_bounds(cls, mode, t, x, y):
        return cls(mode, Interval(*t), Interval(*x), Interval(*y))

    def phi(self) -> Interval:
        """pi - theta, with the top of the theta range read as reaching pi."""
        return Interval(np.maximum(_PI_LO - self.t.hi, 0.0), _up(_PI_HI - self.t.lo))


def _g_body(phi: Interval, x: Interval, y: Interval, ax: Interval, ay: Interval) -> Interval:
    s3 = ival_sin(phi) ** 3
    return s3 * x * y - k_trig(phi) * (x + y) + t_trig(phi) + ax + ay


def _f_body(ell: Interval, x: Interval, y: Interval, hx: Interval, hy: Interval) -> Interval:
    s3 = ival_sinh(ell) ** 3
    return s3 * x * y - p_hyp(ell) * (x + y) + t_hyp(ell) + hx + hy


def eval_G_interval(b: Box3) -> Interval:
    if b.mode != "trig":
        raise ValueError("eval_G_interval needs a trig box")
    return _g_body(b.phi(), b.x, b.y, four_a(b.x), four_a(b.y))


def eval_F_interval(b: Box3) -> Interval:
    if b.mode != "hyp":
        raise ValueError("eval_F_interval needs a hyp box")
    return _f_body(b.t, b.x, b.y, h_term(b.x), h_term(b.y))


def eval_interval(b: Box3) -> Interval:
    return eval_G_interval(b) if b.mode == "trig" else eval_F_interval(b)


def eval_gradG_interval(b: Box3) -> Tuple[Interval, Interval, Interval]:
    """Enclosures of dG/dtheta, dG/dx, dG/dy."""
    phi = b.phi()
    s = ival_sin(phi)
    c = -ival_cos(phi)
    k = k_trig(phi)
    x, y = b.x, b.y
    d_t = 3 * s.sqr() * (c * x * y + s * (x + y)) - 3 * k
    s3 = s ** 3
    return d_t, s3 * y - k + q_trig(x), s3 * x - k + q_trig(y)


def eval_gradF_interval(b: Box3) -> Tuple[Interval, Interval, Interval]:
    """Enclosures of dF/dl, dF/dx, dF/dy."""
    ell = b.t
    s = ival_sinh(ell)
    c = ival_cosh(ell)
    kh = k_hyp(ell)
    x, y = b.x, b.y
    d_t = 3 * s.sqr() * (c * x * y - s * (x + y)) + 3 * kh
    s3 = s ** 3
    return d_t, s3 * y - kh - q_hyp(x), s3 * x - kh - q_hyp(y)


def eval_grad_interval(b: Box3):
    return eval_gradG_interval(b) if b.mode == "trig" else eval_gradF_interval(b)


def eval_hessian_xy_interval(b: Box3) -> Tuple[Interval, Interval, Interval]:
    """(d_xx, d_xy, d_yy) of G or F over the box."""
    if b.mode == "trig":
        def gxx(x):
            return _unimodal_max(lambda z: 16 * z ** 3 / (1 + z.sqr()) ** 3, x)
        return gxx(b.x), ival_sin(b.phi()) ** 3, gxx(b.y)

    def fxx(x):
        return _pole_at_one(lambda z: 16 * z ** 3 / ((z - 1) * (z + 1)) ** 3, x)
    return fxx(b.x), ival_sinh(b.t) ** 3, fxx(b.y)


def _unimodal_max(f, x: Interval) -> Interval:
    """Lower end of a function with a single interior maximum: the smaller end value.

    The upper end comes from the naive extension, so no turning point is needed.
    """
    a, b = f(Interval(x.lo)), f(Interval(x.hi))
    with np.errstate(all="ignore"):
        naive = f(x)
    return x._finish(np.minimum(a.lo, b.lo), naive.hi, x._empty_mask())


# ---------------------------------------------------------------------------
# compactified coordinates (tau, u, v)
#
#   trig: tau = pi - theta, x = tan u;    hyp: tau = l, x = coth u
#
# In both cases the equality manifold is the line u = v = tau / 2.
# ---------------------------------------------------------------------------

def x_of_u(mode: str, u: Interval) -> Interval:
    if mode == "trig":
        return ival_tan(u)
    return ival_coth(u)


def value_compact(mode: str, tau: Interval, u: Interval, v: Interval) -> Interval:
    x, y = x_of_u(mode, u), x_of_u(mode, v)
    if mode == "trig":
        return _g_body(tau, x, y, four_a(x), four_a(y))
    return _f_body(tau, x, y, h_term_w(u), h_term_w(v))


def grad_compact(mode: str, tau: Interval, u: Interval, v: Interval):
    """Enclosures of the partials in (tau, u, v)."""
    x, y = x_of_u(mode, u), x_of_u(mode, v)
    if mode == "trig":
        s = ival_sin(tau)
        k = k_trig(tau)
        # d/dtau = -d/dtheta, with cos(theta) = -cos(tau)
        d_tau = 3 * s.sqr() * (ival_cos(tau) * x * y - s * (x + y)) + 3 * k
        s3 = s ** 3
        d_u = (s3 * y - k) * (1 + x.sqr()) + _monotone(_q_trig_du_point, x)
        d_v = (s3 * x - k) * (1 + y.sqr()) + _monotone(_q_trig_du_point, y)
        return d_tau, d_u, d_v
    s = ival_sinh(tau)
    kh = k_hyp(tau)
    d_tau = 3 * s.sqr() * (ival_cosh(tau) * x * y - s * (x + y)) + 3 * kh
    s3 = s ** 3
    with np.errstate(divide="ignore", invalid="ignore"):
        qx = _unimodal_min(_q_hyp_dw_point, x, SQRT2)
        qy = _unimodal_min(_q_hyp_dw_point, y, SQRT2)
    d_u = -(s3 * y - kh) * ((x - 1) * (x + 1)) + qx
    d_v = -(s3 * x - kh) * ((y - 1) * (y + 1)) + qy
    return d_tau, d_u, d_v


def hessian_xy_compact(mode: str, tau: Interval, u: Interval, v: Interval):
    """(H_xx, H_xy, H_yy) in x, y coordinates, written through u, v.

    trig: H_xx = 2 sin^3(2u); hyp: H_xx = 2 sinh^3(2u); H_xy = sin^3 / sinh^3 of tau.
    """
    if mode == "trig":
        return 2 * ival_sin(2 * u) ** 3, ival_sin(tau) ** 3, 2 * ival_sin(2 * v) ** 3
    return 2 * ival_sinh(2 * u) ** 3, ival_sinh(tau) ** 3, 2 * ival_sinh(2 * v) ** 3


def mean_value_enclosure(mode: str, tau: Interval, u: Interval, v: Interval, grad=None):
    """Naive enclosure intersected with the centred (mean-value) form."""
    naive = value_compact(mode, tau, u, v)
    if grad is None:
        grad = grad_compact(mode, tau, u, v)
    mids = [Interval(z.mid) for z in (tau, u, v)]
    centre = value_compact(mode, *mids)
    mv = centre
    for g, z, m in zip(grad, (tau, u, v), mids):
        mv = mv + g * (z - m)
    with np.errstate(invalid="ignore"):
        lo = np.fmax(naive.lo, mv.lo)
        hi = np.fmin(naive.hi, mv.hi)
    return Interval(lo, hi), centre


# ---------------------------------------------------------------------------
# blow-up coordinates near theta = pi
#
# With k = cot(theta/2) and x = a k, y = b k one has G(theta, x, y) = k^5 N(k, a, b),
#   N = [8ab - 4(k^2+3)(a+b)] / (1+k^2)^3 + T(k)/k^5 + a^5 Phi(a k) + b^5 Phi(b k),
# where Phi(z) = 4A(z)/z^5 and T is the theta-only part of G. N is smooth at
# k = 0 with a non-degenerate minimum at a = b = 1, which is what makes the
# corner (pi, 0, 0) certifiable.
# ---------------------------------------------------------------------------

_PHI_COEFFS = _A_COEFFS
# T(k) = -8k^3/(1+k^2)^3 - 12k/(1+k^2) + 12 arctan k = sum_n t_n k^(2n+1)
_TK_COEFFS = []
for _n in range(2, 42):
    _t = Fraction(12 * (-1) ** _n, 2 * _n + 1) - 12 * (-1) ** _n
    _t += -8 * (-1) ** (_n - 1) * Fraction(math.comb(_n + 1, 2))
    _TK_COEFFS.append(_t)
del _n, _t


def _phi_point(z: Interval) -> Interval:
    zs = Interval(np.minimum(z.lo, 0.5), np.minimum(z.hi, 0.5))
    ser = _series(zs.sqr(), _PHI_COEFFS)
    zc = Interval(np.maximum(z.lo, 0.5), np.maximum(z.hi, 0.5))
    direct = (4 * zc - 6 * ival_arctan(zc) + 2 * zc / (1 + zc.sqr())) / zc ** 5
    use_series = z.hi < 0.5
    return Interval(np.where(use_series, ser.lo, direct.lo), np.where(use_series, ser.hi, direct.hi))


def phi_a(z: Interval) -> Interval:
    """``4A(z)/z^5`` for z >= 0 (decreasing, 4/5 at 0)."""
    return _monotone(_phi_point, as_interval(z).clip_lo(0.0), increasing=False)


def _tk_point(k: Interval) -> Interval:
    return _series(k.sqr(), _TK_COEFFS)


def tk5(k: Interval) -> Interval:
    """T(k)/k^5 for 0 <= k <= 0.6 by its power series with a tail bound."""
    if np.any(k.hi > 0.6):
        raise DomainViolation("series for T(k)/k^5 used beyond k = 0.6")
    # terms are not alternating in magnitude order for all n, so bound the tail geometrically
    z = k.sqr()
    acc = as_interval(_TK_COEFFS[-1])
    for q in reversed(_TK_COEFFS[:-1]):
        acc = acc * z + as_interval(q)
    n = len(_TK_COEFFS)
    # |t_n| <= 4 (n+2)^2 and z <= 0.36: tail <= sum_{m>=n} 4 (m+4)^2 z^m
    zmax = float(np.max(z.hi)) if np.size(z.hi) else 0.0
    tail = 4 * (n + 6) ** 2 * zmax ** n / (1 - zmax) ** 3
    return acc + Interval(-tail, tail)


def cap_value(k: Interval, a: Interval, b: Interval) -> Interval:
    k2 = k.sqr()
    lam = 0.5 * (k2 + 3)
    front = (8 * (a - lam) * (b - lam) - 8 * lam.sqr()) / (1 + k2) ** 3
    return front + tk5(k) + a ** 5 * phi_a(a * k) + b ** 5 * phi_a(b * k)


def cap_grad_ab(k: Interval, a: Interval, b: Interval):
    """dN/da, dN/db (k enters as a parameter)."""
    k2 = k.sqr()
    den = (1 + k2) ** 3
    lam = 4 * (k2 + 3)

    def q(z):
        return _monotone(lambda t: 4 * t ** 4 / (1 + t.sqr() * k2).sqr(), z)

    return (8 * b - lam) / den + q(a), (8 * a - lam) / den + q(b)


def cap_hessian_ab(k: Interval, a: Interval, b: Interval):
    k2 = k.sqr()

    def d2(z):
        return _unimodal_max(lambda t: 16 * t ** 3 / (1 + t.sqr() * k2) ** 3, z)
    return d2(a), 8 / (1 + k2) ** 3, d2(b)


def cap_enclosure(k: Interval, a: Interval, b: Interval):
    """Naive enclosure of N intersected with the mean-value form in (a, b)."""
    naive = cap_value(k, a, b)
    ga, gb = cap_grad_ab(k, a, b)
    ma, mb = Interval(a.mid), Interval(b.mid)
    mv = cap_value(k, ma, mb) + ga * (a - ma) + gb * (b - mb)
    return Interval(np.fmax(naive.lo, mv.lo), np.fmin(naive.hi, mv.hi)), (ga, gb)
