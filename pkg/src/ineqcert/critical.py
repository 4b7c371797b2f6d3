"""Floating-point exploration of the stationarity systems.

Nothing here is rigorous. The grid oracle and the multistart probe are the
ground truth that certificates are cross-checked against, and
:func:`solve_alpha_beta` replays the case split of the uniqueness argument
in closed form.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import scalar
from .scalar import EvalPoint

MANIFOLD_TOL = 1e-6
RESIDUAL_TOL = 1e-10
FLAT_CORNER = 1e-2


# ---------------------------------------------------------------------------
# vectorised G and F (plain double precision)
# ---------------------------------------------------------------------------

def _four_a(x):
    """4 A(x) with the small-x series, elementwise."""
    x = np.asarray(x, float)
    out = np.empty_like(x)
    small = x < 0.5
    xs = x[small]
    z = xs * xs
    acc = np.zeros_like(xs)
    for n in reversed(range(30)):
        acc = acc * z + 4 * (-1) ** n * (n + 1) / (2 * n + 5)
    out[small] = acc * z * z * xs
    xl = x[~small]
    with np.errstate(over="ignore", invalid="ignore"):
        out[~small] = 4 * xl - 6 * np.arctan(xl) + 2 * xl / (1 + xl * xl)
    return out


def g_numpy(theta, x, y):
    """G evaluated elementwise; written with (pi - theta) for accuracy near pi."""
    theta, x, y = np.broadcast_arrays(*(np.asarray(v, float) for v in (theta, x, y)))
    tau = np.pi - theta
    s = np.sin(tau)
    k = 4 * np.sin(tau / 2) ** 4 * (2 + np.cos(tau))  # cos^3 - 3cos + 2 in theta
    t = 6 * tau - s ** 3 - 6 * s
    with np.errstate(over="ignore", invalid="ignore"):
        out = s ** 3 * x * y - k * (x + y) + t + _four_a(x) + _four_a(y)
    return out


def _h(z):
    with np.errstate(divide="ignore"):
        return 6 * np.arctanh(1 / z) + 2 * z / ((z - 1) * (z + 1))


def f_numpy(ell, x, y):
    """F evaluated elementwise for ell >= 0, x, y > 1.

    For ell >= 1 the terms are expanded around the manifold value
    m = coth(ell/2), using F(ell, m, m) = 0 and dF/dx = 0 there:
    ``F = sinh^3 (x-m)(y-m) + D(x) + D(y)`` with D the Bregman gap of
    ``h(z) = 6 arctanh(1/z) + 2z/(z^2-1)``. The direct form loses about
    ``sinh(ell)^3 xy`` ulps to cancellation.
    """
    ell, x, y = np.broadcast_arrays(*(np.asarray(v, float) for v in (ell, x, y)))
    s = np.sinh(ell)
    p = 4 * np.sinh(ell / 2) ** 4 * (np.cosh(ell) + 2)
    direct = s ** 3 * x * y - p * (x + y) + s ** 3 - 6 * s - 6 * ell + _h(x) + _h(y)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        m = 1 / np.tanh(ell / 2)
        hm = _h(m)
        dh = (4 - 8 * m * m) * np.sinh(ell / 2) ** 4  # h'(m), as m^2 - 1 = 1/sinh^2(ell/2)
        gap = lambda z: _h(z) - hm - dh * (z - m)
        near = s ** 3 * (x - m) * (y - m) + gap(x) + gap(y)
    return np.where(ell >= 1, near, direct)


def value_numpy(mode: str, t, x, y):
    return g_numpy(t, x, y) if mode == scalar.TRIG else f_numpy(t, x, y)


# ---------------------------------------------------------------------------
# Newton on the gradient
# ---------------------------------------------------------------------------

@dataclass
class StationaryPoint:
    point: EvalPoint
    residual: float
    classification: str  # manifold | boundary | spurious | diverged
    iterations: int = 0
    converged: bool = True
    message: str = ""

    def as_row(self):
        p = self.point
        return [p.mode, repr(p.t), repr(p.x), repr(p.y), f"{self.residual:.3e}",
                self.classification, self.iterations]


def _compact(mode, t, x, y):
    if mode == scalar.TRIG:
        return math.pi - t, math.atan(x), math.atan(y)
    inv = (lambda z: math.inf if z <= 1 else math.atanh(1 / z))
    return t, inv(x), inv(y)


def manifold_distance(p: EvalPoint) -> float:
    """Sup-distance of (u, v) from tau/2 in compact coordinates."""
    tau, u, v = _compact(p.mode, p.t, p.x, p.y)
    return max(abs(u - tau / 2), abs(v - tau / 2))


def _clip(mode, z):
    t, x, y = z
    if mode == scalar.TRIG:
        return np.array([min(max(t, 0.0), math.pi), max(x, 0.0), max(y, 0.0)])
    lo = 1 + 1e-12
    return np.array([max(t, 0.0), max(x, lo), max(y, lo)])


def _grad(mode, z) -> np.ndarray:
    g = scalar.gradient(EvalPoint(mode, *map(float, z)))
    return np.array([g.d_t, g.d_x, g.d_y])


def _on_boundary(mode, z, tol=1e-6) -> bool:
    """Domain edges, plus the flat corner around (pi, 0, 0) for trig.

    Near that corner G is O((pi - theta)^5) and every gradient component is
    below the residual tolerance, so Newton stalls anywhere in it.
    """
    t, x, y = z
    if mode == scalar.TRIG:
        if max(math.pi - t, x, y) <= FLAT_CORNER:
            return True
        return t <= tol or t >= math.pi - tol or x <= tol or y <= tol
    return t <= tol or x <= 1 + tol or y <= 1 + tol


def newton_stationary(mode: str, start, max_iter: int = 200) -> StationaryPoint:
    """Damped Newton on grad = 0, clipped to the domain.

    Steps are halved (at most 40 times) until the residual decreases. The
    Hessian is singular along the manifold, so the step is a least-squares
    solve.
    """
    z = _clip(mode, np.asarray(start if not isinstance(start, EvalPoint)
                               else (start.t, start.x, start.y), float))
    g = _grad(mode, z)
    res = float(np.max(np.abs(g)))
    it = 0
    msg = ""
    converged = False
    moved = math.inf
    for it in range(1, max_iter + 1):
        if res <= 1e-12:
            converged = True
            break
        h = np.array(scalar.hessian(EvalPoint(mode, *map(float, z))), float)
        step = np.linalg.lstsq(h, -g, rcond=1e-9)[0]
        lam = 1.0
        for _ in range(41):
            cand = _clip(mode, z + lam * step)
            try:
                gc = _grad(mode, cand)
            except (scalar.DomainError, ValueError, ZeroDivisionError, OverflowError):
                gc = None
            if gc is not None and np.all(np.isfinite(gc)) and np.max(np.abs(gc)) < res:
                break
            lam *= 0.5
        else:
            msg = "no decrease along the Newton direction"
            break
        moved = float(np.max(np.abs(cand - z)))
        z, g = cand, gc
        res = float(np.max(np.abs(g)))
        if moved <= 1e-14:
            # a stalled step only counts if the residual is small as well
            converged = res <= RESIDUAL_TOL
            msg = "" if converged else "step stalled above the residual tolerance"
            break
    else:
        msg = "iteration limit"
    if not np.all(np.isfinite(z)):
        return StationaryPoint(EvalPoint(mode, *map(float, _clip(mode, np.nan_to_num(z)))), math.inf,
                               "diverged", it, False, "non-finite iterate")
    p = EvalPoint(mode, *map(float, z))
    if _on_boundary(mode, z):
        # clipped onto an edge: a boundary critical point, the gradient need not vanish there
        return StationaryPoint(p, res, "boundary", it, converged or moved <= 1e-14, msg)
    if res > RESIDUAL_TOL:
        return StationaryPoint(p, res, "diverged", it, False, msg)
    if manifold_distance(p) <= MANIFOLD_TOL:
        cls = "manifold"
    else:
        cls = "spurious"
    return StationaryPoint(p, res, cls, it, True, msg)


def start_points(mode: str, n: int, seed: int = 0) -> np.ndarray:
    """Scrambled Sobol starts in the interior (natural coordinates)."""
    from scipy.stats import qmc

    m = max(int(math.ceil(math.log2(max(n, 2)))), 1)
    q = qmc.Sobol(3, scramble=True, seed=seed).random_base2(m)[:n]
    if mode == scalar.TRIG:
        lo, hi = np.array([0.3, 0.0, 0.0]), np.array([math.pi - 0.05, 10.0, 10.0])
    else:
        lo, hi = np.array([0.2, 1.05, 1.05]), np.array([5.0, 10.0, 10.0])
    return lo + q * (hi - lo)


def multistart(mode: str, n: int = 1000, seed: int = 0) -> List[StationaryPoint]:
    return [newton_stationary(mode, z) for z in start_points(mode, n, seed)]


# ---------------------------------------------------------------------------
# the alpha / beta case split
# ---------------------------------------------------------------------------

@dataclass
class AlphaBetaState:
    alpha: float
    beta: float
    c: Optional[float]
    branch: str  # alpha_zero | alpha_eq_beta | alpha_beta_one
    admissible: bool
    reason: str = ""


def _c_of(alpha, beta):
    if alpha == 1 or beta == 1:
        return None
    return 1 / (1 - alpha) + 1 / (1 - beta)


def _c_ok(mode, c) -> bool:
    if c is None:
        return True
    return -1 < c < 1 if mode == scalar.TRIG else c > 1


def _cos_name(mode):
    return "cos(theta)" if mode == scalar.TRIG else "cosh(l)"


def solve_alpha_beta(mode: str) -> List[AlphaBetaState]:
    """Enumerate the non-negative solutions of the reduced system, branch by branch.

    With ``x = alpha k``, ``y = beta k`` (k the manifold value) and
    ``c = 1/(1-alpha) + 1/(1-beta)`` the stationarity system becomes
    ``4a + (1-ab)^2 = a(1+ab)^2`` together with its swap; subtracting gives
    ``(a - b)(4 - (1+ab)^2) = 0``. The ``alpha = 0`` case is read off the
    un-divided equation ``4b^4 = b(b-1)(1+2b)^2``, i.e. ``b(3b+1) = 0``.
    """
    out: List[AlphaBetaState] = []
    name = _cos_name(mode)

    # alpha = 0: b(3b+1) = 0 forces b = 0 and then c = 2
    for b in sorted(r.real for r in np.roots([-3.0, -1.0, 0.0]) if abs(r.imag) < 1e-12):
        if b < 0:
            continue
        b = 0.0 if abs(b) < 1e-15 else b
        c = _c_of(0.0, b)
        reason = f"{name} = {c:g} outside its range"
        if mode == scalar.HYP:
            reason += "; x = y = 0 also violates x, y >= 1"
        out.append(AlphaBetaState(0.0, b, c, "alpha_zero", False, reason))

    # alpha = beta: 4a + (1-a^2)^2 = a(1+a^2)^2, i.e. -a^5 + a^4 - 2a^3 - 2a^2 + 3a + 1 = 0
    roots = np.roots([-1.0, 1.0, -2.0, -2.0, 3.0, 1.0])
    for r in sorted(roots, key=lambda z: (z.real, z.imag)):
        if abs(r.imag) > 1e-9 or r.real < 0:
            continue
        a = float(r.real)
        if abs(a - 1) < 1e-9:
            out.append(AlphaBetaState(1.0, 1.0, None, "alpha_eq_beta", True,
                                      "alpha = beta = 1 is the manifold point x = y = k"))
        else:
            c = _c_of(a, a)
            ok = _c_ok(mode, c)
            out.append(AlphaBetaState(a, a, c, "alpha_eq_beta", ok,
                                      "" if ok else f"{name} = {c:.6g} outside its range"))

    # alpha * beta = 1: the equation holds identically, and c = 1
    for a in (0.5, 2.0):
        out.append(AlphaBetaState(a, 1 / a, 1.0, "alpha_beta_one", False,
                                  f"{name} = 1 forces the excluded endpoint (family, samples shown)"))
    return out


def reduced_residuals(alpha: float, beta: float) -> Tuple[float, float]:
    """Residuals of ``4a + (1-ab)^2 - a(1+ab)^2`` and its swap."""
    ab = alpha * beta
    r1 = 4 * alpha + (1 - ab) ** 2 - alpha * (1 + ab) ** 2
    r2 = 4 * beta + (1 - ab) ** 2 - beta * (1 + ab) ** 2
    return r1, r2


# ---------------------------------------------------------------------------
# grid oracle
# ---------------------------------------------------------------------------

def brute_force_min(mode: str, box, grid_n: int, *, compact: bool = False, chunk: int = 64):
    """Exhaustive grid minimum. Returns ``((t, x, y), value)``.

    ``box`` is ``((t0, t1), (x0, x1), (y0, y1))``; with ``compact=True`` the
    last two ranges are in u = arctan x (trig) or w = arctanh(1/x) (hyp) and
    the grid is uniform there. Ties go to the lexicographically smallest
    index because ``argmin`` returns the first occurrence in C order.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    axes = [np.linspace(lo, hi, grid_n) for lo, hi in box]
    t_ax, x_ax, y_ax = axes
    if compact:
        if mode == scalar.TRIG:
            x_ax, y_ax = np.tan(x_ax), np.tan(y_ax)
        else:
            with np.errstate(divide="ignore"):
                x_ax, y_ax = 1 / np.tanh(x_ax), 1 / np.tanh(y_ax)
    best = math.inf
    arg = None
    X, Y = np.meshgrid(x_ax, y_ax, indexing="ij")
    for i0 in range(0, grid_n, chunk):
        ts = t_ax[i0:i0 + chunk]
        vals = value_numpy(mode, ts[:, None, None], X[None], Y[None])
        vals = np.where(np.isnan(vals), np.inf, vals)
        j = int(np.argmin(vals))
        if vals.flat[j] < best:
            best = float(vals.flat[j])
            a, b, c = np.unravel_index(j, vals.shape)
            arg = (float(ts[a]), float(x_ax[b]), float(y_ax[c]))
    return arg, best


def grid_rows(mode: str, box, grid_n: int, compact: bool = False):
    """Yield (t, x, y, value) for every grid point (for CSV scans)."""
    axes = [np.linspace(lo, hi, grid_n) for lo, hi in box]
    t_ax, x_ax, y_ax = axes
    if compact:
        x_ax = np.tan(x_ax) if mode == scalar.TRIG else 1 / np.tanh(x_ax)
        y_ax = np.tan(y_ax) if mode == scalar.TRIG else 1 / np.tanh(y_ax)
    X, Y = np.meshgrid(x_ax, y_ax, indexing="ij")
    for t in t_ax:
        vals = value_numpy(mode, t, X, Y)
        for (i, j), v in np.ndenumerate(vals):
            yield float(t), float(X[i, j]), float(Y[i, j]), float(v)


def stationary_csv(points: Iterable[StationaryPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["mode", "t", "x", "y", "residual", "classification", "iterations"])
    for p in points:
        w.writerow(p.as_row())
    return buf.getvalue()
