"""Branch-and-bound certification of G >= 0 and F >= 0.

Boxes live in compactified coordinates ``(tau, u, v)``:

* trig: ``tau = pi - theta``, ``x = tan u``;
* hyp:  ``tau = l``,          ``x = coth u``.

Both equality manifolds become the straight line ``u = v = tau/2``.

A certificate is assembled from independent parts.

region
    Boxes outside the tube ``|u - tau/2| <= rho, |v - tau/2| <= rho`` whose
    interval lower bound is positive. The smallest accepted bound is the
    margin ``delta``.
tube
    Per slice of ``tau``: a core square on which the Hessian in (x, y) is
    positive definite for every ``tau`` of the slice. Since the manifold
    point is stationary with value exactly 0 (ledger steps ``G_manifold_zero``
    and ``G_partial_x_alpha``), convexity gives ``>= 0`` on the core. The rest
    of the slice (the ring) is branch-and-bound.
cap (trig only)
    Near ``theta = pi`` the function is of order ``(pi-theta)^5`` and the
    core argument degenerates. There ``G(theta, ak, bk) = k^5 N(k, a, b)``
    with ``k = cot(theta/2)``, and ``N`` has a non-degenerate minimum at
    ``a = b = 1`` (see :func:`interval.cap_value`); the tube argument is run
    on ``N`` instead.
band / corner / boundary (trig only)
    ``theta < theta_lo`` outside the corner is branch-and-bound; the corner
    next to ``(0, pi/2, pi/2)`` gets a sampled check; ``theta = pi`` uses the
    exact identity ``G(pi, x, y) = 4A(x) + 4A(y)``.

Points with ``x > X`` (trig) are covered through the outer face ``x = X``:
for ``y >= X``, ``G(t, x, y) >= G(t, x, X) - eta`` with
``eta = 6(pi/2 - arctan X) + 2X/(1+X^2)``, so face boxes must clear ``eta``.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from . import interval as iv
from .interval import Interval

EPSILON = 1e-9
STATUS_ORDER = ("proved_strict", "proved_up_to_epsilon", "inconclusive")
SCHEMA_VERSION = "1.0"
CHUNK = 4096


def weakest(*statuses: str) -> str:
    return max(statuses, key=STATUS_ORDER.index)


# ---------------------------------------------------------------------------
# configuration and results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TubeSpec:
    rho: float = 0.1
    slice_width: float = 0.01
    compactification: str = "arctan"

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("tube radius must be >= 0")


@dataclass
class CertConfig:
    lemma: int = 1
    t_range: Tuple[float, float] = (0.2, math.pi)
    u_range: Optional[Tuple[float, float]] = None
    x_max: float = 1e5
    rho: float = 0.1
    slice_width: float = 0.01
    budget: int = 5_000_000
    workers: int = 1
    depth_cap: int = 60
    offset: float = 0.0
    cap_theta: float = 2.6
    corner_theta: float = 0.2
    corner_margin: float = 0.15
    corner_samples: int = 1_000_000
    seed: int = 0
    band: bool = True

    @classmethod
    def default(cls, lemma: int, **overrides) -> "CertConfig":
        if lemma == 2:
            base = dict(lemma=2, t_range=(0.2, 6.0), u_range=(0.05, 3.0), band=False)
        else:
            base = dict(lemma=1)
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    @property
    def mode(self) -> str:
        return "trig" if self.lemma == 1 else "hyp"

    def tube(self) -> TubeSpec:
        return TubeSpec(self.rho, self.slice_width, "arctan" if self.lemma == 1 else "arctanh")


@dataclass
class PartResult:
    status: str
    delta: Optional[float] = None
    boxes: int = 0
    max_depth: int = 0
    residual_boxes: List[List[float]] = field(default_factory=list)
    witness: Optional[List[float]] = None
    note: str = ""
    details: Dict = field(default_factory=dict)

    def to_dict(self):
        out = {"status": self.status, "delta": self.delta, "boxes": self.boxes,
               "max_depth": self.max_depth, "note": self.note}
        if self.residual_boxes:
            out["residual_boxes"] = self.residual_boxes
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class Certificate:
    lemma: int
    status: str
    delta: Optional[float]
    region: Dict
    tube: Dict
    corner_policy: str
    parts: Dict[str, Dict]
    stats: Dict
    epsilon: float = EPSILON
    rounding: str = iv.ROUNDING
    version: str = __version__
    schema_version: str = SCHEMA_VERSION
    timing: Dict = field(default_factory=dict)

    def to_dict(self, include_timing: bool = True) -> Dict:
        d = asdict(self)
        if not include_timing:
            d.pop("timing")
        return d

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# coordinates
# ---------------------------------------------------------------------------

def compactify(obj, mode: str):
    """(t, x, y) -> (t, u, v) with u = arctan x (trig) or arctanh(1/x) (hyp).

    Accepts a point tuple, an :class:`~ineqcert.scalar.EvalPoint` or a
    :class:`~ineqcert.interval.Box3`; boxes map to boxes soundly.
    """
    if isinstance(obj, iv.Box3):
        if mode == "trig":
            return obj.t, iv.ival_arctan(obj.x), iv.ival_arctan(obj.y)
        return obj.t, iv.ival_arctanh(1 / obj.x), iv.ival_arctanh(1 / obj.y)
    t, x, y = (obj.t, obj.x, obj.y) if hasattr(obj, "mode") else obj
    if mode == "trig":
        return t, math.atan(x), math.atan(y)
    inv = lambda z: math.inf if z == 1 else math.atanh(1 / z)
    return t, inv(x), inv(y)


def decompactify(obj, mode: str):
    t, u, v = obj
    if mode == "trig":
        return t, math.tan(u), math.tan(v)
    return t, 1 / math.tanh(u), 1 / math.tanh(v)


def manifold_u(mode: str, t: float) -> float:
    """u-coordinate of the manifold: pi/2 - theta/2 (trig) or l/2 (hyp)."""
    return (math.pi - t) / 2 if mode == "trig" else t / 2


def _tau_range(mode: str, t_range) -> Tuple[float, float]:
    t0, t1 = t_range
    if mode == "trig":
        return max(math.pi - t1, 0.0), math.pi - t0
    return t0, t1


def _t_of_tau(mode: str, tau: float) -> float:
    return math.pi - tau if mode == "trig" else tau


def _u_limits(cfg: CertConfig) -> Tuple[float, float]:
    if cfg.u_range is not None:
        return tuple(cfg.u_range)
    if cfg.mode == "trig":
        return 0.0, math.atan(cfg.x_max)
    raise ValueError("hyp certification needs an explicit u_range")


def face_eta(x_max: float) -> float:
    """Slack for covering y > X through the face y = X (rounded up)."""
    eta = iv.HALF_PI - iv.ival_arctan(Interval(float(x_max)))
    eta = 6 * eta + 2 * float(x_max) / (1 + Interval(float(x_max)).sqr())
    return float(eta.hi)


# ---------------------------------------------------------------------------
# batched branch and bound
# ---------------------------------------------------------------------------

class _Evaluator:
    """Lower bounds of one objective over batches of boxes."""

    def bounds(self, lo: np.ndarray, hi: np.ndarray):
        raise NotImplementedError


class CompactEvaluator(_Evaluator):
    def __init__(self, mode: str):
        self.mode = mode

    def bounds(self, lo, hi):
        tau, u, v = (Interval(lo[:, i], hi[:, i]) for i in range(3))
        grad = iv.grad_compact(self.mode, tau, u, v)
        enc, centre = iv.mean_value_enclosure(self.mode, tau, u, v, grad)
        gmag = np.stack([np.maximum(np.abs(g.lo), np.abs(g.hi)) for g in grad], axis=1)
        return enc.lo, centre.hi, gmag


class CapEvaluator(_Evaluator):
    def bounds(self, lo, hi):
        k, a, b = (Interval(lo[:, i], hi[:, i]) for i in range(3))
        enc, (ga, gb) = iv.cap_enclosure(k, a, b)
        centre = iv.cap_value(Interval(k.mid), Interval(a.mid), Interval(b.mid))
        gmag = np.stack([np.ones_like(lo[:, 0]) * 30,
                         np.maximum(np.abs(ga.lo), np.abs(ga.hi)),
                         np.maximum(np.abs(gb.lo), np.abs(gb.hi))], axis=1)
        return enc.lo, centre.hi, gmag


@dataclass
class _BnBResult:
    status: str
    delta: float
    processed: int
    max_depth: int
    residual: List[List[float]]
    witness: Optional[List[float]]
    reason: str = ""


def branch_and_bound(evaluator: _Evaluator, lo: np.ndarray, hi: np.ndarray, *, skip=None,
                     target=None, refute_level: float = 0.0, budget: int, depth_cap: int = 60,
                     workers: int = 1, known_zero=None) -> _BnBResult:
    """Breadth-first subdivision; results do not depend on ``workers``.

    ``skip(lo, hi)`` marks boxes handled elsewhere; ``target(lo, hi)`` gives the
    per-box value the lower bound must exceed. A box centre whose value is
    provably at most ``refute_level`` ends the search with that centre as a
    witness (face targets are larger than the claim, so they never refute).
    ``known_zero(lo, hi)`` returns, per box, a point where the objective is
    exactly 0 (or None); with ``refute_level >= 0`` such a box refutes at once.
    """
    lo, hi = np.atleast_2d(np.asarray(lo, float)), np.atleast_2d(np.asarray(hi, float))
    depth = 0
    processed = 0
    delta = math.inf
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while len(lo):
            n = len(lo)
            stop_budget = processed + n > budget
            if stop_budget:
                take = max(budget - processed, 0)
                rest_lo, rest_hi = lo[take:], hi[take:]
                lo, hi = lo[:take], hi[:take]
                n = take
            processed += n
            if n:
                keep = np.ones(n, dtype=bool) if skip is None else ~skip(lo, hi)
                lb = np.full(n, np.inf)
                cu = np.full(n, np.inf)
                gm = np.zeros((n, 3))
                idx = np.nonzero(keep)[0]
                if len(idx):
                    chunks = [idx[i:i + CHUNK] for i in range(0, len(idx), CHUNK)]
                    run = lambda ch: evaluator.bounds(lo[ch], hi[ch])
                    outs = list(pool.map(run, chunks)) if pool else [run(ch) for ch in chunks]
                    for ch, (a, b, g) in zip(chunks, outs):
                        lb[ch], cu[ch], gm[ch] = a, b, g
                tgt = np.zeros(n) if target is None else target(lo, hi)
                lb = np.where(np.isnan(lb), -np.inf, lb)
                if known_zero is not None and refute_level >= 0:
                    for j in np.nonzero(keep)[0]:
                        z = known_zero(lo[j], hi[j])
                        if z is not None:
                            return _BnBResult("inconclusive", delta, processed, depth, [], z,
                                              "box contains a point of the equality manifold")
                refuted = keep & (cu <= refute_level)
                if np.any(refuted):
                    j = int(np.nonzero(refuted)[0][0])
                    w = list(map(float, 0.5 * (lo[j] + hi[j])))
                    return _BnBResult("inconclusive", delta, processed, depth, [], w,
                                      "objective does not exceed the target at a box centre")
                ok = keep & (lb > tgt)
                if np.any(ok):
                    delta = min(delta, float(np.min(lb[ok] - tgt[ok])))
                open_ = keep & ~ok
            else:
                open_ = np.zeros(0, dtype=bool)
            if stop_budget:
                res = np.concatenate([np.concatenate([lo[open_], hi[open_]], axis=1),
                                      np.concatenate([rest_lo, rest_hi], axis=1)])
                return _BnBResult("inconclusive", delta, processed, depth,
                                  res[:20].tolist(), None, "budget exhausted")
            if not np.any(open_):
                break
            if depth + 1 > depth_cap:
                res = np.concatenate([lo[open_], hi[open_]], axis=1)
                return _BnBResult("inconclusive", delta, processed, depth,
                                  res[:20].tolist(), None, "depth cap reached")
            lo, hi, gm = lo[open_], hi[open_], gm[open_]
            width = hi - lo
            score = width * np.maximum(gm, 1e-300)
            score = np.where(width > 0, score, -1.0)
            dim = np.argmax(score, axis=1)
            rows = np.arange(len(lo))
            mid = 0.5 * (lo[rows, dim] + hi[rows, dim])
            lo2, hi1 = lo.copy(), hi.copy()
            hi1[rows, dim] = mid
            lo2[rows, dim] = mid
            lo = np.concatenate([lo, lo2])
            hi = np.concatenate([hi1, hi])
            depth += 1
    finally:
        if pool:
            pool.shutdown()
    return _BnBResult("proved_strict", delta, processed, depth, [], None)


# ---------------------------------------------------------------------------
# region part
# ---------------------------------------------------------------------------

def _tube_skip(rho: float, tau_max: float):
    def skip(lo, hi):
        if rho <= 0:
            return np.zeros(len(lo), dtype=bool)
        inside = (hi[:, 0] <= tau_max)
        for i in (1, 2):
            inside &= (hi[:, i] - lo[:, 0] / 2 <= rho) & (hi[:, 0] / 2 - lo[:, i] <= rho)
        return inside
    return skip


def _manifold_hit(mode: str):
    """Manifold point (in compact coordinates) inside a box, if any."""
    def hit(lo, hi):
        a = max(lo[0] / 2, lo[1], lo[2])
        b = min(hi[0] / 2, hi[1], hi[2])
        if a > b or (mode == "hyp" and b <= 0):
            return None
        u = 0.5 * (a + b)
        return [2 * u, u, u]
    return hit


def _face_target(offset: float, face: Optional[float], eta: float):
    def target(lo, hi):
        t = np.full(len(lo), offset)
        if face is not None:
            t = t + eta * ((hi[:, 1] >= face).astype(float) + (hi[:, 2] >= face).astype(float))
        return t
    return target


def _bnb_part(res: _BnBResult, note: str = "") -> PartResult:
    delta = None if not math.isfinite(res.delta) else res.delta
    return PartResult(res.status, delta, res.processed, res.max_depth, res.residual, res.witness,
                      note or res.reason)


def certify_region(mode: str, outer, tube: TubeSpec, target: float = 0.0, budget: int = 2_000_000,
                   *, workers: int = 1, depth_cap: int = 60, x_max: Optional[float] = None,
                   cap_theta: float = 2.6) -> Dict[str, PartResult]:
    """Certify ``f > target`` on ``outer`` (t-range, u-range, v-range in compact coordinates).

    Returns the region part and the tube part; the region excludes the tube.
    """
    (t0, t1), (u0, u1), (v0, v1) = outer
    tau0, tau1 = _tau_range(mode, (t0, t1))
    face = None
    eta = 0.0
    if mode == "trig" and x_max is not None:
        face, eta = math.atan(x_max), face_eta(x_max)
    res = branch_and_bound(
        CompactEvaluator(mode), [[tau0, u0, v0]], [[tau1, u1, v1]],
        skip=_tube_skip(tube.rho, tau1 + 1.0), target=_face_target(target, face, eta),
        refute_level=target, budget=budget, depth_cap=depth_cap, workers=workers,
        known_zero=_manifold_hit(mode) if tube.rho <= 0 else None)
    parts = {"region": _bnb_part(res)}
    if res.status != "proved_strict":
        parts["tube"] = PartResult("inconclusive", note="not attempted: region failed")
        return parts
    if tube.rho <= 0:
        parts["tube"] = PartResult("proved_strict", note="no tube excluded")
        return parts
    parts["tube"] = certify_tube(mode, (tau0, tau1), ((u0, u1), (v0, v1)), tube, target,
                                 budget=max(budget - res.processed, 1), workers=workers,
                                 depth_cap=depth_cap, face=face, eta=eta, cap_theta=cap_theta)
    return parts


# ---------------------------------------------------------------------------
# tube part
# ---------------------------------------------------------------------------

def _pd(hxx: Interval, hxy: Interval, hyy: Interval) -> np.ndarray:
    off = np.maximum(np.abs(hxy.lo), np.abs(hxy.hi))
    prod = Interval(hxx.lo) * Interval(hyy.lo)
    return (hxx.lo > 0) & (hyy.lo > 0) & (prod.lo > iv._up(off * off))


def core_radius(mode: str, tau: Tuple[float, float], rho: float, uv_box) -> Optional[float]:
    """Largest tried r <= rho whose core square has a positive-definite Hessian."""
    (ua, ub), (va, vb) = uv_box
    t = Interval(*tau)
    r = rho
    while r >= 1e-3:
        u = Interval(max(tau[0] / 2 - r, ua), min(tau[1] / 2 + r, ub))
        v = Interval(max(tau[0] / 2 - r, va), min(tau[1] / 2 + r, vb))
        if bool(_pd(*iv.hessian_xy_compact(mode, t, u, v))):
            return r
        r *= 0.8
    return None


def _mixed_tau_x(mode: str, tau: Interval, y: Interval) -> Interval:
    """d/dtau of the x-partial: 3 s^2 (c y - s) with s, c = sin, cos (or sinh, cosh) of tau."""
    if mode == "trig":
        s, c = iv.ival_sin(tau), iv.ival_cos(tau)
    else:
        s, c = iv.ival_sinh(tau), iv.ival_cosh(tau)
    return 3 * s.sqr() * (c * y - s)


def krawczyk(mode: str, tau: Tuple[float, float], u_core: Tuple[float, float], max_iter: int = 8):
    """Krawczyk test for the (x, y) gradient system, uniformly in tau over the slice.

    The residual at the centre is expanded in tau around the slice midpoint,
    ``f(m, tau) in f(m, tau_m) + f_tau(m, T)(T - tau_m)``, which keeps the
    correlation between the two components.

    Returns (unique, iterations, final x-box). ``unique`` means K(X) lies in the
    interior of X, so each tau of the slice has exactly one stationary point;
    ``iterations`` is then the first iteration at which that happened.
    """
    T = Interval(*tau)
    tau_m = 0.5 * (tau[0] + tau[1])
    dT = T - tau_m

    def natural(t_int):
        return iv.PI - t_int if mode == "trig" else t_int

    X = iv.x_of_u(mode, Interval(*u_core))
    cur = [Interval(X.lo, X.hi), Interval(X.lo, X.hi)]
    unique = False
    first = its = 0
    for its in range(1, max_iter + 1):
        hxx, hxy, hyy = iv.eval_hessian_xy_interval(iv.Box3(mode, natural(T), cur[0], cur[1]))
        m = [float(z.mid) for z in cur]
        mi = [Interval(z) for z in m]
        f0 = iv.eval_grad_interval(iv.Box3(mode, natural(Interval(tau_m)), mi[0], mi[1]))[1:]
        fm = [f0[0] + _mixed_tau_x(mode, T, mi[1]) * dT, f0[1] + _mixed_tau_x(mode, T, mi[0]) * dT]
        jm = np.array([[float(hxx.mid), float(hxy.mid)], [float(hxy.mid), float(hyy.mid)]])
        Y = np.linalg.inv(jm)
        J = [[hxx, hxy], [hxy, hyy]]
        new = []
        for i in range(2):
            # the tau-terms of the two residual components are combined before bounding
            lin = Y[i, 0] * _mixed_tau_x(mode, T, mi[1]) + Y[i, 1] * _mixed_tau_x(mode, T, mi[0])
            acc = Interval(m[i]) - (Y[i, 0] * f0[0] + Y[i, 1] * f0[1]) - lin * dT
            for j in range(2):
                coef = Interval(1.0 if i == j else 0.0) - (Y[i, 0] * J[0][j] + Y[i, 1] * J[1][j])
                acc = acc + coef * (cur[j] - m[j])
            new.append(acc)
        del fm
        inside = all(bool((n.lo > c.lo) & (n.hi < c.hi)) for n, c in zip(new, cur))
        if inside and not unique:
            unique, first = True, its
        nxt = [n.intersect(c) for n, c in zip(new, cur)]
        if any(bool(z.is_empty()) for z in nxt):
            return False, its, cur
        shrink = max(float(c.width - z.width) for c, z in zip(cur, nxt))
        cur = nxt
        if unique and shrink <= 1e-15 * (1 + float(max(z.hi for z in cur))):
            break
    return unique, first if unique else its, cur


def krawczyk_split(mode: str, tau: Tuple[float, float], u_core: Tuple[float, float],
                   depth: int = 4) -> Tuple[bool, int, int]:
    """Krawczyk over the slice, bisecting tau when the uniform test does not contract.

    Returns (unique, worst first-inclusion iteration, number of sub-slices).
    """
    ok, its, _ = krawczyk(mode, tau, u_core)
    if ok or depth == 0:
        return ok, its, 1
    mid = 0.5 * (tau[0] + tau[1])
    a = krawczyk_split(mode, (tau[0], mid), u_core, depth - 1)
    b = krawczyk_split(mode, (mid, tau[1]), u_core, depth - 1)
    return a[0] and b[0], max(a[1], b[1]), a[2] + b[2]


def certify_tube_slice(mode: str, tau: Tuple[float, float], tube: TubeSpec, uv_box=None,
                       target: float = 0.0, *, budget: int = 200_000, workers: int = 1,
                       depth_cap: int = 60, face=None, eta: float = 0.0) -> PartResult:
    """Certify one slice ``tau in [tau0, tau1]`` of the tube (compact coordinates)."""
    if uv_box is None:
        top = math.pi / 2 if mode == "trig" else math.inf
        uv_box = ((0.0 if mode == "trig" else 1e-9, top), (0.0 if mode == "trig" else 1e-9, top))
    (ua, ub), (va, vb) = uv_box
    lo_u = max(tau[0] / 2 - tube.rho, ua)
    hi_u = min(tau[1] / 2 + tube.rho, ub)
    lo_v = max(tau[0] / 2 - tube.rho, va)
    hi_v = min(tau[1] / 2 + tube.rho, vb)
    if lo_u > hi_u or lo_v > hi_v:
        return PartResult("proved_strict", note="slice misses the box")
    manifold_inside = ua <= tau[0] / 2 and tau[1] / 2 <= ub and va <= tau[0] / 2 and tau[1] / 2 <= vb
    details = {"tau": list(tau)}
    r = core_radius(mode, tau, tube.rho, uv_box) if manifold_inside else None
    if r is not None:
        if target > 0:
            return PartResult("inconclusive", note="core minimum is 0, below the target",
                              witness=[tau[0], tau[0] / 2, tau[0] / 2], details=details)
        core = (max(tau[0] / 2 - r, ua), min(tau[1] / 2 + r, ub))
        core_v = (max(tau[0] / 2 - r, va), min(tau[1] / 2 + r, vb))
        w = max(tau[1] - tau[0], 1e-3)
        k_box = (max(tau[0] / 2 - w, core[0], core_v[0]), min(tau[1] / 2 + w, core[1], core_v[1]))
        uniq, its, pieces = krawczyk_split(mode, tau, k_box)
        details.update(core_radius=r, krawczyk_unique=bool(uniq), krawczyk_iterations=its,
                       krawczyk_subslices=pieces)

        def skip(lo, hi):
            return ((lo[:, 1] >= core[0]) & (hi[:, 1] <= core[1])
                    & (lo[:, 2] >= core_v[0]) & (hi[:, 2] <= core_v[1]))
    elif manifold_inside:
        return PartResult("inconclusive", note="no positive-definite core found", details=details)
    else:
        skip = None
    res = branch_and_bound(CompactEvaluator(mode), [[tau[0], lo_u, lo_v]], [[tau[1], hi_u, hi_v]],
                           skip=skip, target=_face_target(target, face, eta), refute_level=target,
                           budget=budget, depth_cap=depth_cap, workers=workers)
    part = _bnb_part(res)
    part.details = details
    if part.status == "proved_strict":
        part.delta = None
    return part


def certify_cap(k_max: float, target: float = 0.0, *, core: float = 0.1, budget: int = 500_000,
                workers: int = 1, depth_cap: int = 60) -> PartResult:
    """Certify N(k, a, b) >= 0 on [0, k_max] x [0, inf)^2 (trig, theta near pi)."""
    if target > 0:
        return PartResult("inconclusive", note="N vanishes on a = b = 1, so G - target < 0 near pi")
    # 1. monotone in a (and b) beyond 2: dN/da >= 4a^4/(1+a^2k^2)^2 - 4(k^2+3)/(1+k^2)^3
    ks = np.linspace(0.0, k_max, 257)
    k = Interval(ks[:-1], ks[1:])
    k2 = k.sqr()
    slope = 64 / (1 + 4 * k2).sqr() - 4 * (k2 + 3) / (1 + k2) ** 3
    if not np.all(slope.lo > 0):
        return PartResult("inconclusive", note="monotonicity beyond a = 2 not established")
    # 2. convex core around a = b = 1
    a = Interval(1 - core, 1 + core)
    haa, hab, hbb = iv.cap_hessian_ab(k, a, a)
    if not np.all(_pd(haa, hab, hbb)):
        return PartResult("inconclusive", note="cap core not positive definite")

    def skip(lo, hi):
        return ((lo[:, 1] >= 1 - core) & (hi[:, 1] <= 1 + core)
                & (lo[:, 2] >= 1 - core) & (hi[:, 2] <= 1 + core))

    res = branch_and_bound(CapEvaluator(), [[0.0, 0.0, 0.0]], [[k_max, 2.0, 2.0]], skip=skip,
                           budget=budget, depth_cap=depth_cap, workers=workers)
    part = _bnb_part(res, "")
    part.details = {"k_max": k_max, "core": core, "min_slope_beyond_2": float(np.min(slope.lo))}
    if part.status == "proved_strict":
        part.delta = None
    return part


def certify_tube(mode: str, tau_range, uv_box, tube: TubeSpec, target: float = 0.0, *, budget: int,
                 workers: int = 1, depth_cap: int = 60, face=None, eta: float = 0.0,
                 cap_theta: float = 2.6) -> PartResult:
    tau0, tau1 = tau_range
    boxes = 0
    notes = []
    slices_ok = 0
    fallback = []
    status = "proved_strict"
    start = tau0
    cap_info = None
    if mode == "trig":
        tau_cap = math.pi - cap_theta
        if tau0 < tau_cap:
            k_max = float(iv.ival_tan(Interval(min(tau_cap, tau1) / 2)).hi)
            cap = certify_cap(k_max, target, budget=budget, workers=workers, depth_cap=depth_cap)
            boxes += cap.boxes
            cap_info = cap.to_dict()
            status = weakest(status, cap.status)
            if cap.status != "proved_strict":
                notes.append("cap: " + cap.note)
            start = tau_cap
    n_slices = max(int(math.ceil((tau1 - start) / tube.slice_width - 1e-9)), 0)
    edges = [start + i * tube.slice_width for i in range(n_slices)] + [tau1]
    min_core = math.inf
    for a, b in zip(edges[:-1], edges[1:]):
        if status != "proved_strict":
            break
        part = certify_tube_slice(mode, (a, b), tube, uv_box, target, budget=max(budget - boxes, 1),
                                  workers=workers, depth_cap=depth_cap, face=face, eta=eta)
        boxes += part.boxes
        if "core_radius" in part.details:
            min_core = min(min_core, part.details["core_radius"])
            if not part.details.get("krawczyk_unique", False):
                fallback.append([a, b])
        if part.status != "proved_strict":
            status = weakest(status, part.status)
            notes.append(f"slice [{a:.6g}, {b:.6g}]: {part.note}")
            out = PartResult(status, boxes=boxes, note="; ".join(notes), witness=part.witness)
            out.details = {"failed_slice": [a, b], "cap": cap_info}
            return out
        slices_ok += 1
    out = PartResult(status, boxes=boxes, note="; ".join(notes))
    out.details = {"slices": slices_ok, "min_core_radius": None if min_core == math.inf else min_core,
                   "krawczyk_not_contracting": fallback[:20], "cap": cap_info}
    return out


# ---------------------------------------------------------------------------
# trig-only pieces
# ---------------------------------------------------------------------------

def corner_check(cfg: CertConfig) -> PartResult:
    """Sampled check of the corner theta < theta_c, u, v > pi/2 - margin."""
    from scipy.stats import qmc

    from .critical import g_numpy

    u_lo = math.pi / 2 - cfg.corner_margin
    u_hi = math.atan(cfg.x_max)
    n = cfg.corner_samples
    m = int(math.ceil(math.log2(max(n, 2))))
    pts = qmc.Sobol(3, scramble=True, seed=cfg.seed).random_base2(m)[:n]
    theta = pts[:, 0] * cfg.corner_theta
    u = u_lo + pts[:, 1] * (u_hi - u_lo)
    v = u_lo + pts[:, 2] * (u_hi - u_lo)
    vals = g_numpy(theta, np.tan(u), np.tan(v))
    vmin = float(np.min(vals))
    j = int(np.argmin(vals))
    ok = vmin >= -EPSILON
    return PartResult("proved_up_to_epsilon" if ok else "inconclusive", delta=vmin, boxes=0,
                      witness=[float(theta[j]), float(u[j]), float(v[j])],
                      note=f"{n} scrambled Sobol points, minimum {vmin:.3e}",
                      details={"theta": [0.0, cfg.corner_theta], "u": [u_lo, u_hi], "samples": n})


def certify_band(cfg: CertConfig, budget: int) -> PartResult:
    """theta in [0, theta_lo] minus the corner, by branch and bound."""
    tau_lo = math.pi - cfg.t_range[0]
    u_hi = math.atan(cfg.x_max)
    c_tau = math.pi - cfg.corner_theta
    c_u = math.pi / 2 - cfg.corner_margin

    def skip(lo, hi):
        return (lo[:, 0] >= c_tau) & (lo[:, 1] >= c_u) & (lo[:, 2] >= c_u)

    res = branch_and_bound(CompactEvaluator("trig"), [[tau_lo, 0.0, 0.0]], [[math.pi, u_hi, u_hi]],
                           skip=skip, target=_face_target(cfg.offset, u_hi, face_eta(cfg.x_max)),
                           refute_level=cfg.offset,
                           budget=budget, depth_cap=cfg.depth_cap, workers=cfg.workers)
    return _bnb_part(res)


# ---------------------------------------------------------------------------
# whole lemma
# ---------------------------------------------------------------------------

def certify_lemma(mode_or_lemma, config: Optional[CertConfig] = None) -> Certificate:
    lemma = mode_or_lemma if isinstance(mode_or_lemma, int) else (1 if mode_or_lemma == "trig" else 2)
    cfg = config or CertConfig.default(lemma)
    mode = cfg.mode
    started = time.perf_counter()
    u_lo, u_hi = _u_limits(cfg)
    outer = (tuple(cfg.t_range), (u_lo, u_hi), (u_lo, u_hi))
    x_max = cfg.x_max if mode == "trig" else None
    parts = certify_region(mode, outer, cfg.tube(), cfg.offset, cfg.budget, workers=cfg.workers,
                           depth_cap=cfg.depth_cap, x_max=x_max, cap_theta=cfg.cap_theta)
    used = sum(p.boxes for p in parts.values())
    rigorous = [p.status for p in parts.values()]
    extra: Dict[str, PartResult] = {}
    if mode == "trig":
        extra["boundary_theta_pi"] = PartResult(
            "proved_strict" if cfg.offset <= 0 else "inconclusive",
            note="G(pi, x, y) = 4A(x) + 4A(y) >= 0, ledger step G_theta_pi")
        extra["tail"] = PartResult(
            parts["region"].status,
            note=f"x or y > {cfg.x_max:g}: face margin {face_eta(cfg.x_max):.3e} cleared on x = X "
                 "(see module notes); ledger step G_tail_bound gives the coarse bound")
        if cfg.band and all(s == "proved_strict" for s in rigorous) and cfg.t_range[0] > 0:
            band = certify_band(cfg, max(cfg.budget - used, 1))
            used += band.boxes
            extra["band"] = band
            rigorous.append(band.status)
        extra["boundary_theta_0"] = PartResult(
            "proved_strict", note="G(0, x, y) > 0 for finite x, y; infimum 0 approached only as "
                                   "x, y -> infinity (reported as a boundary infimum)")
        corner = corner_check(cfg) if cfg.corner_samples > 0 else PartResult("inconclusive", note="skipped")
        extra["corner"] = corner
        corner_policy = (f"sampled: theta < {cfg.corner_theta}, u, v > pi/2 - {cfg.corner_margin}, "
                         f"{cfg.corner_samples} quasi-random points, threshold -{EPSILON:g}")
    else:
        extra["boundary_ell_0"] = PartResult(
            "proved_strict" if cfg.offset <= 0 else "inconclusive",
            note="F(0, x, y) = 6 arctanh(1/x) + 2x/(x^2-1) + (same in y) > 0, ledger step F_ell_zero")
        corner_policy = "none: the certified region is the stated compact box"
    status = weakest(*rigorous)
    deltas = [p.delta for name, p in {**parts, **extra}.items()
              if name in ("region", "band") and p.delta is not None]
    delta = min(deltas) if status == "proved_strict" and deltas else None
    all_parts = {name: p.to_dict() for name, p in {**parts, **extra}.items()}
    overall = weakest(status, *(p.status for name, p in extra.items() if name == "corner"))
    region = {"coordinates": "theta, u = arctan x" if mode == "trig" else "ell, w = arctanh(1/x)",
              "t": list(cfg.t_range), "u": [u_lo, u_hi], "v": [u_lo, u_hi],
              "excluded": ["tube"] + (["corner"] if mode == "trig" else []),
              "target_offset": cfg.offset}
    if mode == "trig":
        region["x_max"] = cfg.x_max
        region["band_theta"] = [0.0, cfg.t_range[0]] if cfg.band else None
    tube = {"rho": cfg.rho, "slice_width": cfg.slice_width, "compactification": cfg.tube().compactification,
            "manifold": "u = v = pi/2 - theta/2" if mode == "trig" else "w = l/2"}
    if mode == "trig":
        tube["cap_theta"] = cfg.cap_theta
    stats = {"boxes_processed": used, "max_depth": max(p.max_depth for p in {**parts, **extra}.values()),
             "workers_independent": True, "depth_cap": cfg.depth_cap, "budget": cfg.budget,
             "overall_status_including_corner": overall}
    return Certificate(lemma=lemma, status=status, delta=delta, region=region, tube=tube,
                       corner_policy=corner_policy, parts=all_parts, stats=stats,
                       timing={"wall_seconds": round(time.perf_counter() - started, 3)})
