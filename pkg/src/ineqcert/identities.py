"""Ledger of the algebraic steps behind both inequalities.

Every step is a list of equations between rational expressions. A step is
verified when each equation, after clearing denominators, has a zero normal
form. Denominators cleared along the way become side conditions and are
checked to be nonzero at sample points drawn from the step's case branch.

Two transcendental facts are admitted as reductions, each backed by a
high-precision numeric check rather than an exact proof:

* R1: ``arctan(cot(t/2)) = pi/2 - t/2`` for ``0 < t < pi``
* R2: ``arctanh(1/coth(l/2)) = l/2`` for ``l > 0``
"""
from __future__ import annotations

import datetime as _dt
import random
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import mpmath

from . import __version__, scalar
from .expr import (Const, Expr, clear_denominators, clear_pair, diff, evaluate,
                   flip_first_coefficient, inv, subs, symbols, atoms,
                   UnsupportedDenominator)
from .poly import TrigPoly, exact_div, format_poly, parse_poly

METHODS = ("exact_poly", "transcendental_reduction", "boundary_constant")
HIGH_PRECISION_DPS = 50
REDUCTION_TOL = mpmath.mpf(10) ** -30

s, c, a, b, x, y, k, t, p, u, v = symbols("s c a b x y k t p u v")
HALF = Const(Fraction(1, 2))


@dataclass(frozen=True)
class Claim:
    lhs: Expr
    rhs: Expr = Const(0)
    label: str = ""
    # erratum probes assert that a literal reading does NOT hold
    expect_zero: bool = True


@dataclass(frozen=True)
class ProofStep:
    id: str
    name: str
    mode: str
    statement: str
    citation: str
    method: str
    claims: Tuple[Claim, ...]
    branch: str = "generic"
    reduction: Optional[str] = None
    checks: Tuple[Callable[["ProofStep"], List[str]], ...] = ()

    @cached_property
    def side_conditions(self) -> List[str]:
        out = set()
        for cl in self.claims:
            try:
                out.update(clear_denominators(cl.lhs - cl.rhs, self.mode).side_conditions)
            except UnsupportedDenominator:
                out.add("<unsupported>")
        return sorted(out)


@dataclass
class StepResult:
    id: str
    name: str
    status: str  # verified | failed | skipped
    witness: List[str]
    side_conditions: List[str]
    messages: List[str] = field(default_factory=list)

    def to_dict(self):
        return {"id": self.id, "name": self.name, "status": self.status,
                "witness": self.witness, "side_conditions": self.side_conditions,
                "messages": self.messages}


@dataclass
class VerificationReport:
    steps: List[StepResult]
    all_verified: bool
    timestamp: str
    engine_version: str = __version__

    def to_dict(self):
        return {"steps": [r.to_dict() for r in self.steps], "all_verified": self.all_verified,
                "timestamp": self.timestamp, "engine_version": self.engine_version}

    @property
    def failed_ids(self) -> List[str]:
        return [r.id for r in self.steps if r.status == "failed"]


# ---------------------------------------------------------------------------
# the two functions as expression trees
# ---------------------------------------------------------------------------

def g_expr() -> Expr:
    """G as restated at the start of its proof."""
    return (s**3 * x * y + (c**3 - 3 * c + 2) * (x + y) - s**3 - 6 * s - 6 * t + 6 * p
            - 6 * u + 2 * x * inv(1 + x**2) - 6 * v + 2 * y * inv(1 + y**2))


def g_statement_expr() -> Expr:
    """The inequality's left side as stated, transcribed independently."""
    return (s**3 * x * y + (c**3 - 3 * c + 2) * (x + y) - s**3 - 6 * s - 6 * t + 6 * p
            - 6 * u + 2 * x / (1 + x**2) - 6 * v + 2 * y / (1 + y**2))


def f_expr() -> Expr:
    return (s**3 * x * y - (c**3 - 3 * c + 2) * (x + y) + s**3 - 6 * s - 6 * t
            + 6 * u + 2 * x * inv(x**2 - 1) + 6 * v + 2 * y * inv(y**2 - 1))


def four_antiderivative(var: Expr, atan_sym: Expr) -> Expr:
    """``4 * int_0^var s^4/(1+s^2)^2 ds`` in closed form."""
    return 4 * var - 6 * atan_sym + 2 * var * inv(1 + var**2)


def g_integral_form() -> Expr:
    return (s**3 * x * y + (c**3 - 3 * c - 2) * (x + y) - s**3 - 6 * s - 6 * t + 6 * p
            + four_antiderivative(x, u) + four_antiderivative(y, v))


def hyp_tail(var: Expr, atanh_sym: Expr) -> Expr:
    return 6 * atanh_sym + 2 * var * inv(var**2 - 1) - 4 * var


def function_expr(mode: str) -> Expr:
    return g_expr() if mode == "trig" else f_expr()


# hand-transcribed gradient formulas, matching scalar._grad_G / scalar._grad_F
def coded_gradient(mode: str) -> Tuple[Expr, Expr, Expr]:
    if mode == "trig":
        km = (1 + c) ** 2 * (2 - c)
        return (3 * s**2 * (c * x * y + s * (x + y)) - 3 * km,
                s**3 * y - km + 4 * (x**2 * inv(1 + x**2)) ** 2,
                s**3 * x - km + 4 * (y**2 * inv(1 + y**2)) ** 2)
    km = (1 + c) ** 2 * (c - 2)
    return (3 * s**2 * (c * x * y - s * (x + y)) + 3 * km,
            s**3 * y - km - 4 * (x**2 * inv(x**2 - 1)) ** 2,
            s**3 * x - km - 4 * (y**2 * inv(y**2 - 1)) ** 2)


HALF_ANGLE = {"k": (1 + c) * inv(s)}
ALPHA_SUB = {"x": a * k, "y": b * k}
COS_SOLVED = {"c": inv(1 - a) + inv(1 - b)}


def _alpha_sub(e: Expr) -> Expr:
    return subs(subs(e, ALPHA_SUB), HALF_ANGLE)


def _swap_ab(e: Expr) -> Expr:
    return subs(e, {"a": b, "b": a})


# the residual forms of the elimination chain (each "= 0")
def eq_theta_alpha() -> Expr:     # (1-ab) c - ((a-1)+(b-1))(1-c)
    return (1 - a * b) * c - ((a - 1) + (b - 1)) * (1 - c)


def eq_two_line() -> Expr:        # (1-a)(1-b) c - (1-a) - (1-b)
    return (1 - a) * (1 - b) * c - (1 - a) - (1 - b)


def d_alpha() -> Expr:            # (a^2-1) c + a^2 + 1
    return (a**2 - 1) * c + a**2 + 1


def e_beta() -> Expr:             # 1 + (1-b)(1-c)
    return 1 + (1 - b) * (1 - c)


def eq_x_alpha() -> Expr:         # D^2 E - 4 a^4
    return d_alpha() ** 2 * e_beta() - 4 * a**4


def eq9() -> Expr:                # a(a-1)(1+a+a(1-b))^2 - 4 a^4 (1-b)
    return a * (a - 1) * (1 + a + a * (1 - b)) ** 2 - 4 * a**4 * (1 - b)


def eq10() -> Expr:               # (a-1)(1+ab)^2 - 4a(1-b)
    return (a - 1) * (1 + a * b) ** 2 - 4 * a * (1 - b)


def eq10_simplified() -> Expr:    # a(1+ab)^2 - 4a - (1-ab)^2
    return a * (1 + a * b) ** 2 - 4 * a - (1 - a * b) ** 2


# ---------------------------------------------------------------------------
# numeric checks
# ---------------------------------------------------------------------------

def _mp(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def _sample(mode: str, branch: str, rng: random.Random):
    """One high-precision assignment of every symbol, consistent with the branch."""
    mpf = mpmath.mpf
    r = lambda lo, hi: mpf(lo) + (mpf(hi) - mpf(lo)) * mpf(rng.random())
    trig = mode == "trig"
    for _ in range(10_000):
        pt = {"p": +mpmath.pi}
        if branch in ("alpha_generic", "alpha_eq_beta", "alpha_beta_one"):
            al = r(0.05, 4)
            if abs(al - 1) < 0.05:
                continue
            be = {"alpha_generic": r(0.05, 4), "alpha_eq_beta": al, "alpha_beta_one": 1 / al}[branch]
            if abs(be - 1) < 0.05:
                continue
            cc = 1 / (1 - al) + 1 / (1 - be)
            if branch == "alpha_beta_one":
                # c = 1 here; keep generic angle values for the remaining symbols
                tt = r(0.3, 2.5)
            elif trig and -0.99 < cc < 0.99:
                tt = mpmath.acos(cc)
            elif not trig and cc > 1.01:
                tt = mpmath.acosh(cc)
            else:
                continue
            pt.update(a=al, b=be)
        else:
            tt = {"boundary": mpmath.pi if trig else mpf(0)}.get(branch)
            if tt is None:
                tt = r(0.05, 3.09) if trig else r(0.05, 6)
        if trig:
            sv, cv = mpmath.sin(tt), mpmath.cos(tt)
            kv = mpmath.cot(tt / 2) if tt != 0 else mpf(0)
        else:
            sv, cv = mpmath.sinh(tt), mpmath.cosh(tt)
            kv = mpmath.coth(tt / 2) if tt != 0 else mpf(0)
        if branch == "boundary":
            sv, cv = mpf(0), (mpf(-1) if trig else mpf(1))
        pt.update(t=tt, s=sv, c=cv, k=kv)
        if "a" not in pt:
            if branch == "alpha_zero":
                pt.update(a=mpf(0), b=mpf(0))
            else:
                pt.update(a=r(0.05, 4), b=r(0.05, 4))
        if branch == "manifold":
            xv = yv = kv
        elif branch in ("alpha_generic", "alpha_eq_beta", "alpha_beta_one", "alpha_zero"):
            xv, yv = pt["a"] * kv, pt["b"] * kv
        else:
            xv, yv = (r(0, 5), r(0, 5)) if trig else (r(1.01, 6), r(1.01, 6))
        pt.update(x=xv, y=yv)
        if trig:
            pt.update(u=mpmath.atan(xv), v=mpmath.atan(yv))
        else:
            pt.update(u=mpmath.atanh(1 / xv) if xv > 1 else r(0, 1),
                      v=mpmath.atanh(1 / yv) if yv > 1 else r(0, 1))
        return pt
    raise RuntimeError(f"could not sample branch {branch!r}")


def samples(mode: str, branch: str, n: int, seed: str):
    rng = random.Random(seed)
    with mpmath.workdps(HIGH_PRECISION_DPS):
        return [_sample(mode, branch, rng) for _ in range(n)]


def _check_side_conditions(step: ProofStep, n: int = 20) -> List[str]:
    reg = atoms(step.mode)
    conds = step.side_conditions
    bad = []
    with mpmath.workdps(HIGH_PRECISION_DPS):
        for pt in samples(step.mode, step.branch, n, step.id + ":side"):
            for name in conds:
                if abs(reg[name].evaluate(pt)) < mpmath.mpf(10) ** -40:
                    bad.append(f"side condition {name} vanishes at a {step.branch} sample")
    return sorted(set(bad))


def _check_claims_numerically(step: ProofStep, n: int = 8) -> List[str]:
    """Independent route: evaluate each claim at generic consistent points."""
    bad = []
    with mpmath.workdps(HIGH_PRECISION_DPS):
        pts = samples(step.mode, "generic", n, step.id + ":num")
        for i, cl in enumerate(step.claims):
            if not cl.expect_zero:
                continue
            for pt in pts:
                try:
                    val = evaluate(cl.lhs - cl.rhs, pt, _mp)
                except ZeroDivisionError:
                    continue
                scale = 1 + abs(evaluate(cl.lhs, pt, _mp))
                if abs(val) > mpmath.mpf(10) ** -35 * scale:
                    bad.append(f"claim {i} fails numerically: residual {mpmath.nstr(val, 5)}")
                    break
    return bad


# ---------------------------------------------------------------------------
# step-specific numeric checks
# ---------------------------------------------------------------------------

def _reduction_check(step: ProofStep) -> List[str]:
    """R1/R2 and the unreduced manifold statement at 100 points."""
    bad = []
    rng = random.Random(step.id)
    with mpmath.workdps(HIGH_PRECISION_DPS):
        for _ in range(100):
            if step.mode == "trig":
                th = mpmath.mpf("0.01") + (mpmath.pi - mpmath.mpf("0.02")) * mpmath.mpf(rng.random())
                red = mpmath.atan(mpmath.cot(th / 2)) - (mpmath.pi / 2 - th / 2)
                m = mpmath.cot(th / 2)
                val = scalar.G(th, m, m)
            else:
                th = mpmath.mpf("0.01") + 20 * mpmath.mpf(rng.random())
                red = mpmath.atanh(1 / mpmath.coth(th / 2)) - th / 2
                # terms grow like exp(3l); add guard digits for the cancellation
                with mpmath.workdps(HIGH_PRECISION_DPS + int(3 * th / 2.3) + 5):
                    m = mpmath.coth(th / 2)
                    val = scalar.F(th, m, m)
            if abs(red) > REDUCTION_TOL:
                bad.append(f"{step.reduction} fails at t={mpmath.nstr(th, 8)}")
            if abs(val) > REDUCTION_TOL:
                bad.append(f"unreduced statement fails at t={mpmath.nstr(th, 8)}: {mpmath.nstr(val, 5)}")
    return bad


def _theta_pi_anchor(step: ProofStep) -> List[str]:
    bad = []
    with mpmath.workdps(HIGH_PRECISION_DPS):
        anchors = [(0, 0), (1, 1), (mpmath.mpf("0.3"), 2), (5, mpmath.mpf("0.01"))]
        for xv, yv in anchors:
            xv, yv = mpmath.mpf(xv), mpmath.mpf(yv)
            res = scalar.G(+mpmath.pi, xv, yv) - 4 * scalar.antiderivative(xv) - 4 * scalar.antiderivative(yv)
            if abs(res) > REDUCTION_TOL:
                bad.append(f"G(pi,{xv},{yv}) - 4A(x) - 4A(y) = {mpmath.nstr(res, 5)}")
    return bad


def _ell_zero_anchor(step: ProofStep) -> List[str]:
    bad = []
    with mpmath.workdps(HIGH_PRECISION_DPS):
        for xv, yv in [(2, 2), (mpmath.mpf("1.5"), 7), (30, 1.001)]:
            xv, yv = mpmath.mpf(xv), mpmath.mpf(yv)
            direct = scalar.F(mpmath.mpf(0), xv, yv)
            pos = (6 * mpmath.atanh(1 / xv) + 2 * xv / (xv**2 - 1)
                   + 6 * mpmath.atanh(1 / yv) + 2 * yv / (yv**2 - 1))
            if abs(direct - pos) > REDUCTION_TOL or not pos > 0:
                bad.append(f"F(0,{xv},{yv}) anchor mismatch")
    return bad


def _opposite_signs(step: ProofStep) -> List[str]:
    """4a(1-a) and (a-1)(1+a^2)^2 have opposite signs for a != 1."""
    rng = random.Random(step.id)
    for _ in range(200):
        al = rng.choice([rng.uniform(1e-6, 1 - 1e-6), rng.uniform(1 + 1e-6, 50)])
        lhs = 4 * al * (1 - al)
        rhs = (al - 1) * (1 + al * al) ** 2
        if (lhs > 0) == (rhs > 0):
            return [f"signs agree at alpha={al}"]
    return []


def _gradient_code_check(step: ProofStep) -> List[str]:
    """scalar.grad_* against the mechanically differentiated tree."""
    bad = []
    f = function_expr(step.mode)
    partials = [diff(f, var, step.mode) for var in "txy"]
    with mpmath.workdps(HIGH_PRECISION_DPS):
        for pt in samples(step.mode, "generic", 20, step.id + ":grad"):
            ep = scalar.EvalPoint(step.mode, pt["t"], pt["x"], pt["y"])
            coded = scalar.gradient(ep)
            for name, expr_d, val in zip("txy", partials, coded[:3]):
                ref = evaluate(expr_d, pt, _mp)
                if abs(ref - val) > mpmath.mpf(10) ** -35 * (1 + abs(ref)):
                    bad.append(f"d/d{name} in scalar core disagrees at t={mpmath.nstr(pt['t'], 6)}")
    return bad


def _tail_pieces_nonnegative(step: ProofStep) -> List[str]:
    """Each piece of the tail decomposition is nonnegative on the domain."""
    bad = []
    with mpmath.workdps(HIGH_PRECISION_DPS):
        for pt in samples("trig", "generic", 50, step.id):
            pieces = [1 - pt["s"] ** 3, 6 * (1 - pt["s"]), 6 * (pt["p"] - pt["t"]),
                      3 * pt["p"] - 6 * pt["u"], 2 * pt["x"] / (1 + pt["x"] ** 2)]
            if any(q < 0 for q in pieces):
                bad.append("negative tail piece")
                break
    return bad


def _mirror_check_step(step: ProofStep) -> List[str]:
    ok, diffs = mirror_check(with_witness=True)
    return [] if ok else [f"mirror mismatch: {d}" for d in diffs]


def _domain_excludes_alpha_zero(step: ProofStep) -> List[str]:
    # x = a * coth(l/2) with a = 0 gives x = 0 < 1
    with mpmath.workdps(HIGH_PRECISION_DPS):
        for pt in samples("hyp", "generic", 10, step.id):
            if 0 * pt["k"] >= 1:
                return ["alpha = 0 not excluded by x >= 1"]
    return []


# ---------------------------------------------------------------------------
# step catalogue
# ---------------------------------------------------------------------------

def _trig_steps() -> List[ProofStep]:
    G = g_expr()
    Gt, Gx, Gy = (diff(G, var, "trig") for var in "txy")
    bracket7 = c * (x * y - k**2) + s * (x + y - 2 * k)
    steps = [
        ("G_definition", "The stated inequality and the restated G are the same function.",
         "G-proof, opening: definition of G", "exact_poly", "generic",
         [Claim(g_statement_expr(), G)]),
        ("G_integral_identity",
         "4x - 6 arctan x + 2x/(1+x^2) = 4 int_0^x s^4/(1+s^2)^2 ds: derivatives agree and both sides vanish at 0.",
         "G-proof: identity justified by differentiating both sides", "exact_poly", "generic",
         [Claim(diff(four_antiderivative(x, u), "x", "trig"), 4 * x**4 * inv(1 + x**2) ** 2, "derivative"),
          Claim(subs(four_antiderivative(x, u), {"x": 0, "u": 0}), Const(0), "value at 0")]),
        ("G_integral_form", "G equals the integral form with (x+y) coefficient cos^3 - 3cos - 2.",
         "G-proof: equivalent integral form", "exact_poly", "generic",
         [Claim(G, g_integral_form())]),
        ("G_factor_cubic",
         "cos^3 - 3cos - 2 = -(1+cos)^2(2-cos) = -(1+cos)^2 - sin^2(1+cos); cos^3 - 3cos + 2 = (1-cos)^2(2+cos).",
         "G-proof: factorization used for the x and y partials", "exact_poly", "generic",
         [Claim(c**3 - 3 * c - 2, -(1 + c) ** 2 * (2 - c)),
          Claim(-(1 + c) ** 2 * (2 - c), -(1 + c) ** 2 - s**2 * (1 + c)),
          Claim(c**3 - 3 * c + 2, (1 - c) ** 2 * (2 + c), "tail factor")]),
        ("G_half_angle",
         "2(1+cos) + sin^2 cos = sin^2 (cos cot^2(t/2) + 2 sin cot(t/2)) with cot(t/2) = (1+cos)/sin.",
         "G-proof: half-angle rewrite of the theta condition", "exact_poly", "generic",
         [Claim(2 * (1 + c) + s**2 * c, subs(s**2 * (c * k**2 + 2 * s * k), HALF_ANGLE))]),
        ("G_theta_condition",
         "dG/dtheta = 3 sin^2 [cos(xy - cot^2) + sin(x + y - 2cot)], so theta = pi or the bracket vanishes.",
         "G-proof: theta = pi or the reduced theta condition", "exact_poly", "generic",
         [Claim(Gt, 3 * s**2 * subs(bracket7, HALF_ANGLE))]),
        ("G_theta_pi", "G(pi, x, y) = 4A(x) + 4A(y) >= 0 with A the antiderivative.",
         "G-proof: boundary case theta = pi", "boundary_constant", "boundary",
         [Claim(subs(G, {"s": 0, "c": -1, "t": p}), four_antiderivative(x, u) + four_antiderivative(y, v))]),
        ("G_substitution",
         "With x = a cot(t/2), y = b cot(t/2) the theta condition becomes (1-ab)cos = ((a-1)+(b-1))(1-cos).",
         "G-proof: substitution x = alpha cot, y = beta cot", "exact_poly", "generic",
         [Claim(_alpha_sub(bracket7), -(1 + c) ** 2 * inv(s) ** 2 * eq_theta_alpha())]),
        ("G_two_line", "(1-ab)cos - ((a-1)+(b-1))(1-cos) = -[(1-a)(1-b)cos - (1-a) - (1-b)].",
         "G-proof: two-line simplification", "exact_poly", "generic",
         [Claim(eq_theta_alpha(), -eq_two_line())]),
        ("G_cos_solved",
         "a = 1 forces b = 1; otherwise cos = 1/(1-a) + 1/(1-b).",
         "G-proof: case (1-alpha)(1-beta) != 0", "exact_poly", "alpha_generic",
         [Claim(subs(eq_two_line(), {"a": 1}), -(1 - b), "a = 1 branch"),
          Claim((c - inv(1 - a) - inv(1 - b)) * (1 - a) * (1 - b), eq_two_line(), "solved form")]),
        ("G_partial_x_alpha",
         "dG/dx = 0 is equivalent to 4a^4 = ((a^2-1)cos + a^2 + 1)^2 (1 + (1-b)(1-cos)).",
         "G-proof: x partial in alpha, beta form", "exact_poly", "generic",
         [Claim(_alpha_sub(Gx), (1 + c) ** 2 * (4 * a**4 * inv(d_alpha()) ** 2 - e_beta()))]),
        ("G_brackets",
         "Given cos = 1/(1-a) + 1/(1-b): 1 + (1-b)(1-cos) = a(1-b)/(a-1) and "
         "(a^2-1)cos + a^2 + 1 = (a+1)((a-1)cos+1) + a(a-1) = (a-1)(2a+1-ab)/(1-b).",
         "G-proof: the two intermediate identities", "exact_poly", "alpha_generic",
         [Claim(subs(e_beta(), COS_SOLVED), a * (1 - b) * inv(a - 1)),
          Claim(d_alpha(), (a + 1) * ((a - 1) * c + 1) + a * (a - 1)),
          Claim(subs((a + 1) * ((a - 1) * c + 1) + a * (a - 1), COS_SOLVED),
                (a - 1) * inv(1 - b) * (2 * a + 1 - a * b))]),
        ("G_eq9", "Substituting cos gives 4a^4(1-b) = a(a-1)(1 + a + a(1-b))^2.",
         "G-proof: elimination of cos", "exact_poly", "alpha_generic",
         [Claim(subs(eq_x_alpha(), COS_SOLVED), inv(1 - b) * eq9())]),
        ("G_alpha_zero",
         "a = 0 gives 4b^4 = b(b-1)(1+2b)^2, i.e. b(3b+1) = 0, then cos = 2; symmetric for b = 0.",
         "G-proof: branch alpha = 0", "exact_poly", "alpha_zero",
         [Claim(subs(_swap_ab(eq9()), {"a": 0}), b * (b - 1) * (1 + 2 * b) ** 2 - 4 * b**4),
          Claim(b * (b - 1) * (1 + 2 * b) ** 2 - 4 * b**4, -b * (3 * b + 1)),
          Claim(subs(eq9(), {"b": 0}), -a * (3 * a + 1), "b = 0"),
          Claim(subs(inv(1 - a) + inv(1 - b), {"a": 0, "b": 0}), Const(2), "cos = 2")]),
        ("G_divide_rewrite", "4a^3(1-b) = 4a(1+a)(a-1)(1-b) + 4a(1-b).",
         "G-proof: dividing through by alpha", "exact_poly", "alpha_generic",
         [Claim(4 * a**3 * (1 - b), 4 * a * (1 + a) * (a - 1) * (1 - b) + 4 * a * (1 - b))]),
        ("G_alpha_chain",
         "Eq. for a divided by a is 4a(1-b) = (a-1)(1+ab)^2, equivalently 4a + (1-ab)^2 = a(1+ab)^2.",
         "G-proof: reduced alpha equation and its simplification", "exact_poly", "alpha_generic",
         [Claim((a - 1) * ((1 + 2 * a - a * b) ** 2 - (1 + a * b) ** 2), 4 * a * (a**2 - 1) * (1 - b)),
          Claim(eq9() * inv(a), eq10(), "divided by alpha"),
          Claim(eq10(), eq10_simplified(), "simplified")]),
        ("G_beta_swap", "G(t,x,y) = G(t,y,x), so the beta equation is the alpha equation with a, b exchanged.",
         "G-proof: exchanging alpha and beta", "exact_poly", "generic",
         [Claim(G, subs(G, {"x": y, "y": x, "u": v, "v": u}), "symmetry"),
          Claim(_swap_ab(eq10_simplified()), b * (1 + a * b) ** 2 - 4 * b - (1 - a * b) ** 2)]),
        ("G_subtract", "Subtracting the two equations: 4(a-b) = (a-b)(1+ab)^2.",
         "G-proof: subtraction of the alpha and beta equations", "exact_poly", "generic",
         [Claim((4 * a + (1 - a * b) ** 2 - a * (1 + a * b) ** 2)
                - (4 * b + (1 - a * b) ** 2 - b * (1 + a * b) ** 2),
                4 * (a - b) - (a - b) * (1 + a * b) ** 2)]),
        ("G_alpha_eq_beta",
         "a = b turns the reduced equation into 4a(1-a) = (a-1)(1+a^2)^2, whose sides have opposite signs unless a = 1.",
         "G-proof: branch alpha = beta", "exact_poly", "alpha_eq_beta",
         [Claim(subs(eq10(), {"b": a}), (a - 1) * (1 + a**2) ** 2 - 4 * a * (1 - a)),
          Claim((a - 1) * (1 + a**2) ** 2 - 4 * a * (1 - a), (a - 1) * ((1 + a**2) ** 2 + 4 * a), "factored")]),
        ("G_alpha_beta_one", "ab = 1 gives cos = 1/(1-a) + 1/(1-1/a) = 1, excluded for 0 < theta < pi.",
         "G-proof: branch alpha beta = 1", "exact_poly", "alpha_beta_one",
         [Claim(inv(1 - a) + inv(1 - inv(a)), Const(1))]),
        ("G_manifold_zero", "G(t, cot(t/2), cot(t/2)) = 0 after arctan(cot(t/2)) = pi/2 - t/2.",
         "G-statement: equality on x = y = cot(theta/2)", "transcendental_reduction", "manifold",
         [Claim(subs(subs(G, {"x": k, "y": k, "u": p / 2 - t / 2, "v": p / 2 - t / 2}), HALF_ANGLE))]),
        ("G_gradients", "Closed-form partials (theta, x, y) match symbolic differentiation.",
         "G-proof: partial derivatives set to zero", "exact_poly", "generic",
         [Claim(Gt, 3 * (s**2 * (c * x * y + s * (x + y)) - 2 * (1 + c) - s**2 * c), "theta"),
          Claim(Gx, s**3 * y + 4 * x**4 * inv(1 + x**2) ** 2 - (1 + c) ** 2 - s**2 * (1 + c), "x"),
          Claim(Gy, s**3 * x + 4 * y**4 * inv(1 + y**2) ** 2 - (1 + c) ** 2 - s**2 * (1 + c), "y")]
         + [Claim(d, cd, f"coded {n}") for n, d, cd in zip("txy", (Gt, Gx, Gy), coded_gradient("trig"))]),
        ("G_tail_bound",
         "G - [sin^3 xy + (1-cos)^2(2+cos)(x+y) - 7 - 6 pi] is a sum of pieces that are nonnegative on the domain.",
         "tail lemma for large x + y (derived, not in the source proof)", "exact_poly", "generic",
         [Claim(G - (s**3 * x * y + (1 - c) ** 2 * (2 + c) * (x + y) - 7 - 6 * p),
                (1 - s**3) + 6 * (1 - s) + 6 * (p - t) + (3 * p - 6 * u) + 2 * x * inv(1 + x**2)
                + (3 * p - 6 * v) + 2 * y * inv(1 + y**2))]),
    ]
    extra = {
        "G_theta_pi": (_theta_pi_anchor,),
        "G_alpha_eq_beta": (_opposite_signs,),
        "G_manifold_zero": (_reduction_check,),
        "G_gradients": (_gradient_code_check,),
        "G_tail_bound": (_tail_pieces_nonnegative,),
    }
    out = []
    for i, (name, statement, cite, method, branch, claims) in enumerate(steps, start=1):
        out.append(ProofStep(f"G{i}", name, "trig", statement, cite, method, tuple(claims), branch,
                             "R1" if method == "transcendental_reduction" else None,
                             extra.get(name, ())))
    return out


def _hyp_steps() -> List[ProofStep]:
    Fe = f_expr()
    Ft, Fx, Fy = (diff(Fe, var, "hyp") for var in "txy")
    bracket13 = c * (x * y - k**2) - s * (x + y - 2 * k)
    literal_coth = {"k": c * inv(s)}
    steps = [
        ("F_integral_identity",
         "d/dx[6 arctanh(1/x) + 2x/(x^2-1) - 4x] = -4x^4/(x^2-1)^2.",
         "F-proof: hyperbolic analogue of the integral identity", "exact_poly", "generic",
         [Claim(diff(hyp_tail(x, u), "x", "hyp"), -4 * x**4 * inv(x**2 - 1) ** 2)]),
        ("F_factor_cubic",
         "cosh^3 - 3cosh + 2 = (cosh-1)^2(cosh+2); cosh^3 - 3cosh - 2 = (1+cosh)^2(cosh-2) = -(1+cosh)^2 + sinh^2(1+cosh).",
         "F-proof: factorizations behind the x partial", "exact_poly", "generic",
         [Claim(c**3 - 3 * c + 2, (c - 1) ** 2 * (c + 2)),
          Claim(c**3 - 3 * c - 2, (1 + c) ** 2 * (c - 2)),
          Claim((1 + c) ** 2 * (c - 2), -(1 + c) ** 2 + s**2 * (1 + c))]),
        ("F_half_angle",
         "coth(l/2) = (1+cosh)/sinh gives coth^2 = (1+cosh)/(cosh-1) and (1+cosh)^2(cosh-2) = sinh^2(2 sinh coth - cosh coth^2).",
         "F-proof: half-argument identity", "exact_poly", "generic",
         [Claim(subs(k**2 * (c - 1), HALF_ANGLE), 1 + c),
          Claim((1 + c) ** 2 * (c - 2), subs(s**2 * (2 * s * k - c * k**2), HALF_ANGLE))]),
        ("F_ell_condition",
         "dF/dl = 3 sinh^2 [cosh(xy - coth^2) - sinh(x + y - 2coth)] with coth = coth(l/2).",
         "F-proof: stationarity in ell", "exact_poly", "generic",
         [Claim(Ft, 3 * s**2 * subs(bracket13, HALF_ANGLE))]),
        ("F_substitution",
         "With x = a coth(l/2), y = b coth(l/2): (1-ab)cosh = ((a-1)+(b-1))(1-cosh).",
         "F-proof: substitution x = alpha coth", "exact_poly", "generic",
         [Claim(_alpha_sub(bracket13), -(1 + c) ** 2 * inv(s) ** 2 * eq_theta_alpha())]),
        ("F_two_line", "(1-ab)cosh - ((a-1)+(b-1))(1-cosh) = -[(1-a)(1-b)cosh - (1-a) - (1-b)].",
         "F-proof: mirror of the two-line simplification", "exact_poly", "generic",
         [Claim(eq_theta_alpha(), -eq_two_line()),
          Claim((c - inv(1 - a) - inv(1 - b)) * (1 - a) * (1 - b), eq_two_line(), "solved form")]),
        ("F_partial_x_alpha",
         "dF/dx = 0 is equivalent to 4a^4 = ((a^2-1)cosh + a^2 + 1)^2 (1 + (1-b)(1-cosh)).",
         "F-proof: x partial in alpha, beta form", "exact_poly", "generic",
         [Claim(_alpha_sub(Fx), (1 + c) ** 2 * (e_beta() - 4 * a**4 * inv(d_alpha()) ** 2))]),
        ("F_brackets", "The two intermediate identities with cosh in place of cos.",
         "F-proof: mirrored intermediate identities", "exact_poly", "alpha_generic",
         [Claim(subs(e_beta(), COS_SOLVED), a * (1 - b) * inv(a - 1)),
          Claim(d_alpha(), (a + 1) * ((a - 1) * c + 1) + a * (a - 1)),
          Claim(subs((a + 1) * ((a - 1) * c + 1) + a * (a - 1), COS_SOLVED),
                (a - 1) * inv(1 - b) * (2 * a + 1 - a * b))]),
        ("F_eq9", "Substituting cosh gives 4a^4(1-b) = a(a-1)(1 + a + a(1-b))^2.",
         "F-proof: elimination of cosh", "exact_poly", "alpha_generic",
         [Claim(subs(eq_x_alpha(), COS_SOLVED), inv(1 - b) * eq9())]),
        ("F_alpha_zero",
         "a = 0 forces b(3b+1) = 0; a = b = 0 means x = y = 0, outside x, y >= 1.",
         "F-proof: alpha = beta = 0 excluded by the domain", "exact_poly", "alpha_zero",
         [Claim(subs(_swap_ab(eq9()), {"a": 0}), -b * (3 * b + 1)),
          Claim(subs(a * k, {"a": 0}), Const(0), "x = 0")]),
        ("F_divide_rewrite", "4a^3(1-b) = 4a(1+a)(a-1)(1-b) + 4a(1-b).",
         "F-proof: dividing through by alpha", "exact_poly", "alpha_generic",
         [Claim(4 * a**3 * (1 - b), 4 * a * (1 + a) * (a - 1) * (1 - b) + 4 * a * (1 - b))]),
        ("F_alpha_chain", "Reduced alpha equation 4a + (1-ab)^2 = a(1+ab)^2 in the hyperbolic ring.",
         "F-proof: reduced alpha equation", "exact_poly", "alpha_generic",
         [Claim(eq9() * inv(a), eq10()), Claim(eq10(), eq10_simplified(), "simplified")]),
        ("F_beta_swap", "F(l,x,y) = F(l,y,x); the beta equation is the swapped alpha equation.",
         "F-proof: symmetry in x and y", "exact_poly", "generic",
         [Claim(Fe, subs(Fe, {"x": y, "y": x, "u": v, "v": u})),
          Claim(_swap_ab(eq10_simplified()), b * (1 + a * b) ** 2 - 4 * b - (1 - a * b) ** 2)]),
        ("F_subtract", "4(a-b) = (a-b)(1+ab)^2 by subtraction.",
         "F-proof: subtraction", "exact_poly", "generic",
         [Claim((4 * a + (1 - a * b) ** 2 - a * (1 + a * b) ** 2)
                - (4 * b + (1 - a * b) ** 2 - b * (1 + a * b) ** 2),
                4 * (a - b) - (a - b) * (1 + a * b) ** 2)]),
        ("F_alpha_eq_beta", "a = b forces a = 1.",
         "F-proof: branch alpha = beta", "exact_poly", "alpha_eq_beta",
         [Claim(subs(eq10(), {"b": a}), (a - 1) * ((1 + a**2) ** 2 + 4 * a))]),
        ("F_alpha_beta_one", "ab = 1 gives cosh = 1, i.e. l = 0, excluded for l > 0.",
         "F-proof: branch alpha beta = 1", "exact_poly", "alpha_beta_one",
         [Claim(inv(1 - a) + inv(1 - inv(a)), Const(1))]),
        ("F_manifold_zero", "F(l, coth(l/2), coth(l/2)) = 0 after arctanh(1/coth(l/2)) = l/2.",
         "F-statement: vanishing on x = y = coth(l/2)", "transcendental_reduction", "manifold",
         [Claim(subs(subs(Fe, {"x": k, "y": k, "u": t / 2, "v": t / 2}), HALF_ANGLE))]),
        ("F_gradients", "Closed-form partials (l, x, y) match symbolic differentiation.",
         "F-proof: partial derivatives set to zero", "exact_poly", "generic",
         [Claim(Fx, s**3 * y - 4 * x**4 * inv(x**2 - 1) ** 2 + (1 + c) ** 2 - s**2 * (1 + c), "x"),
          Claim(Fy, s**3 * x - 4 * y**4 * inv(y**2 - 1) ** 2 + (1 + c) ** 2 - s**2 * (1 + c), "y")]
         + [Claim(d, cd, f"coded {n}") for n, d, cd in zip("txy", (Ft, Fx, Fy), coded_gradient("hyp"))]),
        ("F_mirror", "The alpha, beta stationarity conditions coincide with the trig ones under cos -> cosh.",
         "F-proof: conditions identical after swapping cos with cosh", "exact_poly", "generic",
         [Claim(Const(0))]),
        ("F_ell_zero", "F(0, x, y) = 6 arctanh(1/x) + 2x/(x^2-1) + 6 arctanh(1/y) + 2y/(y^2-1) > 0.",
         "F-proof: boundary l = 0", "boundary_constant", "boundary",
         [Claim(subs(Fe, {"s": 0, "c": 1, "t": 0}),
                6 * u + 2 * x * inv(x**2 - 1) + 6 * v + 2 * y * inv(y**2 - 1))]),
        ("F_half_argument_erratum",
         "The ell-condition holds with coth(l/2) = (1+cosh)/sinh; read literally with coth(l) it fails.",
         "F-proof: the half-angle identity is written with coth(l)", "exact_poly", "generic",
         [Claim(Ft, 3 * s**2 * subs(bracket13, HALF_ANGLE), "half argument"),
          Claim(Ft, 3 * s**2 * subs(bracket13, literal_coth), "literal reading", expect_zero=False)]),
    ]
    extra = {
        "F_alpha_zero": (_domain_excludes_alpha_zero,),
        "F_alpha_eq_beta": (_opposite_signs,),
        "F_manifold_zero": (_reduction_check,),
        "F_gradients": (_gradient_code_check,),
        "F_mirror": (_mirror_check_step,),
        "F_ell_zero": (_ell_zero_anchor,),
    }
    out = []
    for i, (name, statement, cite, method, branch, claims) in enumerate(steps, start=1):
        out.append(ProofStep(f"F{i}", name, "hyp", statement, cite, method, tuple(claims), branch,
                             "R2" if method == "transcendental_reduction" else None,
                             extra.get(name, ())))
    return out


_CACHE: Dict[str, List[ProofStep]] = {}


def list_steps(mode: str) -> List[ProofStep]:
    if mode not in ("trig", "hyp"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode not in _CACHE:
        _CACHE[mode] = _trig_steps() if mode == "trig" else _hyp_steps()
    return list(_CACHE[mode])


def get_step(step_id: str) -> ProofStep:
    for mode in ("trig", "hyp"):
        for st in list_steps(mode):
            if step_id in (st.id, st.name):
                return st
    raise KeyError(f"unknown step {step_id!r}")


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def claim_residual(step: ProofStep, claim: Claim) -> TrigPoly:
    return clear_denominators(claim.lhs - claim.rhs, step.mode).numerator


def verify_step(step, fixture: Optional[Dict[Tuple[str, int], Tuple[TrigPoly, TrigPoly]]] = None) -> StepResult:
    """Decide one step. ``fixture`` replaces claims by stored (lhs, rhs) polynomial pairs."""
    if isinstance(step, str):
        step = get_step(step)
    witness, messages = [], []
    ok = True
    for i, cl in enumerate(step.claims):
        if fixture is not None and (step.id, i) in fixture:
            lhs, rhs = fixture[(step.id, i)]
            res = lhs - rhs
        else:
            try:
                res = claim_residual(step, cl)
            except UnsupportedDenominator as exc:
                ok = False
                messages.append(f"claim {i}: {exc}")
                witness.append("")
                continue
        if res.is_zero() != cl.expect_zero:
            ok = False
            messages.append(f"claim {i} ({cl.label or 'main'}): residual "
                            f"{'zero' if res.is_zero() else 'nonzero'}, expected "
                            f"{'zero' if cl.expect_zero else 'nonzero'}")
        witness.append(format_poly(res))
    if ok:
        messages += _check_side_conditions(step)
        if fixture is None:
            messages += _check_claims_numerically(step)
        for check in step.checks:
            messages += check(step)
        ok = not messages
    return StepResult(step.id, step.name, "verified" if ok else "failed", witness,
                      step.side_conditions, messages)


def verify_all(mode: str = "both", workers: int = 1, fixture=None, step_ids: Sequence[str] = ()) -> VerificationReport:
    modes = ("trig", "hyp") if mode == "both" else (mode,)
    steps = [st for m in modes for st in list_steps(m)]
    if step_ids:
        wanted = set(step_ids)
        steps = [st for st in steps if st.id in wanted or st.name in wanted]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda st: verify_step(st, fixture), steps))
    else:
        results = [verify_step(st, fixture) for st in steps]
    all_ok = all(r.status == "verified" for r in results if r.status != "skipped")
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return VerificationReport(results, all_ok, stamp)


def mutated(step: ProofStep, which: int = 0) -> ProofStep:
    """Copy of ``step`` with one constant of claim ``which`` negated in the tree."""
    claims = list(step.claims)
    cl = claims[which]
    claims[which] = replace(cl, lhs=flip_first_coefficient(cl.lhs))
    return replace(step, claims=tuple(claims))


def tampered_fixture(step: ProofStep, which: int = 0):
    """Fixture for ``step`` with one coefficient of claim ``which`` negated.

    The flip happens on the cleared polynomial, so it always changes the
    residual (unlike a flip in the tree, which may hit a cancelling constant).
    """
    table = {}
    for i, cl in enumerate(step.claims):
        lhs, rhs, _ = clear_pair(cl.lhs, cl.rhs, step.mode)
        if i == which:
            lhs, rhs = _flip_leading(lhs, rhs)
        table[(step.id, i)] = (lhs, rhs)
    return table


def _flip_leading(lhs: TrigPoly, rhs: TrigPoly):
    for side in ("lhs", "rhs"):
        pol = lhs if side == "lhs" else rhs
        if not pol.is_zero():
            mono, coef = pol.leading_term()
            flipped = TrigPoly({**pol.terms, mono: -coef}, pol.mode)
            return (flipped, rhs) if side == "lhs" else (lhs, flipped)
    return lhs + TrigPoly.const(1, lhs.mode), rhs


# ---------------------------------------------------------------------------
# fixtures: the ledger as text, one polynomial per line
# ---------------------------------------------------------------------------

def export_fixture(mode: str = "both") -> str:
    lines = ["# ledger fixture: <step> <claim> lhs|rhs: <polynomial>"]
    modes = ("trig", "hyp") if mode == "both" else (mode,)
    for m in modes:
        for st in list_steps(m):
            for i, cl in enumerate(st.claims):
                lhs, rhs, _ = clear_pair(cl.lhs, cl.rhs, st.mode)
                lines.append(f"{st.id} {i} lhs: {format_poly(lhs)}")
                lines.append(f"{st.id} {i} rhs: {format_poly(rhs)}")
    return "\n".join(lines) + "\n"


def load_fixture(text: str):
    table: Dict[Tuple[str, int], Dict[str, TrigPoly]] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        head, poly_text = line.split(":", 1)
        sid, idx, side = head.split()
        mode = "trig" if sid.startswith("G") else "hyp"
        table.setdefault((sid, int(idx)), {})[side] = parse_poly(poly_text, mode)
    return {key: (sides["lhs"], sides["rhs"]) for key, sides in table.items()}


# ---------------------------------------------------------------------------
# the cos <-> cosh mirror claim
# ---------------------------------------------------------------------------

def _strip_atoms(pol: TrigPoly) -> TrigPoly:
    reg = atoms(pol.mode)
    changed = True
    while changed and not pol.is_zero():
        changed = False
        for name in ("s", "1+c", "D_a", "D_b"):
            q = exact_div(pol, reg[name])
            if q is not None and not q.is_constant():
                pol, changed = q, True
    return pol.primitive()


def stationarity_conditions(mode: str, rules: Optional[str] = None) -> Tuple[TrigPoly, ...]:
    """The three alpha/beta conditions derived from the function's own partials.

    ``rules`` selects the differentiation rules; it defaults to ``mode`` and
    is only changed for negative controls.
    """
    rules = rules or mode
    f = function_expr(mode)
    out = []
    for var in "txy":
        sub = _alpha_sub(diff(f, var, rules))
        out.append(_strip_atoms(clear_denominators(sub, mode).numerator))
    return tuple(out)


def swap_relation(polys: Sequence[TrigPoly]) -> Tuple[TrigPoly, ...]:
    return tuple(q.swap_mode() for q in polys)


def mirror_check(with_witness: bool = False, control: bool = False):
    """Trig conditions, moved into the hyperbolic ring, equal the hyp conditions.

    With ``control=True`` the hyperbolic side is differentiated with the
    circular chain rules, which must break the agreement.
    """
    moved = swap_relation(stationarity_conditions("trig"))
    hyp = stationarity_conditions("hyp", rules="trig" if control else None)
    diffs = [f"{var}: {format_poly(m - h)}" for var, m, h in zip("txy", moved, hyp) if m != h]
    return (not diffs, diffs) if with_witness else not diffs
