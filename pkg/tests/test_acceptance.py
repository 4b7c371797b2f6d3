"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed together at the
end of the run (see ``conftest.pytest_terminal_summary``).
"""
import math
import random
import time

import mpmath
import numpy as np
import pytest

import oracles
from ineqcert import certifier as C
from ineqcert import critical as K
from ineqcert import identities as I
from ineqcert import interval as iv
from ineqcert import scalar
from ineqcert.interval import Box3
from ineqcert.scalar import EvalPoint

RESULTS = {}


class Criterion:
    """Context manager that records PASS/FAIL for one criterion and re-raises."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        line = f"criterion {self.number:>2}: {'PASS' if ok else 'FAIL'}  {self.title}"
        if self.detail:
            line += f"  [{self.detail}]"
        if not ok:
            line += f"  ({exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
        RESULTS[self.number] = line
        print(line)
        return False


def test_1_identity_ledger():
    with Criterion(1, "identity ledger: 44 steps, exact residuals, reductions to 1e-30, < 10 s") as cr:
        start = time.perf_counter()
        rep = I.verify_all("both", workers=1)
        elapsed = time.perf_counter() - start
        assert rep.all_verified, rep.failed_ids
        assert len(rep.steps) == 44
        for res in rep.steps:
            st = I.get_step(res.id)
            if st.method == "exact_poly":
                for cl, w in zip(st.claims, res.witness):
                    if cl.expect_zero:
                        assert w == "0", (res.id, w)
        with mpmath.workdps(50):
            tol = mpmath.mpf(10) ** -30
            for i in range(1, 101):
                th = mpmath.pi * i / 101
                assert abs(mpmath.atan(mpmath.cot(th / 2)) - (mpmath.pi / 2 - th / 2)) <= tol
                ell = mpmath.mpf(i) / 10
                assert abs(mpmath.atanh(1 / mpmath.coth(ell / 2)) - ell / 2) <= tol
        assert elapsed < 10, elapsed
        cr.detail = f"{elapsed:.1f} s"


def test_2_manifold_vanishing():
    with Criterion(2, "manifold vanishing: |f| <= 1e-12, |grad| <= 1e-10") as cr:
        worst_v = worst_g = 0.0
        with mpmath.workdps(40):
            for th in np.linspace(0.05, math.pi, 1000):
                t = mpmath.mpf(float(th))
                m = mpmath.cot(t / 2)
                worst_v = max(worst_v, abs(float(scalar.G(t, m, m))))
                g = scalar.grad_G(EvalPoint("trig", t, m, m))
                worst_g = max(worst_g, *(abs(float(d)) for d in g[:3]))
            for ell in np.linspace(0.05, 20, 1000):
                t = mpmath.mpf(float(ell))
                m = mpmath.coth(t / 2)
                worst_v = max(worst_v, abs(float(scalar.F(t, m, m))))
                g = scalar.grad_F(EvalPoint("hyp", t, m, m))
                worst_g = max(worst_g, *(abs(float(d)) for d in g[:3]))
        # float evaluation at float points, trig (well conditioned there)
        for th in np.linspace(0.05, math.pi, 1000):
            m = 1 / math.tan(th / 2)
            worst_v = max(worst_v, abs(scalar.G(float(th), m, m)))
        assert worst_v <= 1e-12 and worst_g <= 1e-10
        cr.detail = f"max |f| {worst_v:.1e}, max |grad| {worst_g:.1e}"


def test_3_reference_values():
    with Criterion(3, "reference values to 1e-12") as cr:
        pairs = [(scalar.eval_G(EvalPoint("trig", math.pi, 1, 1)).value, oracles.G_PI_1_1),
                 (scalar.eval_G(EvalPoint("trig", math.pi / 2, 0, 0)).value, oracles.G_HALFPI_0_0),
                 (scalar.eval_F(EvalPoint("hyp", 0, 2, 2)).value, oracles.F_0_2_2)]
        with mpmath.workdps(40):
            assert abs(oracles.G_PI_1_1 - (10 - 3 * mpmath.pi)) < 1e-28
            assert abs(oracles.G_HALFPI_0_0 - (3 * mpmath.pi - 7)) < 1e-28
            assert abs(oracles.F_0_2_2 - (12 * mpmath.atanh(mpmath.mpf(1) / 2) + mpmath.mpf(8) / 3)) < 1e-28
        errs = [abs(v - float(ref)) for v, ref in pairs]
        assert max(errs) <= 1e-12
        cr.detail = f"max error {max(errs):.1e}"


def test_4_gradient_hessian():
    with Criterion(4, "gradients vs central differences (1e-6), manifold Hessian (1e-8)") as cr:
        rng = random.Random(4)
        worst = 0.0
        for mode in ("trig", "hyp"):
            f = scalar.G if mode == "trig" else scalar.F
            grad = scalar.grad_G if mode == "trig" else scalar.grad_F
            for _ in range(1000):
                if mode == "trig":
                    p = [rng.uniform(0.1, math.pi - 0.1), rng.uniform(0.05, 10), rng.uniform(0.05, 10)]
                else:
                    p = [rng.uniform(0.1, 4), rng.uniform(1.2, 10), rng.uniform(1.2, 10)]
                g = grad(EvalPoint(mode, *p))
                with mpmath.workdps(40):
                    for i in range(3):
                        # central difference with step 1e-5; the differencing is done
                        # in mpmath so float cancellation does not swamp small partials
                        h = mpmath.mpf(1e-5)
                        up = [mpmath.mpf(v) for v in p]
                        dn = list(up)
                        up[i] += h
                        dn[i] -= h
                        fd = float((f(*up) - f(*dn)) / (2 * h))
                        err = abs(fd - g[i]) / max(abs(fd), abs(g[i]), 1e-300)
                        worst = max(worst, err)
                        assert err <= 1e-6, (mode, p, i, fd, g[i])
        hworst = 0.0
        for th in np.linspace(0.1, math.pi - 0.1, 200):
            m = 1 / math.tan(th / 2)
            H = scalar.hessian_xy_G(EvalPoint("trig", float(th), m, m))
            s3 = math.sin(th) ** 3
            for got, want in zip((H[0][0], H[0][1], H[1][0], H[1][1]), (2 * s3, s3, s3, 2 * s3)):
                hworst = max(hworst, abs(got - want))
        assert hworst <= 1e-8
        cr.detail = f"worst FD rel. error {worst:.1e}, Hessian error {hworst:.1e}"


def _random_box(rng, mode):
    if mode == "trig":
        t0 = rng.uniform(0.0, math.pi)
        t1 = min(math.pi, t0 + rng.uniform(0, 0.5))
        x0, y0 = rng.uniform(0, 10), rng.uniform(0, 10)
    else:
        t0 = rng.uniform(0.0, 5)
        t1 = t0 + rng.uniform(0, 0.5)
        x0, y0 = rng.uniform(1.0001, 10), rng.uniform(1.0001, 10)
    return (t0, t1), (x0, x0 + rng.uniform(0, 2)), (y0, y0 + rng.uniform(0, 2))


def test_5_interval_soundness():
    with Criterion(5, "interval soundness: 1000 boxes x 100 points, zero violations") as cr:
        violations = 0
        checked = 0
        with mpmath.workdps(30):
            for mode in ("trig", "hyp"):
                rng = random.Random(5 if mode == "trig" else 6)
                for _ in range(1000):
                    tb, xb, yb = _random_box(rng, mode)
                    b = Box3.from_bounds(mode, tb, xb, yb)
                    encs = (iv.eval_interval(b),) + tuple(iv.eval_grad_interval(b))
                    pts = [(rng.uniform(*tb), rng.uniform(*xb), rng.uniform(*yb)) for _ in range(100)]
                    for p in pts:
                        vals = _exact_values(mode, p)
                        for enc, v in zip(encs, vals):
                            checked += 1
                            if not (float(enc.lo) <= v <= float(enc.hi)):
                                violations += 1
        assert violations == 0
        cr.detail = f"{checked} containment checks"


def _exact_values(mode, p):
    """Value and gradient at a float point, evaluated in mpmath and rounded once.

    The rounding of an mpmath value to the nearest float can cross an interval
    end that is itself a float only if the exact value lies within half an ulp
    of it; the enclosures are widened outward by at least one ulp, so the check
    stays exact.
    """
    t, x, y = (mpmath.mpf(v) for v in p)
    if mode == "trig":
        return (float(scalar.G(t, x, y)),) + tuple(float(d) for d in scalar.grad_G(EvalPoint("trig", t, x, y))[:3])
    return (float(scalar.F(t, x, y)),) + tuple(float(d) for d in scalar.grad_F(EvalPoint("hyp", t, x, y))[:3])


def _grid_off_tube(mode, cert, n=100):
    """100^3 grid over region minus tube in compact coordinates (t, u, v)."""
    t0, t1 = cert.region["t"]
    u0, u1 = cert.region["u"]
    rho = cert.tube["rho"]
    t = np.linspace(t0, t1, n)[:, None, None]
    u = np.linspace(u0, u1, n)
    tau = math.pi - t if mode == "trig" else t
    best = math.inf
    for j in range(n):
        uu = u[j]
        v = u[None, None, :]
        if mode == "trig":
            x, y = np.tan(uu), np.tan(v)
        else:
            x, y = 1 / np.tanh(uu), 1 / np.tanh(v)
        vals = K.value_numpy(mode, t, np.full_like(v, x), y)
        dist = np.maximum(np.abs(uu - tau / 2), np.abs(v - tau / 2))
        vals = np.where(dist > rho, vals, np.inf)
        best = min(best, float(np.min(vals)))
    return best


def _check_certificate(cr, cert, mode):
    assert cert.status == "proved_strict", cert.parts
    assert cert.delta is not None and cert.delta > 0
    gmin = _grid_off_tube(mode, cert)
    assert gmin >= cert.delta - 1e-9
    wall = cert.timing["wall_seconds"]
    assert wall < 600
    cr.detail = f"delta {cert.delta:.3e}, grid min {gmin:.3e}, {wall:.0f} s"


def test_6_certify_lemma_1(lemma1_certificate):
    with Criterion(6, "lemma 7.1 certified strictly, grid oracle >= delta - 1e-9, < 10 min") as cr:
        _check_certificate(cr, lemma1_certificate, "trig")
        assert lemma1_certificate.parts["corner"]["status"] == "proved_up_to_epsilon"


def test_7_certify_lemma_2(lemma2_certificate):
    with Criterion(7, "lemma 7.4 certified strictly, grid oracle >= delta - 1e-9, < 10 min") as cr:
        _check_certificate(cr, lemma2_certificate, "hyp")


def test_8_negative_controls():
    with Criterion(8, "negative controls: rho = 0, G - 0.01, mutated ledger step") as cr:
        for lemma in (1, 2):
            c = C.certify_lemma(lemma, C.CertConfig.default(lemma, rho=0.0, corner_samples=4096))
            assert c.status == "inconclusive"
            c = C.certify_lemma(lemma, C.CertConfig.default(lemma, offset=0.01, corner_samples=4096))
            assert c.status != "proved_strict"
            assert c.stats["overall_status_including_corner"] != "proved_strict"
        failed = []
        for sid in ("G16", "G18", "F14"):
            st = I.get_step(sid)
            r = I.verify_step(st, fixture=I.tampered_fixture(st))
            assert r.status == "failed" and r.witness[0] not in ("", "0")
            failed.append(sid)
        r = I.verify_step(I.mutated(I.get_step("G_subtract")))
        assert r.status == "failed" and any(w != "0" for w in r.witness)
        cr.detail = "tampered " + ", ".join(failed)


def test_9_stationary_probe():
    with Criterion(9, "multistart: interior convergents on the manifold; alpha/beta branches") as cr:
        counts = {}
        for mode in ("trig", "hyp"):
            pts = K.multistart(mode, 1000, seed=9)
            spurious = [p for p in pts if p.classification == "spurious"]
            assert not spurious, spurious[:3]
            interior = [p for p in pts if p.classification == "manifold"]
            assert interior
            for p in interior:
                assert K.manifold_distance(p.point) <= 1e-6
            counts[mode] = len(interior)
            states = K.solve_alpha_beta(mode)
            assert [(s.alpha, s.beta) for s in states if s.admissible] == [(1.0, 1.0)]
            assert {s.branch for s in states if not s.admissible} == {"alpha_zero", "alpha_beta_one"}
            assert all(s.c == 2 for s in states if s.branch == "alpha_zero")
            assert all(s.c == 1 for s in states if s.branch == "alpha_beta_one")
        cr.detail = f"manifold convergents trig {counts['trig']}, hyp {counts['hyp']}"


def test_10_determinism(lemma1_certificate, lemma2_certificate):
    with Criterion(10, "determinism across runs and 1 vs N workers") as cr:
        for lemma, ref in ((1, lemma1_certificate), (2, lemma2_certificate)):
            again = C.certify_lemma(lemma, C.CertConfig.default(lemma, workers=4))
            assert again.to_json(include_timing=False) == ref.to_json(include_timing=False)
        rerun = C.certify_lemma(2, C.CertConfig.default(2))
        assert rerun.to_json(include_timing=False) == lemma2_certificate.to_json(include_timing=False)
        a = I.verify_all("both", workers=1).to_dict()
        b = I.verify_all("both", workers=6).to_dict()
        a.pop("timestamp")
        b.pop("timestamp")
        assert a == b
        cr.detail = "lemma 1 and 2 at 1 and 4 workers, lemma 2 rerun, ledger at 1 and 6 workers"
