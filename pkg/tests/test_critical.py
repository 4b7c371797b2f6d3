import csv
import io
import math

import numpy as np
import pytest

from ineqcert import critical as K
from ineqcert import scalar
from ineqcert.scalar import EvalPoint


def _on_manifold(p, tol=1e-8):
    m = 1 / math.tan(p.t / 2) if p.mode == "trig" else 1 / math.tanh(p.t / 2)
    return abs(p.x - m) <= tol * (1 + m) and abs(p.y - m) <= tol * (1 + m)


class TestNewton:
    def test_trig_interior(self):
        sp = K.newton_stationary("trig", (1.5, 0.8, 1.2))
        assert sp.converged and sp.classification == "manifold"
        assert sp.residual <= 1e-10 and _on_manifold(sp.point)

    def test_trig_corner(self):
        sp = K.newton_stationary("trig", (3.0, 0.05, 0.05))
        assert sp.classification == "boundary"
        assert max(math.pi - sp.point.t, sp.point.x, sp.point.y) <= 0.05

    def test_hyp_interior(self):
        sp = K.newton_stationary("hyp", EvalPoint("hyp", 1.0, 2.5, 2.0))
        assert sp.converged and sp.classification == "manifold"
        assert sp.residual <= 1e-10 and _on_manifold(sp.point)

    def test_rearranged_identities(self):
        """Converged points satisfy the x- and y-equations in rearranged form."""
        for start in ((1.5, 0.8, 1.2), (2.2, 0.3, 0.6), (0.9, 3.0, 1.0)):
            p = K.newton_stationary("trig", start).point
            s, c = math.sin(p.t), math.cos(p.t)
            for a, b in ((p.x, p.y), (p.y, p.x)):
                lhs = s**3 * b + 4 * a**4 / (1 + a * a) ** 2
                assert lhs == pytest.approx((1 + c) ** 2 + s * s * (1 + c), abs=1e-8)

    def test_manifold_distance(self):
        m = 1 / math.tan(1.0)
        assert K.manifold_distance(EvalPoint("trig", 2.0, m, m)) <= 1e-15
        assert K.manifold_distance(EvalPoint("trig", 2.0, m, 2 * m)) > 0.1


class TestAlphaBeta:
    @pytest.mark.parametrize("mode", ["trig", "hyp"])
    def test_branches(self, mode):
        states = K.solve_alpha_beta(mode)
        admissible = [s for s in states if s.admissible]
        assert [(s.alpha, s.beta) for s in admissible] == [(1.0, 1.0)]
        zero = [s for s in states if s.branch == "alpha_zero"]
        assert zero and all(s.beta == 0 and s.c == 2 and not s.admissible for s in zero)
        one = [s for s in states if s.branch == "alpha_beta_one"]
        assert one and all(s.c == 1 and not s.admissible for s in one)
        if mode == "hyp":
            assert "x, y >= 1" in zero[0].reason

    def test_mode_swap_stable(self):
        key = lambda s: (s.branch, round(s.alpha, 12), round(s.beta, 12), s.admissible)
        assert [key(s) for s in K.solve_alpha_beta("trig")] == [key(s) for s in K.solve_alpha_beta("hyp")]

    def test_plug_in(self):
        assert K.reduced_residuals(1.0, 1.0) == (0.0, 0.0)
        assert 4 + 0 == 1 * 4

    def test_alpha_beta_one_family(self):
        for a in (0.3, 0.5, 2.0, 7.0):
            r1, r2 = K.reduced_residuals(a, 1 / a)
            assert abs(r1) < 1e-12 and abs(r2) < 1e-12


class TestBruteForce:
    def test_trig_example(self):
        (t, x, y), v = K.brute_force_min("trig", ((0.3, math.pi), (0, 10), (0, 10)), 200)
        assert -1e-9 <= v <= 5e-3
        m = 1 / math.tan(t / 2)
        h = 10 / 199
        assert abs(x - m) <= 2 * h + 0.05 and abs(y - m) <= 2 * h + 0.05 or max(math.pi - t, x, y) <= 2 * h

    def test_hyp_example(self):
        (t, x, y), v = K.brute_force_min("hyp", ((0.5, 3), (1.05, 10), (1.05, 10)), 200)
        assert v >= -1e-9
        m = 1 / math.tanh(t / 2)
        assert abs(x - m) <= 0.2 and abs(y - m) <= 0.2

    def test_sub_box(self):
        big = K.brute_force_min("trig", ((0.5, 2.5), (0, 4), (0, 4)), 41)[1]
        sub = K.brute_force_min("trig", ((0.5, 1.5), (0, 2), (0, 2)), 21)[1]
        assert sub >= big

    def test_tie_break(self):
        # G is symmetric, so ties occur; the first index in C order wins
        (t, x, y), _ = K.brute_force_min("trig", ((1.0, 1.0), (0.5, 2.0), (0.5, 2.0)), 31)
        assert x <= y

    def test_rejects_small_grid(self):
        with pytest.raises(ValueError):
            K.brute_force_min("trig", ((0, 1), (0, 1), (0, 1)), 1)

    def test_numpy_matches_scalar(self):
        rng = np.random.default_rng(3)
        t, x, y = rng.uniform(0, math.pi, 500), rng.uniform(0, 30, 500), rng.uniform(0, 30, 500)
        got = K.g_numpy(t, x, y)
        for i in range(500):
            ref = scalar.G(t[i], x[i], y[i])
            assert abs(got[i] - ref) <= 1e-11 * (1 + abs(ref))
        t, x, y = rng.uniform(0, 12, 500), rng.uniform(1.001, 30, 500), rng.uniform(1.001, 30, 500)
        got = K.f_numpy(t, x, y)
        for i in range(500):
            ref = scalar.F(t[i], x[i], y[i])
            assert abs(got[i] - ref) <= 1e-9 * (1 + abs(ref))


@pytest.mark.parametrize("mode", ["trig", "hyp"])
def test_multistart_has_no_spurious(mode):
    pts = K.multistart(mode, 1000, seed=7)
    assert len(pts) == 1000
    assert not [p for p in pts if p.classification == "spurious"]
    interior = [p for p in pts if p.classification == "manifold"]
    assert len(interior) > 100
    for p in interior:
        assert K.manifold_distance(p.point) <= 1e-6 and p.residual <= 1e-10


def test_stationary_csv():
    rows = list(csv.reader(io.StringIO(K.stationary_csv(K.multistart("hyp", 8, seed=1)))))
    assert rows[0] == ["mode", "t", "x", "y", "residual", "classification", "iterations"]
    assert len(rows) == 9
