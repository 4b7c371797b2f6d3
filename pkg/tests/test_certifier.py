import json
import math

import mpmath
import numpy as np
import pytest

from ineqcert import certifier as C
from ineqcert.critical import brute_force_min, value_numpy
from ineqcert.interval import Box3
from ineqcert.scalar import EvalPoint

TRIG_BOX = ((1.5, 1.7), (0.5, 1.1), (0.5, 1.1))
HYP_BOX = ((2.0, 2.2), (0.7, 1.4), (0.7, 1.4))


def grid_min_off_tube(mode, outer, rho, n=100):
    """Grid minimum over an outer box in (t, u, v), dropping points inside the tube."""
    (t0, t1), (u0, u1), (v0, v1) = outer
    t = np.linspace(t0, t1, n)[:, None, None]
    u = np.linspace(u0, u1, n)[None, :, None]
    v = np.linspace(v0, v1, n)[None, None, :]
    tau = math.pi - t if mode == "trig" else t
    if mode == "trig":
        x, y = np.tan(u), np.tan(v)
    else:
        x, y = 1 / np.tanh(u), 1 / np.tanh(v)
    vals = value_numpy(mode, t, x, y)
    dist = np.maximum(np.abs(u - tau / 2), np.abs(v - tau / 2))
    return float(np.min(np.where(dist > rho, vals, np.inf)))


class TestCompactify:
    def test_examples(self):
        assert C.compactify((math.pi / 2, 1, 1), "trig") == pytest.approx((math.pi / 2, math.pi / 4, math.pi / 4))
        m = 1 / math.tan(1.0)
        assert C.compactify((2.0, m, m), "trig") == pytest.approx((2.0, math.pi / 2 - 1, math.pi / 2 - 1), abs=1e-15)
        assert C.compactify(EvalPoint("hyp", 1.0, 1 / math.tanh(0.5), 3.0), "hyp")[1] == pytest.approx(0.5)

    def test_roundtrip(self):
        rng = np.random.default_rng(0)
        for mode in ("trig", "hyp"):
            for _ in range(200):
                p = (rng.uniform(0.1, 3), rng.uniform(0.1, 20) + (mode == "hyp"), rng.uniform(0.1, 20) + (mode == "hyp"))
                q = C.decompactify(C.compactify(p, mode), mode)
                assert q == pytest.approx(p, rel=1e-14 * 8)

    def test_box_is_sound(self):
        t, u, v = C.compactify(Box3.from_bounds("hyp", (1, 2), (1.5, 3), (2, 2)), "hyp")
        assert u.lo <= math.atanh(1 / 3) and math.atanh(1 / 1.5) <= u.hi
        assert v.contains(math.atanh(0.5))

    def test_manifold_u(self):
        assert C.manifold_u("trig", 2.0) == pytest.approx(math.pi / 2 - 1)
        assert C.manifold_u("hyp", 2.0) == 1.0


class TestRegions:
    def test_off_manifold_box(self):
        outer = ((1.0, 1.2), (math.atan(5), math.atan(6)), (math.atan(5), math.atan(6)))
        parts = C.certify_region("trig", outer, C.TubeSpec(), 0.0, 10_000)
        assert parts["region"].status == "proved_strict"
        (_, gmin) = brute_force_min("trig", ((1.0, 1.2), (5, 6), (5, 6)), 60)
        delta = parts["region"].delta
        assert 0 < delta <= gmin + 1e-9
        # a single unsplit box: the mean-value slack is about half the value here
        assert delta >= 0.4 * gmin

    @pytest.mark.parametrize("mode, outer", [("trig", TRIG_BOX), ("hyp", HYP_BOX)])
    def test_crossing_box_is_sound(self, mode, outer):
        parts = C.certify_region(mode, outer, C.TubeSpec(rho=0.1), 0.0, 200_000)
        assert parts["region"].status == parts["tube"].status == "proved_strict"
        assert grid_min_off_tube(mode, outer, 0.1) >= parts["region"].delta - 1e-9

    @pytest.mark.parametrize("mode, outer", [("trig", TRIG_BOX), ("hyp", HYP_BOX)])
    def test_rho_zero_inconclusive(self, mode, outer):
        parts = C.certify_region(mode, outer, C.TubeSpec(rho=0.0), 0.0, 200_000)
        assert parts["region"].status == "inconclusive"

    @pytest.mark.parametrize("mode, outer", [("trig", TRIG_BOX), ("hyp", HYP_BOX)])
    def test_offset_control(self, mode, outer):
        parts = C.certify_region(mode, outer, C.TubeSpec(rho=0.1), 0.01, 200_000)
        assert "proved_strict" not in {p.status for p in parts.values()}

    @pytest.mark.parametrize("mode, outer", [("trig", TRIG_BOX), ("hyp", HYP_BOX)])
    def test_monotone_in_rho(self, mode, outer):
        small = C.certify_region(mode, outer, C.TubeSpec(rho=0.1), 0.0, 200_000)["region"]
        big = C.certify_region(mode, outer, C.TubeSpec(rho=0.15), 0.0, 200_000)["region"]
        assert small.status == "proved_strict"
        assert big.status == "proved_strict"

    def test_budget_one(self):
        cfg = C.CertConfig.default(1, budget=1)
        cert = C.certify_lemma(1, cfg)
        assert cert.status == "inconclusive"
        assert cert.parts["region"]["boxes"] == 1


class TestSlices:
    def test_trig_slice(self):
        tau = (math.pi - 1.51, math.pi - 1.5)
        part = C.certify_tube_slice("trig", tau, C.TubeSpec())
        assert part.status == "proved_strict"
        assert part.details["krawczyk_unique"] and part.details["krawczyk_iterations"] <= 3
        ok, _, box = C.krawczyk("trig", tau, (tau[0] / 2 - 0.01, tau[1] / 2 + 0.01))
        assert ok
        for th in (1.5, 1.505, 1.51):
            assert box[0].contains(1 / math.tan(th / 2)) and box[1].contains(1 / math.tan(th / 2))

    def test_hyp_slice(self):
        part = C.certify_tube_slice("hyp", (2.0, 2.01), C.TubeSpec())
        assert part.status == "proved_strict" and part.details["krawczyk_unique"]
        ok, _, box = C.krawczyk("hyp", (2.0, 2.0), (0.99, 1.01))
        coth1 = float(mpmath.coth(1))
        assert ok and box[0].contains(coth1) and box[1].contains(coth1)
        assert abs(float(box[0].mid) - 1.3130352854993313) < 1e-12

    def test_near_pi_slice_needs_the_cap(self):
        tau = (0.0, math.pi - 3.10)
        direct = C.certify_tube_slice("trig", tau, C.TubeSpec())
        assert direct.status == "inconclusive"  # the Hessian degenerates at theta = pi
        tube = C.certify_tube("trig", tau, ((0, math.pi / 2), (0, math.pi / 2)), C.TubeSpec(), budget=10**6)
        assert tube.status == "proved_strict"
        assert tube.details["cap"]["status"] == "proved_strict"

    def test_cap_refuses_positive_target(self):
        assert C.certify_cap(0.1, target=0.01).status == "inconclusive"


class TestCertificateShape:
    def test_weakest(self):
        assert C.weakest("proved_strict", "proved_up_to_epsilon") == "proved_up_to_epsilon"
        assert C.weakest("proved_strict", "inconclusive", "proved_up_to_epsilon") == "inconclusive"

    def test_tube_spec_validation(self):
        with pytest.raises(ValueError):
            C.TubeSpec(rho=-1)

    def test_json(self):
        cfg = C.CertConfig.default(2, t_range=(2.0, 2.2), u_range=(0.7, 1.4), budget=200_000)
        cert = C.certify_lemma(2, cfg)
        d = json.loads(cert.to_json())
        for key in ("lemma", "status", "delta", "region", "tube", "corner_policy", "epsilon", "stats",
                    "rounding", "version"):
            assert key in d
        assert d["epsilon"] == 1e-9 and d["lemma"] == 2
        assert "timing" not in json.loads(cert.to_json(include_timing=False))

    def test_deterministic_across_workers(self):
        cfg = dict(t_range=(1.4, 1.8), u_range=(0.4, 1.2), budget=300_000)
        a = C.certify_lemma(2, C.CertConfig.default(2, workers=1, **cfg))
        b = C.certify_lemma(2, C.CertConfig.default(2, workers=3, **cfg))
        da, db = a.to_dict(include_timing=False), b.to_dict(include_timing=False)
        da["stats"].pop("workers", None)
        db["stats"].pop("workers", None)
        assert da == db
