import random

import mpmath
import pytest

import oracles
from ineqcert import identities as I
from ineqcert.poly import TrigPoly


@pytest.fixture(scope="module")
def report():
    return I.verify_all("both", workers=4)


class TestLedger:
    def test_counts(self):
        assert [s.id for s in I.list_steps("trig")] == [f"G{i}" for i in range(1, 24)]
        assert [s.id for s in I.list_steps("hyp")] == [f"F{i}" for i in range(1, 22)]

    def test_citations_and_methods(self):
        for mode in ("trig", "hyp"):
            for st in I.list_steps(mode):
                assert st.citation.strip() and st.statement.strip()
                assert st.method in I.METHODS
                if st.method == "transcendental_reduction":
                    assert st.reduction

    def test_unknown_step(self):
        with pytest.raises(KeyError):
            I.get_step("G99")

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            I.list_steps("ellipse")


class TestVerification:
    def test_all_verified(self, report):
        assert report.all_verified, report.failed_ids
        assert len(report.steps) == 44

    @pytest.mark.parametrize("name", ["G_alpha_chain", "G_subtract", "G_manifold_zero",
                                      "F_alpha_chain", "F_subtract", "F_manifold_zero"])
    def test_named(self, name):
        r = I.verify_step(name)
        assert r.status == "verified", r.messages
        assert r.witness and set(r.witness) == {"0"}

    def test_alpha_chain_identity_directly(self):
        a, b = TrigPoly.var("a"), TrigPoly.var("b")
        lhs = (a - 1) * ((1 + 2 * a - a * b) ** 2 - (1 + a * b) ** 2)
        assert (lhs - 4 * a * (a**2 - 1) * (1 - b)).is_zero()
        assert "a" in I.get_step("G_alpha_chain").side_conditions

    def test_subtract_identity_directly(self):
        a, b = TrigPoly.var("a"), TrigPoly.var("b")
        e = (4 * a + (1 - a * b) ** 2 - a * (1 + a * b) ** 2) - (4 * b + (1 - a * b) ** 2 - b * (1 + a * b) ** 2) \
            - (4 * (a - b) - (a - b) * (1 + a * b) ** 2)
        assert e.is_zero()

    def test_manifold_cleared_polynomial(self):
        c = TrigPoly.var("c")
        assert ((1 - c) * (1 + c) * ((1 + c) ** 2 + 2 * (1 - c) * (2 + c) - (1 - c**2) - 4)).is_zero()

    def test_manifold_high_precision(self):
        with mpmath.workdps(50):
            for i in range(1, 101):
                t = mpmath.pi * i / 101
                m = mpmath.cot(t / 2)
                assert abs(oracles.G(t, m, m)) < mpmath.mpf(10) ** -40

    def test_opposite_signs(self):
        rng = random.Random(0)
        for _ in range(1000):
            al = rng.choice([rng.uniform(1e-6, 1 - 1e-6), rng.uniform(1 + 1e-6, 50)])
            assert (4 * al * (1 - al) > 0) != ((al - 1) * (1 + al**2) ** 2 > 0)

    def test_alpha_beta_one_clears(self):
        from ineqcert.expr import Sym, clear_denominators, inv
        A = Sym("a")
        out = clear_denominators(inv(1 - A) + inv(1 - inv(A)) - 1, "trig")
        assert out.numerator.is_zero()
        assert {"1-a", "a"} <= set(out.side_conditions)

    def test_report_json_shape(self, report):
        d = report.to_dict()
        assert set(d) == {"steps", "all_verified", "timestamp", "engine_version"}
        assert {s["status"] for s in d["steps"]} == {"verified"}

    def test_workers_deterministic(self, report):
        again = I.verify_all("both", workers=1)
        assert [r.to_dict() for r in again.steps] == [r.to_dict() for r in report.steps]


class TestTampering:
    @pytest.mark.parametrize("sid", ["G4", "G16", "G18", "F12", "F14"])
    def test_tampered_fixture_fails(self, sid):
        st = I.get_step(sid)
        r = I.verify_step(st, fixture=I.tampered_fixture(st))
        assert r.status == "failed"
        assert r.witness[0] not in ("", "0")

    def test_mutated_tree_fails(self):
        st = I.mutated(I.get_step("G_subtract"))
        assert I.verify_step(st).status == "failed"

    def test_fixture_roundtrip(self):
        fx = I.load_fixture(I.export_fixture("both"))
        rep = I.verify_all("both", fixture=fx, workers=4)
        assert rep.all_verified

    def test_fixture_corruption_reports_id(self):
        text = I.export_fixture("trig")
        lines = text.splitlines()
        idx = next(i for i, l in enumerate(lines) if l.startswith("G18 0 lhs:"))
        lines[idx] = lines[idx] + " + 1"
        rep = I.verify_all("trig", fixture=I.load_fixture("\n".join(lines)))
        assert rep.failed_ids == ["G18"]


class TestMirror:
    def test_mirror_holds(self):
        assert I.mirror_check()

    def test_swap_involution(self):
        conds = I.stationarity_conditions("trig")
        assert tuple(q.swap_mode().swap_mode() for q in conds) == conds

    def test_control_detected(self):
        ok, diffs = I.mirror_check(with_witness=True, control=True)
        assert not ok and diffs
