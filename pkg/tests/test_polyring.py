import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ineqcert.expr import Const, Sym, UnsupportedDenominator, clear_denominators, inv
from ineqcert.poly import ModeMismatch, TrigPoly, format_poly, parse_poly, exact_div

s, c, a, b, x, y = (TrigPoly.var(n) for n in "scabxy")


def P(text, mode="trig"):
    return parse_poly(text, mode)


class TestExamples:
    def test_pythagoras(self):
        assert s**2 + c**2 == TrigPoly.const(1)

    def test_hyperbolic(self):
        sh, ch = TrigPoly.var("s", "hyp"), TrigPoly.var("c", "hyp")
        assert ch**2 - sh**2 == TrigPoly.const(1, "hyp")

    def test_expansion(self):
        assert (1 - a) * (1 - b) == P("1 - a - b + a b")

    def test_cubic_factor(self):
        assert (c**3 - 3 * c - 2 + (1 + c) ** 2 * (2 - c)).is_zero()

    def test_tail_factor(self):
        assert (c**3 - 3 * c + 2 - (1 - c) ** 2 * (2 + c)).is_zero()

    def test_noting_that(self):
        lhs = s**2 * (2 * (1 + c) + s**2 * c)
        rhs = s**2 * (c * (1 + c) ** 2 + 2 * s**2 * (1 + c))
        assert (lhs - rhs).is_zero()

    def test_mode_mismatch(self):
        with pytest.raises(ModeMismatch):
            s + TrigPoly.var("s", "hyp")

    def test_normal_form_has_low_s_degree(self):
        p = (s + c + a) ** 6
        assert all(m[0] <= 1 for m in p.terms)
        assert all(coef != 0 for coef in p.terms.values())

    def test_no_floats(self):
        with pytest.raises(TypeError):
            TrigPoly.const(0.5)

    def test_exact_div(self):
        q = exact_div((1 + c) * (a - b), 1 + c)
        assert q == a - b
        assert exact_div(a + 1, b) is None


class TestClearDenominators:
    def test_cot_rewrite(self):
        k, cs, ss = Sym("k"), Sym("c"), Sym("s")
        out = clear_denominators(k - (1 + cs) * inv(ss), "trig")
        assert out.factors == ["s"]
        assert out.numerator == P("s k - 1 - c")

    def test_cos_solved(self):
        A, B, C = Sym("a"), Sym("b"), Sym("c")
        out = clear_denominators(C - inv(1 - A) - inv(1 - B), "trig")
        assert sorted(out.factors) == ["1-a", "1-b"]
        assert out.numerator == c * (1 - a) * (1 - b) - (1 - b) - (1 - a)

    def test_rational_rearrangement(self):
        X = Sym("x")
        d = 1 + X**2
        e = 4 * X**4 * inv(d**2) - (4 - (4 + 8 * X**2) * inv(d**2))
        out = clear_denominators(e, "trig")
        assert out.numerator.is_zero()
        assert "1+x^2" in out.side_conditions

    def test_unsupported(self):
        with pytest.raises(UnsupportedDenominator):
            clear_denominators(inv(Sym("x") + Const(3)), "trig")


class TestTextFormat:
    def test_roundtrip(self):
        p = (Fraction(3, 7) * s * c**2 - 2 * a * b * x + y**3 - 5)
        assert parse_poly(format_poly(p)) == p

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_poly("3 * q^2")


# random small polynomials

_mono_exp = st.integers(min_value=0, max_value=2)
_coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, mode="trig"):
    p = TrigPoly.const(0, mode)
    for _ in range(draw(st.integers(0, 4))):
        term = TrigPoly.const(draw(_coef), mode)
        for name in "scabxy":
            term = term * TrigPoly.var(name, mode) ** draw(_mono_exp)
        p = p + term
    return p


class TestRingAxioms:
    @settings(max_examples=1000, deadline=None)
    @given(polys(), polys(), polys())
    def test_axioms(self, p, q, r):
        assert p + q == q + p
        assert p * q == q * p
        assert (p + q) + r == p + (q + r)
        assert (p * q) * r == p * (q * r)
        assert p * (q + r) == p * q + p * r
        assert (p - p).is_zero()

    @settings(max_examples=300, deadline=None)
    @given(polys("hyp"), polys("hyp"))
    def test_axioms_hyp(self, p, q):
        assert p * (q + 1) == p * q + p

    @settings(max_examples=300, deadline=None)
    @given(polys())
    def test_normal_form_idempotent(self, p):
        assert p.normal_form() == p.normal_form().normal_form() == p


class TestNumericSoundness:
    @pytest.mark.parametrize("mode", ["trig", "hyp"])
    def test_agrees_with_floats(self, mode):
        rng = random.Random(11)
        for _ in range(1000):
            terms = []
            for _ in range(rng.randint(1, 4)):
                coef = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
                exps = [rng.randint(0, 3) for _ in range(6)]
                terms.append((coef, exps))
            raw = TrigPoly.const(0, mode)
            for coef, exps in terms:
                t = TrigPoly.const(coef, mode)
                for name, e in zip("scabxy", exps):
                    t = t * TrigPoly.var(name, mode) ** e
                raw = raw + t
            t = rng.uniform(0.1, 3.0)
            vals = dict(zip("abxy", (rng.uniform(-2, 2) for _ in range(4))))
            vals["s"], vals["c"] = (math.sin(t), math.cos(t)) if mode == "trig" else (math.sinh(t), math.cosh(t))
            direct = sum(float(coef) * math.prod(vals[n] ** e for n, e in zip("scabxy", exps)) for coef, exps in terms)
            exact = float(raw.evaluate(vals))
            scale = sum(abs(float(coef)) * math.prod(abs(vals[n]) ** e for n, e in zip("scabxy", exps))
                        for coef, exps in terms)
            assert abs(exact - direct) <= 1e-10 * max(1.0, scale)
