from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqdisc.errors import DomainError
from eqdisc.immersed import GluingChart, glue, sphere_potential
from eqdisc.series import SeriesContext, exp_series, log_series, substitute
from strategies import series_in


def ctx(cutoff, names=("s",)):
    return SeriesContext.uniform(names, cutoff)


class TestGlue:
    def test_l1_to_l0_at_origin(self):
        c = ctx(3)
        out = glue(GluingChart("L1", {"x1": c.zero(), "y1": c.zero()}), "L0")
        assert out["u"] == 1 and out["v"].is_zero()

    def test_l0_to_l1_hand_case(self):
        c = ctx(4)
        s = c.var("s")
        out = glue(GluingChart("L0", {"u": 1 + s, "v": s}), "L1")
        assert out["x1"] == log_series(1 - s - s**2)
        assert out["y1"] == log_series(1 + s)
        back = glue(out, "L0")
        assert back["u"] == 1 + s and back["v"] == s

    def test_relations_hold(self):
        c = ctx(5, ("x1", "y1"))
        x, y = c.var("x1"), c.var("y1")
        l0 = glue(GluingChart("L1", {"x1": x, "y1": y}), "L0")
        assert l0["u"] * l0["v"] == 1 - exp_series(x)
        assert l0["u"] == exp_series(y)

    def test_charts_agree_on_x(self):
        c = ctx(5, ("a", "b"))
        src = GluingChart("L0", {"u": 1 + c.var("a"), "v": 1 + c.var("b") + c.var("a") * c.var("b")})
        with pytest.raises(DomainError):
            glue(src, "L1")  # uv has constant term 1
        src = GluingChart("L0", {"u": 1 + c.var("a"), "v": c.var("b")})
        l1 = glue(src, "L1")
        l2 = glue(src, "L2", angular=False)
        assert l1["x1"] == l2["x2"]
        assert l2["y2"] is None and l2.notes

    def test_l2_angle_defined_for_unit_v(self):
        c = ctx(4, ("a", "b"))
        a, b = c.var("a"), c.var("b")
        src = GluingChart("L0", {"u": a, "v": 1 + b})
        l2 = glue(src, "L2")
        assert l2["y2"] == -log_series(1 + b)
        back = glue(l2, "L0")
        assert back["u"] == a and back["v"] == 1 + b

    def test_l1_angle_needs_unit(self):
        c = ctx(3)
        with pytest.raises(DomainError):
            glue(GluingChart("L0", {"u": 2 + c.var("s"), "v": c.var("s")}), "L1")
        with pytest.raises(DomainError):
            glue(GluingChart("L0", {"u": c.var("s"), "v": c.var("s")}), "L1")
        out = glue(GluingChart("L0", {"u": c.var("s"), "v": c.var("s")}), "L1", angular=False)
        assert out["y1"] is None

    def test_trivial_spin_never_glues(self):
        c = ctx(3)
        with pytest.raises(DomainError):
            glue(GluingChart("L0", {"u": c.one(), "v": c.var("s")}), "L1", spin="trivial")
        with pytest.raises(DomainError):
            glue(GluingChart("L1", {"x1": c.var("s"), "y1": c.zero()}), "L0", spin="trivial")

    def test_l1_to_l2_through_l0(self):
        c = ctx(4, ("x1", "y1"))
        x, y = c.var("x1"), c.var("y1")
        # y1 = log u is defined, v = (1 - e^x) e^{-y} has positive valuation, so y2 is not
        l2 = glue(GluingChart("L1", {"x1": x, "y1": y}), "L2", angular=False)
        assert l2["x2"] == x
        assert l2["y2"] is None

    def test_json_round_trip(self):
        c = ctx(4)
        chart = glue(GluingChart("L0", {"u": 1 + c.var("s"), "v": c.var("s")}), "L1")
        assert GluingChart.from_json(chart.to_json()).coords == chart.coords

    def test_unknown_chart(self):
        with pytest.raises(ValueError):
            GluingChart("L3", {})
        with pytest.raises(ValueError):
            GluingChart("L1", {"u": ctx(2).one()})


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_l1_l0_l1_round_trip(data):
    c = SeriesContext.uniform(("a", "b"), 5)
    x = data.draw(series_in(c, positive=True, max_terms=4))
    y = data.draw(series_in(c, positive=True, max_terms=4))
    back = glue(glue(GluingChart("L1", {"x1": x, "y1": y}), "L0"), "L1")
    assert back["x1"] == x and back["y1"] == y


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_l0_l1_l0_round_trip(data):
    c = SeriesContext.uniform(("a", "b"), 5)
    u = 1 + data.draw(series_in(c, positive=True, max_terms=4))
    v = data.draw(series_in(c, positive=True, max_terms=4))
    back = glue(glue(GluingChart("L0", {"u": u, "v": v}), "L1"), "L0")
    assert back["u"] == u and back["v"] == v


class TestSpherePotential:
    def test_cutoff_one(self):
        sp = sphere_potential(1)
        assert sp.series == -sp.series.ctx.var("w")

    def test_cutoff_four(self):
        assert sphere_potential(4).series.pretty() == "-w - 1/2*w^2 - 1/3*w^3 - 1/4*w^4"
        assert sphere_potential(4).pretty() == "lambda*(-w - 1/2*w^2 - 1/3*w^3 - 1/4*w^4)"

    @pytest.mark.parametrize("n", [1, 5, 10, 15])
    def test_coefficients_and_defining_relation(self, n):
        W = sphere_potential(n).series
        w = W.ctx.var("w")
        assert [W.coefficient((j,)) for j in range(1, n + 1)] == [Fraction(-1, j) for j in range(1, n + 1)]
        assert exp_series(W) == 1 - w

    def test_empty_deformation(self):
        W = sphere_potential(6).series
        assert substitute(W, {"w": W.ctx.zero()}).is_zero()

    def test_cutoff_zero(self):
        assert sphere_potential(0).series.is_zero()
        with pytest.raises(ValueError):
            sphere_potential(-1)
