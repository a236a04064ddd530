"""Hypothesis generators for small truncated series in two or three variables."""

from fractions import Fraction
from itertools import product

from hypothesis import strategies as st

from eqdisc.series import SeriesContext, TruncatedSeries

NAMES = ("a", "b", "c")

rationals = st.builds(
    Fraction,
    st.integers(min_value=-6, max_value=6),
    st.integers(min_value=1, max_value=4),
)


@st.composite
def contexts(draw, max_vars=2):
    n = draw(st.integers(min_value=1, max_value=max_vars))
    weights = tuple(draw(st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(3, 2), Fraction(2)])) for _ in range(n))
    cutoff = draw(st.sampled_from([Fraction(2), Fraction(5, 2), Fraction(3), Fraction(4)]))
    return SeriesContext(NAMES[:n], weights, cutoff)


def _exponents(ctx, positive, min_weight=0):
    top = [int(ctx.cutoff / w) for w in ctx.weights]
    exps = [e for e in product(*(range(t + 1) for t in top)) if ctx.weight(e) <= ctx.cutoff]
    if positive:
        exps = [e for e in exps if any(e)]
    return [e for e in exps if ctx.weight(e) >= min_weight]


@st.composite
def series_in(draw, ctx, positive=False, unit=False, max_terms=5, min_weight=0):
    exps = _exponents(ctx, positive or unit, min_weight)
    chosen = draw(st.lists(st.sampled_from(exps), max_size=max_terms, unique=True)) if exps else []
    terms = {e: draw(rationals) for e in chosen}
    s = TruncatedSeries(ctx, terms)
    if unit:
        s = s + draw(rationals.filter(bool))
    return s


@st.composite
def ctx_and_series(draw, count=1, positive=False, max_vars=2):
    ctx = draw(contexts(max_vars))
    return (ctx, *[draw(series_in(ctx, positive=positive)) for _ in range(count)])


@st.composite
def unit_family(draw, max_vars=2):
    """``[var_a * unit_a]`` with ``unit_a`` a nonzero constant times ``1 + positive``."""
    ctx = draw(contexts(max_vars))
    fam = []
    for name in ctx.variables:
        c = draw(rationals.filter(bool))
        fam.append(ctx.var(name) * (draw(series_in(ctx, positive=True, max_terms=4)) + 1) * c)
    return ctx, fam
