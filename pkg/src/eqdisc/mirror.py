"""Correction series g_i, the mirror map and the corrected disc-count coefficients.

Kähler variables are indexed by the Mori generators ``C_1, ..., C_r`` of the
fan: variable ``q<a>`` has weight ``omega(C_a)``.  The same context is used for
the flat coordinates ``qc`` and the Kähler coordinates ``q``; which role a
series plays is fixed by the function that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod

from .series import (
    SeriesContext,
    TruncatedSeries,
    as_fraction,
    compose_family,
    exp_series,
    reverse_family,
    substitute,
)
from .toric import CurveClass, ToricInput, enumerate_effective, mori_generators

__all__ = [
    "GFunction",
    "MirrorMapFamily",
    "kahler_context",
    "g_coefficient",
    "g_function",
    "mirror_map",
    "corrected_coefficients",
    "change_mori_basis",
    "check_identity",
]


@dataclass(frozen=True)
class GFunction:
    ray: int
    series: TruncatedSeries

    def to_json(self) -> dict:
        return {"ray": self.ray, "g": self.series.to_json()}


@dataclass(frozen=True)
class MirrorMapFamily:
    """``forward[a] = q_a(qc)`` and its formal inverse ``inverse[a] = qc_a(q)``."""

    generators: tuple[CurveClass, ...]
    forward: tuple[TruncatedSeries, ...]
    inverse: tuple[TruncatedSeries, ...]

    def to_json(self) -> dict:
        return {
            "generators": [list(c.intersections) for c in self.generators],
            "forward": [s.to_json() for s in self.forward],
            "inverse": [s.to_json() for s in self.inverse],
        }


def kahler_context(fan: ToricInput, cutoff, generators=None) -> SeriesContext:
    gens = list(generators) if generators is not None else mori_generators(fan)
    names = tuple(f"q{a + 1}" for a in range(len(gens)))
    return SeriesContext(names, tuple(g.area(fan.areas) for g in gens), as_fraction(cutoff))


def g_coefficient(c: CurveClass, i: int) -> Fraction:
    """``(-1)^(D_i.C) (-(D_i.C)-1)! / prod_{j != i} (D_j.C)!`` for a class with ``D_i.C < 0``."""
    d = c.intersections
    if d[i] >= 0 or any(x < 0 for j, x in enumerate(d) if j != i):
        raise ValueError(f"class {list(d)} is outside the summation domain for ray {i}")
    denom = prod(factorial(x) for j, x in enumerate(d) if j != i)
    return Fraction((-1) ** (-d[i]) * factorial(-d[i] - 1), denom)


def g_function(fan: ToricInput, i: int, cutoff, generators=None) -> GFunction:
    """Series ``g_i(qc)`` summed over effective c1 = 0 classes with area ``<= cutoff``."""
    gens = list(generators) if generators is not None else mori_generators(fan)
    ctx = kahler_context(fan, cutoff, gens)
    classes = enumerate_effective(fan, cutoff, c1_equals=0, negative_at=i, generators=gens)
    terms = {c.coords: g_coefficient(c, i) for c in classes}
    return GFunction(i, TruncatedSeries(ctx, terms))


def _all_g(fan: ToricInput, cutoff, gens) -> list[TruncatedSeries]:
    return [g_function(fan, i, cutoff, gens).series for i in range(fan.m)]


def mirror_map(fan: ToricInput, cutoff, *, sign: int = -1, generators=None) -> MirrorMapFamily:
    """Forward map ``q_a = qc_a * exp(sign * sum_i (D_i.C_a) g_i(qc))`` and its inverse.

    ``sign=-1`` is the default convention; on F_2 it yields the integral
    disc counts ``exp(g(qc(q))) = 1 + q_b``.  ``sign=+1`` is kept only so the
    rejected convention can be exhibited.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    gens = list(generators) if generators is not None else mori_generators(fan)
    ctx = kahler_context(fan, cutoff, gens)
    gs = _all_g(fan, cutoff, gens)
    forward = []
    for a, c in enumerate(gens):
        exponent = ctx.zero()
        for i, g in enumerate(gs):
            if c.intersections[i] and g:
                exponent = exponent + g * (sign * c.intersections[i])
        forward.append(ctx.var(ctx.variables[a]) * exp_series(exponent))
    inverse = reverse_family(forward)
    return MirrorMapFamily(tuple(gens), tuple(forward), tuple(inverse))


def corrected_coefficients(fan: ToricInput, cutoff, *, sign: int = -1, generators=None) -> list[TruncatedSeries]:
    """Per ray, ``exp(g_i(qc(q)))``: the generating series of ``n_1(beta_i + alpha)``."""
    gens = list(generators) if generators is not None else mori_generators(fan)
    mm = mirror_map(fan, cutoff, sign=sign, generators=gens)
    ctx = kahler_context(fan, cutoff, gens)
    if not mm.inverse:
        return [ctx.one() for _ in range(fan.m)]
    binding = dict(zip(ctx.variables, mm.inverse))
    return [exp_series(substitute(g, binding)) for g in _all_g(fan, cutoff, gens)]


def change_mori_basis(series: TruncatedSeries, matrix, new_ctx: SeriesContext) -> TruncatedSeries:
    """Rewrite ``series`` under ``q_a = prod_b q'_b ** matrix[a][b]`` (monomial substitution).

    ``matrix`` must have nonnegative entries so the result stays a power series.
    """
    images = []
    for row in matrix:
        images.append(new_ctx.monomial([int(x) for x in row]))
    out = new_ctx.zero()
    for exp, c in series.items():
        term = new_ctx.constant(c)
        for k, e in enumerate(exp):
            if e:
                term = term * images[k] ** e
        out = out + term
    return out


def check_identity(mm: MirrorMapFamily) -> bool:
    """forward(inverse) and inverse(forward) are both the identity family."""
    if not mm.forward:
        return True
    ctx = mm.forward[0].ctx
    ident = [ctx.var(v) for v in ctx.variables]
    return compose_family(list(mm.forward), list(mm.inverse)) == ident and compose_family(
        list(mm.inverse), list(mm.forward)
    ) == ident
