"""Gluing between the immersed sphere chart and the two torus charts.

Charts and coordinates:

* ``L0`` - immersed two-sphere, immersed-generator deformations ``(u, v)``
  with ``uv`` of positive valuation;
* ``L1`` - Chekanov-type torus, ``(x1, y1)``;
* ``L2`` - Clifford-type torus, ``(x2, y2)``.

They are related by ``uv = 1 - exp(x_i)`` (i = 1, 2), ``u = exp(y1)``,
``v = exp(-y2)``.  The minus sign in front of ``exp(x_i)`` comes from the
non-trivial spin structure on the tori; ``spin="trivial"`` switches to
``uv = -1 + exp(x_i)``, which never glues over the positive-valuation ideal
and so always ends in a :class:`DomainError`.

Coordinates are :class:`TruncatedSeries` in a common ambient context.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import DomainError
from .series import SeriesContext, TruncatedSeries, exp_series, log_series

__all__ = ["GluingChart", "glue", "sphere_potential", "SpherePotential", "CHART_VARIABLES"]

CHART_VARIABLES = {"L0": ("u", "v"), "L1": ("x1", "y1"), "L2": ("x2", "y2")}


@dataclass(frozen=True)
class GluingChart:
    """Coordinates of one chart; a missing entry means 'not formally defined'."""

    chart: str
    coords: Mapping[str, TruncatedSeries | None]
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.chart not in CHART_VARIABLES:
            raise ValueError(f"unknown chart {self.chart!r}")
        extra = set(self.coords) - set(CHART_VARIABLES[self.chart])
        if extra:
            raise ValueError(f"chart {self.chart} has no coordinates {sorted(extra)}")

    def __getitem__(self, name):
        return self.coords[name]

    def to_json(self) -> dict:
        return {
            "chart": self.chart,
            "coords": {k: (None if v is None else v.to_json()) for k, v in self.coords.items()},
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, data) -> "GluingChart":
        coords = {k: (None if v is None else TruncatedSeries.from_json(v)) for k, v in data["coords"].items()}
        return cls(data["chart"], coords)


def _spin_sign(spin: str) -> int:
    if spin == "nontrivial":
        return 1
    if spin == "trivial":
        return -1
    raise ValueError("spin must be 'nontrivial' or 'trivial'")


def _check_positive(s: TruncatedSeries, name: str):
    if s.constant_term():
        raise DomainError(f"{name} must have positive valuation, constant term is {s.constant_term()}")


def _l0_to_torus(u, v, index: int, spin: str, angular: bool) -> GluingChart:
    sign = _spin_sign(spin)
    uv = u * v
    _check_positive(uv, "uv")
    xname, yname = CHART_VARIABLES[f"L{index}"]
    # exp(x) = 1 - uv, or -1 + uv for the trivial spin structure (constant -1: log raises)
    x = log_series(1 - uv if sign > 0 else uv - 1)
    coords: dict[str, TruncatedSeries | None] = {xname: x}
    notes = []
    if index == 1:
        base, label = u, "u"
    else:
        base, label = v, "v"
    if base.constant_term() == 1:
        y = log_series(base)
        coords[yname] = y if index == 1 else -y
    elif angular:
        raise DomainError(
            f"{yname} = {'log' if index == 1 else '-log'}({label}) needs {label} in 1 + Lambda_+, "
            f"constant term is {base.constant_term()}"
        )
    else:
        coords[yname] = None
        notes.append(f"{yname} undefined: {label} is not in 1 + Lambda_+")
    return GluingChart(f"L{index}", coords, tuple(notes))


def _torus_to_l0(x, y, index: int, spin: str) -> GluingChart:
    sign = _spin_sign(spin)
    _check_positive(x, "x")
    _check_positive(y, "y")
    ex = exp_series(x)
    uv = 1 - ex if sign > 0 else 1 + ex
    _check_positive(uv, "uv")
    if index == 1:
        u = exp_series(y)
        v = uv * exp_series(-y)
    else:
        v = exp_series(-y)
        u = uv * exp_series(y)
    return GluingChart("L0", {"u": u, "v": v})


def glue(source: GluingChart, target: str, *, spin: str = "nontrivial", angular: bool = True) -> GluingChart:
    """Transport chart coordinates from ``source.chart`` to ``target``.

    ``angular=False`` returns ``None`` for an angular coordinate that has no
    formal value (e.g. ``y2 = -log v`` when ``v`` has positive valuation)
    instead of raising.
    """
    if target not in CHART_VARIABLES:
        raise ValueError(f"unknown chart {target!r}")
    if source.chart == target:
        return source
    c = source.coords
    if source.chart == "L0":
        return _l0_to_torus(c["u"], c["v"], int(target[1]), spin, angular)
    idx = int(source.chart[1])
    x, y = c[f"x{idx}"], c[f"y{idx}"]
    if x is None or y is None:
        raise DomainError(f"chart {source.chart} coordinates are incomplete")
    l0 = _torus_to_l0(x, y, idx, spin)
    if target == "L0":
        return l0
    return _l0_to_torus(l0["u"], l0["v"], int(target[1]), spin, angular)


@dataclass(frozen=True)
class SpherePotential:
    """``parameter * series`` with ``series`` in the single variable ``w = uv``."""

    series: TruncatedSeries
    parameter: str = "lambda"

    def pretty(self) -> str:
        return f"{self.parameter}*({self.series.pretty()})"

    def to_json(self) -> dict:
        return {"parameter": self.parameter, "variable": "w", "meaning": "w = u*v", "series": self.series.to_json()}


def sphere_potential(cutoff: int) -> SpherePotential:
    """S^1-equivariant potential of the immersed sphere, to order ``w**cutoff``.

    The torus potential is ``lambda * x1`` and gluing identifies ``W(u, v)``
    with ``x1``; feeding ``(u, v) = (1, w)`` through the gluing gives
    ``W = log(1 - w)``.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    ctx = SeriesContext(("w",), (1,), cutoff)
    chart = glue(GluingChart("L0", {"u": ctx.one(), "v": ctx.var("w")}), "L1")
    return SpherePotential(chart["x1"])
