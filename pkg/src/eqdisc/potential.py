"""The T-equivariant disc potential of a toric fiber and its numerics.

The potential is

    W(x) = sum_i c_i(q) T^{omega(beta_i)} exp(v_i . x) + sum_j lambda_j (u_j . x)

where ``c_i`` are the corrected coefficient series.  Numerically ``T = t`` with
``0 < t < 1`` and ``q_a = t ** omega(C_a)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _intlin
from .errors import DomainError, ValidationError
from .mirror import corrected_coefficients
from .series import TruncatedSeries, as_fraction
from .toric import ToricInput, validate

__all__ = [
    "PotentialTerm",
    "EquivariantPotential",
    "CriticalPoint",
    "build_potential",
    "hori_vafa_terms",
    "evaluate",
    "gradient",
    "hessian",
    "critical_points",
]

TWO_PI = 2.0 * math.pi


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class PotentialTerm:
    coefficient: TruncatedSeries
    area: Fraction
    exponent: tuple[int, ...]


@dataclass(frozen=True)
class EquivariantPotential:
    dim: int
    terms: tuple[PotentialTerm, ...]
    equivariant_part: tuple[tuple[tuple[int, ...], str], ...]

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(f"x{k + 1}" for k in range(self.dim))

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "terms": [
                {"coefficient": t.coefficient.to_json(), "area": _fmt(t.area), "exponent": list(t.exponent)}
                for t in self.terms
            ],
            "equivariant_part": [{"direction": list(u), "parameter": name} for u, name in self.equivariant_part],
        }

    def _linear_str(self, vec) -> str:
        parts = []
        for c, name in zip(vec, self.variables):
            if not c:
                continue
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            sign = "-" if c < 0 else "+"
            parts.append((sign, f"{mag}{name}"))
        if not parts:
            return "0"
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def pretty(self) -> str:
        chunks = []
        for t in self.terms:
            coef = t.coefficient
            pre = "" if coef == 1 else f"({coef.pretty()})*"
            chunks.append(f"{pre}T^{_fmt(t.area)}*exp({self._linear_str(t.exponent)})")
        for u, name in self.equivariant_part:
            lin = self._linear_str(u)
            chunks.append(f"{name}*{lin}" if len(u) - list(u).count(0) == 1 and "-" not in lin else f"{name}*({lin})")
        return " + ".join(chunks)

    def __str__(self):
        return self.pretty()


def hori_vafa_terms(fan: ToricInput) -> list[tuple[Fraction, tuple[int, ...]]]:
    """Givental/Hori-Vafa Laurent polynomial as ``(area, ray)`` pairs: sum T^area z^ray."""
    return [(a, tuple(v)) for a, v in zip(fan.areas, fan.rays)]


def build_potential(fan: ToricInput, subtorus: Sequence[Sequence[int]] | None = None, cutoff=1) -> EquivariantPotential:
    """Assemble the equivariant potential for the subtorus spanned by ``subtorus``.

    ``subtorus=None`` means the full torus with the standard basis.
    """
    validate(fan)
    d = fan.dim
    if subtorus is None:
        subtorus = [tuple(int(j == k) for j in range(d)) for k in range(d)]
    subtorus = [tuple(int(x) for x in u) for u in subtorus]
    if any(len(u) != d for u in subtorus):
        raise ValidationError(f"subtorus vectors must have length {d}")
    if len(subtorus) > d or _intlin.rank(subtorus) != len(subtorus):
        raise ValidationError("subtorus vectors are linearly dependent")
    coeffs = corrected_coefficients(fan, as_fraction(cutoff))
    terms = tuple(PotentialTerm(c, a, tuple(v)) for c, a, v in zip(coeffs, fan.areas, fan.rays))
    names = tuple(f"lambda{j + 1}" for j in range(len(subtorus)))
    return EquivariantPotential(d, terms, tuple(zip(subtorus, names)))


def _check_t(t: float):
    if not 0.0 < t < 1.0:
        raise DomainError(f"t must lie in (0, 1), got {t}")


def _series_at(s: TruncatedSeries, t: float) -> float:
    # q_a -> t ** weight_a; the coefficient is rational, evaluation is exact up to float rounding
    total = 0.0
    for exp, c in s.items():
        total += float(c) * t ** float(s.ctx.weight(exp))
    return total


def _numeric(pot: EquivariantPotential, t: float):
    _check_t(t)
    amps = np.array([_series_at(term.coefficient, t) * t ** float(term.area) for term in pot.terms])
    rays = np.array([term.exponent for term in pot.terms], dtype=float).reshape(len(pot.terms), pot.dim)
    dirs = np.array([u for u, _ in pot.equivariant_part], dtype=float).reshape(len(pot.equivariant_part), pot.dim)
    return amps, rays, dirs


def _as_vec(x, n) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=complex))
    if arr.shape != (n,):
        raise ValueError(f"expected a vector of length {n}, got shape {arr.shape}")
    return arr


def evaluate(pot: EquivariantPotential, t: float, x, lam) -> complex:
    """Numerical value of the potential at ``T = t``."""
    amps, rays, dirs = _numeric(pot, t)
    x = _as_vec(x, pot.dim)
    lam = _as_vec(lam, len(pot.equivariant_part))
    return complex(amps @ np.exp(rays @ x) + lam @ (dirs @ x))


def gradient(pot: EquivariantPotential, t: float, x, lam) -> np.ndarray:
    amps, rays, dirs = _numeric(pot, t)
    x = _as_vec(x, pot.dim)
    lam = _as_vec(lam, len(pot.equivariant_part))
    return (amps * np.exp(rays @ x)) @ rays + lam @ dirs


def hessian(pot: EquivariantPotential, t: float, x) -> np.ndarray:
    amps, rays, _ = _numeric(pot, t)
    x = _as_vec(x, pot.dim)
    w = amps * np.exp(rays @ x)
    return (rays.T * w) @ rays


@dataclass(frozen=True)
class CriticalPoint:
    x: tuple[complex, ...]
    value: complex
    gradient_norm: float

    def to_json(self) -> dict:
        return {
            "x": [[z.real, z.imag] for z in self.x],
            "value": [self.value.real, self.value.imag],
            "gradient_norm": self.gradient_norm,
        }


def _reduce(x: np.ndarray) -> np.ndarray:
    im = np.mod(x.imag, TWO_PI)
    im[np.isclose(im, TWO_PI, atol=1e-12, rtol=0)] = 0.0
    return x.real + 1j * im


def _same_point(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    dre = np.abs(a.real - b.real)
    dim = np.abs(a.imag - b.imag)
    dim = np.minimum(dim, TWO_PI - dim)
    return bool(np.all(np.maximum(dre, dim) <= tol))


def _newton(pot, t, lam, x0, max_iter=200, gtol=1e-13):
    x = x0.copy()
    g = gradient(pot, t, x, lam)
    gn = np.linalg.norm(g)
    for _ in range(max_iter):
        if gn <= gtol:
            break
        try:
            step = np.linalg.solve(hessian(pot, t, x), -g)
        except np.linalg.LinAlgError:
            return x, gn
        alpha = 1.0
        while alpha > 1e-8:
            trial = x + alpha * step
            if np.all(np.abs(trial.real) < 700):
                gt = gradient(pot, t, trial, lam)
                gtn = np.linalg.norm(gt)
                if np.isfinite(gtn) and gtn < gn:
                    break
            alpha *= 0.5
        else:
            return x, gn
        x, g, gn = trial, gt, gtn
    return x, gn


def critical_points(
    pot: EquivariantPotential,
    t: float,
    lam=None,
    seeds: int = 64,
    *,
    seed: int | None = 0,
    grad_tol: float = 1e-10,
    dedup_tol: float = 1e-8,
) -> list[CriticalPoint]:
    """Critical points of ``x -> W(x)`` by damped Newton from random starts.

    Starts are drawn uniformly from ``Re x_k in [-R, R]``, ``Im x_k in [0, 2 pi)``
    with ``R = max(5, |log t| * max_i |v_i|_1)``.  Solutions are reduced to
    ``Im x_k in [0, 2 pi)``, deduplicated at ``dedup_tol`` and sorted by value
    then by ``x``.  If no start converges a warning is issued and ``[]`` returned.
    """
    _check_t(t)
    ell = len(pot.equivariant_part)
    lam = np.zeros(ell, dtype=complex) if lam is None else _as_vec(lam, ell)
    rng = np.random.default_rng(seed)
    vmax = max((sum(abs(c) for c in term.exponent) for term in pot.terms), default=1)
    R = max(5.0, abs(math.log(t)) * vmax)
    found: list[np.ndarray] = []
    for _ in range(seeds):
        x0 = rng.uniform(-R, R, pot.dim) + 1j * rng.uniform(0.0, TWO_PI, pot.dim)
        x, gn = _newton(pot, t, lam, x0)
        if not np.isfinite(gn) or gn > grad_tol:
            continue
        x = _reduce(x)
        if not any(_same_point(x, y, dedup_tol) for y in found):
            found.append(x)
    if not found:
        warnings.warn("critical_points: Newton did not converge from any seed", RuntimeWarning, stacklevel=2)
        return []
    out = []
    for x in found:
        out.append(
            CriticalPoint(
                tuple(complex(z) for z in x),
                evaluate(pot, t, x, lam),
                float(np.linalg.norm(gradient(pot, t, x, lam))),
            )
        )

    def key(cp):
        return (
            round(cp.value.real, 9),
            round(cp.value.imag, 9),
            tuple((round(z.real, 9), round(z.imag, 9)) for z in cp.x),
        )

    out.sort(key=key)
    return out
