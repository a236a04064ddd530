"""Smooth toric fans: validation, curve-class lattice, wall classes, effective classes.

Curve classes are stored by their intersection vectors ``(D_1.C, ..., D_m.C)``
with the toric prime divisors, so a class lies in the relation lattice
``{c : sum_i c_i v_i = 0}``.  Areas follow ``omega(C) = sum_i (D_i.C) omega(beta_i)``.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from pathlib import Path
from typing import Sequence

from . import _intlin
from .errors import DataError, ValidationError
from .series import as_fraction

__all__ = [
    "ToricInput",
    "CurveClass",
    "ValidationReport",
    "validate",
    "relation_lattice",
    "wall_curve_classes",
    "mori_generators",
    "enumerate_effective",
    "FAN_SCHEMA",
]


FAN_SCHEMA = {
    "type": "object",
    "required": ["dim", "rays", "cones", "areas"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "rays": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "cones": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        },
        "areas": {
            "type": "array",
            "items": {"anyOf": [{"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}, {"type": "integer"}]},
        },
        "mori": {
            "anyOf": [
                {"type": "null"},
                {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
            ]
        },
        "assert_complete": {"type": "boolean"},
        "name": {"type": "string"},
    },
    "additionalProperties": False,
}


@dataclass(frozen=True)
class CurveClass:
    """A curve class by its intersection numbers with the toric divisors.

    ``coords`` optionally records the multiplicities of Mori generators the
    class was built from; it fixes the Kähler monomial ``qc**coords``.
    """

    intersections: tuple[int, ...]
    coords: tuple[int, ...] | None = field(default=None, compare=False)

    def c1(self) -> int:
        return sum(self.intersections)

    def area(self, areas: Sequence[Fraction]) -> Fraction:
        return sum((d * w for d, w in zip(self.intersections, areas)), Fraction(0))

    def __add__(self, other: "CurveClass") -> "CurveClass":
        coords = None
        if self.coords is not None and other.coords is not None:
            coords = tuple(a + b for a, b in zip(self.coords, other.coords))
        return CurveClass(tuple(a + b for a, b in zip(self.intersections, other.intersections)), coords)

    def __getitem__(self, i):
        return self.intersections[i]


@dataclass(frozen=True)
class ToricInput:
    dim: int
    rays: tuple[tuple[int, ...], ...]
    cones: tuple[tuple[int, ...], ...]
    areas: tuple[Fraction, ...]
    mori: tuple[tuple[int, ...], ...] | None = None
    assert_complete: bool = False
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        object.__setattr__(self, "cones", tuple(tuple(sorted(int(i) for i in c)) for c in self.cones))
        object.__setattr__(self, "areas", tuple(as_fraction(a) for a in self.areas))
        if self.mori is not None:
            object.__setattr__(self, "mori", tuple(tuple(int(x) for x in c) for c in self.mori))

    @property
    def m(self) -> int:
        return len(self.rays)

    @classmethod
    def from_json(cls, data: dict) -> "ToricInput":
        return cls(
            dim=data["dim"],
            rays=data["rays"],
            cones=data["cones"],
            areas=[as_fraction(a) for a in data["areas"]],
            mori=data.get("mori"),
            assert_complete=data.get("assert_complete", False),
            name=data.get("name", ""),
        )

    @classmethod
    def load(cls, path) -> "ToricInput":
        return cls.from_json(json.loads(Path(path).read_text()))

    def to_json(self) -> dict:
        out = {
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "cones": [list(c) for c in self.cones],
            "areas": [str(a) for a in self.areas],
            "assert_complete": self.assert_complete,
        }
        if self.mori is not None:
            out["mori"] = [list(c) for c in self.mori]
        if self.name:
            out["name"] = self.name
        return out

    def curve(self, intersections: Sequence[int]) -> CurveClass:
        c = CurveClass(tuple(int(x) for x in intersections))
        if len(c.intersections) != self.m or not in_relation_lattice(self, c.intersections):
            raise ValidationError(f"{list(intersections)} is not a curve class of this fan")
        return c


@dataclass
class ValidationReport:
    rays_ok: list[bool]
    cones_smooth: list[bool]
    complete: bool
    complete_asserted: bool
    mori: list[CurveClass] | None
    semi_fano: bool | None
    fano: bool | None
    problems: list[str]

    @property
    def ok(self) -> bool:
        return not self.problems

    def summary(self) -> str:
        if not self.ok:
            return "invalid: " + "; ".join(self.problems)
        parts = ["complete" if self.complete else "not complete", "smooth"]
        if self.fano:
            parts.append("Fano")
        elif self.semi_fano:
            parts.append("semi-Fano")
        elif self.semi_fano is False:
            parts.append("not semi-Fano")
        return ", ".join(parts)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "summary": self.summary(),
            "rays_primitive": self.rays_ok,
            "cones_smooth": self.cones_smooth,
            "complete": self.complete,
            "complete_asserted": self.complete_asserted,
            "semi_fano": self.semi_fano,
            "fano": self.fano,
            "mori": None if self.mori is None else [list(c.intersections) for c in self.mori],
            "problems": self.problems,
        }


def in_relation_lattice(fan: ToricInput, c: Sequence[int]) -> bool:
    return all(sum(ci * v[k] for ci, v in zip(c, fan.rays)) == 0 for k in range(fan.dim))


def _facet_counts(fan: ToricInput) -> Counter:
    counts: Counter = Counter()
    for cone in fan.cones:
        for facet in combinations(cone, len(cone) - 1):
            counts[facet] += 1
    return counts


def is_complete(fan: ToricInput) -> bool:
    """Facet-pairing completeness test (exact for dim <= 3); otherwise the user's assertion."""
    if fan.dim > 3:
        return fan.assert_complete
    if not fan.cones or any(len(c) != fan.dim for c in fan.cones):
        return False
    return all(n == 2 for n in _facet_counts(fan).values())


def _structural_problems(fan: ToricInput):
    """Yield ``(message, index)`` for every ray/cone defect, rays first."""
    if len(fan.areas) != fan.m:
        yield f"expected {fan.m} areas, got {len(fan.areas)}", None
    seen: dict[tuple[int, ...], int] = {}
    for i, r in enumerate(fan.rays):
        if len(r) != fan.dim:
            yield f"ray {i} has length {len(r)}, expected {fan.dim}", i
            continue
        g = 0
        for x in r:
            g = gcd(g, x)
        if g != 1:
            yield f"non-primitive ray {i}", i
        if r in seen:
            yield f"repeated ray {i} (same as ray {seen[r]})", i
        seen.setdefault(r, i)
    for i, a in enumerate(fan.areas):
        if a <= 0:
            yield f"area {i} is not positive", i
    for j, cone in enumerate(fan.cones):
        if any(k >= fan.m for k in cone) or len(set(cone)) != len(cone):
            yield f"cone {j} has invalid ray indices", j
        elif not _intlin.extends_to_basis([fan.rays[k] for k in cone], fan.dim):
            yield f"non-unimodular cone {j}", j


def validate(fan: ToricInput) -> ValidationReport:
    """Check primitivity, smoothness, completeness and the (semi-)Fano condition.

    Raises :class:`ValidationError` carrying the offending index and the
    partial report when the data is not a smooth fan.
    """
    rays_ok = []
    for r in fan.rays:
        g = 0
        for x in r:
            g = gcd(g, x)
        rays_ok.append(len(r) == fan.dim and g == 1)
    cones_smooth = [
        all(k < fan.m for k in c) and _intlin.extends_to_basis([fan.rays[k] for k in c if k < fan.m], fan.dim)
        for c in fan.cones
    ]
    report = ValidationReport(rays_ok, cones_smooth, False, fan.assert_complete, None, None, None, [])
    problems = list(_structural_problems(fan))
    if problems:
        report.problems = [p for p, _ in problems]
        raise ValidationError(problems[0][0], index=problems[0][1], report=report)
    report.complete = is_complete(fan)
    if fan.mori is not None:
        for k, c in enumerate(fan.mori):
            if len(c) != fan.m or not in_relation_lattice(fan, c):
                report.problems.append(f"mori generator {k} is not in the relation lattice")
                raise ValidationError(report.problems[-1], index=k, report=report)
    gens = None
    if fan.mori is not None or report.complete:
        try:
            gens = mori_generators(fan)
        except ValidationError as exc:
            exc.report = report
            report.problems.append(str(exc))
            raise
    if gens is not None:
        report.mori = gens
        report.semi_fano = all(c.c1() >= 0 for c in gens)
        report.fano = all(c.c1() > 0 for c in gens)
    return report


def relation_lattice(fan: ToricInput) -> list[list[int]]:
    """Saturated integer basis of ``{c in Z^m : sum c_i v_i = 0}``."""
    rows = [[fan.rays[i][k] for i in range(fan.m)] for k in range(fan.dim)]
    return _intlin.integer_kernel(rows, fan.m)


def _wall_relation(fan: ToricInput, wall: tuple[int, ...], a: int, b: int) -> tuple[int, ...]:
    # -v_b = v_a + sum_k s_k v_k in the basis (v_a, wall rays)
    basis = [a, *wall]
    mat = [[fan.rays[k][row] for k in basis] for row in range(fan.dim)]
    sol = _intlin.solve_rational(mat, [-x for x in fan.rays[b]])
    if sol is None or sol[0] != 1 or any(s.denominator != 1 for s in sol):
        raise ValidationError(f"wall {list(wall)} between rays {a} and {b} has no unimodular wall relation")
    c = [0] * fan.m
    c[a] = 1
    c[b] = 1
    for k, s in zip(wall, sol[1:]):
        c[k] = int(s)
    return tuple(c)


def wall_curve_classes(fan: ToricInput) -> list[CurveClass]:
    """Classes of torus-invariant curves over the walls of a complete fan.

    Duplicates are removed, and so are classes that are nonnegative integer
    sums of the others (e.g. the +2 section of F_2 is b + 2f).  The reduction
    uses the areas as a grading and is skipped if some wall class has
    non-positive area.
    """
    by_facet: dict[tuple[int, ...], list[int]] = {}
    for cone in fan.cones:
        if len(cone) != fan.dim:
            continue
        for facet in combinations(cone, fan.dim - 1):
            (opposite,) = set(cone) - set(facet)
            by_facet.setdefault(facet, []).append(opposite)
    if not is_complete(fan) or any(len(v) != 2 for v in by_facet.values()):
        lonely = [list(f) for f, v in by_facet.items() if len(v) != 2]
        raise ValidationError(f"fan is not complete (walls {lonely[:3]} lack a second cone); supply mori generators")
    classes = sorted({_wall_relation(fan, wall, a, b) for wall, (a, b) in by_facet.items()})
    walls = [CurveClass(c) for c in classes]
    if any(c.area(fan.areas) <= 0 for c in walls):
        return walls
    return [c for k, c in enumerate(walls) if not _reducible(c, walls[:k] + walls[k + 1 :], fan.areas)]


def _reducible(target: CurveClass, others: Sequence[CurveClass], areas) -> bool:
    # is target a nonnegative integer combination of others? area bounds the search
    goal = target.area(areas)
    frontier = deque([tuple(0 for _ in target.intersections)])
    seen = set(frontier)
    while frontier:
        cur = frontier.popleft()
        for g in others:
            nxt = tuple(x + y for x, y in zip(cur, g.intersections))
            if nxt in seen or CurveClass(nxt).area(areas) > goal:
                continue
            if nxt == target.intersections:
                return True
            seen.add(nxt)
            frontier.append(nxt)
    return False


def mori_generators(fan: ToricInput) -> list[CurveClass]:
    """User-supplied generators, or the wall classes of a complete fan."""
    if fan.mori is not None:
        return [CurveClass(tuple(c)) for c in fan.mori]
    return wall_curve_classes(fan)


def enumerate_effective(
    fan: ToricInput,
    cutoff,
    c1_equals: int | None = None,
    negative_at: int | None = None,
    generators: Sequence[CurveClass] | None = None,
) -> list[CurveClass]:
    """Nonzero nonnegative combinations of Mori generators with area ``<= cutoff``.

    Search is breadth first in the total multiplicity, so the first
    multiplicity vector reaching a class is recorded as its ``coords``.
    Results are ordered by (area, intersections).
    """
    cutoff = as_fraction(cutoff)
    gens = list(generators) if generators is not None else mori_generators(fan)
    areas = fan.areas
    for k, g in enumerate(gens):
        if g.area(areas) <= 0:
            raise DataError(f"Mori generator {k} {list(g.intersections)} has non-positive area {g.area(areas)}")
    r = len(gens)
    found: dict[tuple[int, ...], tuple[int, ...]] = {}
    start = tuple(0 for _ in range(r))
    frontier = deque([start])
    seen = {start}
    while frontier:
        mult = frontier.popleft()
        for k in range(r):
            nxt = list(mult)
            nxt[k] += 1
            nxt = tuple(nxt)
            if nxt in seen:
                continue
            seen.add(nxt)
            cls = tuple(sum(n * g.intersections[i] for n, g in zip(nxt, gens)) for i in range(fan.m))
            if CurveClass(cls).area(areas) > cutoff:
                continue
            frontier.append(nxt)
            if cls not in found or (sum(nxt), nxt) < (sum(found[cls]), found[cls]):
                found[cls] = nxt
    out = []
    for cls, mult in found.items():
        if not any(cls):
            continue
        c = CurveClass(cls, mult)
        if c1_equals is not None and c.c1() != c1_equals:
            continue
        if negative_at is not None:
            if cls[negative_at] >= 0:
                continue
            if any(x < 0 for j, x in enumerate(cls) if j != negative_at):
                continue
        out.append(c)
    out.sort(key=lambda c: (c.area(areas), c.intersections))
    return out
