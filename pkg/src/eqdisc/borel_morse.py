"""Morse cochain complexes on the Borel approximations L(N), and the flow ODE.

For a torus-free factor ``L = T^l x P`` with the perfect Morse function
``sum cos(theta_i)`` on ``T^l`` and the perfect function on ``(CP^N)^l``,
critical points are triples ``(S, p, a)``: a wedge ``X_S`` of the degree one
generators (``S`` a sorted subset of ``{1..l}``), a fiber generator ``p`` and
a multi-index ``a in {0..N}^l`` standing for ``lambda^a``.  The degree is
``|S| + deg p + 2 |a|``.

The differential is the graded derivation fixed by
``delta(X_i (x) 1) = 1 (x) lambda_i``:

    delta(X_S p lambda^a) = sum_k (-1)^(k-1) X_{S - i_k} p lambda_{i_k} lambda^a
                            + (-1)^|S| X_S (d_P p) lambda^a

with ``lambda^a`` set to zero once some exponent exceeds ``N``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from . import _intlin
from .errors import NumericError, StructuralError

__all__ = [
    "FiberComplex",
    "ApproxMorseComplex",
    "build_complex",
    "cohomology_ranks",
    "sphere_betti",
    "Profile",
    "FlowVerdict",
    "flow_verify",
]


@dataclass(frozen=True)
class FiberComplex:
    """Graded basis of ``C(f_P)`` and its differential (``matrix[row][col]``: coefficient of row in d(col))."""

    degrees: tuple[int, ...]
    differential: tuple[tuple[int, ...], ...]
    name: str = ""

    @classmethod
    def point(cls) -> "FiberComplex":
        return cls((0,), ((0,),), "point")

    @classmethod
    def s2(cls) -> "FiberComplex":
        return cls((0, 2), ((0, 0), (0, 0)), "s2")

    @classmethod
    def named(cls, name: str) -> "FiberComplex":
        try:
            return {"point": cls.point, "s2": cls.s2}[name]()
        except KeyError:
            raise ValueError(f"unknown fiber {name!r}; expected 'point' or 's2'") from None

    def __len__(self):
        return len(self.degrees)


Generator = tuple[tuple[int, ...], int, tuple[int, ...]]


@dataclass
class ApproxMorseComplex:
    ell: int
    N: int
    fiber: FiberComplex
    generators: list[Generator]
    degrees: list[int]
    differential: np.ndarray  # column j = delta(generator j)
    _index: dict = field(default_factory=dict, repr=False)

    def index(self, S: Sequence[int], p: int, a: Sequence[int]) -> int:
        return self._index[(tuple(S), p, tuple(a))]

    def delta(self, S: Sequence[int], p: int = 0, a: Sequence[int] | None = None) -> dict[Generator, int]:
        """``delta`` of one generator as ``{generator: coefficient}``."""
        a = tuple(a) if a is not None else (0,) * self.ell
        col = self.differential[:, self.index(S, p, a)]
        return {self.generators[r]: int(col[r]) for r in np.flatnonzero(col)}

    def square_is_zero(self) -> bool:
        d = self.differential
        return not np.any(d @ d)

    def label(self, g: Generator) -> str:
        S, p, a = g
        left = "^".join(f"X{i}" for i in S) or "1_L"
        if len(self.fiber) > 1:
            left += f"*p{p}"
        right = "*".join(f"lambda{i + 1}^{e}" if e > 1 else f"lambda{i + 1}" for i, e in enumerate(a) if e) or "1_BT"
        return f"{left} (x) {right}"


def build_complex(ell: int, N: int, fiber: FiberComplex | None = None) -> ApproxMorseComplex:
    if ell < 1 or N < 0:
        raise ValueError("need ell >= 1 and N >= 0")
    fiber = fiber or FiberComplex.point()
    subsets = [S for r in range(ell + 1) for S in combinations(range(1, ell + 1), r)]
    gens: list[Generator] = [
        (S, p, a) for S in subsets for p in range(len(fiber)) for a in product(range(N + 1), repeat=ell)
    ]
    index = {g: k for k, g in enumerate(gens)}
    degrees = [len(S) + fiber.degrees[p] + 2 * sum(a) for S, p, a in gens]
    n = len(gens)
    d = np.zeros((n, n), dtype=np.int64)
    for col, (S, p, a) in enumerate(gens):
        for k, i in enumerate(S):
            if a[i - 1] >= N:
                continue
            a2 = list(a)
            a2[i - 1] += 1
            S2 = S[:k] + S[k + 1 :]
            d[index[(S2, p, tuple(a2))], col] += (-1) ** k
        sign = (-1) ** len(S)
        for q in range(len(fiber)):
            c = fiber.differential[q][p]
            if c:
                d[index[(S, q, a)], col] += sign * c
    return ApproxMorseComplex(ell, N, fiber, gens, degrees, d, index)


def cohomology_ranks(c: ApproxMorseComplex) -> dict[int, int]:
    """Betti numbers over Q, keyed by degree (zero ranks omitted)."""
    d = c.differential
    if np.any(d @ d):
        raise StructuralError("delta squared is not zero")
    degs = np.array(c.degrees)
    for col in range(d.shape[1]):
        rows = np.flatnonzero(d[:, col])
        if rows.size and np.any(degs[rows] != degs[col] + 1):
            raise StructuralError(f"delta does not raise degree by one at {c.generators[col]}")
    ranks_out: dict[int, int] = {}
    for k in range(int(degs.max()) + 2):
        src = np.flatnonzero(degs == k)
        tgt = np.flatnonzero(degs == k + 1)
        if src.size and tgt.size:
            ranks_out[k] = _intlin.rank(d[np.ix_(tgt, src)].tolist())
        else:
            ranks_out[k] = 0
    betti = {}
    for k in range(int(degs.max()) + 1):
        dim = int(np.sum(degs == k))
        b = dim - ranks_out.get(k, 0) - ranks_out.get(k - 1, 0)
        if b:
            betti[k] = b
    return betti


def sphere_betti(ell: int, N: int, fiber: FiberComplex | None = None) -> dict[int, int]:
    """Betti numbers of ``(S^{2N+1})^ell x P`` by the Künneth formula."""
    poly = {0: 1}
    for _ in range(ell):
        nxt: dict[int, int] = {}
        for k, b in poly.items():
            for e in (0, 2 * N + 1):
                nxt[k + e] = nxt.get(k + e, 0) + b
        poly = nxt
    fiber = fiber or FiberComplex.point()
    out: dict[int, int] = {}
    # a fiber with zero differential contributes its own degrees
    fib_betti: dict[int, int] = {}
    mat = np.array(fiber.differential)
    if np.any(mat):
        raise ValueError("sphere_betti expects a fiber complex with zero differential")
    for deg in fiber.degrees:
        fib_betti[deg] = fib_betti.get(deg, 0) + 1
    for k, b in poly.items():
        for j, f in fib_betti.items():
            out[k + j] = out.get(k + j, 0) + b * f
    return dict(sorted(out.items()))


# -- the connecting-orbit ODE -------------------------------------------------


def smoothstep(y: float) -> float:
    if y <= 0.0:
        return 0.0
    if y >= 1.0:
        return 1.0
    return y * y * (3.0 - 2.0 * y)


@dataclass(frozen=True)
class Profile:
    """Partition of unity ``a(t) = smoothstep((center - t) / width)``, ``b = 1 - a``."""

    center: float = math.log(2.0)
    width: float = 1.0

    def a(self, t: float) -> float:
        return smoothstep((self.center - t) / self.width)

    def b(self, t: float) -> float:
        return 1.0 - self.a(t)


@dataclass(frozen=True)
class FlowVerdict:
    i: int
    j: int
    phase: float
    theta_minus: float
    theta_plus: float
    connects: bool
    tolerance: float
    elapsed: float
    diagnostics: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "phase": self.phase,
            "theta_minus": self.theta_minus,
            "theta_plus": self.theta_plus,
            "target_angle": self.theta_plus + (self.phase if self.i == self.j else 0.0),
            "connects": self.connects,
            "tolerance": self.tolerance,
            "diagnostics": self.diagnostics,
        }


def _angle_dist(x: float, y: float = 0.0) -> float:
    d = math.fmod(x - y, 2.0 * math.pi)
    if d < 0:
        d += 2.0 * math.pi
    return min(d, 2.0 * math.pi - d)


def _sincos(x: float) -> tuple[float, float]:
    # exact values at multiples of pi/2, so float(pi) does not act as a 1e-16 forcing term
    k = x / (math.pi / 2.0)
    if abs(k - round(k)) < 1e-12:
        return [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)][int(round(k)) % 4]
    return math.sin(x), math.cos(x)


def _integrate(rhs: Callable, phi0: float, horizon: float, atol: float, rtol: float, method: str):
    sol = solve_ivp(rhs, (-horizon, horizon), [phi0], method=method, atol=atol, rtol=rtol)
    if not sol.success:
        raise NumericError("flow integration failed", {"message": sol.message, "nfev": sol.nfev, "t_last": sol.t[-1]})
    return float(sol.y[0, -1]), sol


def flow_verify(
    i: int,
    j: int,
    phase: float,
    profile: Profile | None = None,
    horizon: float = 30.0,
    *,
    theta_start: float | None = None,
    offset: float = 1e-6,
    tol: float = 1e-6,
    atol: float = 1e-9,
    rtol: float = 1e-9,
    method: str = "LSODA",
) -> FlowVerdict:
    """Integrate ``theta' = a(t) sin(theta) + b(t) sin(theta + phase)`` and classify the orbit.

    For ``i != j`` the base point moves in another factor, so the
    ``theta_i`` equation keeps ``b = 0``.  The trajectory starts at
    ``theta(-horizon) = pi - offset`` unless ``theta_start`` is given, and is
    integrated in the deviation ``phi = theta - pi`` so that tiny departures
    from the equilibrium keep their relative precision.

    ``theta_minus`` is ``pi`` for a launch within ``offset`` of ``pi``;
    otherwise it is the backward limit of the explicit solution
    ``2 arccot(exp(-t) cot(theta0 / 2))`` of ``theta' = sin(theta)``.
    ``theta_plus`` is the endpoint extrapolated to zero launch offset
    (Richardson on offsets ``offset`` and ``offset / 2``) for launches near
    ``pi``, otherwise the raw endpoint.  The orbit connects
    ``X_i (x) 1_BT`` to ``1_L (x) lambda_j`` iff ``theta_minus`` is within
    ``tol`` of ``pi`` and ``theta_plus + delta_ij * phase`` within ``tol`` of
    ``0`` (both modulo ``2 pi``).

    The default integrator is LSODA.  Explicit Runge-Kutta pairs
    (``method="RK45"``) stall at their stability limit while the deviation
    decays below ``atol``, and the later growth phase near an unstable
    endpoint amplifies that stall to O(1).
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    profile = profile or Profile()
    same = i == j
    started = time.perf_counter()
    if same:
        sin_p, cos_p = _sincos(phase)

        def rhs(t, phi):
            a = profile.a(t)
            s, c = math.sin(phi[0]), math.cos(phi[0])
            # sin(phi + phase) expanded: phi + pi would round phi away near the equilibrium
            return [-a * s - (1.0 - a) * (s * cos_p + c * sin_p)]
    else:
        def rhs(t, phi):
            return [-math.sin(phi[0])]

    near_pi = theta_start is None or _angle_dist(theta_start, math.pi) <= offset * (1 + 1e-9)
    diagnostics: dict = {}
    if near_pi:
        eps = offset if theta_start is None else math.pi - theta_start
        if eps == 0.0:
            eps = offset
        end1, sol = _integrate(rhs, -eps, horizon, atol, rtol, method)
        end2, _ = _integrate(rhs, -eps / 2.0, horizon, atol, rtol, method)
        phi_end = 2.0 * end2 - end1
        theta_minus = math.pi
        diagnostics.update(raw_theta_plus=math.pi + end1, half_offset_theta_plus=math.pi + end2, nfev=int(sol.nfev))
    else:
        # away from pi, integrate theta itself: sin(0) is exact, sin(-float(pi)) is not
        if same:
            def rhs_theta(t, th):
                a = profile.a(t)
                s, c = math.sin(th[0]), math.cos(th[0])
                return [a * s + (1.0 - a) * (s * cos_p + c * sin_p)]
        else:
            def rhs_theta(t, th):
                return [math.sin(th[0])]
        theta_end, sol = _integrate(rhs_theta, theta_start, horizon, atol, rtol, method)
        phi_end = theta_end - math.pi
        cot_half = math.cos(theta_start / 2.0) / math.sin(theta_start / 2.0) if math.sin(theta_start / 2.0) else math.inf
        # t -> -infinity of 2 arccot(e^{-t} cot(theta0/2)), evaluated one horizon further back
        arg = math.exp(2.0 * horizon) * cot_half if math.isfinite(cot_half) else math.inf
        theta_minus = 0.0 if not math.isfinite(arg) else 2.0 * math.atan2(1.0, arg)
        diagnostics.update(nfev=int(sol.nfev))
    theta_plus = math.pi + phi_end
    target = theta_plus + (phase if same else 0.0)
    connects = _angle_dist(theta_minus, math.pi) < tol and _angle_dist(target, 0.0) < tol
    return FlowVerdict(
        i, j, phase, theta_minus, theta_plus, connects, tol, time.perf_counter() - started, diagnostics
    )
