"""Truncated multivariate formal power series with exact rational coefficients.

A series lives in a :class:`SeriesContext`: an ordered tuple of variable
names, a strictly positive rational weight per variable and a rational
cutoff.  Only monomials of weighted degree ``<= cutoff`` are stored, so the
context is a finite quotient of the power series ring.  Novikov exponents are
never stored directly; a Kähler variable ``q_a`` simply carries the weight
``omega(C_a)`` and ``T**omega(alpha)`` is the monomial ``q**alpha``.

All values are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .errors import ContextError, DomainError, ShapeError

__all__ = [
    "SERIES_SCHEMA",
    "SeriesContext",
    "TruncatedSeries",
    "as_fraction",
    "exp_series",
    "log_series",
    "reciprocal",
    "substitute",
    "reverse_family",
]


_RATIONAL = {"anyOf": [{"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}, {"type": "integer"}]}

SERIES_SCHEMA = {
    "type": "object",
    "required": ["vars", "cutoff", "terms"],
    "properties": {
        "vars": {"type": "array", "items": {"type": "string"}},
        "weights": {"type": "array", "items": _RATIONAL},
        "cutoff": _RATIONAL,
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["exp", "coef"],
                "properties": {
                    "exp": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "coef": _RATIONAL,
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}


def as_fraction(value) -> Fraction:
    """Parse ``value`` (int, Fraction, ``"p/q"`` string) into a Fraction.

    Floats are rejected: they would silently import rounding error.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class SeriesContext:
    """Ordered variables, their grading weights and the truncation cutoff."""

    variables: tuple[str, ...]
    weights: tuple[Fraction, ...]
    cutoff: Fraction

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "weights", tuple(as_fraction(w) for w in self.weights))
        object.__setattr__(self, "cutoff", as_fraction(self.cutoff))
        if len(self.variables) != len(self.weights):
            raise ContextError("one weight per variable is required")
        if len(set(self.variables)) != len(self.variables):
            raise ContextError(f"duplicate variable names in {self.variables}")
        if any(w <= 0 for w in self.weights):
            raise ContextError("weights must be strictly positive")
        if self.cutoff < 0:
            raise ContextError("cutoff must be nonnegative")

    @classmethod
    def uniform(cls, variables: Sequence[str], cutoff) -> "SeriesContext":
        return cls(tuple(variables), tuple(Fraction(1) for _ in variables), as_fraction(cutoff))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def weight(self, exp: Sequence[int]) -> Fraction:
        return sum((w * e for w, e in zip(self.weights, exp)), Fraction(0))

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise ContextError(f"unknown variable {name!r}") from None

    def with_cutoff(self, cutoff) -> "SeriesContext":
        return SeriesContext(self.variables, self.weights, as_fraction(cutoff))

    def var_exponent(self, name: str) -> tuple[int, ...]:
        k = self.index(name)
        return tuple(int(j == k) for j in range(self.nvars))

    def zero(self) -> "TruncatedSeries":
        return TruncatedSeries(self, {})

    def one(self) -> "TruncatedSeries":
        return self.constant(1)

    def constant(self, c) -> "TruncatedSeries":
        return TruncatedSeries(self, {(0,) * self.nvars: as_fraction(c)})

    def var(self, name: str) -> "TruncatedSeries":
        return self.monomial({name: 1})

    def monomial(self, powers: Mapping[str, int] | Sequence[int], coef=1) -> "TruncatedSeries":
        if isinstance(powers, Mapping):
            exp = [0] * self.nvars
            for name, e in powers.items():
                exp[self.index(name)] = int(e)
        else:
            exp = [int(e) for e in powers]
        return TruncatedSeries(self, {tuple(exp): as_fraction(coef)})


def _grlex_key(exp: tuple[int, ...]):
    # graded by total degree; within a degree, earlier variables first
    return (sum(exp), tuple(-e for e in exp))


class TruncatedSeries:
    """An element of ``Q[[vars]] / (weighted degree > cutoff)``.

    Construct through a :class:`SeriesContext` or pass a term mapping
    ``{exponent tuple: coefficient}``; terms above the cutoff and zero
    coefficients are dropped on construction.
    """

    __slots__ = ("_ctx", "_terms", "_hash")

    def __init__(self, ctx: SeriesContext, terms: Mapping[Sequence[int], object] | None = None):
        self._ctx = ctx
        clean: dict[tuple[int, ...], Fraction] = {}
        for exp, coef in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != ctx.nvars:
                raise ContextError(f"exponent {exp} does not match {ctx.nvars} variables")
            if any(e < 0 for e in exp):
                raise DomainError(f"negative exponent {exp}: only power series are supported")
            c = as_fraction(coef)
            if c and ctx.weight(exp) <= ctx.cutoff:
                clean[exp] = clean.get(exp, Fraction(0)) + c
        self._terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, ctx, terms):
        # terms already canonical
        obj = cls.__new__(cls)
        obj._ctx = ctx
        obj._terms = terms
        obj._hash = None
        return obj

    # -- basic accessors -------------------------------------------------
    @property
    def ctx(self) -> SeriesContext:
        return self._ctx

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        """Copy of the term map in canonical (graded-lex) order."""
        return {e: self._terms[e] for e in sorted(self._terms, key=_grlex_key)}

    def items(self):
        return self.terms.items()

    def coefficient(self, exp: Sequence[int] | Mapping[str, int]) -> Fraction:
        if isinstance(exp, Mapping):
            vec = [0] * self._ctx.nvars
            for name, e in exp.items():
                vec[self._ctx.index(name)] = e
            exp = vec
        return self._terms.get(tuple(exp), Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self._ctx.nvars, Fraction(0))

    def valuation(self) -> Fraction | None:
        """Minimal weighted degree of a stored term, ``None`` for zero."""
        if not self._terms:
            return None
        return min(self._ctx.weight(e) for e in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    # -- ring structure --------------------------------------------------
    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other._ctx != self._ctx:
                raise ContextError(f"context mismatch: {self._ctx} vs {other._ctx}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._ctx.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return TruncatedSeries._raw(self._ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._raw(self._ctx, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c = Fraction(other)
            if not c:
                return self._ctx.zero()
            return TruncatedSeries._raw(self._ctx, {e: c * v for e, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        ctx = self._ctx
        cutoff = ctx.cutoff
        left = sorted(((ctx.weight(e), e, c) for e, c in self._terms.items()), key=lambda t: t[0])
        right = sorted(((ctx.weight(e), e, c) for e, c in other._terms.items()), key=lambda t: t[0])
        out: dict[tuple[int, ...], Fraction] = {}
        for wa, ea, ca in left:
            budget = cutoff - wa
            for wb, eb, cb in right:
                if wb > budget:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return TruncatedSeries._raw(ctx, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * reciprocal(other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise DomainError("only nonnegative integer powers are supported")
        result = self._ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self._ctx == other._ctx and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._terms == self._ctx.constant(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._ctx, frozenset(self._terms.items())))
        return self._hash

    # -- truncation / derived --------------------------------------------
    def truncate(self, cutoff) -> "TruncatedSeries":
        """Re-truncate to a smaller cutoff (coherent projection)."""
        cutoff = as_fraction(cutoff)
        if cutoff > self._ctx.cutoff:
            raise DomainError("cannot raise the cutoff of an already truncated series")
        ctx = self._ctx.with_cutoff(cutoff)
        return TruncatedSeries(ctx, self._terms)

    def divide_by_variable(self, name: str) -> "TruncatedSeries":
        """Exact division by a variable; every term must contain it."""
        k = self._ctx.index(name)
        out = {}
        for e, c in self._terms.items():
            if e[k] < 1:
                raise ShapeError(f"term {e} is not divisible by {name}")
            e2 = list(e)
            e2[k] -= 1
            out[tuple(e2)] = c
        return TruncatedSeries._raw(self._ctx, out)

    # -- presentation ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "vars": list(self._ctx.variables),
            "weights": [_fmt_fraction(w) for w in self._ctx.weights],
            "cutoff": _fmt_fraction(self._ctx.cutoff),
            "terms": [{"exp": list(e), "coef": _fmt_fraction(c)} for e, c in self.terms.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "TruncatedSeries":
        variables = tuple(data["vars"])
        weights = data.get("weights")
        if weights is None:
            weights = [1] * len(variables)
        ctx = SeriesContext(variables, tuple(as_fraction(w) for w in weights), as_fraction(data["cutoff"]))
        terms = {}
        for t in data.get("terms", []):
            e = tuple(t["exp"])
            terms[e] = terms.get(e, Fraction(0)) + as_fraction(t["coef"])
        return cls(ctx, terms)

    def _monomial_str(self, exp) -> str:
        parts = []
        for name, e in zip(self._ctx.variables, exp):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def pretty(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for exp, c in self.terms.items():
            mono = self._monomial_str(exp)
            mag = abs(c)
            if not mono:
                body = _fmt_fraction(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{_fmt_fraction(mag)}*{mono}"
            sign = "-" if c < 0 else "+"
            if not out:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(f"{sign} {body}")
        return " ".join(out)

    def __str__(self):
        return self.pretty()

    def __repr__(self):
        return f"TruncatedSeries({self.pretty()!r}, cutoff={_fmt_fraction(self._ctx.cutoff)})"


def _require_positive_valuation(a: TruncatedSeries, what: str):
    if a.constant_term():
        raise DomainError(f"{what} needs a series with zero constant term, got constant {a.constant_term()}")


def _geometric_sum(h: TruncatedSeries, coeffs) -> TruncatedSeries:
    # sum_k coeffs(k) h^k for k >= 0, h of positive valuation; terminates by nilpotence
    result = h.ctx.zero()
    power = h.ctx.one()
    k = 0
    while power:
        c = coeffs(k)
        if c:
            result = result + power * c
        k += 1
        power = power * h
    return result


def exp_series(a: TruncatedSeries) -> TruncatedSeries:
    """``sum_k a**k / k!`` for ``a`` of positive valuation."""
    _require_positive_valuation(a, "exp")
    return _geometric_sum(a, lambda k: Fraction(1, factorial(k)))


def log_series(a: TruncatedSeries) -> TruncatedSeries:
    """Formal logarithm of a series with constant term exactly 1."""
    if a.constant_term() != 1:
        raise DomainError(f"log needs constant term 1, got {a.constant_term()}")
    h = a - 1
    return _geometric_sum(h, lambda k: Fraction((-1) ** (k + 1), k) if k else Fraction(0))


def reciprocal(a: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse of a unit (nonzero constant term)."""
    c = a.constant_term()
    if not c:
        raise DomainError("reciprocal of a series with zero constant term")
    h = a * (1 / c) - 1
    return _geometric_sum(h, lambda k: Fraction((-1) ** k)) * (1 / c)


def substitute(a: TruncatedSeries, bindings: Mapping[str, TruncatedSeries]) -> TruncatedSeries:
    """Compose ``a`` with ``{variable: series}``; unbound variables pass through.

    All bindings must live in ``a``'s context.  Binding a variable to a series
    with a nonzero constant term is permitted (it is a unit); the result is
    then exact only up to terms of ``a`` that the cutoff already dropped, so
    positive-valuation bindings are the intended use.

    The result is a ring homomorphism of truncated series only when every
    binding has valuation at least the weight of the variable it replaces;
    a weight-lowering binding would resurrect terms the cutoff has dropped.
    """
    if not bindings:
        return a
    ctx = a.ctx
    images = []
    for k, name in enumerate(ctx.variables):
        b = bindings.get(name)
        if b is None:
            images.append(ctx.var(name))
            continue
        if not isinstance(b, TruncatedSeries):
            b = ctx.constant(b)
        if b.ctx != ctx:
            raise ContextError(f"binding for {name!r} lives in a different context")
        images.append(b)
    unknown = set(bindings) - set(ctx.variables)
    if unknown:
        raise ContextError(f"bindings for unknown variables {sorted(unknown)}")

    cache: dict[tuple[int, int], TruncatedSeries] = {}

    def power(k: int, e: int) -> TruncatedSeries:
        if e == 0:
            return ctx.one()
        key = (k, e)
        if key not in cache:
            cache[key] = images[k] if e == 1 else power(k, e - 1) * images[k]
        return cache[key]

    result = ctx.zero()
    for exp, c in a._terms.items():
        term = ctx.constant(c)
        for k, e in enumerate(exp):
            if e:
                term = term * power(k, e)
                if not term:
                    break
        result = result + term
    return result


def _unit_factors(family: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
    if not family:
        return []
    ctx = family[0].ctx
    if len(family) != ctx.nvars:
        raise ShapeError(f"family has {len(family)} members for {ctx.nvars} variables")
    units = []
    for name, f in zip(ctx.variables, family):
        if f.ctx != ctx:
            raise ContextError("family members must share one context")
        if ctx.weight(ctx.var_exponent(name)) > ctx.cutoff:
            # the variable itself is truncated away; only the zero series has that shape
            if f:
                raise ShapeError(f"component for {name} is nonzero although {name} exceeds the cutoff")
            units.append(ctx.one())
            continue
        try:
            u = f.divide_by_variable(name)
        except ShapeError as exc:
            raise ShapeError(f"component for {name} is not {name} times a unit: {exc}") from None
        if not u.constant_term():
            raise ShapeError(f"component for {name} is not {name} times a unit")
        units.append(u)
    return units


def reverse_family(family: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
    """Invert ``q_a = f_a(qc)`` with ``f_a = qc_a * unit_a(qc)``.

    The family is indexed by the context's variables, which play the role of
    ``qc`` on input and ``q`` on output.  Fixed-point iteration
    ``qc <- q * unit(qc)**-1`` gains at least the smallest variable weight of
    precision per pass, so it stabilises after finitely many passes.
    """
    units = _unit_factors(family)
    if not units:
        return []
    ctx = family[0].ctx
    q = [ctx.var(name) for name in ctx.variables]
    current = list(q)
    max_passes = int(ctx.cutoff / min(ctx.weights)) + 3
    for _ in range(max_passes):
        binding = dict(zip(ctx.variables, current))
        nxt = [qa * reciprocal(substitute(u, binding)) for qa, u in zip(q, units)]
        if nxt == current:
            return nxt
        current = nxt
    raise ShapeError("reverse_family did not stabilise; family is not of variable-times-unit shape")


def compose_family(family: Sequence[TruncatedSeries], inner: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
    """``[f(inner) for f in family]`` with the context variables bound to ``inner``."""
    if not family:
        return []
    ctx = family[0].ctx
    binding = dict(zip(ctx.variables, inner))
    return [substitute(f, binding) for f in family]


def identity_family(ctx: SeriesContext) -> list[TruncatedSeries]:
    return [ctx.var(name) for name in ctx.variables]


def from_terms(ctx: SeriesContext, terms: Iterable[tuple[Sequence[int], object]]) -> TruncatedSeries:
    acc: dict[tuple[int, ...], Fraction] = {}
    for e, c in terms:
        e = tuple(e)
        acc[e] = acc.get(e, Fraction(0)) + as_fraction(c)
    return TruncatedSeries(ctx, acc)
