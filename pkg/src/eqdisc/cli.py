"""Command-line entry point: ``eqdisc <subcommand> ...``.

Exit status is 0 on success, 1 when the input is well-formed but rejected
(validation, domain or numeric failure) and 2 for I/O and schema errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import jsonschema

from .borel_morse import FiberComplex, Profile, build_complex, cohomology_ranks, flow_verify, sphere_betti
from .errors import EqdiscError, NumericError, ValidationError
from .immersed import CHART_VARIABLES, GluingChart, glue, sphere_potential
from .mirror import corrected_coefficients, g_function, mirror_map
from .potential import build_potential, critical_points, evaluate
from .series import SERIES_SCHEMA, SeriesContext, as_fraction
from .toric import FAN_SCHEMA, ToricInput, validate

EXIT_OK, EXIT_FAIL, EXIT_IO = 0, 1, 2

CHART_SCHEMA = {
    "type": "object",
    "required": ["chart", "coords"],
    "properties": {
        "chart": {"enum": sorted(CHART_VARIABLES)},
        "coords": {"type": "object", "additionalProperties": {"anyOf": [{"type": "null"}, SERIES_SCHEMA]}},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}


class InputError(Exception):
    """Unreadable file or schema violation (exit status 2)."""


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


def load_json(path: str, schema: dict):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"{path}: schema error at {_pointer(e.absolute_path)}: {e.message}" for e in errors]
        raise InputError("\n".join(lines))
    return data


def load_fan(path: str) -> ToricInput:
    return ToricInput.from_json(load_json(path, FAN_SCHEMA))


def _parse_complex(tok: str) -> complex:
    tok = tok.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(tok)
    except ValueError:
        raise InputError(f"not a number: {tok!r}") from None


def _parse_groups(text: str, sizes: list[int], what: str) -> list[list[complex]]:
    """Split ``text`` into groups of the given sizes.

    Groups are separated by ``;``; without ``;`` the comma-separated values
    are consumed in order.  A trailing group may be omitted (read as zeros).
    """
    if ";" in text:
        raw = [[t for t in g.split(",") if t.strip()] for g in text.split(";")]
    else:
        flat = [t for t in text.split(",") if t.strip()]
        raw, pos = [], 0
        for n in sizes:
            raw.append(flat[pos : pos + n])
            pos += n
        if pos < len(flat):
            raise InputError(f"{what}: too many values in {text!r}")
    while len(raw) < len(sizes):
        raw.append([])
    out = []
    for k, (group, n) in enumerate(zip(raw, sizes)):
        if not group and k == len(sizes) - 1:
            group = ["0"] * n
        if len(group) != n:
            raise InputError(f"{what}: expected {sizes} values, got {text!r}")
        out.append([_parse_complex(t) for t in group])
    return out


def _parse_subtorus(text: str | None):
    if text is None:
        return None
    try:
        return [[int(x) for x in row.split(",")] for row in text.split(";") if row.strip()]
    except ValueError:
        raise InputError(f"bad --subtorus {text!r}; expected e.g. '1,0;0,1'") from None


def _emit(args, payload: dict, pretty_lines: list[str]):
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print("\n".join(pretty_lines))


def _cutoff(args) -> Fraction:
    c = as_fraction(args.cutoff)
    if c <= 0:
        raise InputError("--cutoff must be positive")
    return c


def _complex_json(z: complex):
    return [z.real, z.imag]


# -- subcommands ---------------------------------------------------------


def cmd_validate(args) -> int:
    fan = load_fan(args.fan)
    try:
        report = validate(fan)
    except ValidationError as exc:
        payload = exc.report.to_json() if exc.report is not None else {"ok": False, "problems": [str(exc)]}
        payload["index"] = exc.index
        _emit(args, payload, [f"invalid: {exc}"])
        return EXIT_FAIL
    lines = [report.summary()]
    if report.mori is not None:
        lines.append("mori generators: " + ", ".join(str(list(c.intersections)) for c in report.mori))
    _emit(args, report.to_json(), lines)
    return EXIT_OK


def cmd_g_function(args) -> int:
    fan = load_fan(args.fan)
    validate(fan)
    cutoff = _cutoff(args)
    rays = [args.ray] if args.ray is not None else list(range(fan.m))
    for i in rays:
        if not 0 <= i < fan.m:
            raise ValidationError(f"ray index {i} out of range", index=i)
    corrected = corrected_coefficients(fan, cutoff)
    entries, lines = [], []
    for i in rays:
        g = g_function(fan, i, cutoff).series
        entries.append({"ray": i, "g": g.to_json(), "corrected": corrected[i].to_json()})
        lines.append(f"ray {i}: g = {g.pretty()}; exp(g(qc(q))) = {corrected[i].pretty()}")
    _emit(args, entries[0] if args.ray is not None else {"rays": entries}, lines)
    return EXIT_OK


def cmd_mirror_map(args) -> int:
    fan = load_fan(args.fan)
    validate(fan)
    cutoff = _cutoff(args)
    mm = mirror_map(fan, cutoff)
    corrected = corrected_coefficients(fan, cutoff)
    gs = [g_function(fan, i, cutoff).series for i in range(fan.m)]
    payload = mm.to_json()
    payload["rays"] = [
        {"ray": i, "g": g.to_json(), "corrected": c.to_json()} for i, (g, c) in enumerate(zip(gs, corrected))
    ]
    names = [f"q{a + 1}" for a in range(len(mm.generators))]
    lines = [f"mori generators: " + ", ".join(f"{n} <- {list(c.intersections)}" for n, c in zip(names, mm.generators))]
    lines += [f"{n}(qc) = {s.pretty()}" for n, s in zip(names, mm.forward)]
    lines += [f"qc{n[1:]}(q) = {s.pretty()}" for n, s in zip(names, mm.inverse)]
    lines += [f"ray {i}: {c.pretty()}" for i, c in enumerate(corrected)]
    _emit(args, payload, lines)
    return EXIT_OK


def _crit_payload(pot, t, lam, args):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        kwargs = {} if args.tolerance is None else {"grad_tol": args.tolerance}
        pts = critical_points(pot, t, lam, args.seeds, seed=args.seed, **kwargs)
    status = "ok" if pts else "no-convergence"
    payload = {"t": t, "lambda": [_complex_json(z) for z in lam], "status": status, "points": [p.to_json() for p in pts]}
    if caught:
        payload["warnings"] = [str(w.message) for w in caught]
    lines = [f"critical points at t={t} ({status}):"]
    for p in pts:
        xs = ", ".join(f"{z.real:.12g}{z.imag:+.12g}i" for z in p.x)
        lines.append(f"  x = ({xs})  W = {p.value.real:.12g}{p.value.imag:+.12g}i  |grad| = {p.gradient_norm:.2e}")
    return payload, lines


def _check_t(t: complex) -> float:
    if t.imag:
        raise InputError("t must be real")
    return t.real


def cmd_potential(args) -> int:
    fan = load_fan(args.fan)
    pot = build_potential(fan, _parse_subtorus(args.subtorus), _cutoff(args))
    ell = len(pot.equivariant_part)
    payload = {"potential": pot.to_json(), "pretty": pot.pretty()}
    lines = [f"W = {pot.pretty()}"]
    if args.eval is not None:
        (t,), x, lam = _parse_groups(args.eval, [1, pot.dim, ell], "--eval")
        t = _check_t(t)
        value = evaluate(pot, t, x, lam)
        payload["eval"] = {
            "t": t,
            "x": [_complex_json(z) for z in x],
            "lambda": [_complex_json(z) for z in lam],
            "value": _complex_json(value),
        }
        lines.append(f"W(t={t}) = {value.real:.15g}{value.imag:+.15g}i")
    if args.crit is not None:
        (t,), lam = _parse_groups(args.crit, [1, ell], "--crit")
        crit, clines = _crit_payload(pot, _check_t(t), lam, args)
        payload["crit"] = crit
        lines += clines
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_crit(args) -> int:
    fan = load_fan(args.fan)
    pot = build_potential(fan, _parse_subtorus(args.subtorus), _cutoff(args))
    ell = len(pot.equivariant_part)
    lam = [complex(0)] * ell if args.lam is None else _parse_groups(args.lam, [ell], "--lam")[0]
    payload, lines = _crit_payload(pot, args.t, lam, args)
    _emit(args, payload, lines)
    return EXIT_OK


def _generic_chart(chart: str, cutoff: int) -> GluingChart:
    names = CHART_VARIABLES[chart]
    ctx = SeriesContext.uniform(names, cutoff)
    return GluingChart(chart, {n: ctx.var(n) for n in names})


def cmd_glue_sphere(args) -> int:
    cutoff = as_fraction(args.cutoff)
    if cutoff.denominator != 1 or cutoff <= 0:
        raise InputError("glue-sphere needs a positive integer --cutoff")
    source, target = args.direction[:2], args.direction[2:]
    if args.coords is None and args.direction == "L0L1":
        sp = sphere_potential(int(cutoff))
        payload = sp.to_json()
        lines = [f"W = {sp.pretty()}    (w = u*v)"]
    else:
        if args.coords is not None:
            data = load_json(args.coords, CHART_SCHEMA)
            chart = GluingChart.from_json(data)
            if chart.chart != source:
                raise InputError(f"{args.coords}: chart is {chart.chart}, direction {args.direction} needs {source}")
            missing = set(CHART_VARIABLES[source]) - set(chart.coords)
            if missing:
                raise InputError(f"{args.coords}: schema error at /coords: missing {sorted(missing)}")
        else:
            chart = _generic_chart(source, int(cutoff))
        out = glue(chart, target, angular=False)
        payload = out.to_json()
        lines = [f"{k} = {'undefined' if v is None else v.pretty()}" for k, v in out.coords.items()]
        lines += [f"note: {n}" for n in out.notes]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_morse_check(args) -> int:
    fiber = FiberComplex.named(args.fiber)
    c = build_complex(args.l, args.n, fiber)
    square_zero = c.square_is_zero()
    ranks = cohomology_ranks(c)
    expected = sphere_betti(args.l, args.n, fiber)
    generators = [
        {"i": i, "delta": {c.label(g): k for g, k in c.delta((i,)).items()}} for i in range(1, args.l + 1)
    ]
    payload = {
        "l": args.l,
        "n": args.n,
        "fiber": fiber.name,
        "generators": len(c.generators),
        "delta_squared_zero": square_zero,
        "ranks": {str(k): v for k, v in sorted(ranks.items())},
        "expected": {str(k): v for k, v in sorted(expected.items())},
        "matches_expected": ranks == expected,
        "delta_X_i": generators,
    }
    lines = [
        f"l={args.l} N={args.n} fiber={fiber.name}: {len(c.generators)} generators",
        f"delta^2 = 0: {square_zero}",
        "ranks: " + ", ".join(f"H^{k}={v}" for k, v in sorted(ranks.items())),
        f"matches product of odd spheres: {ranks == expected}",
    ]
    for e in generators:
        lines.append(f"delta(X{e['i']} (x) 1_BT) = " + " + ".join(f"{k}*{lab}" for lab, k in e["delta"].items()))
    _emit(args, payload, lines)
    return EXIT_OK if square_zero else EXIT_FAIL


def cmd_flow(args) -> int:
    profile = Profile(args.profile_center, args.profile_width)
    kwargs = {} if args.tolerance is None else {"tol": args.tolerance}
    v = flow_verify(args.i, args.j, args.phase, profile, args.horizon, theta_start=args.theta, **kwargs)
    payload = v.to_json()
    lines = [
        f"i={v.i} j={v.j} phase={v.phase:.12g}",
        f"theta(-inf) = {v.theta_minus:.12g}",
        f"theta(+inf) = {v.theta_plus:.12g}",
        f"connects: {str(v.connects).lower()}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def _global_options(defaults: bool) -> argparse.ArgumentParser:
    # shared by the top-level parser and every subparser; SUPPRESS keeps a
    # subcommand-level default from clobbering a value given before it
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--cutoff", default=d("3"), help="truncation bound (rational, e.g. 3 or 5/2)")
    p.add_argument("--format", choices=["json", "pretty"], default=d("json"))
    p.add_argument("--seed", type=int, default=d(0), help="seed for Newton starting points")
    p.add_argument("--tolerance", type=float, default=d(None), help="gradient (crit) or asymptotic (flow) tolerance")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqdisc", description=__doc__, parents=[_global_options(True)])
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_global_options(False)]

    p = sub.add_parser("validate", parents=common, help="validate a fan file")
    p.add_argument("--fan", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("g-function", parents=common, help="correction series g_i and exp(g_i(qc(q)))")
    p.add_argument("--fan", required=True)
    p.add_argument("--ray", type=int, help="ray index (default: all rays)")
    p.set_defaults(func=cmd_g_function)

    p = sub.add_parser("mirror-map", parents=common, help="mirror map, its inverse and corrected coefficients")
    p.add_argument("--fan", required=True)
    p.set_defaults(func=cmd_mirror_map)

    p = sub.add_parser("potential", parents=common, help="equivariant disc potential")
    p.add_argument("--fan", required=True)
    p.add_argument("--subtorus", help="rows separated by ';', e.g. '1,0;0,1' (default: full torus)")
    p.add_argument("--eval", help="'t,x..,lambda..' or 't;x1,x2;l1,l2'")
    p.add_argument("--crit", help="'t,lambda..' or 't;l1,l2'")
    p.add_argument("--seeds", type=int, default=64)
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("crit", parents=common, help="critical points of the potential")
    p.add_argument("--fan", required=True)
    p.add_argument("--subtorus")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--lam", help="comma-separated equivariant parameters (default 0)")
    p.add_argument("--seeds", type=int, default=64)
    p.set_defaults(func=cmd_crit)

    p = sub.add_parser("glue-sphere", parents=common, help="pinched-torus gluing and the sphere potential")
    p.add_argument("--direction", choices=["L0L1", "L0L2", "L1L0", "L2L0", "L1L2", "L2L1"], default="L0L1")
    p.add_argument("--coords", help="chart JSON {'chart': ..., 'coords': {name: series}}")
    p.set_defaults(func=cmd_glue_sphere)

    p = sub.add_parser("morse-check", parents=common, help="Morse complex on the Borel approximation")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--fiber", choices=["point", "s2"], default="point")
    p.set_defaults(func=cmd_morse_check)

    p = sub.add_parser("flow", parents=common, help="classify a flow line of the angular ODE")
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--phase", type=float, default=0.0)
    p.add_argument("--theta", type=float, help="initial angle theta(-horizon) (default: pi - 1e-6)")
    p.add_argument("--horizon", type=float, default=30.0)
    p.add_argument("--profile-center", type=float, default=math.log(2.0))
    p.add_argument("--profile-width", type=float, default=1.0)
    p.set_defaults(func=cmd_flow)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericError as exc:
        print(f"error: {exc}; diagnostics: {json.dumps(exc.diagnostics, default=str)}", file=sys.stderr)
        return EXIT_FAIL
    except (EqdiscError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
