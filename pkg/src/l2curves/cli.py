"""Command-line front end.

Exit status: 0 when every check passes, 1 when a check fails, 2 for usage,
parse and I/O errors, 3 for numeric failures (empty domain, non-integrable
singularity).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io as sio
from ._version import __version__
from .catalog import (
    FamilyDescriptor,
    Parameterization,
    PseudopolarOnly,
    closed_form,
    evaluate_family,
    family_info,
    registry,
)
from .core import Branch, CurveSamples, Sign
from .expr import ExprError, parse_kappa
from .quadrature import (
    TOL_INT,
    Anchor,
    Interval,
    NumericFailure,
    SamplingPolicy,
    SolveRequest,
    Variable,
    degenerate_solutions,
    momentum_from_kappa,
    solve,
)
from .verify import (
    CheckReport,
    Law,
    check_curvature_law,
    check_elastica,
    check_intrinsic,
    check_momentum,
    check_soliton,
    check_unit_speed,
    compare_intrinsic,
    make_report,
    tol_verify,
)

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
FAMILY_PARAMS = ("phi0", "c", "k0", "mu", "trivial", "n", "lam")


class UsageError(Exception):
    """Bad arguments or input detected after argument parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# -- recipes ---------------------------------------------------------------------
# Every file written by generate/solve records how it was made, so verify and
# compare can rebuild the exact curve (with its continuous source) and check
# that the file really holds it.


def family_recipe(args) -> dict:
    params = {p: getattr(args, p) for p in FAMILY_PARAMS if getattr(args, p) is not None}
    info = family_info(args.family)
    known = {p.name for p in info.params}
    extra = sorted(set(params) - known)
    if extra:
        raise UsageError(f"family {info.id.value} takes no parameter(s) {', '.join(extra)}"
                         f" (parameters: {', '.join(sorted(known)) or 'none'})")
    recipe = {"kind": "family", "family": info.id.value, "params": params, "epsilon": args.epsilon,
              "branch": args.branch, "sign": args.sign, "count": args.count}
    if args.range is not None:
        recipe["range"] = list(args.range)
    return recipe


def solve_recipe(args) -> dict:
    recipe = {"kind": "solve", "kappa": args.kappa, "variable": args.var, "c": args.c, "base": args.base,
              "epsilon": args.epsilon, "branch": args.branch, "sign": args.sign, "count": args.count,
              "constant": bool(args.constant)}
    for key in ("domain", "s_range", "window"):
        value = getattr(args, key)
        if value is not None:
            recipe[key] = list(value)
    if args.anchor is not None:
        recipe["anchor"] = args.anchor
    return recipe


def _descriptor(recipe: dict) -> FamilyDescriptor:
    return FamilyDescriptor(recipe["family"], recipe.get("params", {}), int(recipe["epsilon"]),
                            Branch(recipe.get("branch", "plus")), Sign(recipe.get("sign", "pos")))


def _diverges_at(f, base: float) -> bool:
    """True if f blows up at ``base`` at least like |t - base|^(-0.85).

    Probes f at distances 1e-6 and 1e-8 on each side where it is defined;
    growth by 50x or more over those two decades marks a pole that the
    primitive cannot integrate through.
    """
    with np.errstate(all="ignore"):
        for side in (1.0, -1.0):
            near, far = np.abs(f(np.array([base + side * 1e-8, base + side * 1e-6])))
            if not np.isfinite(far):
                continue
            if not np.isfinite(near) or near > 50.0 * max(far, 1e-300) and near > 1.0:
                return True
    return False


def _solve_request(recipe: dict) -> SolveRequest:
    variable = Variable(recipe["variable"])
    law = parse_kappa(recipe["kappa"], variable)
    base = float(recipe.get("base", 0.0))
    integrand = (lambda t: t * law(t)) if variable is Variable.RHO else law
    if _diverges_at(integrand, base):
        raise UsageError(f"the primitive of the curvature law diverges at base {base}; choose another --base")
    eps = int(recipe["epsilon"])
    momentum = momentum_from_kappa(law, variable, float(recipe["c"]), eps, base)
    domain = recipe.get("domain")
    s_range = recipe.get("s_range")
    anchor = recipe.get("anchor")
    return SolveRequest(
        momentum, eps, Branch(recipe.get("branch", "plus")), Sign(recipe.get("sign", "pos")),
        domain_hint=None if domain is None else Interval(*map(float, domain)),
        sampling=SamplingPolicy(int(recipe["count"]), None if s_range is None else tuple(map(float, s_range))),
        anchor=Anchor() if anchor is None else Anchor(point=float(anchor)),
        window=None if recipe.get("window") is None else tuple(map(float, recipe["window"])),
    )


def build(recipe: dict) -> CurveSamples:
    """Rebuild the curve described by a recipe.

    Raises:
        UsageError: for an unknown recipe kind or bad parameters.
        NumericFailure: when the quadrature pipeline cannot proceed.
    """
    kind = recipe.get("kind")
    if kind == "family":
        desc = _descriptor(recipe)
        rng = recipe.get("range")
        t = None if rng is None else np.linspace(float(rng[0]), float(rng[1]), int(recipe["count"]))
        return evaluate_family(desc, t, count=int(recipe["count"]))
    if kind == "solve":
        request = _solve_request(recipe)
        if recipe.get("constant"):
            if request.variable is not Variable.RHO:
                raise UsageError("constant orbits exist only for laws of rho")
            s_range = recipe.get("s_range") or (-1.0, 1.0)
            orbits = degenerate_solutions(request, tuple(map(float, s_range)))
            if not orbits:
                raise NumericFailure("no constant-rho orbit (double zero of the radicand) in the scan window")
            return orbits[0]
        return solve(request)
    raise UsageError(f"unknown recipe kind {kind!r}")


def _law_for(recipe: dict):
    """(law kind, kappa function, momentum) implied by a recipe, if any."""
    if recipe.get("kind") == "family":
        cf = closed_form(_descriptor(recipe))
        law = Law.OF_RHO if cf.momentum.variable is Variable.RHO else Law.OF_V
        return law, cf.momentum.kappa, cf.momentum, cf
    request = _solve_request(recipe)
    law = Law.OF_RHO if request.variable is Variable.RHO else Law.OF_V
    return law, request.momentum.kappa, request.momentum, None


def _metadata(samples: CurveSamples, recipe: dict) -> dict:
    extra = {"recipe": recipe, "tolerances": {"tol_verify": tol_verify(), "tol_int": TOL_INT}}
    if recipe["kind"] == "family":
        extra["family"] = recipe["family"]
        extra["params"] = dict(_descriptor(recipe).params)
        if "t" in samples.meta:
            extra["parameterization"] = Parameterization.AUX_T.value
    return sio.base_metadata(samples, extra)


# -- output helpers ---------------------------------------------------------------


def _emit_samples(samples: CurveSamples, meta: dict, out: Optional[str], fmt: Optional[str]) -> None:
    kind = fmt or ("json" if out and out.lower().endswith(".json") else "csv")
    text = sio.format_json(samples, meta) if kind == "json" else sio.format_csv(samples, meta)
    _write_text(text, out)


def _write_text(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _load(path: str):
    if path == "-":
        text = sys.stdin.read()
        return sio.parse_json(text) if text.lstrip().startswith("{") else sio.parse_csv(text)
    return sio.read_samples(path)


def _print_reports(reports: Sequence[CheckReport], fmt: str) -> None:
    for r in reports:
        if fmt == "jsonl":
            print(r.to_json())
        else:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status} {r.check_id}: residual {r.max_residual:.3e} (threshold {r.threshold:.1e}, "
                  f"worst at s = {r.worst_s:.6g})")


def _resolved(path: str, threshold: float):
    """Samples for checking: the rebuilt curve when the file carries a recipe.

    Returns (samples, recipe, reports) where reports holds the file-match
    check when a rebuild happened.
    """
    samples, meta = _load(path)
    recipe = meta.get("recipe")
    if not isinstance(recipe, dict):
        return samples, None, []
    rebuilt = build(recipe)
    if len(rebuilt) != len(samples):
        return samples, recipe, [CheckReport("file.match", math.inf, threshold, False, math.nan)]
    scale = 1.0 + np.maximum(np.abs(rebuilt.x), np.abs(rebuilt.y))
    diff = np.maximum.reduce([np.abs(rebuilt.s - samples.s), np.abs(rebuilt.x - samples.x),
                              np.abs(rebuilt.y - samples.y)]) / scale
    match = make_report("file.match", diff, samples.s, threshold)
    return rebuilt, recipe, [match]


# -- subcommands ------------------------------------------------------------------


def cmd_generate(args) -> int:
    recipe = family_recipe(args)
    samples = build(recipe)
    _emit_samples(samples, _metadata(samples, recipe), args.output, args.format)
    return EXIT_OK


def cmd_solve(args) -> int:
    recipe = solve_recipe(args)
    samples = build(recipe)
    _emit_samples(samples, _metadata(samples, recipe), args.output, args.format)
    return EXIT_OK


def cmd_verify(args) -> int:
    threshold = args.tol if args.tol is not None else tol_verify()
    samples, recipe, reports = _resolved(args.file, threshold)
    g = args.guard
    reports.append(check_unit_speed(samples, threshold, g))
    if recipe is not None:
        law, kappa, momentum, cf = _law_for(recipe)
        if kappa is not None and not recipe.get("constant"):
            reports.append(check_curvature_law(samples, law, kappa, threshold, g))
        elif kappa is not None:
            reports.append(check_curvature_law(samples, law, kappa, threshold, 0.0))
        if not recipe.get("constant"):
            reports.append(check_momentum(samples, momentum, threshold, g))
        if cf is not None and cf.intrinsic_kappa is not None \
                and cf.parameterization is Parameterization.ARC_LENGTH:
            reports.append(check_intrinsic(samples, cf.intrinsic_kappa, threshold, g))
    if args.elastica:
        if args.sigma is None or args.energy is None:
            raise UsageError("--elastica needs --sigma and --energy")
        reports.extend(check_elastica(samples, args.sigma, args.energy, threshold, guard=g))
    if args.soliton:
        reports.append(check_soliton(samples, threshold, g))
    _print_reports(reports, args.report)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK


def cmd_compare(args) -> int:
    threshold = args.tol if args.tol is not None else tol_verify()
    a, _, ra = _resolved(args.first, threshold)
    b, _, rb = _resolved(args.second, threshold)
    reports = ra + rb + [compare_intrinsic(a, b, threshold, args.guard)]
    _print_reports(reports, args.report)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK


def cmd_list_families(args) -> int:
    infos = registry()
    if args.json:
        print(json.dumps([i.schema() for i in infos], indent=1))
        return EXIT_OK
    for info in infos:
        params = ", ".join(f"{p.name}={p.default:g}" for p in info.params) or "-"
        print(f"{info.id.value:20s} kappa({info.variable.value})  params: {params}")
        print(f"{'':20s} {info.summary}")
    return EXIT_OK


def cmd_plot(args) -> int:
    curves = [_load(path)[0] for path in args.files]
    svg = sio.format_svg(curves, mirror=not args.no_mirror, size=args.size, title=args.title)
    _write_text(svg, args.output)
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------


def _epsilon(text: str) -> int:
    try:
        value = int(float(text))
    except ValueError:
        value = 0
    if value not in (1, -1) or float(text) != value:
        raise argparse.ArgumentTypeError("epsilon must be 1 or -1")
    return value


def _count(text: str) -> int:
    value = int(text)
    if value < 16:
        raise argparse.ArgumentTypeError("sample count must be at least 16")
    return value


def _shared_curve_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=_epsilon, default=1, help="+1 spacelike, -1 timelike (default 1)")
    p.add_argument("--branch", choices=[b.value for b in Branch], default="plus",
                   help="pseudopolar branch: plus (|y| > |x|) or minus (|x| > |y|)")
    p.add_argument("--sign", choices=[s.value for s in Sign], default="pos", help="overall sign of the chart")
    p.add_argument("--count", type=_count, default=512, help="number of samples (default 512)")
    p.add_argument("-o", "--output", help="output file (.csv or .json); default standard output")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default from the extension, else csv)")


def _check_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, help="threshold (default L2CURVES_TOL or 1e-6)")
    p.add_argument("--guard", type=float, default=0.02, help="fraction of the s-range skipped at each end")
    p.add_argument("--report", choices=("text", "jsonl"), default="text", help="report format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="l2curves", description="Curves with prescribed curvature in the Lorentz-Minkowski plane.")
    parser.add_argument("--version", action="version", version=f"l2curves {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="sample a catalog family")
    g.add_argument("--family", required=True, choices=[i.id.value for i in registry()])
    for name in FAMILY_PARAMS:
        g.add_argument(f"--{name}", type=float, help=argparse.SUPPRESS)
    g.add_argument("--range", type=float, nargs=2, metavar=("A", "B"),
                   help="parameter range: s, or t for families sampled in t (default per family)")
    _shared_curve_args(g)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="integrate a curvature law kappa(rho) or kappa(v)")
    s.add_argument("--kappa", required=True, help='curvature law, e.g. "2+1/rho" or "exp(v)"')
    s.add_argument("--var", choices=("rho", "v"), required=True, help="law variable")
    s.add_argument("--c", type=float, required=True,
                   help="integration constant: K(base) for laws of rho, -eps/K(base) for laws of v")
    s.add_argument("--base", type=float, default=0.0, help="lower limit of the primitive of kappa (default 0)")
    s.add_argument("--domain", type=float, nargs=2, metavar=("LO", "HI"), help="restrict rho (or v) to [LO, HI]")
    s.add_argument("--s-range", dest="s_range", type=float, nargs=2, metavar=("A", "B"), help="arc-length range")
    s.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"), help="scan window for the domain search")
    s.add_argument("--anchor", type=float, help="rho (or v) where s = 0")
    s.add_argument("--constant", action="store_true", help="emit the constant-rho orbit instead of integrating")
    _shared_curve_args(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="run invariant checks on a samples file")
    v.add_argument("file", help="samples file (CSV or JSON), or - for standard input")
    v.add_argument("--elastica", action="store_true", help="check the elastica equation and energy")
    v.add_argument("--sigma", type=float, help="elastica tension")
    v.add_argument("--energy", type=float, help="elastica energy")
    v.add_argument("--soliton", action="store_true", help="check kappa = g((1,1), N)")
    _check_args(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compare", help="compare intrinsic equations up to a shift of s")
    c.add_argument("first")
    c.add_argument("second")
    _check_args(c)
    c.set_defaults(func=cmd_compare)

    lf = sub.add_parser("list-families", help="list the catalog families")
    lf.add_argument("--json", action="store_true", help="machine-readable schema")
    lf.set_defaults(func=cmd_list_families)

    pl = sub.add_parser("plot", help="draw samples files as SVG")
    pl.add_argument("files", nargs="+")
    pl.add_argument("-o", "--output", help="SVG file (default standard output)")
    pl.add_argument("--no-mirror", action="store_true", help="omit the point-reflected branch")
    pl.add_argument("--size", type=int, default=480)
    pl.add_argument("--title")
    pl.set_defaults(func=cmd_plot)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        tol_verify()  # reject a malformed L2CURVES_TOL up front
        return args.func(args)
    except UsageError as exc:
        print(f"l2curves: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericFailure as exc:
        print(f"l2curves: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"l2curves: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ExprError, PseudopolarOnly, ValueError) as exc:
        print(f"l2curves: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
