"""Command-line front end.

Exit codes: 0 success, 1 a verification check disagreed with its expected
pattern, 2 usage / parse / spec error, 3 domain error (point outside the
orthant, irregular curve, ...), 4 internal consistency failure (curvature
routes disagree, eigensolver did not converge).
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import __version__, reporting
from .calculus import bilaplacian, diff_bundle
from .curvature import (
    RouteMismatchError,
    has_null_relative_curvature,
    is_isotropic_biharmonic,
    is_isotropic_flat,
    is_isotropic_minimal,
    predicates_at,
    profile_from_bundle,
)
from .curves import TopViewCurve, curvature_along
from .econ import econ_report
from .expr import (
    CES,
    CobbDouglas,
    DomainError,
    FunctionModel,
    Generic,
    Homothetic,
    ParseError,
    PerfectSubstitute,
    lower,
    max_var_index,
    parse,
    parse_curve,
    to_text,
)
from .numeric import ConvergenceError, SamplePlan, Tolerance
from .verify import CHECK_IDS, SpecError, builtin_spec, read_config, run_check, spec_from_config

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_DOMAIN, EXIT_INTERNAL = 0, 1, 2, 3, 4

# upper bound on variable indices when -n is not given
MAX_INFERRED_DIM = 64

FAMILIES = {
    "cobb-douglas": "cobb-douglas",
    "cd": "cobb-douglas",
    "ces": "ces",
    "perfect-substitute": "perfect-substitute",
    "ps": "perfect-substitute",
}


class UsageError(ValueError):
    pass


# ------------------------------------------------------------------ parsing


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser, *, function: bool = True) -> None:
    if function:
        src = p.add_argument_group("function source")
        src.add_argument("-f", "--function", help="expression in x1..xn, e.g. 'x1^0.3*x2^0.7'")
        src.add_argument("--family", choices=sorted(FAMILIES), help="named production family")
        src.add_argument("--gamma", type=float, default=1.0, help="family scale factor (default 1)")
        src.add_argument("--alpha", help="Cobb-Douglas exponents a1,...,an")
        src.add_argument("--d", type=float, help="CES degree")
        src.add_argument("--rho", type=float, help="CES substitution parameter")
        src.add_argument("--a", help="CES or perfect-substitute weights a1,...,an")
        src.add_argument("--outer", help="wrap as F(h(x)); F is an expression in t")
        p.add_argument("-n", "--dim", type=int, help="number of inputs")
    p.add_argument("--plan", help="sample plan count,lo,hi (log-uniform)")
    p.add_argument("--seed", type=int, help="sampling seed (default 42)")
    p.add_argument("--atol", type=float)
    p.add_argument("--rtol", type=float)
    p.add_argument("--format", choices=("json", "csv", "human"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isoprod", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="curvature invariants at a point and predicate sweeps")
    _add_common(p)
    p.add_argument("--at", help="evaluation point x1,...,xn")

    p = sub.add_parser("classify", help="homogeneity, returns to scale and family fingerprint")
    _add_common(p)

    p = sub.add_parser("curve", help="frames along a curve at equally spaced arclength stations")
    _add_common(p)
    p.add_argument("--curve", required=True, help="top view 'e1;e2;...' in the parameter u")
    p.add_argument("--range", required=True, help="parameter interval a,b")
    p.add_argument("--stations", type=int, default=5, help="number of stations k >= 2 (default 5)")
    p.add_argument("--panels", type=int, default=1024, help="Simpson panels for the arclength table")

    p = sub.add_parser("verify", help="run a parametric theorem check")
    _add_common(p, function=False)
    p.add_argument("--check", help=f"one of {', '.join(CHECK_IDS)} or 'all'")
    p.add_argument("--spec", help="key = value check specification file")
    return parser


def _model(args, n_hint: int | None = None) -> tuple[FunctionModel, dict]:
    if (args.function is None) == (args.family is None):
        raise UsageError("give exactly one of -f/--function or --family")
    n = args.dim or n_hint
    if args.function is not None:
        e = parse(args.function, n or MAX_INFERRED_DIM)
        n = n or max(2, max_var_index(e))
        model: FunctionModel = Generic(e, n)
        echo = {"function": args.function}
    else:
        family = FAMILIES[args.family]
        if family == "cobb-douglas":
            if args.alpha is None:
                raise UsageError("--family cobb-douglas needs --alpha")
            model = CobbDouglas(args.gamma, _floats(args.alpha, "--alpha"))
            params = {"gamma": args.gamma, "alpha": list(model.alpha)}
        elif family == "ces":
            if args.d is None or args.rho is None or args.a is None:
                raise UsageError("--family ces needs --d, --rho and --a")
            model = CES(args.gamma, args.d, args.rho, _floats(args.a, "--a"))
            params = {"gamma": args.gamma, "d": args.d, "rho": args.rho, "a": list(model.a)}
        else:
            if args.a is None:
                raise UsageError("--family perfect-substitute needs --a")
            model = PerfectSubstitute(_floats(args.a, "--a"))
            params = {"a": list(model.a)}
        if n is not None and n != model.n:
            raise UsageError(f"family parameters give n={model.n} but -n is {n}")
        echo = {"family": family, "params": params}
    if args.outer is not None:
        model = Homothetic(parse_curve(args.outer, "t"), model)
        echo["outer"] = args.outer
    echo["n"] = model.n
    echo["expression"] = to_text(lower(model))
    return model, echo


def _plan(args, n: int) -> SamplePlan | None:
    if args.plan is None:
        return None
    vals = _floats(args.plan, "--plan")
    if len(vals) != 3 or not vals[0].is_integer():
        raise UsageError("--plan expects count,lo,hi")
    return SamplePlan(n, int(vals[0]), vals[1], vals[2], _seed(args))


def _seed(args) -> int:
    return 42 if args.seed is None else args.seed


def _tol(args, base: Tolerance = Tolerance()) -> Tolerance:
    return Tolerance(
        base.atol if args.atol is None else args.atol,
        base.rtol if args.rtol is None else args.rtol,
    )


# -------------------------------------------------------------- subcommands


def cmd_analyze(args) -> tuple[dict, list, int]:
    model, echo = _model(args)
    tol = _tol(args)
    plan = _plan(args, model.n)
    if args.at is None and plan is None:
        raise UsageError("analyze needs --at and/or --plan")
    results: dict = {}
    if args.at is not None:
        x = _floats(args.at, "--at")
        if len(x) != model.n:
            raise UsageError(f"--at has {len(x)} coordinates, the function has {model.n} inputs")
        echo["at"] = x
        prof = profile_from_bundle(diff_bundle(model, x))
        results.update(
            point=list(prof.point),
            value=prof.value,
            gradient=list(prof.gradient),
            hessian=prof.hessian.rows(),
            laplacian=prof.hessian.trace(),
            bilaplacian=bilaplacian(model, x),
            principal_curvatures=list(prof.principal_curvatures),
            principal_directions=[list(t) for t in prof.principal_directions],
            lifted_directions=[list(t) for t in prof.lifted_directions],
            K=list(prof.fundamental_curvatures),
            K_minor_route=list(prof.minor_route),
            mean_curvature=prof.mean_curvature,
            relative_curvature=prof.relative_curvature,
            predicates=predicates_at(model, x, tol),
        )
    if plan is not None:
        echo["plan"] = plan.to_dict()
        sweeps = [
            is_isotropic_minimal(model, plan, tol),
            has_null_relative_curvature(model, plan, tol),
            is_isotropic_flat(model, plan, tol),
            is_isotropic_biharmonic(model, plan, tol),
        ]
        results["sweeps"] = {v.predicate: _verdict(v) for v in sweeps}
    return {"input": echo, "results": results, "findings": [], "tolerances": tol.to_dict()}, [], EXIT_OK


def _verdict(v) -> dict:
    d = v.to_dict()
    d.pop("plan")
    d.pop("tolerances")
    return d


def cmd_classify(args) -> tuple[dict, list, int]:
    model, echo = _model(args)
    plan = _plan(args, model.n) or SamplePlan(model.n, seed=_seed(args))
    echo["plan"] = plan.to_dict()
    rep = econ_report(model, plan)
    return (
        {"input": echo, "results": rep.to_dict(), "findings": [], "tolerances": _tol(args).to_dict()},
        [],
        EXIT_OK,
    )


def cmd_curve(args) -> tuple[dict, list, int]:
    if args.stations < 2:
        raise UsageError("--stations must be at least 2")
    texts = args.curve.split(";")
    ab = _floats(args.range, "--range")
    if len(ab) != 2:
        raise UsageError("--range expects a,b")
    curve = TopViewCurve(tuple(parse_curve(t) for t in texts), ab[0], ab[1], args.panels)
    model, echo = _model(args, n_hint=curve.n)
    echo.update(curve=texts, range=ab, stations=args.stations, panels=args.panels)
    frames = curvature_along(model, curve, args.stations)
    results = {"length": frames[-1].s, "frames": [f.to_dict() for f in frames]}
    rows = [[f.s, f.u, f.kappa_g, f.kappa_n, f.kappa_s, *f.X] for f in frames]
    header = ["s", "u", "kappa_g", "kappa_n", "kappa_s"] + [f"x{i + 1}" for i in range(model.n)] + ["f"]
    return (
        {"input": echo, "results": results, "findings": [], "tolerances": _tol(args).to_dict()},
        [header, rows],
        EXIT_OK,
    )


def _verify_specs(args):
    if (args.check is None) == (args.spec is None):
        raise UsageError("give exactly one of --check or --spec")
    if args.spec is not None:
        specs = [spec_from_config(read_config(args.spec))]
    elif args.check.lower() == "all":
        specs = [builtin_spec(c) for c in CHECK_IDS]
    else:
        specs = [builtin_spec(args.check)]
    out = []
    plan = _floats(args.plan, "--plan") if args.plan else None
    if plan is not None and (len(plan) != 3 or not plan[0].is_integer()):
        raise UsageError("--plan expects count,lo,hi")
    for s in specs:
        if args.seed is not None:
            s.seed = args.seed
        if plan is not None:
            s.count, s.lo, s.hi = int(plan[0]), plan[1], plan[2]
        if args.atol is not None or args.rtol is not None:
            s.tolerance = _tol(args, s.tol)
        out.append(s)
    return out


def cmd_verify(args) -> tuple[dict, list, int]:
    specs = _verify_specs(args)
    reports = [run_check(s) for s in specs]
    findings = [{"check": r.check_id, **f} for r in reports for f in r.findings]
    rows = [
        [r.check_id, c.index, c.label, c.expected, c.observed, c.agrees, c.report_only, c.error]
        for r in reports
        for c in r.cells
    ]
    header = ["check", "index", "label", "expected", "observed", "agrees", "report_only", "error"]
    echo = {"check": args.check, "spec": args.spec}
    if len(reports) == 1:
        r = reports[0]
        results = r.to_dict()
        tolerances = specs[0].tol.to_dict()
        seed = specs[0].seed
    else:
        results = {"overall": all(r.overall for r in reports), "reports": [r.to_dict() for r in reports]}
        tolerances = _tol(args).to_dict()
        seed = _seed(args)
    code = EXIT_OK if all(r.overall for r in reports) else EXIT_MISMATCH
    doc = {"input": echo, "results": results, "findings": findings, "tolerances": tolerances, "seed": seed}
    return doc, [header, rows], code


COMMANDS = {"analyze": cmd_analyze, "classify": cmd_classify, "curve": cmd_curve, "verify": cmd_verify}


# ------------------------------------------------------------------- output


def render(doc: dict, fmt: str, table: list, color: bool = False) -> str:
    if fmt == "json":
        return reporting.dumps(doc)
    if fmt == "human":
        return reporting.human(doc, color=color)
    if table:
        header, rows = table
        return reporting.to_csv(header, rows)
    pairs = reporting.flatten(doc["results"])
    return reporting.to_csv(["key", "value"], [[k, v] for k, v in pairs])


def _caret(text: str, offset: int) -> str:
    prefix = text.encode("utf-8")[:offset].decode("utf-8", errors="ignore")
    return f"  {text}\n  {' ' * len(prefix)}^"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    def fail(code: int, msg: str) -> int:
        print(f"isoprod: error: {msg}", file=sys.stderr)
        return code

    try:
        body, table, code = COMMANDS[args.command](args)
    except ParseError as exc:
        src = getattr(args, "function", None)
        msg = f"parse error at offset {exc.offset}: {exc.message}"
        if src is not None and exc.offset <= len(src.encode("utf-8")):
            msg += "\n" + _caret(src, exc.offset)
        return fail(EXIT_USAGE, msg)
    except (RouteMismatchError, ConvergenceError) as exc:
        return fail(EXIT_INTERNAL, str(exc))
    except DomainError as exc:
        return fail(EXIT_DOMAIN, f"domain error: {exc}")
    except (UsageError, SpecError) as exc:
        return fail(EXIT_USAGE, str(exc))
    except ValueError as exc:
        return fail(EXIT_USAGE, f"invalid input: {exc}")
    except OSError as exc:
        return fail(EXIT_USAGE, str(exc))

    seed = body.pop("seed", _seed(args))
    echo = {"subcommand": args.command, **body["input"]}
    doc = reporting.envelope(seed, echo, body["results"], body["findings"], body["tolerances"])
    if args.out:
        text = render(doc, args.format, table)
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        text = render(doc, args.format, table, color=reporting.use_color(sys.stdout))
        sys.stdout.write(text)
    return code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
