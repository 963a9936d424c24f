"""Command-line front end for the verification scenarios.

Exit codes separate three situations: 0 means every requested check
verified, 1 means some check ran and failed (a DISCREPANCY), and 2 means
the request itself was malformed (unknown flags, bad fixture grammar,
parameters outside the built-in catalogue).
"""

import argparse
import json
import sys

from . import deform, fdmod, groups
from .fdmod import RelationViolated

FORMATS = ("json", "text")


# ---------------------------------------------------------------------------
# rendering


def emit_report(report, format="text") -> str:
    """One report as a self-contained string in the requested format."""
    if format == "json":
        return json.dumps(
            report.to_json_dict(), indent=2, sort_keys=True,
            ensure_ascii=False,
        ) + "\n"
    if format != "text":
        raise ValueError(f"unknown format {format!r}")
    lines = [f"scenario {report.scenario_id}: {report.status}"]
    for pr in report.premises:
        lines.append(f"  {pr.verdict} {pr.name}")
        lines.append(f"    anchor: {pr.anchor}")
        if pr.computed:
            lines.append("    computed: " + json.dumps(
                deform._jsonable(pr.computed), sort_keys=True,
                ensure_ascii=False,
            ))
    if report.conclusion:
        lines.append(
            f"  CONCLUSION ({deform.CONCLUSION_BASIS}): {report.conclusion}"
        )
    return "\n".join(lines) + "\n"


def emit_reports(reports, format="text") -> str:
    """A bundle of reports, ordered by scenario id before rendering."""
    reports = sorted(reports, key=lambda r: r.scenario_id)
    if format == "json":
        return json.dumps(
            {
                "schema": 1,
                "reports": [r.to_json_dict() for r in reports],
            },
            indent=2, sort_keys=True, ensure_ascii=False,
        ) + "\n"
    return "".join(emit_report(r, format) for r in reports)


def _write(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_and_exit(args, reports):
    if len(reports) == 1:
        _write(args, emit_report(reports[0], args.format))
    else:
        _write(args, emit_reports(reports, args.format))
    return 0 if all(r.status == "VERIFIED" for r in reports) else 1


# ---------------------------------------------------------------------------
# subcommand bodies


def _family_cases(args):
    cases = [
        (fam, d) for fam, d in deform.FAMILY_CASES
        if (args.family is None or fam == args.family)
        and (args.d is None or d == args.d)
    ]
    if not cases:
        raise ValueError(
            f"no built-in case matches family={args.family} d={args.d}"
        )
    return cases


def _prime_list(args):
    ps = deform.GROUP_PRIMES if args.p is None else (args.p,)
    for p in ps:
        if p < 3 or not groups.is_prime(p):
            raise ValueError("p must be an odd prime")
    return ps


def _cmd_families_verify(args):
    reports = [
        deform.scenario_report(
            deform.Scenario("family", family=fam, d=d, seed=args.seed)
        )
        for fam, d in _family_cases(args)
    ]
    return _emit_and_exit(args, reports)


def _cmd_group_verify(args):
    reports = [
        deform.scenario_report(deform.Scenario(
            "group", p=p, a_eps=args.a_eps, n=args.n, N=args.N,
            samples=args.samples, seed=args.seed,
        ))
        for p in _prime_list(args)
    ]
    return _emit_and_exit(args, reports)


def _cmd_obstruction(args):
    reports = [
        deform.scenario_report(deform.Scenario(
            "obstruction", p=p, samples=args.samples, seed=args.seed,
        ))
        for p in _prime_list(args)
    ]
    return _emit_and_exit(args, reports)


def _cmd_report_all(args):
    scenarios = [
        deform.Scenario("family", family=fam, d=d, seed=args.seed)
        for fam, d in _family_cases(args)
    ]
    for p in _prime_list(args):
        scenarios.append(deform.Scenario(
            "group", p=p, a_eps=args.a_eps, n=args.n, N=args.N,
            samples=args.samples, seed=args.seed,
        ))
        scenarios.append(deform.Scenario(
            "obstruction", p=p, samples=args.samples, seed=args.seed,
        ))
    scenarios.sort(key=lambda s: s.id)
    reports = [deform.scenario_report(s) for s in scenarios]
    _write(args, emit_reports(reports, args.format))
    return 0 if all(r.status == "VERIFIED" for r in reports) else 1


def _resolve_fixture_algebra(args, text):
    family, d = args.family, args.d
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line.lower().startswith("algebra:"):
            tokens = line.split(":", 1)[1].split()
            if len(tokens) != 2:
                raise ValueError(
                    "algebra: line needs a family and a parameter, "
                    "for example 'algebra: II 2'"
                )
            family = family or tokens[0]
            d = d or int(tokens[1])
            break
    if family is None or d is None:
        raise ValueError(
            "fixture does not name its algebra; pass --family and --d"
        )
    return family, d


def _cmd_module_check(args):
    try:
        with open(args.fixture, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        sys.stderr.write(f"cannot read fixture: {err}\n")
        return 2
    family, d = _resolve_fixture_algebra(args, text)
    system = deform.completed_system(family, d)
    algebra = fdmod.quiver_algebra(system)
    try:
        module = fdmod.parse_module_fixture(text, algebra)
    except RelationViolated:
        raise
    except ValueError as err:
        sys.stderr.write(f"fixture parse error: {err}\n")
        return 2
    lines = [
        f"module fixture: {args.fixture}",
        f"algebra: family {family}, parameter {d}",
        f"dim: {module.dim}",
    ]
    dv = module.dimension_vector()
    lines.append("dimension vector: " + ", ".join(
        f"{label}:{dv.get(label, 0)}"
        for label in algebra.grading_labels
    ))
    lines.append("status: valid")
    payload = "\n".join(lines) + "\n"
    if args.format == "json":
        payload = json.dumps(
            {
                "schema": 1,
                "fixture": args.fixture,
                "algebra": {"family": family, "d": d},
                "dim": module.dim,
                "dimension_vector": {str(k): int(v) for k, v in dv.items()},
                "status": "valid",
            },
            indent=2, sort_keys=True, ensure_ascii=False,
        ) + "\n"
    _write(args, payload)
    return 0


def _parse_optional_module(path, algebra, fallback):
    if path is None:
        return fallback, "T"
    with open(path, encoding="utf-8") as fh:
        return fdmod.parse_module_fixture(fh.read(), algebra), path


def _cmd_ext(args):
    family, d = args.family or "I", args.d or 2
    if (family, d) not in deform.FAMILY_CASES:
        raise ValueError(f"no built-in case family {family} d={d}")
    system = deform.completed_system(family, d)
    algebra = fdmod.quiver_algebra(system)
    T = deform.base_module(family, system)
    try:
        M, src_name = _parse_optional_module(args.source, algebra, T)
        N, tgt_name = _parse_optional_module(args.target, algebra, T)
    except OSError as err:
        sys.stderr.write(f"cannot read fixture: {err}\n")
        return 2
    resolution = fdmod.ext_dim(M, N, 1)
    extension = fdmod.ext1_by_extensions(M, N)
    second = fdmod.ext_dim(M, N, 2)
    stable = fdmod.stable_hom_dim(M, N)
    agree = resolution.dim == extension.dim
    premise = deform.Premise(
        "ext-routes-agree",
        "the resolution and extension-structure routes compute "
        "the same Ext^1 dimension",
        "PASS" if agree else "FAIL",
        {
            "source": src_name,
            "target": tgt_name,
            "ext1_resolution": resolution.dim,
            "ext1_extension_route": extension.dim,
            "ext2": second.dim,
            "stable_hom": stable,
        },
    )
    report = deform._finish(f"ext-{family}-d{d}", [premise], "")
    return _emit_and_exit(args, [report])


def _cmd_lift_verify(args):
    family, d = args.family or "I", args.d or 2
    if (family, d) not in deform.FAMILY_CASES:
        raise ValueError(f"no built-in case family {family} d={d}")
    system = deform.completed_system(family, d)
    lift = deform.builtin_lift(family, d, system)
    premises = []
    try:
        cert = deform.verify_quiver_lift(lift, system)
        premises.append(deform.Premise(
            "flat-lift", deform.ANCHOR_LIFT, "PASS",
            {
                "relations_checked": cert.relations_checked,
                "max_t_degree": cert.max_degree,
                "truncation_levels": list(cert.truncation_levels),
            },
        ))
        cls = deform.first_order_class(lift)
        nonzero = not cls.representative_is_trivial()
        premises.append(deform.Premise(
            "first-order-class", deform.ANCHOR_FIRST_ORDER,
            "PASS" if nonzero else "FAIL",
            {"ext1_dim": cls.dim, "class_is_zero": not nonzero},
        ))
    except RelationViolated as err:
        premises.append(deform.Premise(
            "flat-lift", deform.ANCHOR_LIFT, "FAIL",
            {
                "relation": str(err.relation_id),
                "position": list(err.position),
            },
        ))
    report = deform._finish(f"lift-{family}-d{d}", premises, "")
    return _emit_and_exit(args, [report])


# ---------------------------------------------------------------------------
# argument plumbing


def _add_output_flags(p):
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out", default=None, metavar="PATH")


def _add_family_flags(p):
    p.add_argument("--family", choices=("I", "II", "III"), default=None)
    p.add_argument("--d", type=int, default=None)


def _add_group_flags(p):
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--a-eps", dest="a_eps", type=int, default=0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--N", type=int, default=3)


def _add_sampling_flags(p):
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="defcert",
        description="verify deformation-ring certificates",
    )
    sub = top.add_subparsers(dest="command", required=True)

    families = sub.add_parser("families", help="quiver family scenarios")
    fsub = families.add_subparsers(dest="action", required=True)
    fv = fsub.add_parser("verify")
    _add_family_flags(fv)
    _add_sampling_flags(fv)
    _add_output_flags(fv)
    fv.set_defaults(func=_cmd_families_verify)

    group = sub.add_parser("group", help="group-side scenarios")
    gsub = group.add_subparsers(dest="action", required=True)
    gv = gsub.add_parser("verify")
    _add_group_flags(gv)
    _add_sampling_flags(gv)
    _add_output_flags(gv)
    gv.set_defaults(func=_cmd_group_verify)

    module = sub.add_parser("module", help="module fixture checks")
    msub = module.add_subparsers(dest="action", required=True)
    mc = msub.add_parser("check")
    mc.add_argument("fixture", metavar="FIXTURE")
    _add_family_flags(mc)
    _add_output_flags(mc)
    mc.set_defaults(func=_cmd_module_check)

    ext = sub.add_parser("ext", help="Ext dimensions by both routes")
    _add_family_flags(ext)
    ext.add_argument("--source", default=None, metavar="PATH")
    ext.add_argument("--target", default=None, metavar="PATH")
    _add_output_flags(ext)
    ext.set_defaults(func=_cmd_ext)

    lift = sub.add_parser("lift", help="built-in lift verification")
    lsub = lift.add_subparsers(dest="action", required=True)
    lv = lsub.add_parser("verify")
    _add_family_flags(lv)
    _add_output_flags(lv)
    lv.set_defaults(func=_cmd_lift_verify)

    obstruction = sub.add_parser(
        "obstruction", help="the p-th power obstruction identity"
    )
    obstruction.add_argument("--p", type=int, default=None)
    _add_sampling_flags(obstruction)
    _add_output_flags(obstruction)
    obstruction.set_defaults(func=_cmd_obstruction)

    report = sub.add_parser("report", help="bundled scenario reports")
    rsub = report.add_subparsers(dest="action", required=True)
    ra = rsub.add_parser("all")
    _add_family_flags(ra)
    _add_group_flags(ra)
    _add_sampling_flags(ra)
    _add_output_flags(ra)
    ra.set_defaults(func=_cmd_report_all)

    return top


def run_command(argv) -> int:
    """Parse argv and run one subcommand, mapping errors to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 0 if err.code in (0, None) else 2
    try:
        return args.func(args)
    except RelationViolated as err:
        sys.stderr.write(
            f"RelationViolated: {err}\n"
        )
        return 1
    except deform.HenselObstruction as err:
        sys.stderr.write(f"obstruction: {err}\n")
        return 1
    except ValueError as err:
        sys.stderr.write(f"invalid request: {err}\n")
        return 2


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    return run_command(argv)


if __name__ == "__main__":
    sys.exit(main())
