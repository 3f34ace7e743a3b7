"""Command-line interface: ``sepscan <check|scan|nf|witness> ...``.

Exit codes: 0 success (including "not detected"), 2 input error, 3 numerical
or method failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from sepscan import __version__, criteria, states, witness
from sepscan.errors import InputError, MethodError, SepscanError
from sepscan.linalg import DensityMatrix
from sepscan.normalform import normal_form
from sepscan.policy import DEFAULT_POLICY
from sepscan.stateio import Report, matrix_to_dict, read_state, state_to_dict, write_state

EXIT_OK, EXIT_INPUT, EXIT_METHOD = 0, 2, 3
CRITERION_CHOICES = criteria.CRITERIA + ("all",)


def _add_source(p: argparse.ArgumentParser, file_flags=("--file",)) -> None:
    src = p.add_argument_group("state source")
    src.add_argument(*file_flags, dest="file", metavar="PATH", help="state file (JSON)")
    src.add_argument("--family", choices=states.FAMILY_NAMES, help="built-in state family")
    src.add_argument("--a", type=float, default=2.0)
    src.add_argument("--b", type=float, default=3.0)
    src.add_argument("--c", type=float, default=0.6)
    src.add_argument("--p", type=float, default=None, help="noise / entangled weight (default 1)")
    src.add_argument("--d", type=int, default=2, help="local dimension for isotropic")
    src.add_argument("--n", type=int, default=3, help="number of parties for ghz")
    src.add_argument("--dims", type=int, nargs="+", help="dimensions for random families")
    src.add_argument("--terms", type=int, help="product terms for separable (default: total dimension)")
    src.add_argument("--seed", type=int, default=0)


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", metavar="PATH", help="write output to PATH")
    p.add_argument("--json", action="store_true", help="print the JSON report")


def _family(args):
    return states.family(args.family, a=args.a, b=args.b, c=args.c, d=args.d, n=args.n,
                         dims=args.dims, terms=args.terms, seed=args.seed)


def _family_descriptor(args, with_p: bool = True) -> dict:
    desc = {"family": args.family}
    if args.family == "acin":
        desc.update(a=args.a, b=args.b, c=args.c)
    elif args.family == "isotropic":
        desc.update(d=args.d)
    elif args.family == "ghz":
        desc.update(n=args.n)
    elif args.family in ("mixed", "product", "random", "separable"):
        desc.update(dims=list(args.dims or (2, 2)), seed=args.seed)
        if args.family == "separable":
            desc.update(terms=args.terms)
    if with_p:
        desc["p"] = 1.0 if args.p is None else args.p
    return desc


def _load(args) -> tuple[DensityMatrix, dict]:
    if args.file and args.family:
        raise InputError("give either --file or --family, not both")
    if args.file:
        return read_state(args.file), {"file": str(args.file)}
    if args.family:
        desc = _family_descriptor(args)
        return _family(args)(desc["p"]), desc
    raise InputError("no state given: use --file or --family")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sepscan", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sepscan {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run separability criteria on a state")
    _add_source(p)
    p.add_argument("--batch", metavar="DIR", help="check every *.json state file in DIR")
    p.add_argument("--criterion", choices=CRITERION_CHOICES, action="append",
                   help="criterion to run (repeatable; default all)")
    p.add_argument("--normal-form", action="store_true", help="evaluate on the filtering normal form")
    p.add_argument("--tol", type=float, default=DEFAULT_POLICY.nf_tol, help="normal-form tolerance")
    _add_output(p)

    p = sub.add_parser("scan", help="bisect a noise family for its detection threshold")
    _add_source(p)
    p.add_argument("--criterion", choices=CRITERION_CHOICES, action="append")
    p.add_argument("--normal-form", action="store_true")
    p.add_argument("--tol", type=float, default=1e-4, help="bisection bracket width")
    p.add_argument("--p-lo", type=float, default=0.0)
    p.add_argument("--p-hi", type=float, default=0.9999, help="upper end (p=1 is often rank deficient)")
    _add_output(p)

    p = sub.add_parser("nf", help="compute the filtering normal form")
    _add_source(p)
    p.add_argument("--tol", type=float, default=DEFAULT_POLICY.nf_tol)
    p.add_argument("--max-sweeps", type=int, default=DEFAULT_POLICY.nf_max_sweeps)
    p.add_argument("--out", metavar="PATH", help="write the normal-form state file to PATH")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("witness", help="build an entanglement witness")
    _add_source(p, file_flags=("--file", "--from-state"))
    p.add_argument("--canonical", type=int, nargs=2, metavar=("M", "N"), help="bipartite M x N witness")
    p.add_argument("--canonical-multi", type=int, nargs="+", metavar="D", help="multipartite witness on these dims")
    p.add_argument("--subset", type=int, nargs="+", help="party subset for --canonical-multi (0-based)")
    _add_output(p)
    return parser


def _report(command: str, input_desc: dict, **kw) -> Report:
    return Report(command=command, input=input_desc, version=__version__, policy=DEFAULT_POLICY.as_dict(), **kw)


def _check_one(args, rho: DensityMatrix, desc: dict) -> Report:
    names = args.criterion or ["all"]
    nf = None
    if args.normal_form:
        nf = normal_form(rho, tol=args.tol).require_converged()
    verdicts = criteria.evaluate(rho, names, args.normal_form, nf)
    return _report("check", desc, verdicts=verdicts, normal_form=None if nf is None else nf.summary())


def cmd_check(args) -> Report | list[Report]:
    if args.batch:
        files = sorted(Path(args.batch).glob("*.json"))
        if not files:
            raise InputError(f"no *.json state files in {args.batch}")

        def run(path: Path) -> Report:
            try:
                return _check_one(args, read_state(path), {"file": str(path)})
            except SepscanError as exc:
                return _error_report("check", {"file": str(path)}, exc)

        with ThreadPoolExecutor() as pool:
            return list(pool.map(run, files))
    rho, desc = _load(args)
    return _check_one(args, rho, desc)


def cmd_scan(args) -> Report:
    if not args.family:
        raise InputError("scan needs --family")
    names = args.criterion or ["gcm"]
    fam = _family(args)
    p_star = criteria.scan_threshold(fam, names, args.normal_form, args.p_lo, args.p_hi, args.tol)
    desc = _family_descriptor(args, with_p=False)
    threshold = {"p": p_star, "tol": args.tol, "p_lo": args.p_lo, "p_hi": args.p_hi,
                 "criteria": names, "used_normal_form": args.normal_form}
    return _report("scan", desc, threshold=threshold)


def cmd_nf(args) -> Report:
    rho, desc = _load(args)
    res = normal_form(rho, tol=args.tol, max_sweeps=args.max_sweeps).require_converged()
    summary = res.summary()
    summary["objective_trace"] = res.objective_trace
    summary["filters"] = [matrix_to_dict(f) for f in res.filters]
    summary["state"] = state_to_dict(res.nf)
    if args.out:
        write_state(res.nf, args.out)
        summary["written_to"] = str(args.out)
    return _report("nf", desc, normal_form=summary)


def cmd_witness(args) -> Report:
    rho, desc = None, {}
    if args.file or args.family:
        rho, desc = _load(args)
    if args.canonical and args.canonical_multi:
        raise InputError("choose one of --canonical and --canonical-multi")
    if args.canonical:
        w = witness.canonical_bipartite(*args.canonical)
        desc = {**desc, "canonical": list(args.canonical)}
    elif args.canonical_multi:
        w = witness.canonical_multipartite(args.canonical_multi, args.subset)
        desc = {**desc, "canonical_multi": list(args.canonical_multi)}
    elif rho is not None:
        w = witness.witness_from_state(rho)
    else:
        raise InputError("give --canonical, --canonical-multi or a state")
    info = w.to_dict()
    if rho is not None:
        info["expectation"] = witness.expectation(w, rho)
    return _report("witness", desc, witness=info)


def _error_report(command: str, desc: dict, exc: Exception) -> Report:
    return _report(command, desc, error={"type": type(exc).__name__, "message": str(exc)})


def _exit_code(exc: Exception) -> int:
    return EXIT_INPUT if isinstance(exc, InputError) else EXIT_METHOD


def _human(report: Report) -> str:
    d = report.to_dict()
    lines = [f"sepscan {d['command']}: {json.dumps(d['input'], sort_keys=True)}"]
    if d["error"]:
        lines.append(f"  error {d['error']['type']}: {d['error']['message']}")
    for v in d["verdicts"]:
        subset = "" if v["subset"] is None else f" {v['subset']}"
        lines.append(f"  {v['criterion']}{subset}: statistic {v['statistic']:.6g} bound {v['bound']:.6g}"
                     f" -> {'DETECTED' if v['detected'] else 'not detected'}")
    if d["verdicts"]:
        lines.append(f"  entanglement detected: {d['detected']}")
    if d["normal_form"]:
        nf = d["normal_form"]
        lines.append(f"  normal form: converged={nf['converged']} sweeps={nf['iterations']} residual={nf['residual']:.3e}")
    if d["threshold"]:
        lines.append(f"  threshold p* = {d['threshold']['p']:.6f} (+/- {d['threshold']['tol']:g})")
    if d["witness"]:
        w = d["witness"]
        lines.append(f"  witness: coefficient {w['coefficient']:.6g}, min eigenvalue {w['min_eig']:.10g}")
        if "expectation" in w:
            lines.append(f"  Tr(rho W) = {w['expectation']:.10g}")
    return "\n".join(lines)


def _emit(reports, args) -> None:
    many = isinstance(reports, list)
    if args.json or (args.out and args.command != "nf"):
        text = json.dumps([r.to_dict() for r in reports] if many else reports.to_dict(), indent=2, sort_keys=True)
    else:
        text = "\n".join(_human(r) for r in (reports if many else [reports]))
    if args.out and args.command != "nf":
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


COMMANDS = {"check": cmd_check, "scan": cmd_scan, "nf": cmd_nf, "witness": cmd_witness}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except SepscanError as exc:
        report = _error_report(args.command, {}, exc)
        if args.json:
            print(report.to_json())
        else:
            print(f"sepscan: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    _emit(result, args)
    if isinstance(result, list):
        return max((EXIT_INPUT if r.error["type"] in _INPUT_ERRORS else EXIT_METHOD) if r.error else EXIT_OK
                   for r in result)
    return EXIT_OK


_INPUT_ERRORS = {c.__name__ for c in InputError.__subclasses__()} | {"InputError"}


if __name__ == "__main__":
    sys.exit(main())
