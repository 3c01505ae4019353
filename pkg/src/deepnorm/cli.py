"""Command-line front end.

Exit codes: 0 on success, 1 when a check fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import flow as flows
from .corpus import generate_corpus
from .derivation import Derivation, check_derivation, load, to_json, to_text
from .formula import ParseError, render
from .normalise import (
    NormalisationError,
    PipelineReport,
    fit_quasipolynomial,
    normalise,
    to_analytic,
    to_cut_free,
    to_simple_form,
)
from .threshold import default_atoms, gamma, theta, theta_size_profile


class UsageError(Exception):
    pass


def _atoms(args) -> tuple[str, ...]:
    if args.atoms:
        names = tuple(x.strip() for x in args.atoms.split(",") if x.strip())
        if args.n is not None and args.n != len(names):
            raise UsageError(f"-n {args.n} disagrees with {len(names)} names in --atoms")
        return names
    if args.n is None:
        raise UsageError("give -n or --atoms")
    return default_atoms(args.n)


def _read(path: str) -> Derivation:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return load(text)
    except (ParseError, ValueError, KeyError) as exc:
        raise UsageError(f"malformed derivation in {path}: {exc}") from exc


def _emit_derivation(d: Derivation, fmt: str, out) -> None:
    if fmt == "json":
        out.write(to_json(d) + "\n")
    elif fmt == "dot":
        out.write(flows.to_dot(flows.extract_flow(d)[0]))
    else:
        out.write(to_text(d))


def _rules(rep) -> str:
    return ", ".join(f"{r}: {c}" for r, c in sorted(rep.rule_multiset.items(), key=lambda kv: kv[0].ascii))


# ----------------------------------------------------------------- commands


def cmd_check(args, out, err) -> int:
    d = _read(args.file)
    rep = check_derivation(d)
    if args.format == "json":
        body = {
            "valid": rep.valid,
            "size": rep.size,
            "rules": {str(r): c for r, c in rep.rule_multiset.items()},
            "failures": [[i, why] for i, why in rep.failures],
        }
        out.write(json.dumps(body, ensure_ascii=False) + "\n")
    else:
        out.write(f"{'valid' if rep.valid else 'invalid'}; size {rep.size}; {_rules(rep)}\n")
    for i, why in rep.failures:
        err.write(f"step {i}: {why}\n")
    return 0 if rep.valid else 1


def cmd_flow(args, out, err) -> int:
    d = _read(args.file)
    try:
        fl, _ = flows.extract_flow(d)
    except flows.FlowError as exc:
        err.write(f"{exc}\n")
        return 1
    problem = flows.validate(fl)
    if args.format == "dot":
        out.write(flows.to_dot(fl))
    elif args.format == "json":
        out.write(flows.to_json(fl) + "\n")
    else:
        kinds = ", ".join(f"{k.value}: {fl.count(k)}" for k in flows.Kind if fl.count(k))
        out.write(f"{len(fl.vertices)} vertices, {len(fl.edges)} edges, "
                  f"{len(flows.components(fl))} components; {kinds}\n")
    if problem:
        err.write(f"invalid flow: {problem}\n")
        return 1
    return 0


def cmd_theta(args, out, err) -> int:
    if args.profile:
        if args.n is None:
            raise UsageError("--profile needs -n")
        rows = theta_size_profile(args.n)
        w = csv.DictWriter(out, fieldnames=["n", "k", "size"], extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return 0 if all(r["monotone"] and r["within_bound"] for r in rows) else 1
    if args.k is None:
        raise UsageError("theta needs -k")
    f = theta(args.k, _atoms(args))
    out.write((json.dumps({"formula": render(f)}) if args.format == "json" else render(f)) + "\n")
    return 0


def cmd_gamma(args, out, err) -> int:
    if args.k is None or args.l is None:
        raise UsageError("gamma needs -k and -l")
    atoms = _atoms(args)
    try:
        d = gamma(args.k, args.l, atoms)
    except (IndexError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    _emit_derivation(d, args.format, out)
    return 0


def _stage(fn):
    def run(args, out, err) -> int:
        d = _read(args.file)
        rep = check_derivation(d)
        if not rep.valid:
            err.write(f"input is not a valid derivation: step {rep.failures[0][0]}: {rep.failures[0][1]}\n")
            return 1
        try:
            res = fn(d)
        except (NormalisationError, flows.FlowError) as exc:
            err.write(f"{exc}\n")
            return 1
        _emit_derivation(res, args.format, out)
        return 0

    return run


cmd_simple = _stage(lambda d: to_simple_form(d).proof)
cmd_cutfree = _stage(lambda d: to_cut_free(to_simple_form(d)))
cmd_analytic = _stage(to_analytic)


def _write_report(report: PipelineReport, path: str) -> None:
    Path(path).write_text(report.to_csv())


def cmd_normalise(args, out, err) -> int:
    d = _read(args.file)
    if not check_derivation(d).valid:
        err.write("input is not a valid derivation\n")
        return 1
    try:
        res, report = normalise(d)
    except (NormalisationError, flows.FlowError) as exc:
        err.write(f"{exc}\n")
        return 1
    _emit_derivation(res, args.format, out)
    if args.report:
        _write_report(report, args.report)
    for s in report.stages:
        err.write(f"{s.stage}: {'ok' if s.valid and s.same_conclusion else 'FAILED'} size {s.size} "
                  f"({s.seconds:.2f}s)\n")
    return 0 if report.valid else 1


def cmd_stats(args, out, err) -> int:
    """Normalise several proofs (files, or a generated corpus) and print sizes and the growth fit."""
    if args.files:
        proofs = [(f, _read(f)) for f in args.files]
    else:
        proofs = [(f"seed{args.seed}#{i}", p) for i, p in enumerate(generate_corpus(args.seed, args.count, args.budget))]
    rows = []
    ok = True
    for name, p in proofs:
        _, report = normalise(p)
        ok &= report.valid
        row = {"proof": name, "atoms": report.stage("simple").atoms, "valid": report.valid}
        for s in report.stages:
            row[f"size_{s.stage}"] = s.size
        row["seconds"] = round(sum(s.seconds for s in report.stages), 3)
        rows.append(row)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.report:
        Path(args.report).write_text(buf.getvalue())
    else:
        out.write(buf.getvalue())
    if len(rows) >= 3:
        fit = fit_quasipolynomial([r["size_input"] for r in rows], [r["size_analytic"] for r in rows])
        err.write(f"{fit}\n")
    return 0 if ok else 1


def cmd_corpus(args, out, err) -> int:
    try:
        proofs = generate_corpus(args.seed, args.count, args.budget)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.out is None:
        for i, p in enumerate(proofs):
            out.write(f"# proof {i}\n")
            _emit_derivation(p, "text" if args.format == "dot" else args.format, out)
        return 0
    target = Path(args.out)
    target.mkdir(parents=True, exist_ok=True)
    ext = "json" if args.format == "json" else "sks"
    for i, p in enumerate(proofs):
        body = to_json(p) + "\n" if ext == "json" else to_text(p)
        (target / f"proof{i:03d}.{ext}").write_text(body)
    err.write(f"wrote {len(proofs)} proofs to {target}\n")
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json", "dot"], default="text")
    common.add_argument("--report", metavar="PATH")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-k", type=int)
    common.add_argument("-n", type=int)
    common.add_argument("-l", type=int)
    common.add_argument("--atoms", metavar="a,b,c")

    p = argparse.ArgumentParser(prog="deepnorm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("check", "check every step of a derivation"),
        ("flow", "extract and validate the atomic flow"),
        ("simple", "rewrite a proof into simple form"),
        ("cutfree", "simple form, then the threshold construction"),
        ("analytic", "remove coweakenings from a cut-free proof"),
        ("normalise", "run the whole pipeline"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("file", help="derivation file, or - for stdin")
    th = sub.add_parser("theta", parents=[common], help="print a threshold formula")
    th.add_argument("--profile", action="store_true", help="CSV of sizes for every n up to -n")
    sub.add_parser("gamma", parents=[common], help="print the derivation between pseudocomplements")
    st = sub.add_parser("stats", parents=[common], help="normalise many proofs and fit the growth")
    st.add_argument("files", nargs="*")
    st.add_argument("--count", type=int, default=100)
    st.add_argument("--budget", type=int, default=3, help="number of atom names")
    co = sub.add_parser("corpus", parents=[common], help="generate random proofs with cuts")
    co.add_argument("--count", type=int, default=100)
    co.add_argument("--budget", type=int, default=3, help="number of atom names")
    co.add_argument("--out", metavar="DIR")
    return p


COMMANDS = {
    "check": cmd_check,
    "flow": cmd_flow,
    "theta": cmd_theta,
    "gamma": cmd_gamma,
    "simple": cmd_simple,
    "cutfree": cmd_cutfree,
    "analytic": cmd_analytic,
    "normalise": cmd_normalise,
    "stats": cmd_stats,
    "corpus": cmd_corpus,
}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out, err)
    except UsageError as exc:
        err.write(f"deepnorm: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
