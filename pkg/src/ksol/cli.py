"""Command line front end: ``ksol <command> <target> [options]``."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import report as rpt
from .catalog import get, load_builtin, surfaces, threefolds
from .catalog.entry import CatalogEntry
from .catalog.io import load_file
from .classify import cox_ring, match_catalog
from .errors import AmbiguousMatch, KsolError, ParseError, ValidationError
from .geometry import admissible_points, degree, symmetries, validate
from .rigor import DEFAULT_BITS, Interval, decimal_bounds, max_bits_from_env
from .stability import (
    DEFAULT_EPSILON,
    DEFAULT_SEGMENTS,
    DEFAULT_WIDTH,
    BoxGradient,
    CertifyConfig,
    IVT1D,
    Status,
    StabilityVerdict,
    certify,
    find_candidate,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSTABLE = 2
EXIT_INDETERMINATE = 3

_STATUS_EXIT = {
    Status.STABLE: EXIT_OK,
    Status.UNSTABLE: EXIT_UNSTABLE,
    Status.KAHLER_EINSTEIN_CANDIDATE: EXIT_UNSTABLE,
    Status.INDETERMINATE: EXIT_INDETERMINATE,
}

XI_TOLERANCE = 1e-4


@dataclass(frozen=True)
class RunConfig:
    precision: int = DEFAULT_BITS
    max_bits: int = 0  # 0 means: take KSOL_MAX_BITS or the library default
    width: Fraction = DEFAULT_WIDTH
    epsilon: Fraction = DEFAULT_EPSILON
    segments: int = DEFAULT_SEGMENTS
    format: str = "text"
    jobs: int = 1

    def certify_config(self, jobs: int | None = None) -> CertifyConfig:
        cap = self.max_bits or max_bits_from_env()
        return CertifyConfig(
            precision=min(self.precision, cap),
            max_bits=cap,
            width=self.width,
            epsilon=self.epsilon,
            segments=self.segments,
            jobs=self.jobs if jobs is None else jobs,
        )


def exit_code(status: Status) -> int:
    return _STATUS_EXIT[status]


def resolve(target: str) -> CatalogEntry:
    try:
        return get(target)
    except KeyError:
        pass
    path = Path(target)
    if not path.exists():
        raise FileNotFoundError(f"{target!r} is neither a builtin id nor a file")
    return load_file(path)


def _iv(x: Interval, digits: int = 6) -> str:
    lo, hi = decimal_bounds(x, digits)
    return f"[{lo}, {hi}]"


def verdict_summary(verdict: StabilityVerdict) -> str:
    parts = [verdict.status.value]
    if verdict.destabilizer is not None:
        ev = verdict.df(verdict.destabilizer.y)
        parts.append(f"destabilizer y={verdict.destabilizer.y}")
        parts.append(f"DF ⊆ {_iv(ev.raw, 4)}")
    return "; ".join(parts)


def candidate_lines(cand) -> list[str]:
    lines = [f"  candidate ({cand.kind}): xi ∈ " + " x ".join(_iv(c, 10) for c in cand.box)]
    ev = cand.evidence
    if isinstance(ev, IVT1D):
        lines.append(f"    F at lower end {_iv(ev.f_lower)}, at upper end {_iv(ev.f_upper)}, "
                     f"{ev.precision} bits")
    elif isinstance(ev, BoxGradient):
        lines.append(f"    epsilon {float(ev.epsilon):g}, {ev.segments} segments per face, "
                     f"{ev.precision} bits")
        for (j, side), m in ev.side_minima:
            lines.append(f"    face xi_{j + 1} {'+' if side > 0 else '-'} eps: outward gradient > {float(m):.4e}")
        lines.append(f"    boundary gradient lower bound {float(ev.min_lower):.4e}")
    else:
        lines.append(f"    zero field ({'symmetry forced' if ev.symmetry_forced else 'F_X,0 vanishes'}); "
                     f"exact F_X,0 = {', '.join(str(x) for x in ev.exact_values)}")
    return lines


def verdict_text(entry_id: str, verdict: StabilityVerdict) -> str:
    lines = [f"{entry_id}: {verdict_summary(verdict)}"]
    if verdict.candidate is not None:
        lines += candidate_lines(verdict.candidate)
    for tc, ev in verdict.df_results:
        exact = f" exact {ev.exact}" if ev.exact is not None else ""
        lines.append(f"  DF {tc}: raw {_iv(ev.raw)} normalized {_iv(ev.value)} "
                     f"{rpt.sign_name(ev)}{exact}")
    for note in verdict.notes:
        lines.append(f"  note: {note}")
    lines.append(f"  precision used: {verdict.precision_used} bits")
    return "\n".join(lines)


# -- commands ------------------------------------------------------------------


def cmd_validate(args, cfg: RunConfig) -> int:
    entry = resolve(args.target)
    rep = validate(entry.dp)
    if cfg.format == "structured":
        doc = {
            "format": rpt.FORMAT, "version": rpt.FORMAT_VERSION, "command": "validate", "id": entry.id,
            "conditions": [
                {"condition": r.condition, "passed": r.passed,
                 "witness": None if r.witness is None else str(r.witness), "message": r.message}
                for r in rep.results
            ],
            "notes": list(rep.notes),
        }
        sys.stdout.write(rpt.dumps(doc))
    else:
        print(entry.id)
        for r in rep.results:
            line = f"  ({r.condition}) {'pass' if r.passed else 'FAIL'}"
            if not r.passed:
                line += f": {r.message}; witness {r.witness}"
            print(line)
        for note in rep.notes:
            print(f"  note: {note}")
    return EXIT_OK if rep.ok else EXIT_ERROR


def cmd_info(args, cfg: RunConfig) -> int:
    entry = resolve(args.target)
    dp = entry.dp
    rep = validate(dp)
    if not rep.ok:
        f = rep.first_failure()
        raise ValidationError(f.condition, f.witness, f.message)
    try:
        match = match_catalog(dp)
        match_id = match.id if match else None
    except AmbiguousMatch as exc:
        match_id = "ambiguous: " + ", ".join(exc.ids)
    info = {
        "id": entry.id,
        "dimension": dp.dim + 1,
        "degree": str(degree(dp)),
        "cox_ring": str(cox_ring(dp)),
        "admissible": [y.name for y in admissible_points(dp)],
        "symmetries": [[list(r) for r in s.matrix] for s in symmetries(dp)],
        "catalog_match": match_id,
    }
    if cfg.format == "structured":
        sys.stdout.write(rpt.dumps({"format": rpt.FORMAT, "version": rpt.FORMAT_VERSION,
                                    "command": "info", **info}))
    else:
        print(entry.id)
        print(f"  degree (-K)^{dp.dim + 1}: {info['degree']}")
        print(f"  Cox ring relations: {info['cox_ring']}")
        print(f"  admissible y: {', '.join(str(y) for y in admissible_points(dp)) or 'none'}")
        print(f"  symmetries: {', '.join(str(s) for s in symmetries(dp))}")
        print(f"  catalog match: {match_id}")
    return EXIT_OK


def cmd_candidate(args, cfg: RunConfig) -> int:
    entry = resolve(args.target)
    conf = cfg.certify_config()
    cand = find_candidate(entry.dp, conf)
    if cfg.format == "structured":
        doc = {"format": rpt.FORMAT, "version": rpt.FORMAT_VERSION, "command": "candidate",
               "id": entry.id, "config": rpt.config_doc(conf), "candidate": rpt.candidate_doc(cand)}
        sys.stdout.write(rpt.dumps(doc))
    else:
        print(entry.id)
        print("\n".join(candidate_lines(cand)))
    return EXIT_OK


def cmd_certify(args, cfg: RunConfig) -> int:
    entry = resolve(args.target)
    conf = cfg.certify_config()
    verdict = certify(entry.dp, conf)
    if cfg.format == "structured":
        doc = rpt.build_report([rpt.verdict_doc(entry, verdict, conf)], "certify", conf)
        _emit(rpt.dumps(doc), args)
    else:
        _emit(verdict_text(entry.id, verdict) + "\n", args)
    return exit_code(verdict.status)


def _emit(text: str, args) -> None:
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _certify_by_id(task):
    entry_id, conf = task
    return certify(get(entry_id).dp, conf)


def xi_matches(entry: CatalogEntry, verdict: StabilityVerdict) -> bool | None:
    ref = entry.expected.xi_reference
    if ref is None:
        return None
    if verdict.candidate is None:
        return False
    mids = verdict.candidate.midpoint
    return len(mids) == len(ref) and all(abs(m - float(r)) <= XI_TOLERANCE for m, r in zip(mids, ref))


def table_rows(entries, cfg: RunConfig):
    """Certify every entry (in parallel if asked); results come back in catalog order."""
    entries = list(entries)
    if cfg.jobs > 1 and len(entries) > 1:
        conf = cfg.certify_config(jobs=1)
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            verdicts = list(pool.map(_certify_by_id, [(e.id, conf) for e in entries]))
    else:
        conf = cfg.certify_config()
        verdicts = [certify(e.dp, conf) for e in entries]
    return conf, list(zip(entries, verdicts))


def _mark(flag) -> str:
    return "-" if flag is None else ("ok" if flag else "MISMATCH")


def cmd_table(args, cfg: RunConfig) -> int:
    if args.target:
        entries = [resolve(t) for t in args.target]
    else:
        entries = threefolds() if args.threefolds else surfaces()
    conf, rows = table_rows(entries, cfg)
    all_ok = True
    cases = []
    text = []
    header = f"{'id':<12} {'deg':>4} {'verdict':<32} {'K-stab':<7} {'xi (computed)':<28} {'xi (ref)':<20} match"
    text.append(header)
    text.append("-" * len(header))
    for entry, verdict in rows:
        deg = degree(entry.dp)
        deg_ok = entry.expected.degree is None or deg == entry.expected.degree
        v_ok = rpt.expected_match(entry, verdict)
        x_ok = xi_matches(entry, verdict)
        ok = deg_ok and v_ok is not False and x_ok is not False
        all_ok &= ok
        mids = ", ".join(f"{m:.5f}" for m in verdict.candidate.midpoint) if verdict.candidate else "-"
        ref = ", ".join(entry.expected.xi_reference) if entry.expected.xi_reference else "-"
        ks = entry.expected.kstable
        ks_s = "-" if ks is None else ("yes" if ks else "no")
        status = verdict.status.value
        if verdict.destabilizer is not None:
            status += f" (y={verdict.destabilizer.y})"
        text.append(f"{entry.id:<12} {str(deg):>4} {status:<32} {ks_s:<7} {mids:<28} {ref:<20} "
                    f"{'ok' if ok else 'MISMATCH'}")
        case = rpt.verdict_doc(entry, verdict, conf)
        case["xi_match"] = x_ok
        cases.append(case)
    n_ok = sum(1 for c in cases if c["expected_match"] is not False and c["xi_match"] is not False)
    text.append(f"{n_ok}/{len(cases)} rows match")
    if cfg.format == "structured":
        _emit(rpt.dumps(rpt.build_report(cases, "table", conf)), args)
    else:
        _emit("\n".join(text) + "\n", args)
    return EXIT_OK if all_ok else EXIT_UNSTABLE


def cmd_verify(args, cfg: RunConfig) -> int:
    doc = rpt.loads(Path(args.target).read_text(encoding="utf-8"))
    results = rpt.reverify(doc, stride=args.stride)
    bad = 0
    for case_id, problems in results.items():
        if problems:
            bad += 1
            print(f"{case_id}: FAILED")
            for p in problems:
                print(f"  {p}")
        else:
            print(f"{case_id}: verified")
    return EXIT_OK if bad == 0 else EXIT_ERROR


# -- argument parsing ----------------------------------------------------------


def _fraction(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a decimal or rational number: {text!r}")
    if q <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return q


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=DEFAULT_BITS, help="starting precision in bits")
    common.add_argument("--max-bits", type=int, default=0,
                        help="precision cap in bits (default: $KSOL_MAX_BITS or library default)")
    common.add_argument("--width", type=_fraction, default=DEFAULT_WIDTH,
                        help="target width of one-dimensional candidate intervals")
    common.add_argument("--epsilon", type=_fraction, default=DEFAULT_EPSILON,
                        help="half side length of candidate boxes")
    common.add_argument("--segments", type=int, default=DEFAULT_SEGMENTS,
                        help="boundary segments per face of a candidate box")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("-o", "--output", help="write the report to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="ksol", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("validate", "check the admissibility conditions of a divisorial polytope"),
        ("info", "degree, Cox ring, admissible points and symmetries"),
        ("candidate", "certified soliton candidate"),
        ("certify", "full K-stability certification"),
    ]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("target", help="builtin id (e.g. dp/13, 3fold/2.30) or data file")
    p = sub.add_parser("table", parents=[common], help="certify the shipped catalog and compare")
    p.add_argument("target", nargs="*", help="restrict to these ids or files")
    p.add_argument("--threefolds", action="store_true", help="use the shipped threefolds")
    p = sub.add_parser("verify", parents=[common], help="re-verify a structured report")
    p.add_argument("target", help="report file")
    p.add_argument("--stride", type=int, default=1,
                   help="re-check every stride-th boundary segment only")
    return parser


COMMANDS = {
    "validate": cmd_validate,
    "info": cmd_info,
    "candidate": cmd_candidate,
    "certify": cmd_certify,
    "table": cmd_table,
    "verify": cmd_verify,
}


def run(command: str, args: argparse.Namespace, config: RunConfig) -> int:
    try:
        return COMMANDS[command](args, config)
    except (ParseError, ValidationError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, KsolError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.precision < 2 or args.jobs < 1 or args.segments < 1:
        parser.error("--precision, --jobs and --segments must be positive")
    config = RunConfig(
        precision=args.precision,
        max_bits=args.max_bits,
        width=args.width,
        epsilon=args.epsilon,
        segments=args.segments,
        format=args.format,
        jobs=args.jobs,
    )
    return run(args.command, args, config)


if __name__ == "__main__":
    sys.exit(main())
