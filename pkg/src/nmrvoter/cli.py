"""Command-line front end: ``nmrvoter {vote,analyze,inject,simulate,gen}``.

Exit codes: 0 success, 1 malformed input or config, 2 no active input.
``inject`` additionally exits 3 when some injection went undetected.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from nmrvoter.core import (DEFAULT_WIDTH, EqualityMatrix, VoterInputSet, build_matrix,
                           compute_isd, format_rows, frequency_profile, reduce_matrix)
from nmrvoter.errors import NotTransitiveError, VoterError, ZeroActiveError
from nmrvoter.selfcheck import CampaignConfig, full_check, run_campaign
from nmrvoter.simulator import SimConfig, dump_trace, run
from nmrvoter.spectral import (DEFAULT_TOLERANCE, block_permutation, char_poly_of,
                               eigenpairs_proper, exact_spectrum, isd_from_spectrum)
from nmrvoter.voter import Voter

EXIT_OK, EXIT_BAD_INPUT, EXIT_ZERO_ACTIVE, EXIT_UNDETECTED = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load_json(inline: Optional[str], path: Optional[str], what: str):
    if inline is not None and path is not None:
        raise InputError(f"give the {what} inline or with --input/--config, not both")
    try:
        if path is not None:
            if path == "-":
                return json.load(sys.stdin)
            with open(path) as fh:
                return json.load(fh)
        if inline is not None:
            return json.loads(inline)
        return json.load(sys.stdin)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {what}: {exc}") from exc


def _emit(obj, fmt: str, pretty_text: Optional[str] = None):
    if fmt == "pretty" and pretty_text is not None:
        print(pretty_text)
    else:
        print(json.dumps(obj, indent=2 if fmt == "pretty" else None))


def _inputs(args) -> VoterInputSet:
    record = _load_json(args.record, args.input, "input record")
    try:
        return VoterInputSet.from_dict(record, width=args.width)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_vote(args) -> int:
    inputs = _inputs(args)
    isd = Voter(inputs.n, args.width).vote(inputs)
    out = isd.to_dict()
    _emit(out, args.format, " ".join(f"{k}={v}" for k, v in out.items()))
    return EXIT_OK


def analyze_matrix(matrix: EqualityMatrix, active=None, tolerance: float = DEFAULT_TOLERANCE) -> dict:
    perm, sizes = block_permutation(matrix)
    report = full_check(matrix, tolerance)
    try:
        pairs = [p.to_dict() for p in eigenpairs_proper(matrix)]
    except NotTransitiveError:
        pairs = None
    out = {
        "matrix": matrix.tolist(),
        "reduced": reduce_matrix(matrix).tolist() if matrix.order > 1 else None,
        "char_poly": char_poly_of(matrix).tolist(),
        "spectrum": exact_spectrum(matrix).to_dict(),
        "block_permutation": {"perm": perm, "sizes": sizes},
        "eigenpairs": pairs,
        "spectral_isd": isd_from_spectrum(matrix, active, tolerance).to_dict(),
        "selfcheck": report.to_dict(),
    }
    return out


def cmd_analyze(args) -> int:
    record = _load_json(args.record, args.input, "input record")
    if isinstance(record, dict) and "matrix" in record:
        try:
            matrix = EqualityMatrix(record["matrix"])
        except (ValueError, TypeError) as exc:
            raise InputError(str(exc)) from exc
        active = record.get("active")
        out = analyze_matrix(matrix, active, args.tolerance)
        out["profile"] = None
        out["isd"] = None
    else:
        try:
            inputs = VoterInputSet.from_dict(record, width=args.width)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        matrix = build_matrix(inputs)
        isd = compute_isd(inputs)
        out = analyze_matrix(matrix, inputs.active, args.tolerance)
        out["profile"] = frequency_profile(inputs).to_dict()
        out["isd"] = isd.to_dict()
    lines = ["matrix:", format_rows(out["matrix"])]
    if out["reduced"] is not None:
        lines += ["reduced:", format_rows(out["reduced"])]
    lines += [f"char_poly: {out['char_poly']}",
              f"spectrum: {json.dumps(out['spectrum']['exact'])}",
              f"selfcheck: {json.dumps(out['selfcheck'])}"]
    _emit(out, args.format, "\n".join(lines))
    return EXIT_OK


def cmd_inject(args) -> int:
    cfg = _load_json(args.record, args.config, "campaign config")
    if isinstance(cfg, dict) and args.tolerance is not None:
        cfg = dict(cfg, tolerance=args.tolerance)
    try:
        campaign = CampaignConfig.from_dict(cfg)
        summary = run_campaign(campaign)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    for case in summary["reports"]:
        if "skipped" in case:
            print(f"seed {case['seed']}: skipped ({case['skipped']})", file=sys.stderr)
    if not args.verbose:
        summary = {k: v for k, v in summary.items() if k != "reports"}
    _emit(summary, args.format)
    return EXIT_UNDETECTED if summary["undetected"] else EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load_json(args.record, args.config, "simulation config") if (
        args.config or args.record) else {}
    try:
        config = SimConfig.from_dict(cfg)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.horizon < 1:
        raise InputError("--horizon must be >= 1")
    text = dump_trace(run(config, args.horizon, args.seed))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.n < 1:
        raise InputError("N must be >= 1")
    try:
        desc = Voter(args.n, args.width).descriptor()
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(desc, args.format)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nmrvoter", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, record_help, *, config=False):
        p.add_argument("record", nargs="?", help=record_help)
        if config:
            p.add_argument("--config", help="JSON file ('-' for stdin)")
        else:
            p.add_argument("--input", help="JSON file ('-' for stdin)")
        p.add_argument("--format", choices=("json", "pretty"), default="json")
        p.add_argument("--width", type=int, default=DEFAULT_WIDTH, help="input word width in bits")

    p = sub.add_parser("vote", help="vote on one input set and print the ISD")
    common(p, "inline JSON {\"values\": [...], \"active\": [...]}")
    p.set_defaults(func=cmd_vote)

    p = sub.add_parser("analyze", help="matrix, spectrum, eigenvectors and self-checks")
    common(p, "inline JSON input record or {\"matrix\": [[...]]}")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("inject", help="run a fault-injection campaign")
    common(p, "inline JSON campaign config", config=True)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--verbose", action="store_true", help="include per-case reports")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("simulate", help="run the NMR-on-demand simulator, JSON Lines trace")
    common(p, "inline JSON simulation config", config=True)
    p.add_argument("--horizon", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="write the trace here instead of stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen", help="descriptor for an N-input voter")
    p.add_argument("n", type=int)
    p.add_argument("--format", choices=("json", "pretty"), default="json")
    p.add_argument("--width", type=int, default=DEFAULT_WIDTH)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ZeroActiveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ZERO_ACTIVE
    except (InputError, VoterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
