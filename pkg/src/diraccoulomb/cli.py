"""Command-line interface.

Exit codes: 0 success, 1 numerical or validity failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import report
from .core import CONVENTIONS, STANDARD, Branch, Channel, Couplings
from .errors import DiracCoulombError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _kappas(values: Sequence[str] | None) -> tuple[Channel, ...] | None:
    """--kappa may repeat and each value may be a comma list."""
    if values is None:
        return None
    channels: list[Channel] = []
    for raw in values:
        for part in raw.split(","):
            part = part.strip()
            if not part:
                continue
            try:
                ch = Channel.from_kappa(int(part))
            except ValueError as exc:
                raise UsageError(f"invalid --kappa value {part!r}: {exc}") from None
            if ch not in channels:
                channels.append(ch)
    if not channels:
        raise UsageError("the channel list is empty")
    return tuple(channels)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a1", type=float, default=None, help="vector coupling strength")
    common.add_argument("--a2", type=float, default=None, help="scalar coupling strength")
    common.add_argument("--mass", type=float, default=1.0, help="rest mass; energies are printed as E/m")
    common.add_argument("--kappa", action="append", metavar="K", help="channel K (repeatable, or a comma list)")
    common.add_argument("--nmax", type=_positive_int, default=4)
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--format", choices=("csv", "records"), default="csv")
    common.add_argument("--ntilde-convention", choices=CONVENTIONS, default=STANDARD)

    parser = argparse.ArgumentParser(prog="diraccoulomb", description="Dirac-Coulomb bound-state spectra and checks")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("spectrum", parents=[common], help="closed-form levels for each channel")
    sub.add_parser("verify", parents=[common], help="compare the closed form with both numerical oracles")

    ident = sub.add_parser("identities", parents=[common], help="random checks of the transformation identities")
    ident.add_argument("--samples", type=int, default=1000)
    ident.add_argument("--seed", type=int, default=0)
    ident.add_argument("--force-point", action="append", default=[], metavar="K=..,a1=..,a2=..")

    wave = sub.add_parser("wavefunction", parents=[common], help="tabulate r g(r) and r f(r) for one level")
    wave.add_argument("--n", type=_positive_int, required=True, help="principal number of the level")
    wave.add_argument("--branch", choices=[b.value for b in Branch], default=None)
    wave.add_argument("--rmin", type=float, default=1e-6)
    wave.add_argument("--rmax", type=float, default=None)
    wave.add_argument("--points", type=int, default=4000)
    return parser


def _couplings(args, a1_default=0.0, a2_default=0.0) -> Couplings:
    a1 = a1_default if args.a1 is None else args.a1
    a2 = a2_default if args.a2 is None else args.a2
    try:
        return Couplings(a1, a2, args.mass)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config(args, channels) -> report.RunConfig:
    try:
        return report.RunConfig(
            couplings=_couplings(args),
            channels=channels,
            n_max=args.nmax,
            tolerance=args.tol,
            output_format=args.format,
            seed=getattr(args, "seed", 0),
            convention=args.ntilde_convention,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_spectrum(args, out, err) -> int:
    channels = _kappas(args.kappa) or (Channel.from_kappa(-1),)
    cfg = _config(args, channels)
    rows, failures = report.spectrum_rows(cfg)
    for msg in failures:
        print(f"error: {msg}", file=err)
    out.write(report.render(rows, report.SPECTRUM_COLUMNS, cfg.output_format))
    return EXIT_FAIL if len(failures) == len(cfg.channels) else EXIT_OK


def cmd_verify(args, out, err) -> int:
    channels = _kappas(args.kappa)
    if channels is None:
        channels = tuple(Channel.from_kappa(k) for k in report.DEFAULT_VERIFY_KAPPAS)
    cfg = _config(args, channels)
    a1s = report.DEFAULT_VERIFY_COUPLINGS if args.a1 is None else (args.a1,)
    a2s = report.DEFAULT_VERIFY_COUPLINGS if args.a2 is None else (args.a2,)
    points = [Couplings(a1, a2, args.mass) for a1 in a1s for a2 in a2s]
    outcome = report.verify_rows(points, channels, cfg.n_max, cfg.tolerance, cfg.convention)
    for msg in outcome.skipped:
        print(f"skipped: {msg}", file=err)
    out.write(report.render(outcome.rows, report.VERIFY_COLUMNS, cfg.output_format))
    if not outcome.passed:
        print(f"error: {outcome.failures} comparison(s) outside tolerance {report.fmt(cfg.tolerance)}", file=err)
        return EXIT_FAIL
    return EXIT_OK


def cmd_identities(args, out, err) -> int:
    if args.samples < 0:
        raise UsageError("--samples must be >= 0")
    try:
        forced = [report.parse_point(p) for p in args.force_point]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    outcome = report.identity_sweep(args.samples, args.seed, forced)
    for p in outcome.skipped:
        print(f"skipped-degenerate: {p.describe()}", file=err)
    out.write(report.render(outcome.rows(), report.IDENTITY_COLUMNS, args.format))
    if not outcome.passed:
        for name, p in outcome.worst.items():
            if outcome.maxima[name] >= report.IDENTITY_LIMIT:
                print(f"error: {name} residual {report.fmt(outcome.maxima[name])} at {p.describe()}", file=err)
        return EXIT_FAIL
    return EXIT_OK


def cmd_wavefunction(args, out, err) -> int:
    channels = _kappas(args.kappa) or (Channel.from_kappa(-1),)
    if len(channels) != 1:
        raise UsageError("wavefunction takes exactly one --kappa")
    if args.points < 100:
        raise UsageError("--points must be >= 100")
    c = _couplings(args)
    branch = Branch(args.branch) if args.branch else None
    try:
        line = report.find_line(c, channels[0], args.n, branch, args.ntilde_convention)
    except (LookupError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAIL
    if not line.physical:
        print(f"error: level is not a bound state: {line.rejection_reason}", file=err)
        return EXIT_FAIL
    try:
        grid = report.default_wave_grid(line, args.rmin, args.rmax, args.points)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    meta, rows = report.wavefunction_table(line, c, grid)
    out.write(report.render(rows, report.WAVEFUNCTION_COLUMNS, args.format, preamble=meta))
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "identities": cmd_identities,
    "wavefunction": cmd_wavefunction,
}


def _attach_kappa_values(argv: Sequence[str]) -> list[str]:
    """Glue '--kappa -1,2' into '--kappa=-1,2'; argparse would read the
    comma list as an unknown option."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok == "--kappa":
            nxt = next(it, None)
            if nxt is not None and nxt[:1] == "-" and nxt[1:2].isdigit():
                out.append(f"--kappa={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    argv = _attach_kappa_values(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out, err)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except DiracCoulombError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAIL


def run() -> None:
    try:
        code = main()
        sys.stdout.flush()
    except BrokenPipeError:
        # output consumer went away (e.g. piped into head)
        sys.stderr.close()
        code = EXIT_OK
    sys.exit(code)
