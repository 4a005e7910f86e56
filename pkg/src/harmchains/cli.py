"""
Command-line interface.

Machine-readable output (CSV or one JSON object per line) goes to stdout
or ``--out``; human-readable summaries go to stderr.

Exit codes: 0 ok, 1 usage/config, 2 validation failure, 3 numeric failure,
4 acceptance-check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .analysis import CSV_HEADER, SweepRow, SweepTable, bounds_residual, parse_grid, scaling_fit, sweep
from .config import RunConfig, load_config
from .entropy import block_entropy
from .errors import (BlockOutOfRange, ComplexEigenvalue, ConfigError, DegenerateDesign, DomainError,
                     NonPositiveSpectrum, SingularMatrix, SizeCapExceeded, ValidationFailed)
from .model import MODES, Geometry, Placement, spectrum_gap, validate
from .oracle import equivalence_suite

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_CHECK = 0, 1, 2, 3, 4
LN2 = math.log(2.0)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _config(args) -> RunConfig:
    if not args.config:
        raise ConfigError("--config is required")
    cfg = load_config(args.config)
    try:
        placement = Placement.parse(args.placement) if getattr(args, "placement", None) else None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.with_overrides(
        placement=placement,
        mode=getattr(args, "mode", None),
        grid=getattr(args, "grid", None),
        out=getattr(args, "out", None),
    )


def _unit(args) -> float:
    return 1.0 / LN2 if getattr(args, "bits", False) else 1.0


def cmd_validate(args) -> int:
    cfg = _config(args)
    report = validate(cfg.couplings, cfg.mode, cfg.quadrature_points)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_entropy(args) -> int:
    cfg = _config(args)
    block = cfg.block
    res = block_entropy(cfg.couplings, cfg.geometry, block, cfg.mode)
    k = _unit(args)
    row = [block.l_x, block.l_y, f"{k * res.S:.17g}", f"{k * res.S1:.17g}", f"{k * res.S2:.17g}", ""]
    text = ",".join(CSV_HEADER) + "\n" + ",".join(map(str, row)) + "\n"
    _emit(text, cfg.out)
    unit = "bits" if getattr(args, "bits", False) else "nats"
    _note(f"S={k * res.S:.12g} {unit} (S1={k * res.S1:.12g}, S2={k * res.S2:.12g}) "
          f"block {block.l_x}x{block.l_y} [{block.placement}] on {cfg.geometry.n_x}x{cfg.geometry.n_y}, "
          f"clamped={res.clamp_count}")
    return EXIT_OK


def _grid(cfg: RunConfig):
    if not cfg.grid:
        raise ConfigError("no grid given; use --grid or [run] grid")
    try:
        return parse_grid(cfg.grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_sweep(args) -> int:
    cfg = _config(args)
    grid = _grid(cfg)
    table = sweep(cfg.couplings, cfg.geometry, grid, cfg.placement, cfg.mode,
                  workers=args.workers or cfg.workers)
    k = _unit(args)
    if k != 1.0:
        table.rows = [SweepRow(r.l_x, r.l_y, k * r.S, k * r.S1, k * r.S2, r.wall_ms) for r in table.rows]
    _emit(table.to_csv(timings=args.timings), cfg.out)
    _note(f"{len(table)} rows, model fingerprint {table.fingerprint}")
    return EXIT_OK


def cmd_fit(args) -> int:
    if args.csv == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.csv, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.csv}: {exc}") from None
    try:
        table = SweepTable.from_csv(text)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad sweep CSV: {exc}") from None
    fit = scaling_fit(table)
    record = {"b": fit.b, "a1": fit.a1, "a2": fit.a2, "a0": fit.a0,
              "rms_residual": fit.rms_residual, "rows": fit.n_rows}
    try:
        res = bounds_residual(table)
        record["bounds_r_squared"] = res.r_squared
    except DegenerateDesign:
        record["bounds_r_squared"] = None
    _emit(json.dumps(record) + "\n", args.out)
    _note(f"S ≈ {fit.b:.6g}·lx·ln(ly) {fit.a1:+.6g}·lx {fit.a2:+.6g}·ly {fit.a0:+.6g} "
          f"(rms {fit.rms_residual:.3g}, residual R²={record['bounds_r_squared']})")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    cfg = _config(args)
    records = equivalence_suite(cfg.couplings, cfg.geometry, cfg.mode, all_positions=not args.corner_only)
    worst_s = max(r.entropy_error for r in records)
    worst_mu = max(r.spectrum_error for r in records)
    min_mu = min(r.min_mu for r in records)
    clamps = sum(r.clamp_count for r in records)
    total = sum(r.n_eigenvalues for r in records)
    ok = worst_s < cfg.tolerance and worst_mu < cfg.tolerance and min_mu >= 1.0 - 1e-9
    record = {"blocks": len(records), "max_entropy_error": worst_s, "max_spectrum_error": worst_mu,
              "min_mu": min_mu, "clamp_count": clamps, "eigenvalues": total,
              "tolerance": cfg.tolerance, "pass": ok}
    _emit(json.dumps(record) + "\n", cfg.out)
    _note(f"{'PASS' if ok else 'FAIL'}: {len(records)} blocks, max |ΔS|={worst_s:.3g}, "
          f"max |Δμ|={worst_mu:.3g}, min μ={min_mu:.15g}")
    return EXIT_OK if ok else EXIT_CHECK


def cmd_spectrum(args) -> int:
    cfg = _config(args)
    n_ys = sorted({cfg.geometry.n_y, *(int(v) for v in args.ny_list.split(",") if v.strip())})
    lines = ["n_y,min_freq,max_freq,min_freq_sqrt_ny"]
    scaled = []
    for n_y in n_ys:
        fr = spectrum_gap(cfg.couplings, Geometry(cfg.geometry.n_x, n_y), cfg.mode)
        scaled.append(fr.scaled_min)
        lines.append(f"{n_y},{fr.min_freq:.17g},{fr.max_freq:.17g},{fr.scaled_min:.17g}")
    _emit("\n".join(lines) + "\n", cfg.out)
    spread = float(np.ptp(scaled))
    ok = spread <= 1e-12
    _note(f"{'PASS' if ok else 'FAIL'}: min_freq·√n_y spread {spread:.3g} across n_y={n_ys}")
    return EXIT_OK if ok else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="harmchains", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=False):
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", help="write machine-readable output here instead of stdout")
        p.add_argument("--placement", help="corner | centered | offset=<k>")
        p.add_argument("--mode", choices=MODES)
        if grid:
            p.add_argument("--grid", help='block grid, e.g. "lx=2,4,8;ly=16,32,64"')

    p = sub.add_parser("validate", help="check the positivity assumptions of the model")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("entropy", help="entropy of the configured block")
    common(p)
    p.add_argument("--bits", action="store_true", help="report entropy in bits")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("sweep", help="entropy over a grid of block sizes, as CSV")
    common(p, grid=True)
    p.add_argument("--bits", action="store_true")
    p.add_argument("--workers", type=int, default=None, help="threads for the sweep")
    p.add_argument("--timings", action="store_true", help="fill the wall_ms column (breaks byte-identity)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit the scaling law to a sweep CSV")
    p.add_argument("csv", help="sweep CSV path, or - for stdin")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("oracle-check", help="compare the structured path against dense linear algebra")
    common(p)
    p.add_argument("--corner-only", action="store_true", help="skip non-corner block positions")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("spectrum", help="normal-mode frequency range and its 1/sqrt(n_y) scaling")
    common(p)
    p.add_argument("--ny-list", default="4,16,64,256")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except ValidationFailed as exc:
        _note(exc.report.summary())
        return EXIT_VALIDATION
    except (ConfigError, BlockOutOfRange, SizeCapExceeded, DegenerateDesign) as exc:
        _note(f"error: {exc}")
        return EXIT_USAGE
    except (SingularMatrix, DomainError, ComplexEigenvalue, NonPositiveSpectrum, np.linalg.LinAlgError) as exc:
        _note(f"numeric failure: {exc}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
