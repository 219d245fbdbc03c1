"""Config-driven command line: verify / spectrum / scan / continuum.

Exit codes: 0 success, 1 failed verification check, 2 config error,
3 dimension or degree cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .fock import BASIS_CAP, BasisSizeError
from .lattice import LatticeConfig, LatticeError, build_mode_table
from .operators import DegreeCapError
from .spectra import (
    DENSE_CUTOFF,
    ConvergenceError,
    scan_g,
    scan_rows_to_csv,
    spectrum_rows,
    spectrum_rows_to_csv,
)
from .verify import continuum_energy_check, continuum_rows_to_csv, run_battery

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_CAP = 3


class ConfigError(ValueError):
    pass


def _fraction(value) -> Fraction:
    """Accept JSON numbers or "p/q" strings as exact rationals."""
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, (int, float)):
        return Fraction(value)
    raise ConfigError(f"cannot interpret {value!r} as a rational number")


def load_config(path: str | Path) -> dict:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if "lattice" not in raw:
        raise ConfigError("config is missing the 'lattice' section")
    lat = raw["lattice"]
    try:
        kwargs = {
            "kf": float(lat["kf"]),
            "delta": float(lat["delta"]),
        }
    except KeyError as exc:
        raise ConfigError(f"lattice section is missing {exc}") from exc
    if "L" in lat and lat["L"] is not None:
        kwargs["L"] = float(lat["L"])
    if "c" in lat and lat["c"] is not None:
        kwargs["c"] = float(lat["c"])
    if lat.get("mu") is not None:
        kwargs["mu"] = float(lat["mu"])
    if "boost" in lat and lat["boost"] is not None:
        kwargs["boost"] = tuple(int(x) for x in lat["boost"])
    kwargs["frozen_core"] = bool(lat.get("frozen_core", False))
    if lat.get("shell_points") is not None:
        kwargs["shell_points"] = tuple(
            tuple(int(x) for x in p) for p in lat["shell_points"]
        )
    if lat.get("volume") is not None:
        kwargs["volume"] = _fraction(lat["volume"])
    config = LatticeConfig(**kwargs)
    try:
        config.validate()
        build_mode_table(config)
    except LatticeError as exc:
        raise ConfigError(f"invalid lattice: {exc}") from exc

    caps = raw.get("caps", {})
    return {
        "lattice": config,
        "couplings": [_fraction(g) for g in raw.get("couplings", [-1, -0.5, 0.5, 1])],
        "lambda_values": [
            _fraction(l) for l in raw.get("lambda_values", [-1, 0, 1, 2, "7/3"])
        ],
        "formfactor": raw.get("formfactor", "unit"),
        "seed": int(raw.get("seed", 0)),
        "output_dir": raw.get("output_dir", "out"),
        "basis_cap": int(caps.get("basis", BASIS_CAP)),
        "dense_cutoff": int(caps.get("dense", DENSE_CUTOFF)),
    }


def bundled_config_path(name: str) -> Path:
    """Path of a config shipped with the package (e.g. "minimal")."""
    ref = resources.files("darkpair").joinpath("configs", f"{name}.json")
    return Path(str(ref))


def _resolve_config_arg(value: str) -> Path:
    p = Path(value)
    if p.exists():
        return p
    candidate = bundled_config_path(value.removesuffix(".json"))
    if candidate.exists():
        return candidate
    raise ConfigError(f"config file not found: {value}")


def _outdir(args, cfg) -> Path:
    out = Path(args.out) if args.out else Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_verify(args) -> int:
    cfg = load_config(_resolve_config_arg(args.config))
    seed = args.seed if args.seed is not None else cfg["seed"]
    report = run_battery(
        cfg["lattice"],
        cfg["couplings"],
        cfg["lambda_values"],
        formfactor=cfg["formfactor"],
        seed=seed,
    )
    out = _outdir(args, cfg)
    (out / "report.json").write_text(report.to_json())
    (out / "report.txt").write_text(report.to_text())
    sys.stdout.write(report.to_text())
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


def cmd_spectrum(args) -> int:
    cfg = load_config(_resolve_config_arg(args.config))
    seed = args.seed if args.seed is not None else cfg["seed"]
    table = build_mode_table(cfg["lattice"])
    rows = spectrum_rows(
        table,
        _fraction(args.g),
        formfactor=cfg["formfactor"],
        seed=seed,
        sector=args.sector,
        dense_cutoff=cfg["dense_cutoff"],
        basis_cap=cfg["basis_cap"],
    )
    out = _outdir(args, cfg)
    (out / "spectrum.csv").write_text(spectrum_rows_to_csv(rows))
    sys.stdout.write(f"wrote {len(rows)} eigenvalues to {out / 'spectrum.csv'}\n")
    return EXIT_OK


def cmd_scan(args) -> int:
    cfg = load_config(_resolve_config_arg(args.config))
    seed = args.seed if args.seed is not None else cfg["seed"]
    table = build_mode_table(cfg["lattice"])
    g_values = (
        [_fraction(x) for x in args.g_list.split(",")]
        if args.g_list
        else cfg["couplings"]
    )
    rows = scan_g(
        table,
        g_values,
        formfactor=cfg["formfactor"],
        seed=seed,
        with_variational=not args.no_variational,
        threads=args.threads,
        dense_cutoff=cfg["dense_cutoff"],
        basis_cap=cfg["basis_cap"],
    )
    out = _outdir(args, cfg)
    (out / "scan.csv").write_text(scan_rows_to_csv(rows))
    sys.stdout.write(f"wrote {len(rows)} rows to {out / 'scan.csv'}\n")
    return EXIT_OK


def cmd_continuum(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = continuum_energy_check(args.kf, args.delta, sizes, c=args.c)
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    (out / "continuum.csv").write_text(continuum_rows_to_csv(rows))
    sys.stdout.write(f"wrote {len(rows)} rows to {out / 'continuum.csv'}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darkpair",
        description="Exact engine for pairing-interaction dark states",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True,
                           help="config JSON path or bundled name")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--threads", type=int, default=1, help="worker cap")

    p = sub.add_parser("verify", help="run the identity battery")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", help="eigenvalues in one sector")
    common(p)
    p.add_argument("--g", required=True, help="coupling (number or p/q)")
    p.add_argument("--sector", type=int, default=None,
                   help="particle number (table modes); default: paired sector")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("scan", help="sweep couplings")
    common(p)
    p.add_argument("--g-list", default=None, help="comma-separated couplings")
    p.add_argument("--no-variational", action="store_true",
                   help="skip the variational column")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("continuum", help="counting vs closed forms on large grids")
    common(p, needs_config=False)
    p.add_argument("--kf", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--sizes", required=True, help="comma-separated refinements")
    p.add_argument("--c", type=float, default=1.0, help="dispersion scale")
    p.set_defaults(func=cmd_continuum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except LatticeError as exc:
        sys.stderr.write(f"lattice error: {exc}\n")
        return EXIT_CONFIG
    except (BasisSizeError, DegreeCapError) as exc:
        sys.stderr.write(f"cap exceeded: {exc}\n")
        return EXIT_CAP
    except ConvergenceError as exc:
        sys.stderr.write(
            f"eigensolver did not converge: {exc} "
            f"(best {exc.best_value}, residual {exc.residual})\n"
        )
        return EXIT_CAP


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
