"""Command-line front end.

Subcommands compute plot-ready CSV/JSON tables: single-beam spectra, phase
sweeps, joint-absorbance curves, rate-space phase diagrams, CPA reports,
time-domain cross-checks, and synthetic-data generation / fitting.  Output is
deterministic for a fixed config and seed; provenance goes to a sidecar
metadata file, never into the data.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict

import numpy as np

from . import fitting, regimes, timedomain
from .model import (Background, DegenerateResponseError, ModelParams,
                    scattering_matrix, single_beam_spectrum)
from .regimes import WindowTooNarrowError
from .timedomain import DriveSpec, SteadyStateNotConvergedError
from .twoport import (dets_from_observables, joint_absorbance, joint_extrema,
                      delta_psi, wrap_phase, PhaseUndefinedError)

SCHEMA_VERSION = 1
OUTDIR_ENV = "TWOPORT_CMT_OUTDIR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

HEADERS = {
    "spectrum": ["omega_meV", "R1", "R2", "T", "A1", "A2", "B", "abs_detS"],
    "sweep-phase": ["phi_rad", "out1", "out2", "a_joint"],
    "joint": ["omega_meV", "a_min", "a_max", "a_avg", "delta_psi_rad",
              "abs_detS", "abs_detS_reconstructed"],
    "phase-diagram": ["x", "y", "n_peaks", "scc_residual", "wcc_residual",
                      "min_abs_detS"],
    "cpa": ["omega_meV", "abs_detS_min", "phi_star_rad"],
    "oracle-check": ["omega_meV", "phi_rad", "a_joint_closed",
                     "a_joint_oracle", "abs_diff"],
    "synth": ["omega_meV", "kind", "value", "sigma"],
}

DEFAULT_CONFIG = {
    "schema_version": SCHEMA_VERSION,
    "model": {"omega0": 124.5, "gamma_r": 3.0, "gamma_nr": 0.0,
              "gamma_m": 5.0, "omega_rabi": 8.0, "delta_m": 0.0},
    "background": {"r_b": 1.0, "theta_b": 0.0},
    "grid": {"min": 105.0, "max": 145.0, "n": 801},
    "output": {"path": "out.csv", "format": "csv"},
    "seed": 0,
    "sweep_phase": {"omega": 124.5, "n_phi": 64},
    "joint": {"n_phi": 64},
    "phase_diagram": {"x_param": "gamma_m", "x_min": 0.0, "x_max": 10.0,
                      "x_n": 21, "y_param": "gamma_r", "y_min": 0.0,
                      "y_max": 10.0, "y_n": 21},
    "cpa": {"tol": 1e-10},
    "oracle_check": {"n_samples": 4},
    "synth": {"kinds": ["A1"], "noise_sigma": 0.005},
    "fit": {"data": "", "free": ["omega0", "gamma_r", "gamma_m", "omega_rabi"]},
}


class ConfigError(ValueError):
    pass


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = dict(base)
    for key, val in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key: {where}")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config key {where} must be an object")
            out[key] = _merge(base[key], val, where)
        else:
            out[key] = val
    return out


def load_config(args) -> dict:
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    if args.config:
        try:
            with open(args.config) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        if user.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ConfigError("unsupported schema_version")
        cfg = _merge(cfg, user)
    overrides = {}
    for name in ("omega0", "gamma_r", "gamma_nr", "gamma_m", "omega_rabi",
                 "delta_m"):
        v = getattr(args, name, None)
        if v is not None:
            overrides.setdefault("model", {})[name] = v
    for name in ("r_b", "theta_b"):
        v = getattr(args, name, None)
        if v is not None:
            overrides.setdefault("background", {})[name] = v
    if getattr(args, "grid_min", None) is not None:
        overrides.setdefault("grid", {})["min"] = args.grid_min
    if getattr(args, "grid_max", None) is not None:
        overrides.setdefault("grid", {})["max"] = args.grid_max
    if getattr(args, "grid_n", None) is not None:
        overrides.setdefault("grid", {})["n"] = args.grid_n
    if getattr(args, "output", None) is not None:
        overrides.setdefault("output", {})["path"] = args.output
    if getattr(args, "format", None) is not None:
        overrides.setdefault("output", {})["format"] = args.format
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return _merge(cfg, overrides)


def _build_model(cfg: dict) -> ModelParams:
    try:
        return ModelParams(**cfg["model"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"model: {exc}")


def _build_background(cfg: dict) -> Background:
    try:
        return Background(**cfg["background"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"background: {exc}")


def _build_grid(cfg: dict) -> np.ndarray:
    g = cfg["grid"]
    if not (g["n"] >= 2 and g["max"] > g["min"]):
        raise ConfigError("grid: need max > min and n >= 2")
    return np.linspace(g["min"], g["max"], int(g["n"]))


def _resolve_output(path: str) -> str:
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(path):
        return os.path.join(outdir, path)
    return path


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def write_output(cfg: dict, command: str, header: list[str], rows,
                 extra_meta: dict | None = None) -> str:
    path = _resolve_output(cfg["output"]["path"])
    fmt = cfg["output"]["format"]
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format must be csv or json, got {fmt!r}")
    meta = {"schema_version": SCHEMA_VERSION, "command": command,
            "config": cfg}
    if extra_meta:
        meta.update(extra_meta)
    if fmt == "csv":
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        with open(path + ".meta.json", "w") as fh:
            json.dump(meta, fh, sort_keys=True, indent=2)
            fh.write("\n")
    else:
        doc = {"meta": meta, "columns": header,
               "rows": [[v if isinstance(v, str) else float(v) for v in row]
                        for row in rows]}
        with open(path, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return path


def cmd_spectrum(cfg: dict) -> int:
    p = _build_model(cfg)
    bg = _build_background(cfg)
    grid = _build_grid(cfg)
    t = single_beam_spectrum(p, bg, grid)
    rows = list(zip(t.omega, t.R1, t.R2, t.T, t.A1, t.A2, t.B, t.abs_dets))
    write_output(cfg, "spectrum", HEADERS["spectrum"], rows)
    return EXIT_OK


def cmd_sweep_phase(cfg: dict) -> int:
    p = _build_model(cfg)
    bg = _build_background(cfg)
    block = cfg["sweep_phase"]
    S = scattering_matrix(p, bg, float(block["omega"]))
    phis = np.linspace(0.0, 2 * math.pi, int(block["n_phi"]), endpoint=False)
    rows = []
    for phi in phis:
        a, out1, out2 = joint_absorbance(S, phi)
        rows.append((phi, out1, out2, a))
    write_output(cfg, "sweep-phase", HEADERS["sweep-phase"], rows)
    return EXIT_OK


def _fit_sinusoid(phis: np.ndarray, vals: np.ndarray):
    """Least-squares fit of A + B sin(phi + c); returns (A, B, c)."""
    design = np.column_stack([np.ones_like(phis), np.sin(phis), np.cos(phis)])
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    a0, ps, pc = coef
    return float(a0), float(math.hypot(ps, pc)), float(math.atan2(pc, ps))


def cmd_joint(cfg: dict) -> int:
    p = _build_model(cfg)
    bg = _build_background(cfg)
    grid = _build_grid(cfg)
    n_phi = int(cfg["joint"]["n_phi"])
    phis = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    rows = []
    for w in grid:
        S = scattering_matrix(p, bg, float(w))
        ext = joint_extrema(S)
        abs_det = abs(S.det())
        try:
            dpsi = delta_psi(S)
        except PhaseUndefinedError:
            rows.append((w, ext.a_min, ext.a_max, ext.a_avg, math.nan,
                         abs_det, math.nan))
            continue
        out = np.array([joint_absorbance(S, phi)[1:] for phi in phis])
        _, _, c1 = _fit_sinusoid(phis, out[:, 0])
        _, _, c2 = _fit_sinusoid(phis, out[:, 1])
        dpsi_fit = wrap_phase(c2 - c1)
        recon = dets_from_observables(abs(S.s12) ** 2, abs(S.s11) ** 2,
                                      abs(S.s22) ** 2, dpsi_fit)
        rows.append((w, ext.a_min, ext.a_max, ext.a_avg, dpsi, abs_det, recon))
    write_output(cfg, "joint", HEADERS["joint"], rows)
    return EXIT_OK


def cmd_phase_diagram(cfg: dict) -> int:
    p = _build_model(cfg)
    block = cfg["phase_diagram"]
    xs = np.linspace(block["x_min"], block["x_max"], int(block["x_n"]))
    ys = np.linspace(block["y_min"], block["y_max"], int(block["y_n"]))
    try:
        loci = regimes.critical_loci(p, block["x_param"], xs,
                                     block["y_param"], ys)
    except ValueError as exc:
        raise ConfigError(f"phase_diagram: {exc}")
    rows = []
    from dataclasses import replace
    for j, yv in enumerate(ys):
        for i, xv in enumerate(xs):
            pt = replace(p, **{block["x_param"]: float(xv),
                               block["y_param"]: float(yv)})
            rows.append((xv, yv, regimes.count_peaks(pt),
                         loci.scc_residual[j, i], loci.wcc_residual[j, i],
                         loci.min_abs_dets[j, i]))
    write_output(cfg, "phase-diagram", HEADERS["phase-diagram"], rows)
    return EXIT_OK


def cmd_cpa(cfg: dict) -> int:
    p = _build_model(cfg)
    pts = regimes.find_cpa(p, tol=float(cfg["cpa"]["tol"]))
    rows = [(pt.omega, pt.dets_min, pt.phi_star) for pt in pts]
    write_output(cfg, "cpa", HEADERS["cpa"], rows,
                 extra_meta={"empty_result": not rows})
    return EXIT_OK


def cmd_oracle_check(cfg: dict) -> int:
    p = _build_model(cfg)
    bg = _build_background(cfg)
    g = cfg["grid"]
    rng = np.random.default_rng(int(cfg["seed"]))
    n = int(cfg["oracle_check"]["n_samples"])
    rows = []
    for _ in range(n):
        w = float(rng.uniform(g["min"], g["max"]))
        phi = float(rng.uniform(-math.pi, math.pi))
        closed = joint_absorbance(scattering_matrix(p, bg, w), phi)[0]
        oracle = timedomain.oracle_scattering(p, bg, DriveSpec(omega=w, phi=phi))
        rows.append((w, phi, closed, oracle.a_joint,
                     abs(closed - oracle.a_joint)))
    write_output(cfg, "oracle-check", HEADERS["oracle-check"], rows)
    return EXIT_OK


def cmd_synth(cfg: dict) -> int:
    p = _build_model(cfg)
    bg = _build_background(cfg)
    grid = _build_grid(cfg)
    block = cfg["synth"]
    for kind in block["kinds"]:
        if kind not in fitting.KINDS:
            raise ConfigError(f"synth.kinds: unknown kind {kind!r}")
    ds = fitting.synth_dataset(p, bg, grid, block["kinds"],
                               float(block["noise_sigma"]), int(cfg["seed"]))
    rows = list(zip(ds.omega, ds.kind, ds.value, ds.sigma))
    write_output(cfg, "synth", HEADERS["synth"], rows)
    return EXIT_OK


def cmd_fit(cfg: dict) -> int:
    init = _build_model(cfg)
    bg = _build_background(cfg)
    block = cfg["fit"]
    if not block["data"]:
        raise ConfigError("fit.data: dataset path required")
    try:
        data = fitting.SpectrumDataset.from_csv(block["data"])
    except (OSError, ValueError) as exc:
        raise ConfigError(f"fit.data: {exc}")
    try:
        result = fitting.fit_params(data, init, free=tuple(block["free"]),
                                    background=bg)
    except ValueError as exc:
        raise ConfigError(f"fit: {exc}")
    path = _resolve_output(cfg["output"]["path"])
    doc = {
        "meta": {"schema_version": SCHEMA_VERSION, "command": "fit",
                 "config": cfg},
        "params": asdict(result.params),
        "background": asdict(result.background),
        "residual": result.residual,
        "n_iter": result.n_iter,
        "converged": result.converged,
        "param_sigma": result.param_sigma,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep-phase": cmd_sweep_phase,
    "joint": cmd_joint,
    "phase-diagram": cmd_phase_diagram,
    "cpa": cmd_cpa,
    "oracle-check": cmd_oracle_check,
    "synth": cmd_synth,
    "fit": cmd_fit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twoport-cmt",
        description="Two-port coupled-oscillator scattering toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--output", help="output file path")
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--seed", type=int)
        for pname in ("omega0", "gamma_r", "gamma_nr", "gamma_m",
                      "omega_rabi", "delta_m"):
            sp.add_argument(f"--{pname.replace('_', '-')}", dest=pname,
                            type=float)
        sp.add_argument("--r-b", dest="r_b", type=float)
        sp.add_argument("--theta-b", dest="theta_b", type=float)
        sp.add_argument("--grid-min", type=float)
        sp.add_argument("--grid-max", type=float)
        sp.add_argument("--grid-n", type=int)
        if name == "sweep-phase":
            sp.add_argument("--omega", type=float)
            sp.add_argument("--n-phi", type=int)
        if name == "joint":
            sp.add_argument("--n-phi", type=int)
        if name == "cpa":
            sp.add_argument("--tol", type=float)
        if name == "oracle-check":
            sp.add_argument("--n-samples", type=int)
        if name == "synth":
            sp.add_argument("--kinds", nargs="+")
            sp.add_argument("--noise-sigma", type=float)
        if name == "fit":
            sp.add_argument("--data")
            sp.add_argument("--free", nargs="+")
    return parser


def _apply_subcommand_flags(cfg: dict, args) -> dict:
    over: dict = {}
    if args.command == "sweep-phase":
        blk = {}
        if getattr(args, "omega", None) is not None:
            blk["omega"] = args.omega
        if getattr(args, "n_phi", None) is not None:
            blk["n_phi"] = args.n_phi
        if blk:
            over["sweep_phase"] = blk
    elif args.command == "joint":
        if getattr(args, "n_phi", None) is not None:
            over["joint"] = {"n_phi": args.n_phi}
    elif args.command == "cpa":
        if getattr(args, "tol", None) is not None:
            over["cpa"] = {"tol": args.tol}
    elif args.command == "oracle-check":
        if getattr(args, "n_samples", None) is not None:
            over["oracle_check"] = {"n_samples": args.n_samples}
    elif args.command == "synth":
        blk = {}
        if getattr(args, "kinds", None) is not None:
            blk["kinds"] = args.kinds
        if getattr(args, "noise_sigma", None) is not None:
            blk["noise_sigma"] = args.noise_sigma
        if blk:
            over["synth"] = blk
    elif args.command == "fit":
        blk = {}
        if getattr(args, "data", None) is not None:
            blk["data"] = args.data
        if getattr(args, "free", None) is not None:
            blk["free"] = args.free
        if blk:
            over["fit"] = blk
    return _merge(cfg, over) if over else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        cfg = _apply_subcommand_flags(cfg, args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateResponseError, SteadyStateNotConvergedError,
            WindowTooNarrowError) as exc:
        print(f"numerical error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
