"""Command-line front end: writes CSV grids/tables and JSON summaries.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import eigen, fountain, model, phasespace
from .errors import GravPhaseError, RegistryError
from .io import atomic_write_text

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 2, 3, 4
COMMANDS = ("spectrum", "eigenstate", "wigner", "evolve", "fountain", "eotvos")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    species: model.MassPair
    ctx: model.PhysicsContext
    out: Path | None
    meta: bool = True
    grid: dict = field(default_factory=dict)
    args: argparse.Namespace | None = None


# --- formatting ---------------------------------------------------------------


def csv_num(x: float) -> str:
    return f"{x:.12g}"


def json_num(x: float):
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.15g}")


def dump_json(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def meta_lines(cfg: RunConfig, extra: dict | None = None) -> list[str]:
    if not cfg.meta:
        return []
    info = {
        "command": cfg.command,
        "generated": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "units": cfg.ctx.unit_mode.value,
        "hbar": repr(cfg.ctx.hbar),
        "g_ref": repr(cfg.ctx.g_ref),
        "species": cfg.species.label or "custom",
        "m_i": repr(cfg.species.m_i),
        "m_g": repr(cfg.species.m_g),
    }
    info.update(extra or {})
    return [f"# {k}: {v}" for k, v in info.items()]


def grid_meta(cfg: RunConfig, extra: dict) -> dict:
    if not cfg.meta:
        return {}
    return {line[2:].split(": ", 1)[0]: line[2:].split(": ", 1)[1] for line in meta_lines(cfg, extra)}


def write_or_print(cfg: RunConfig, text: str, suffix: str = "") -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        path = cfg.out if not suffix else cfg.out.with_name(cfg.out.name + suffix)
        atomic_write_text(path, text)


# --- state specs ----------------------------------------------------------------

_STATE_PARAMS = {
    "gaussian": {"z0": 0.0, "p0": 0.0, "sigma": None},
    "cat": {"z0": 0.0, "p1": None, "p2": None, "sigma": None},
    "eigen": {"E": None, "N": 1.0},
    "incoherent": {"E0": None, "sigma": None, "N": 1.0},
}


def parse_state(spec: str) -> tuple[str, dict]:
    """Parse ``kind:key=value,...``."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind not in _STATE_PARAMS:
        raise UsageError(f"unknown state kind {kind!r} in --state (expected one of {sorted(_STATE_PARAMS)})")
    params = dict(_STATE_PARAMS[kind])
    for token in filter(None, (t.strip() for t in rest.split(","))):
        key, eq, value = token.partition("=")
        if not eq or key not in params:
            raise UsageError(f"malformed state token {token!r}")
        try:
            params[key] = float(value)
        except ValueError:
            raise UsageError(f"malformed state token {token!r}") from None
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise UsageError(f"state {kind!r} is missing parameters: {', '.join(missing)}")
    return kind, params


def build_field(kind: str, params: dict, cfg: RunConfig) -> phasespace.WignerField:
    m = cfg.species.m_i
    if kind == "gaussian":
        return phasespace.gaussian_state(params["z0"], params["p0"], params["sigma"], cfg.ctx, m)
    if kind == "cat":
        return phasespace.cat_state(params["z0"], params["p1"], params["p2"], params["sigma"], cfg.ctx, m)
    if kind == "eigen":
        state = eigen.Eigenstate.from_energy(params["E"], cfg.species, cfg.ctx, params["N"])
        return state.wigner_field()
    spec = eigen.IncoherentSpec.build(params["E0"], params["sigma"], cfg.species, cfg.ctx)
    return eigen.incoherent_field(spec, cfg.species, cfg.ctx, params["N"])


def grid_axes(fld: phasespace.WignerField, cfg: RunConfig):
    n = cfg.grid.get("n", phasespace.DEFAULT_POINTS)
    z_axis, p_axis = fld.axes(n, n)
    g = cfg.grid

    def bound(key, default):
        return default if g.get(key) is None else g[key]

    z_axis = np.linspace(bound("z_min", z_axis[0]), bound("z_max", z_axis[-1]), n)
    p_axis = np.linspace(bound("p_min", p_axis[0]), bound("p_max", p_axis[-1]), n)
    if not (z_axis[-1] > z_axis[0] and p_axis[-1] > p_axis[0]):
        raise UsageError("grid bounds must satisfy min < max")
    return z_axis, p_axis


# --- commands -------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> None:
    levels = cfg.args.levels
    if levels < 1:
        raise UsageError("--levels must be >= 1")
    rows = eigen.bouncer_spectrum(levels, cfg.species, cfg.ctx)
    lines = meta_lines(cfg, {"levels": levels})
    lines.append("n,a_zero,E_joule,E_eV,E_jwkb_joule,jwkb_rel_err")
    for lvl in rows:
        e_jwkb = eigen.jwkb_energy(lvl.n, cfg.species, cfg.ctx)
        e_ev = model.joule_to_ev(lvl.E_n) if not cfg.ctx.natural_units else float("nan")
        rel = abs(e_jwkb - lvl.E_n) / lvl.E_n
        lines.append(
            ",".join([str(lvl.n), csv_num(lvl.a), csv_num(lvl.E_n), csv_num(e_ev), csv_num(e_jwkb), csv_num(rel)])
        )
    write_or_print(cfg, "\n".join(lines) + "\n")


def cmd_eigenstate(cfg: RunConfig) -> None:
    if cfg.out is None:
        raise UsageError("eigenstate requires --out PREFIX")
    state = eigen.Eigenstate.from_energy(cfg.args.energy, cfg.species, cfg.ctx)
    fld = state.wigner_field()
    z_axis, p_axis = grid_axes(fld, cfg)
    u = eigen.eigenfunction_u(z_axis, state)
    lines = meta_lines(cfg, {"E": repr(state.E), "epsilon": repr(state.epsilon), "k": repr(state.k)})
    lines.append("z,u")
    lines += [f"{csv_num(a)},{csv_num(b)}" for a, b in zip(z_axis, u)]
    atomic_write_text(cfg.out.with_name(cfg.out.name + "_u.csv"), "\n".join(lines) + "\n")
    grid = fld.sample(z_axis, p_axis)
    grid.to_csv(
        cfg.out.with_name(cfg.out.name + "_wigner.csv"),
        grid_meta(cfg, {"E": repr(state.E), "t": 0.0}),
        include_meta=cfg.meta,
    )
    report = eigen.marginal_identity_check(state)
    summary = {
        "E": json_num(state.E),
        "epsilon": json_num(state.epsilon),
        "k": json_num(state.k),
        "z_E": json_num(state.z_E),
        "marginal_max_rel_dev": json_num(report.max_relative_deviation),
        "turning_point_integral": json_num(report.turning_point_integral),
    }
    atomic_write_text(cfg.out.with_name(cfg.out.name + "_marginal.json"), dump_json(summary))


def cmd_wigner(cfg: RunConfig) -> None:
    if cfg.out is None:
        raise UsageError("wigner requires --out FILE")
    kind, params = parse_state(cfg.args.state)
    fld = build_field(kind, params, cfg)
    z_axis, p_axis = grid_axes(fld, cfg)
    grid = fld.sample(z_axis, p_axis)
    grid.to_csv(cfg.out, grid_meta(cfg, {"state": cfg.args.state, "t": 0.0}), include_meta=cfg.meta)


def parse_times(text: str) -> list[float]:
    try:
        times = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"malformed --times {text!r}") from None
    if not times:
        raise UsageError("--times must list at least one time")
    return times


def cmd_evolve(cfg: RunConfig) -> None:
    if cfg.out is None:
        raise UsageError("evolve requires --out PREFIX")
    kind, params = parse_state(cfg.args.state)
    times = parse_times(cfg.args.times)
    fld = build_field(kind, params, cfg)
    base_axes = grid_axes(fld, cfg)
    for index, t in enumerate(times):
        if cfg.args.free:
            frame = phasespace.evolve_free(fld, t, cfg.species.m_i)
            Z, P = 0.0, 0.0
        else:
            frame = phasespace.evolve_linear(fld, t, cfg.species, cfg.ctx)
            Z, P = phasespace.linear_shift(t, cfg.species, cfg.ctx)
        axes = base_axes if cfg.args.fixed_window else grid_axes(frame, cfg)
        grid = frame.sample(*axes)
        meta = grid_meta(cfg, {"state": cfg.args.state, "t": repr(t), "Z_l": repr(Z), "P_l": repr(P), "free": cfg.args.free})
        grid.to_csv(cfg.out.with_name(f"{cfg.out.name}_t{index}.csv"), meta, include_meta=cfg.meta)


def fountain_record(fcfg: fountain.FountainConfig, sigma_z: float) -> dict:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", fountain.RecoilRatioWarning)
        res = fountain.run(fcfg) if fcfg.tau > 0 else None
    delta_phi = fountain.fountain_phase(fcfg)
    oracle = fountain.two_path_oracle(fcfg, sigma_z)
    rel = abs(oracle - delta_phi) / abs(delta_phi) if delta_phi else abs(oracle)
    return {
        "delta_phi": delta_phi,
        "p_ground": fountain.ground_probability(fcfg),
        "crescent_phase": res.crescent_phase if res else 0.0,
        "delta_e_joule": res.delta_E if res else 0.0,
        "oracle_phase": oracle,
        "oracle_rel_err": rel,
    }


def parse_sweep(text: str) -> tuple[str, np.ndarray]:
    name, eq, rng = text.partition("=")
    parts = rng.split(":")
    if not eq or name not in ("tau", "k_laser", "k") or len(parts) != 3:
        raise UsageError(f"malformed --sweep {text!r}; expected tau=START:STOP:COUNT")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"malformed --sweep {text!r}") from None
    if count < 1:
        raise UsageError("--sweep count must be >= 1")
    return ("k_laser" if name == "k" else name), np.linspace(start, stop, count)


def cmd_fountain(cfg: RunConfig) -> None:
    a = cfg.args
    missing = [flag for flag, v in (("--k-laser", a.k_laser), ("--tau", a.tau)) if v is None]
    if a.sweep:
        name, _ = parse_sweep(a.sweep)
        missing = [f for f in missing if f.lstrip("-").replace("-", "_") != name]
    if missing:
        raise UsageError(f"fountain requires {' and '.join(missing)}")
    sigma_z = a.sigma_z if a.sigma_z is not None else (1.0 if cfg.ctx.natural_units else 1e-6)

    def config(k_laser, tau):
        return fountain.FountainConfig(k_laser, tau, cfg.species, cfg.ctx, a.energy)

    if a.sweep:
        name, values = parse_sweep(a.sweep)
        lines = meta_lines(cfg, {"sweep": a.sweep})
        lines.append("k_laser,tau,gtilde,delta_phi,p_ground,crescent_phase,delta_e_joule")
        for v in values:
            fcfg = config(v, a.tau) if name == "k_laser" else config(a.k_laser, v)
            rec = fountain_record(fcfg, sigma_z)
            lines.append(
                ",".join(
                    csv_num(x)
                    for x in (
                        fcfg.k_laser,
                        fcfg.tau,
                        fcfg.gtilde,
                        rec["delta_phi"],
                        rec["p_ground"],
                        rec["crescent_phase"],
                        rec["delta_e_joule"],
                    )
                )
            )
        write_or_print(cfg, "\n".join(lines) + "\n")
        return
    rec = fountain_record(config(a.k_laser, a.tau), sigma_z)
    write_or_print(cfg, dump_json({k: json_num(v) for k, v in rec.items()}))


def cmd_eotvos(cfg: RunConfig) -> None:
    a = cfg.args
    registry = model.load_registry(a.registry)
    sa = model.lookup_species(a.species_a, registry)
    sb = model.lookup_species(a.species_b, registry)
    out = {
        "species_a": sa.label,
        "species_b": sb.label,
        "ratio_a": json_num(sa.ratio()),
        "ratio_b": json_num(sb.ratio()),
        "gtilde_a": json_num(model.specific_acceleration(sa, cfg.ctx)),
        "gtilde_b": json_num(model.specific_acceleration(sb, cfg.ctx)),
        "eta": json_num(model.eotvos(sa, sb)),
    }
    write_or_print(cfg, dump_json(out))


HANDLERS = {
    "spectrum": cmd_spectrum,
    "eigenstate": cmd_eigenstate,
    "wigner": cmd_wigner,
    "evolve": cmd_evolve,
    "fountain": cmd_fountain,
    "eotvos": cmd_eotvos,
}


# --- argument parsing -----------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--natural", action="store_true", help="natural units: hbar = g = 1, unit masses")
    p.add_argument("--hbar", type=float, help="override hbar")
    p.add_argument("--g", type=float, dest="g_ref", help="override reference acceleration")
    p.add_argument("--species", help="species label from the registry (default rb87, or unit with --natural)")
    p.add_argument("--registry", help="JSON species registry file")
    p.add_argument("--mass-i", type=float, help="inertial mass (kg)")
    p.add_argument("--mass-g", type=float, help="gravitational mass (kg)")
    p.add_argument("--out", type=Path, help="output path or prefix")
    p.add_argument("--no-meta", action="store_true", help="omit '#' metadata lines")


def _grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=phasespace.DEFAULT_POINTS, help="grid points per axis")
    for name in ("z-min", "z-max", "p-min", "p-max"):
        p.add_argument(f"--{name}", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gravphase", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="quantum-bouncer spectrum with JWKB comparison")
    _common(p)
    p.add_argument("--levels", type=int, default=10)

    p = sub.add_parser("eigenstate", help="u_E samples, W_E grid and marginal-identity residual")
    _common(p)
    _grid(p)
    p.add_argument("--energy", type=float, required=True)

    p = sub.add_parser("wigner", help="sample a state's Wigner function")
    _common(p)
    _grid(p)
    p.add_argument("--state", required=True, help="e.g. gaussian:z0=0,p0=1,sigma=0.5")

    p = sub.add_parser("evolve", help="evolve a state in the linear potential")
    _common(p)
    _grid(p)
    p.add_argument("--state", required=True)
    p.add_argument("--times", required=True, help="comma-separated times")
    p.add_argument("--free", action="store_true", help="free evolution (no potential)")
    p.add_argument("--fixed-window", action="store_true", help="use the t=0 grid for every frame")

    p = sub.add_parser("fountain", help="fountain phase, fringe probability and crescent area")
    _common(p)
    p.add_argument("--k-laser", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--energy", type=float, help="launch energy for the crescent (default from tau)")
    p.add_argument("--sigma-z", type=float, help="packet width for the two-path oracle")
    p.add_argument("--sweep", help="tau=START:STOP:COUNT or k=START:STOP:COUNT")

    p = sub.add_parser("eotvos", help="Eotvos parameter of two registry species")
    _common(p)
    p.add_argument("--species-a", required=True)
    p.add_argument("--species-b", required=True)
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    if args.natural:
        ctx = model.PhysicsContext.natural(
            hbar=args.hbar if args.hbar is not None else 1.0,
            g_ref=args.g_ref if args.g_ref is not None else 1.0,
        )
        default_label = "unit"
    else:
        ctx = model.PhysicsContext.si(
            hbar=args.hbar if args.hbar is not None else model.HBAR_SI,
            g_ref=args.g_ref if args.g_ref is not None else model.G_STANDARD,
        )
        default_label = "rb87"
    if args.mass_i is not None or args.mass_g is not None:
        if args.mass_i is None or args.mass_g is None:
            raise UsageError("--mass-i and --mass-g must be given together")
        species = model.MassPair(args.mass_i, args.mass_g, "custom")
    else:
        species = model.lookup_species(args.species or default_label, model.load_registry(args.registry))
    grid = {}
    if hasattr(args, "n"):
        if args.n < 2:
            raise UsageError("--n must be >= 2")
        grid = {"n": args.n, "z_min": args.z_min, "z_max": args.z_max, "p_min": args.p_min, "p_max": args.p_max}
    return RunConfig(args.command, species, ctx, args.out, not args.no_meta, grid, args)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        HANDLERS[cfg.command](cfg)
    except (UsageError, RegistryError) as exc:
        parser.error(str(exc.args[0] if exc.args else exc))  # exits with status 2
    except GravPhaseError as exc:
        print(f"gravphase: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"gravphase: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
