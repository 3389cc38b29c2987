"""Command-line front end: ground-state tables, classification, evolution runs,
the verification batteries and classify-then-evolve campaigns.

All outputs are deterministic files: CSV for series (fixed column order, LF,
'.' decimal) and JSON with sorted keys. Wall-clock timings go to a separate
sidecar so reports are byte-reproducible for a fixed seed. Scientific verdicts
(including blow-up detection) exit 0; only infrastructure failures are
nonzero.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .classify import (
    SymmetryError,
    classify_fixed_omega,
    classify_frequency_free,
    is_even,
)
from .diagnostics import conservation_report
from .evolution import (
    BLEW_UP,
    DISPERSED,
    NORM_GROWTH,
    EvolutionConfig,
    NumericalOverflowError,
    evolve,
)
from .functionals import evaluate
from .grid import Grid, GridFunction, Params, make_grid, reflect, translate
from .groundstate import (
    delta_soliton_exists,
    ground_state,
    soliton_value,
    thresholds,
)
from .verify import DEFAULT_SEED, run_verify

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_OVERFLOW = 3

SERIES_COLUMNS = [
    "t",
    "mass",
    "energy",
    "grad_norm",
    "max_amp",
    "virial_i",
    "virial_i_prime",
    "virial_i_double_prime",
    "exterior_mass",
]


# -- deterministic writers -----------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float) and math.isnan(obj):
        return "nan"
    return obj


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(obj), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    return repr(x)


def write_csv(path: Path, columns: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# -- configuration -------------------------------------------------------------

DEFAULTS = {
    "physics": {"p": 7.0, "gamma": -1.0, "omega": 1.0},
    "grid": {"half_width": 40.0, "n_points": 8193},
    "evolution": {
        "dt": 1e-3,
        "t_max": 10.0,
        "blowup_gradient_factor": 20.0,
        "blowup_amplitude_cap": math.inf,
        "adapt": False,
        "sponge_width": 0.0,
        "sponge_strength": 5.0,
        "record_every": 0,
        "dispersal_fraction": 0.2,
        "normgrowth_factor": 5.0,
        "virial_radius": 0.0,
        "store_fields": False,
    },
    "initial_data": {"family": "scaled_soliton", "lam": 1.0, "evenized": False},
    "classify": {"radial": "auto"},
    "campaign": {},
    "output": {"dir": "out"},
    "seed": DEFAULT_SEED,
}


def load_config(args) -> dict:
    cfg = json.loads(json.dumps(DEFAULTS))  # deep copy
    cfg["evolution"]["blowup_amplitude_cap"] = math.inf
    if args.config:
        with open(args.config, "rb") as fh:
            file_cfg = tomllib.load(fh)
        for section, values in file_cfg.items():
            if isinstance(values, dict):
                cfg.setdefault(section, {}).update(values)
            else:
                cfg[section] = values
    # flags win over the config file
    flag_map = {
        "p": ("physics", "p"),
        "gamma": ("physics", "gamma"),
        "omega": ("physics", "omega"),
        "grid_L": ("grid", "half_width"),
        "grid_n": ("grid", "n_points"),
        "dt": ("evolution", "dt"),
        "t_max": ("evolution", "t_max"),
        "out": ("output", "dir"),
    }
    for flag, (section, key) in flag_map.items():
        val = getattr(args, flag, None)
        if val is not None:
            cfg[section][key] = val
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    return cfg


def _params(cfg) -> Params:
    ph = cfg["physics"]
    return Params(gamma=float(ph["gamma"]), p=float(ph["p"]), omega=float(ph["omega"]))


def _grid(cfg) -> Grid:
    gr = cfg["grid"]
    return make_grid(float(gr["half_width"]), int(gr["n_points"]))


def _evolution_config(cfg) -> EvolutionConfig:
    ev = dict(cfg["evolution"])
    cap = ev.get("blowup_amplitude_cap", math.inf)
    if isinstance(cap, str):
        cap = math.inf if cap in ("inf", "none") else float(cap)
    return EvolutionConfig(
        dt=float(ev["dt"]),
        t_max=float(ev["t_max"]),
        blowup_gradient_factor=float(ev["blowup_gradient_factor"]),
        blowup_amplitude_cap=cap,
        adapt=bool(ev["adapt"]),
        sponge_width=float(ev["sponge_width"]),
        sponge_strength=float(ev["sponge_strength"]),
        record_every=int(ev["record_every"]),
        dispersal_fraction=float(ev["dispersal_fraction"]),
        normgrowth_factor=float(ev["normgrowth_factor"]),
        virial_radius=float(ev["virial_radius"]),
        store_fields=bool(ev["store_fields"]),
    )


# -- initial data families -----------------------------------------------------

def build_initial_data(spec: dict, grid: Grid, params: Params) -> GridFunction:
    """Construct one of the test families on the grid.

    Families: zero, scaled_soliton (lam * Q), gaussian, translated_soliton,
    sum_of_translates (free-soliton two-bump), custom (.npy complex values).
    `evenized` replaces f by (f + f(-x))/2.
    """
    family = spec.get("family", "scaled_soliton")
    x = grid.x
    if family == "zero":
        f = GridFunction(grid, np.zeros_like(x, dtype=complex))
    elif family == "scaled_soliton":
        lam = float(spec.get("lam", 1.0))
        om = float(spec.get("soliton_omega", params.require_omega()))
        gam = float(spec.get("soliton_gamma", params.gamma))
        if gam != 0.0 and not delta_soliton_exists(om, gam):
            raise ValueError(
                f"scaled_soliton: no delta soliton at omega={om}, gamma={gam}"
            )
        f = GridFunction(grid, lam * soliton_value(om, gam, params.p, x).astype(complex))
    elif family == "gaussian":
        amp = float(spec.get("amplitude", 1.0))
        width = float(spec.get("width", 2.0))
        center = float(spec.get("center", 0.0))
        k = float(spec.get("phase_k", 0.0))
        vals = amp * np.exp(-((x - center) ** 2) / (2.0 * width**2))
        if k != 0.0:
            vals = vals * np.exp(1j * k * x)
        f = GridFunction(grid, vals.astype(complex))
    elif family == "translated_soliton":
        om = float(spec.get("soliton_omega", params.require_omega()))
        shift = float(spec.get("shift", 0.0))
        lam = float(spec.get("lam", 1.0))
        base = GridFunction(grid, lam * soliton_value(om, 0.0, params.p, x).astype(complex))
        f = translate(base, shift)
    elif family == "sum_of_translates":
        om = float(spec.get("soliton_omega", params.require_omega()))
        sep = float(spec.get("separation", 8.0))
        lam = float(spec.get("lam", 1.0))
        base = GridFunction(grid, lam * soliton_value(om, 0.0, params.p, x).astype(complex))
        f = translate(base, sep) + translate(base, -sep)
    elif family == "custom":
        path = spec.get("file")
        if not path:
            raise ValueError("custom family needs file=...")
        vals = np.load(path)
        if vals.shape != (grid.n_points,):
            raise ValueError(
                f"custom data has shape {vals.shape}, grid needs ({grid.n_points},)"
            )
        f = GridFunction(grid, vals.astype(complex))
    else:
        raise ValueError(f"unknown initial-data family {family!r}")
    if spec.get("evenized", False):
        f = 0.5 * (f + reflect(f))
    return f


# -- subcommands ----------------------------------------------------------------

def cmd_ground_state(cfg) -> int:
    params = _params(cfg)
    grid = _grid(cfg)
    out = Path(cfg["output"]["dir"])
    th = thresholds(params)
    gs = ground_state(params, kind="delta")
    summary = {
        "p": params.p,
        "gamma": params.gamma,
        "omega": params.omega,
        "thresholds": {"l": th.l_omega, "n": th.n_omega, "r": th.r_omega},
        "r_equals_2l": not delta_soliton_exists(params.omega, params.gamma),
        "l_below_r_below_2l": th.l_omega < th.r_omega < 2.0 * th.l_omega,
        "delta_soliton_exists": gs.existence,
    }
    if gs.existence:
        q = gs.sample(grid)
        rep = evaluate(q, params)
        h = grid.h
        j0 = grid.center_index
        fwd = (q.values[j0 + 1] - q.values[j0]).real / h
        bwd = (q.values[j0] - q.values[j0 - 1]).real / h
        summary["identity_residuals"] = {
            "virial_p": rep.virial,
            "nehari_i": rep.nehari,
            "jump_condition": fwd - bwd + 2.0 * params.gamma * q.values[j0].real,
        }
        summary["peak_offset"] = gs.peak_offset
        summary["center_value"] = q.values[j0].real
        write_csv(
            out / "ground_state_profile.csv",
            ["x", "q"],
            zip(grid.x, q.values.real),
        )
    else:
        summary["note"] = "no delta soliton at these parameters; r = 2 l"
        free = ground_state(params, kind="free").sample(grid)
        write_csv(
            out / "ground_state_profile.csv",
            ["x", "q"],
            zip(grid.x, free.values.real),
        )
    write_json(out / "ground_state.json", summary)
    print(f"wrote {out / 'ground_state_profile.csv'} and {out / 'ground_state.json'}")
    return EXIT_OK


def _classification_bundle(f, params, radial_mode):
    even = is_even(f)
    fixed = classify_fixed_omega(f, params, radial=False)
    free = classify_frequency_free(f, params)
    radial = None
    if radial_mode == "auto":
        if even:
            radial = classify_fixed_omega(f, params, radial=True)
    elif radial_mode:
        radial = classify_fixed_omega(f, params, radial=True)  # may raise
    return {
        "even": even,
        "fixed_omega": fixed.to_dict(),
        "frequency_free": free.to_dict(),
        "radial": None if radial is None else radial.to_dict(),
    }


def cmd_classify(cfg) -> int:
    params = _params(cfg)
    grid = _grid(cfg)
    out = Path(cfg["output"]["dir"])
    f = build_initial_data(cfg["initial_data"], grid, params)
    radial_mode = cfg["classify"].get("radial", "auto")
    if radial_mode not in ("auto", True, False):
        radial_mode = str(radial_mode).lower() == "true" or radial_mode == "auto"
    bundle = _classification_bundle(f, params, radial_mode)
    bundle["initial_data"] = cfg["initial_data"]
    write_json(out / "classification.json", bundle)
    print(f"wrote {out / 'classification.json'}")
    print(
        f"fixed-omega: {bundle['fixed_omega']['region']}  "
        f"frequency-free: {bundle['frequency_free']['region']}"
        + (f"  radial: {bundle['radial']['region']}" if bundle["radial"] else "")
    )
    return EXIT_OK


def _series_rows(traj):
    n = len(traj.times)
    virial = traj.virial
    ext = traj.exterior_mass
    for i in range(n):
        rep = traj.reports[i]
        yield (
            traj.times[i],
            rep.mass,
            rep.energy,
            traj.grad_norms[i],
            traj.max_amps[i],
            virial.i[i] if virial is not None else math.nan,
            virial.i_prime[i] if virial is not None else math.nan,
            virial.i_double_prime[i] if virial is not None else math.nan,
            ext[i] if ext is not None else math.nan,
        )


def cmd_evolve(cfg) -> int:
    params = _params(cfg)
    grid = _grid(cfg)
    out = Path(cfg["output"]["dir"])
    econ = _evolution_config(cfg)
    u0 = build_initial_data(cfg["initial_data"], grid, params)
    try:
        traj = evolve(u0, params, econ)
    except NumericalOverflowError as exc:
        if exc.partial is not None:
            write_csv(out / "series.csv", SERIES_COLUMNS, _series_rows(exc.partial))
        write_json(
            out / "verdict.json",
            {"verdict": "overflow", "reason": str(exc), "exit_code": EXIT_OVERFLOW},
        )
        print(f"overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    rep = conservation_report(traj)
    write_csv(out / "series.csv", SERIES_COLUMNS, _series_rows(traj))
    write_json(
        out / "verdict.json",
        {
            "verdict": traj.verdict,
            "t_stop": traj.t_stop,
            "reason": traj.reason,
            "steps_taken": traj.steps_taken,
            "samples": len(traj.times),
            "max_mass_drift": rep.max_mass_drift,
            "max_energy_drift": rep.max_energy_drift,
            "conservative": rep.conservative,
            "initial_data": cfg["initial_data"],
        },
    )
    print(f"verdict: {traj.verdict} ({traj.reason})")
    print(f"wrote {out / 'series.csv'} and {out / 'verdict.json'}")
    return EXIT_OK


def cmd_verify(cfg, fixtures_path=None, checks=None) -> int:
    import time as _time

    out = Path(cfg["output"]["dir"])
    t0 = _time.perf_counter()
    report = run_verify(
        seed=int(cfg["seed"]), fixtures_path=fixtures_path, checks=checks
    )
    elapsed = _time.perf_counter() - t0
    write_json(out / "verify_report.json", report)
    write_json(out / "verify_timing.json", {"elapsed_seconds": elapsed})
    for check in report["checks"]:
        print(f"[{'PASS' if check['passed'] else 'FAIL'}] {check['name']}")
    print(f"wrote {out / 'verify_report.json'}")
    return EXIT_OK if report["all_passed"] else EXIT_VERIFY_FAILED


def _campaign_specs(cfg) -> list[tuple[str, dict]]:
    camp = cfg["campaign"]
    base = dict(cfg["initial_data"])
    specs = []
    if "sweep_parameter" in camp:
        p1 = camp["sweep_parameter"]
        vals1 = camp["sweep_values"]
        p2 = camp.get("sweep_parameter_2")
        vals2 = camp.get("sweep_values_2", [None])
        idx = 0
        for v2 in vals2:
            for v1 in vals1:
                spec = dict(base)
                spec[p1] = v1
                key = f"{idx:04d}_{p1}={v1}"
                if p2 is not None:
                    spec[p2] = v2
                    key += f"_{p2}={v2}"
                specs.append((key, spec))
                idx += 1
    else:
        specs.append(("0000_single", base))
    return specs


CAMPAIGN_COLUMNS = [
    "key",
    "predicted",
    "verdict",
    "agreement",
    "margin",
    "p_sign",
    "t_stop",
    "grad_ratio",
    "amp_ratio",
    "i2_max",
    "grad_monotone_tail",
    "error",
]


def _agreement(predicted: str, verdict: str) -> str:
    if predicted == "scatter_plus":
        return "yes" if verdict == DISPERSED else "no"
    if predicted == "blowup_minus":
        return "yes" if verdict in (BLEW_UP, NORM_GROWTH) else "no"
    return "excluded"


def cmd_campaign(cfg) -> int:
    params = _params(cfg)
    grid = _grid(cfg)
    out = Path(cfg["output"]["dir"])
    econ = _evolution_config(cfg)
    radial = bool(cfg["campaign"].get("classify_radial", False))
    rows = []
    confusion: dict[str, int] = {}
    contamination = 0
    agree = 0
    considered = 0
    for key, spec in _campaign_specs(cfg):
        try:
            f = build_initial_data(spec, grid, params)
            res = classify_fixed_omega(f, params, radial=radial and is_even(f))
            traj = evolve(f, params, econ)
            verdict = traj.verdict
            agreement = _agreement(res.region, verdict)
            if agreement != "excluded":
                considered += 1
                agree += agreement == "yes"
            if res.region == "scatter_plus" and verdict == BLEW_UP:
                contamination += 1
            pair = f"{res.region}|{verdict}"
            confusion[pair] = confusion.get(pair, 0) + 1
            i2_max = (
                float(np.max(traj.virial.i_double_prime))
                if traj.virial is not None
                else math.nan
            )
            tail = traj.grad_norms[-max(2, len(traj.grad_norms) // 4):]
            rows.append(
                (
                    key,
                    res.region,
                    verdict,
                    agreement,
                    res.margin,
                    res.p_sign,
                    math.nan if traj.t_stop is None else traj.t_stop,
                    traj.grad_norms[-1] / traj.grad_norms[0],
                    traj.max_amps[-1] / traj.max_amps[0],
                    i2_max,
                    "yes" if np.all(np.diff(tail) >= 0) else "no",
                    "",
                )
            )
        except Exception as exc:  # per-run failures recorded, campaign continues
            rows.append((key, "", "", "", math.nan, 0, math.nan, math.nan,
                         math.nan, math.nan, "", f"{type(exc).__name__}: {exc}"))
    rows.sort(key=lambda r: r[0])
    write_csv(out / "campaign_rows.csv", CAMPAIGN_COLUMNS, rows)
    summary = {
        "rows": len(rows),
        "confusion": confusion,
        "agreement_rate": (agree / considered) if considered else None,
        "considered": considered,
        "contamination_scatter_to_blowup": contamination,
        "errors": sorted(r[0] for r in rows if r[-1]),
    }
    write_json(out / "campaign_summary.json", summary)
    print(
        f"campaign: {len(rows)} runs, agreement "
        f"{summary['agreement_rate']}, contamination {contamination}"
    )
    print(f"wrote {out / 'campaign_rows.csv'} and {out / 'campaign_summary.json'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="deltanls",
        description=(
            "Numerical laboratory for the focusing NLS with a repulsive delta "
            "potential: ground states, scattering/blow-up classification, "
            "structure-preserving evolution and verification batteries."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("ground-state", cmd_ground_state),
        ("classify", cmd_classify),
        ("evolve", cmd_evolve),
        ("verify", cmd_verify),
        ("campaign", cmd_campaign),
    ):
        sp = sub.add_parser(name)
        sp.set_defaults(func=fn)
        sp.add_argument("--config", default=None, help="TOML config file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--p", type=float, default=None)
        sp.add_argument("--gamma", type=float, default=None)
        sp.add_argument("--omega", type=float, default=None)
        sp.add_argument("--grid-L", dest="grid_L", type=float, default=None)
        sp.add_argument("--grid-n", dest="grid_n", type=int, default=None)
        sp.add_argument("--dt", type=float, default=None)
        sp.add_argument("--t-max", dest="t_max", type=float, default=None)
        if name == "verify":
            sp.add_argument(
                "--fixtures", default=None, help="override reference-constants JSON"
            )
            sp.add_argument(
                "--checks", default=None,
                help="comma-separated subset of check names to run",
            )
        if name == "classify":
            sp.add_argument("--family", default=None)
            sp.add_argument("--lam", type=float, default=None)
            sp.add_argument("--radial", default=None, choices=["auto", "true", "false"])
        if name == "evolve":
            sp.add_argument("--family", default=None)
            sp.add_argument("--lam", type=float, default=None)
            sp.add_argument("--sponge-width", dest="sponge_width", type=float, default=None)
            sp.add_argument("--virial-radius", dest="virial_radius", type=float, default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        for key in ("family", "lam"):
            val = getattr(args, key, None)
            if val is not None:
                cfg["initial_data"][key] = val
        for key in ("sponge_width", "virial_radius"):
            val = getattr(args, key, None)
            if val is not None:
                cfg["evolution"][key] = val
        if getattr(args, "radial", None) is not None:
            cfg["classify"]["radial"] = (
                "auto" if args.radial == "auto" else args.radial == "true"
            )
        if args.func is cmd_verify:
            checks = getattr(args, "checks", None)
            return cmd_verify(
                cfg,
                fixtures_path=getattr(args, "fixtures", None),
                checks=None if checks is None else checks.split(","),
            )
        return args.func(cfg)
    except (ValueError, SymmetryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
