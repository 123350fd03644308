"""Experiment orchestration and command-line entry point.

Subcommands: ``evaluate`` (single PEB), ``sweep`` (RIS-size or
satellite-count sweep with CSV output), ``optimize`` (RIS profile search).
Exit codes: 0 success, 2 validation failure, 3 unidentifiable scenario,
4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .beamforming import GridSpec, directional_profile, optimize_profile, random_profile
from .config import (ExperimentConfig, SCHEMES, build_scenario, build_signal_config,
                     config_from_dict, load_config)
from .arrays import upa_coordinates
from .channel import scenario_to_path_params
from .geometry import direction_angles
from .errors import ConfigError, RislocError, SingularFim, ValidationError
from .fim import peb_from_workspaces, scenario_workspaces

CSV_HEADER = "sweep_var,sweep_value,scheme,n_ris,peb_m,seed,status"


def _mix_seed(seed: int, tag: int) -> int:
    """Stable per-RIS seed derivation (splitmix-style)."""
    return (abs(int(seed)) * 0x9E3779B97F4A7C15 + tag) % (1 << 63)


def grid_from_dict(raw: dict | None) -> GridSpec:
    if not raw:
        return GridSpec()
    known = {"c1_values", "magnitudes", "phases"}
    unknown = set(raw) - known
    if unknown:
        raise ValidationError(f"beamforming.grid: unknown keys {sorted(unknown)}")
    kwargs = {k: tuple(float(x) for x in v) for k, v in raw.items()}
    for k, vals in kwargs.items():
        if not vals:
            raise ValidationError(f"beamforming.grid.{k}: must be non-empty")
    return GridSpec(**kwargs)


def parse_grid_spec(text: str) -> GridSpec:
    """Parse a CLI grid spec like ``c1=0,0.5,1;mag=0,1;phase=0,1.5708``."""
    names = {"c1": "c1_values", "mag": "magnitudes", "phase": "phases"}
    kwargs = {}
    for part in filter(None, text.split(";")):
        key, _, vals = part.partition("=")
        if names.get(key.strip()) is None or not vals:
            raise ValidationError(f"bad grid spec fragment: {part!r}")
        kwargs[names[key.strip()]] = tuple(float(x) for x in vals.split(","))
    return GridSpec(**kwargs)


def profiles_for_scheme(scn, cfg, scheme: str, seed: int, grid: GridSpec | None = None,
                        workspaces=None, pointing_error_m: float = 0.0):
    """RIS profiles for one of the closed set of beamforming schemes.

    The proposed scheme starts from the directional profiles and optimizes
    each RIS in turn with the others held fixed.  ``pointing_error_m``
    perturbs the UE position assumed at design time (direction seeded, fixed
    magnitude), modelling the rough position estimate the directional and
    proposed schemes would rely on in practice; the reported bound is always
    evaluated at the true position.
    """
    n_r = scn.ris_shape[0] * scn.ris_shape[1]
    if scheme == "random":
        return [random_profile(n_r, _mix_seed(seed, ell)).omega for ell in range(scn.n_ris)]
    geom = upa_coordinates(scn.ris_shape[0], scn.ris_shape[1], cfg.wavelength)
    params = scenario_to_path_params(scn, cfg, 0, gain_seed=seed)
    aod_ris = [rp.aod_ris for rp in params.ris]
    if pointing_error_m > 0.0:
        rng = np.random.default_rng([abs(int(seed)), 0xE57])
        offset = rng.standard_normal(3)
        rough_ue = scn.ue_position + pointing_error_m * offset / np.linalg.norm(offset)
        aod_ris = [direction_angles(pose, rough_ue) for pose in scn.rises]
    profiles = [directional_profile(geom, aod, rp.aoa_ris, cfg.carrier_hz).omega
                for aod, rp in zip(aod_ris, params.ris)]
    if scheme == "directional":
        return profiles
    if scheme != "proposed":
        raise ValidationError(f"unknown scheme {scheme!r}")
    if workspaces is None:
        workspaces = scenario_workspaces(scn, cfg, gain_seed=seed)
    for ell in range(scn.n_ris):
        best, _ = optimize_profile(scn, cfg, sat_index=0, ris_index=ell, grid=grid,
                                   profiles=profiles, workspaces=workspaces,
                                   phi_ru=aod_ris[ell])
        profiles[ell] = best.omega
    return profiles


@dataclass(frozen=True)
class EvalResult:
    scheme: str
    n_ris: int
    peb_m: float
    seed: int


def run_evaluate(cfg: ExperimentConfig, seed: int | None = None,
                 scheme: str | None = None) -> EvalResult:
    """Single end-to-end evaluation: scenario -> profiles -> FIM -> PEB."""
    seed = cfg.beamforming.seed if seed is None else seed
    scheme = scheme or cfg.beamforming.scheme
    scn = build_scenario(cfg)
    sig = build_signal_config(cfg, seed)
    workspaces = scenario_workspaces(scn, sig, gain_seed=seed)
    profiles = profiles_for_scheme(scn, sig, scheme, seed,
                                   grid=grid_from_dict(cfg.beamforming.grid),
                                   workspaces=workspaces,
                                   pointing_error_m=cfg.beamforming.pointing_error_m)
    bundle = peb_from_workspaces(workspaces, profiles)
    return EvalResult(scheme=scheme, n_ris=scn.n_ris, peb_m=bundle.peb, seed=seed)


@dataclass(frozen=True)
class SweepRow:
    sweep_var: str
    sweep_value: int
    scheme: str
    n_ris: int
    peb_m: float
    wall_time_s: float
    seed: int
    status: str


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    config_digest: str
    seed_base: int


def _sweep_points(cfg: ExperimentConfig):
    """Deterministic (value, bs_flag, seed) enumeration of sweep points.

    All schemes at one point share the point's seed so that scheme medians
    are paired comparisons over identical channel realizations.
    """
    sw = cfg.sweep
    points = []
    index = 0
    for value in sw.values:
        bs_flags = (False, True) if (sw.variable == "satellite_count"
                                     and sw.include_bs) else (False,)
        for bs in bs_flags:
            for _ in range(sw.n_seeds):
                points.append((value, bs, sw.seed_base ^ index))
                index += 1
    return points


def _point_config(cfg: ExperimentConfig, value: int, bs: bool) -> ExperimentConfig:
    sc = cfg.scenario
    if cfg.sweep.variable == "ris_size":
        sc = replace(sc, ris_shape=(value, value), bs_mode=bs or sc.bs_mode)
    else:
        sc = replace(sc, n_satellites=value, bs_mode=bs or sc.bs_mode)
    return replace(cfg, scenario=sc)


def _run_point(args):
    cfg_dict, value, scheme, bs, seed, variable = args
    cfg = _point_config(config_from_dict(cfg_dict), value, bs)
    label = f"{scheme}-bs" if bs else scheme
    start = time.perf_counter()
    try:
        res = run_evaluate(cfg, seed=seed, scheme=scheme)
        peb, status = res.peb_m, "ok"
    except SingularFim:
        peb, status = math.nan, "singular"
    return SweepRow(sweep_var=variable, sweep_value=value, scheme=label,
                    n_ris=cfg.scenario.n_ris, peb_m=peb,
                    wall_time_s=time.perf_counter() - start, seed=seed, status=status)


def run_sweep(cfg: ExperimentConfig, jobs: int = 1) -> SweepResult:
    """Evaluate every (sweep value, scheme, seed) combination.

    Per-point seeds are ``seed_base XOR point_index`` so parallel and serial
    runs agree; rows come back in deterministic sweep order.
    """
    sw = cfg.sweep
    cfg_dict = dataclasses.asdict(cfg)
    tasks = []
    for value, bs, seed in _sweep_points(cfg):
        for scheme in sw.schemes:
            tasks.append((cfg_dict, value, scheme, bs, seed, sw.variable))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = tuple(pool.map(_run_point, tasks))
    else:
        rows = tuple(_run_point(t) for t in tasks)
    digest = hashlib.sha256(cfg.digest_source().encode()).hexdigest()
    return SweepResult(rows=rows, config_digest=digest, seed_base=sw.seed_base)


def emit_csv(result: SweepResult, path) -> None:
    """Write sweep rows as CSV with a provenance comment line."""
    lines = [f"# config={result.config_digest} seed_base={result.seed_base} "
             f"version={__version__}", CSV_HEADER]
    for r in result.rows:
        peb = "nan" if math.isnan(r.peb_m) else f"{r.peb_m:.9g}"
        lines.append(f"{r.sweep_var},{r.sweep_value},{r.scheme},{r.n_ris},"
                     f"{peb},{r.seed},{r.status}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise exc


def _cmd_evaluate(args) -> int:
    cfg = _load(args)
    res = run_evaluate(cfg, seed=args.seed, scheme=args.scheme)
    print(f"scheme={res.scheme} n_ris={res.n_ris} seed={res.seed} peb_m={res.peb_m:.9g}")
    if args.out:
        row = SweepRow(sweep_var="none", sweep_value=0, scheme=res.scheme,
                       n_ris=res.n_ris, peb_m=res.peb_m, wall_time_s=0.0,
                       seed=res.seed, status="ok")
        digest = hashlib.sha256(cfg.digest_source().encode()).hexdigest()
        emit_csv(SweepResult(rows=(row,), config_digest=digest,
                             seed_base=res.seed), args.out)
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    result = run_sweep(cfg, jobs=args.jobs)
    emit_csv(result, args.out)
    n_bad = sum(1 for r in result.rows if r.status != "ok")
    print(f"wrote {len(result.rows)} rows to {args.out}"
          + (f" ({n_bad} non-ok)" if n_bad else ""))
    return 0


def _cmd_optimize(args) -> int:
    cfg = _load(args)
    seed = cfg.beamforming.seed if args.seed is None else args.seed
    grid = parse_grid_spec(args.grid) if args.grid else grid_from_dict(cfg.beamforming.grid)
    scn = build_scenario(cfg)
    sig = build_signal_config(cfg, seed)
    workspaces = scenario_workspaces(scn, sig, gain_seed=seed)
    profiles = profiles_for_scheme(scn, sig, "directional", seed, workspaces=workspaces)
    results = []
    for ell in range(scn.n_ris):
        best, peb = optimize_profile(scn, sig, ris_index=ell, grid=grid,
                                     profiles=profiles, workspaces=workspaces)
        profiles[ell] = best.omega
        results.append(peb)
        print(f"ris={ell} peb_m={peb:.9g}")
    if args.out:
        payload = {"peb_m": results[-1],
                   "profiles": [[[float(w.real), float(w.imag)] for w in p]
                                for p in profiles]}
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
    return 0


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if getattr(args, "bs_mode", False):
        cfg = replace(cfg, scenario=replace(cfg.scenario, bs_mode=True))
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risloc",
                                     description="RIS-aided satellite localization "
                                                 "error bounds and RIS profile design")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=False):
        p.add_argument("--config", help="JSON experiment configuration")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--bs-mode", action="store_true",
                       help="replace satellites with the terrestrial anchor")
        p.add_argument("--out", required=out_required, help="output file path")

    p_eval = sub.add_parser("evaluate", help="single PEB evaluation")
    common(p_eval)
    p_eval.add_argument("--scheme", choices=SCHEMES, default=None)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_sweep = sub.add_parser("sweep", help="RIS-size or satellite-count sweep")
    common(p_sweep, out_required=True)
    p_sweep.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_opt = sub.add_parser("optimize", help="PEB-optimal RIS profile search")
    common(p_opt)
    p_opt.add_argument("--grid", help="grid spec, e.g. 'c1=0,0.5,1;mag=0,1;phase=0,3.14159'")
    p_opt.set_defaults(func=_cmd_optimize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SingularFim as exc:
        print(json.dumps({"error": "singular_fim", "detail": str(exc)}), file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
