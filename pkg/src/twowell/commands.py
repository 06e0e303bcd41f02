"""One function per CLI command.  Each takes a resolved RunConfig, writes its
files and returns the domain object it produced."""
from __future__ import annotations

import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import bifurcation, dynamics, fluctuation, quantum
from .config import RunConfig
from .contour import ContourGrid, contour_grid, parse_grid
from .errors import ConfigurationError, ParameterError, TwoWellError
from .io import csv_text, json_text, write_text
from .model import ModelParams, PhasePoint


def _sidecar(out: str | None, suffix: str) -> str | None:
    if out is None or out == "-":
        return None
    p = Path(out)
    return str(p.with_name(p.stem + suffix))


def cmd_contour(cfg: RunConfig) -> ContourGrid:
    xi, delta = cfg.reduced()
    nx, nphi = parse_grid(cfg.grid)
    grid = contour_grid(xi, delta, nx, nphi, cfg.eq9_as_printed)
    write_text(cfg.out, grid.to_csv())
    overlay = cfg.overlay or _sidecar(cfg.out, ".fixed_points.json")
    if overlay:
        write_text(overlay, json_text(grid.overlay_dict()))
    return grid


def trajectory_csv(traj: dynamics.Trajectory) -> str:
    return csv_text(["tau", "x", "phi", "h"],
                    zip(traj.tau.tolist(), traj.x.tolist(), traj.phi.tolist(), traj.h.tolist()))


def cmd_evolve(cfg: RunConfig) -> dynamics.Trajectory:
    xi, delta = cfg.reduced()
    traj = dynamics.integrate(PhasePoint(cfg.x0, cfg.phi0), xi, delta, cfg.tau_end,
                              dtau_max=cfg.dtau_max, rtol=cfg.rtol,
                              energy_drift_tolerance=cfg.energy_drift_tol)
    write_text(cfg.out, trajectory_csv(traj))
    if cfg.summary:
        summary = {"xi": xi, "delta": delta, "step_stats": asdict(traj.step_stats),
                   "trapping": asdict(dynamics.detect_trapping(traj))}
        try:
            summary["period"] = asdict(dynamics.measure_period(traj))
        except TwoWellError:
            summary["period"] = None
        write_text(cfg.summary, json_text(summary))
    return traj


def cmd_fixed_points(cfg: RunConfig) -> list[bifurcation.FixedPoint]:
    xi, delta = cfg.reduced()
    fps = bifurcation.find_fixed_points(xi, delta, cfg.eq9_as_printed, cfg.classify_tol)
    write_text(cfg.out, json_text([fp.to_dict() for fp in fps]))
    return fps


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ParameterError(f"bad number list {text!r}") from exc


def _critical_deltas(cfg: RunConfig) -> list[float]:
    if cfg.deltas:
        return _float_list(cfg.deltas)
    if cfg.delta is not None:
        return [cfg.delta]
    if cfg.start is not None and cfg.stop is not None:
        return np.linspace(cfg.start, cfg.stop, cfg.num).tolist()
    return [0.0]


CRITICAL_HEADER = ["delta", "xi_c", "bracket_lo", "bracket_hi",
                   "counts_below_stable", "counts_below_unstable",
                   "counts_above_stable", "counts_above_unstable"]


def cmd_critical(cfg: RunConfig) -> list[bifurcation.CriticalResult]:
    if cfg.mode == "physical":
        raise ConfigurationError("critical takes reduced --delta/--deltas only")
    results = [bifurcation.critical_xi(d, cfg.eq9_as_printed) for d in _critical_deltas(cfg)]
    if cfg.out and cfg.out.endswith(".json"):
        write_text(cfg.out, json_text([r.to_dict() for r in results]))
    else:
        write_text(cfg.out, csv_text(CRITICAL_HEADER, (
            [r.delta, r.xi_c, r.bracket[0], r.bracket[1], *r.counts_below, *r.counts_above]
            for r in results)))
    return results


def default_branch(variant: str) -> str:
    return "S_plus" if fluctuation.normalize_variant(variant) == "paper_Spm" else "S"


def cmd_fluct(cfg: RunConfig) -> fluctuation.FluctuationReport:
    p = cfg.params()
    fp = fluctuation.fixed_point_for(p, cfg.branch or default_branch(cfg.variant))
    report = fluctuation.predict(fp, p, cfg.variant)
    write_text(cfg.out, json_text(report.to_dict()))
    return report


def cmd_quantum(cfg: RunConfig) -> dict:
    p = cfg.params()
    h = quantum.build(p)
    ground = quantum.ground_state(h)
    result = {"params": asdict(p), "xi": p.xi, "delta": p.delta, "ground": ground.to_dict()}
    try:
        result["doublet"] = quantum.localized_doublet(h).to_dict()
    except ConfigurationError:
        pass
    if cfg.compare:
        result["comparison"] = quantum.compare_with_semiclassical(p, cfg.compare, cfg.tilt_localize)
    write_text(cfg.out, json_text(result))
    if cfg.amplitudes_out:
        write_text(cfg.amplitudes_out, csv_text(["n", "amplitude"], enumerate(ground.state.tolist())))
    if cfg.phase_out:
        write_text(cfg.phase_out, csv_text(["phi", "p"], zip(ground.phase_grid.tolist(),
                                                              ground.phase_distribution.tolist())))
    return result


# ---------------------------------------------------------------- sweeps

SWEEP_TARGETS = {
    "fluct": ["delta_n", "delta_phi"],
    "quantum": ["exact_delta_n", "delta_phi_circular", "energy", "predicted_delta_n"],
    "critical": ["xi_c", "bracket_lo", "bracket_hi"],
    "fixed-points": ["n_stable", "n_unstable"],
}
SWEEP_AXES = ("n-atoms", "xi", "xi-minus-one", "delta")


def _sweep_values(cfg: RunConfig) -> list[float]:
    if cfg.values:
        vals = _float_list(cfg.values)
    elif cfg.start is not None and cfg.stop is not None:
        maker = np.geomspace if cfg.log else np.linspace
        vals = maker(cfg.start, cfg.stop, cfg.num).tolist()
    else:
        raise ConfigurationError("sweep needs --values or --start/--stop")
    if cfg.axis == "n-atoms":
        vals = sorted({int(round(v)) for v in vals})
    return vals


def _point_config(cfg: RunConfig, value: float) -> RunConfig:
    """Base configuration moved to one sweep coordinate."""
    physical = cfg.mode == "physical"
    if cfg.axis == "n-atoms":
        n = int(value)
        if physical:
            gbeta = cfg.gbeta
            if cfg.hold == "xi":
                base = cfg.params()
                gbeta = 2 * base.tunneling * base.xi / n
            return replace(cfg, n_atoms=n, gbeta=gbeta)
        xi = cfg.xi or 0.0
        if cfg.hold == "ratio":
            if cfg.n_atoms is None:
                raise ConfigurationError("--hold ratio needs a base --n-atoms")
            xi = xi * n / cfg.n_atoms
        return replace(cfg, n_atoms=n, xi=xi)
    if physical:
        raise ConfigurationError(f"axis {cfg.axis} takes reduced parameters")
    if cfg.axis == "xi":
        return replace(cfg, xi=value)
    if cfg.axis == "xi-minus-one":
        sign = -1.0 if (cfg.xi or 1.0) < 0 else 1.0
        return replace(cfg, xi=sign * (1.0 + value))
    if cfg.axis == "delta":
        return replace(cfg, delta=value)
    raise ConfigurationError(f"unknown sweep axis {cfg.axis!r}")


def _sweep_row(job: tuple[RunConfig, float]) -> list:
    cfg, value = job
    point = _point_config(cfg, value)
    xi, delta = point.reduced()
    n = point.n_atoms if point.n_atoms is not None else ""
    head = [value, xi, delta, n]
    if cfg.target == "fluct":
        p = point.params()
        fp = fluctuation.fixed_point_for(p, point.branch or default_branch(point.variant))
        r = fluctuation.predict(fp, p, point.variant)
        return head + [r.delta_n, r.delta_phi]
    if cfg.target == "quantum":
        p = point.params()
        g = quantum.ground_state(quantum.build(p))
        exact, spread, predicted = g.delta_n, g.delta_phi_circular, math.nan
        if point.compare:
            cmp = quantum.compare_with_semiclassical(p, point.compare, point.tilt_localize)
            exact, predicted = cmp["exact_delta_n"], cmp["predicted_delta_n"]
        return head + [exact, spread, g.energy, predicted]
    if cfg.target == "critical":
        if cfg.axis != "delta":
            raise ConfigurationError("critical sweeps run along --axis delta")
        r = bifurcation.critical_xi(delta, point.eq9_as_printed)
        return head + [r.xi_c, r.bracket[0], r.bracket[1]]
    if cfg.target == "fixed-points":
        fps = bifurcation.find_fixed_points(xi, delta, point.eq9_as_printed, point.classify_tol)
        return head + list(bifurcation.census(fps))
    raise ConfigurationError(f"unknown sweep target {cfg.target!r}")


def cmd_sweep(cfg: RunConfig) -> list[list]:
    if cfg.target not in SWEEP_TARGETS:
        raise ConfigurationError(f"unknown sweep target {cfg.target!r}")
    if cfg.axis not in SWEEP_AXES:
        raise ConfigurationError(f"unknown sweep axis {cfg.axis!r}")
    jobs = [(cfg, v) for v in _sweep_values(cfg)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    rows.sort(key=lambda r: r[0])
    header = ["sweep_" + cfg.axis.replace("-", "_"), "xi", "delta", "n_atoms"] + SWEEP_TARGETS[cfg.target]
    write_text(cfg.out, csv_text(header, rows))
    if cfg.fit:
        control = np.array([r[0] for r in rows], float)
        values = np.array([r[4] for r in rows], float)
        slope, err = fluctuation.loglog_fit(control, values)
        sys.stderr.write(json.dumps({"slope": slope, "stderr": err,
                                     "column": SWEEP_TARGETS[cfg.target][0]}) + "\n")
    return rows
