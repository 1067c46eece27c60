"""Experiment orchestration: runs, CSV artifacts, manifests, law comparison."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .config import ExperimentConfig
from .control import ControlGains, build_gains
from .dynamics import ReducedModel, Trajectory, build_model, simulate
from .errors import DivergenceError
from .network import chi_lambda
from .stability import SystemMatrix, assemble, mode_frequencies, spectral_abscissa

FMT = "%.17g"  # 17 significant digits round-trip binary64 exactly

LAW_ORDER = ("sg", "nonma", "ma")


def _fmt(x: float) -> str:
    return FMT % float(x)


def model_at_speed(cfg: ExperimentConfig, airspeed: float) -> ReducedModel:
    """Rebuild the reduced model of the configured wing at another airspeed."""
    wing = dataclasses.replace(cfg.wing, airspeed=airspeed)
    return build_model(wing, cfg.feathers, panels=cfg.panels)


def gains_for(cfg: ExperimentConfig, model: ReducedModel,
              law: Optional[str] = None) -> Optional[ControlGains]:
    """Control gains for ``law`` (default: the configured one); None for 'none'."""
    law = cfg.control_law if law is None else law
    if law == "none":
        return None
    chi, lam = chi_lambda(cfg.network, model.modes, model.stations)
    return build_gains(law, cfg.gamma, model.coeffs, model.influences,
                       net=cfg.network, chi=chi, lam=lam)


def closed_loop_at(cfg: ExperimentConfig, airspeed: float,
                   law: str) -> SystemMatrix:
    """System matrix at an airspeed, with the law's gains rebuilt there."""
    model = model_at_speed(cfg, airspeed)
    return assemble(model, gains_for(cfg, model, law))


def write_trajectory_csv(path: Path, traj: Trajectory) -> None:
    n = traj.beta.shape[1]
    header = (["t", "x1", "x2", "x3", "x4", "E", "L", "Ltilde"]
              + [f"beta_{i + 1}" for i in range(n)]
              + [f"u_{i + 1}" for i in range(n)])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for k in range(len(traj.t)):
            row = ([traj.t[k], *traj.x[k], traj.energy[k], traj.functional[k],
                    traj.functional_tilde[k], *traj.beta[k], *traj.u[k]])
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_trajectory_csv(path: Path):
    """Parse an emitted trajectory CSV back into (header, float array)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = [[float(tok) for tok in line.strip().split(",")]
                for line in fh if line.strip()]
    return header, np.array(data)


def write_coefficients_csv(path: Path, model: ReducedModel) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("name,value\n")
        for name, value in model.coeffs.as_rows():
            fh.write(f"{name},{_fmt(value)}\n")
        for infl in model.influences:
            for name, value in infl.as_rows():
                fh.write(f"{name},{_fmt(value)}\n")


def coefficients_table(model: ReducedModel) -> str:
    lines = ["name,value"]
    lines += [f"{name},{_fmt(value)}" for name, value in model.coeffs.as_rows()]
    for infl in model.influences:
        lines += [f"{name},{_fmt(value)}" for name, value in infl.as_rows()]
    return "\n".join(lines) + "\n"


def eigen_rows(cfg: ExperimentConfig, v_grid: Sequence[float],
               law: str) -> List[List[float]]:
    rows = []
    for v in v_grid:
        system = closed_loop_at(cfg, float(v), law)
        rows.append([float(v), spectral_abscissa(system),
                     *mode_frequencies(system)])
    return rows


def write_eigen_csv(path: Path, rows: List[List[float]]) -> None:
    n_freq = len(rows[0]) - 2 if rows else 0
    header = ["V", "re_max"] + [f"freq_{i + 1}" for i in range(n_freq)]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(path.read_bytes())
    return digest.hexdigest()


def _first_exceed(t: np.ndarray, values: np.ndarray,
                  threshold: float) -> Optional[float]:
    hits = np.nonzero(values > threshold)[0]
    return float(t[hits[0]]) if len(hits) else None


def run_experiment(cfg: ExperimentConfig, out_dir: Optional[Path] = None,
                   law: Optional[str] = None) -> Dict[str, Path]:
    """Run one law ('none' = open loop) and write the full artifact set.

    Writes trajectory.csv, coefficients.csv, eigen.csv and manifest.json to
    the output directory.  Bit-identical on re-run with the same config.  On
    divergence the partial trajectory is flushed before the error propagates.
    """
    law = cfg.control_law if law is None else law
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = build_model(cfg.wing, cfg.feathers, panels=cfg.panels)
    gains = gains_for(cfg, model, law)
    paths = {
        "trajectory": out / "trajectory.csv",
        "coefficients": out / "coefficients.csv",
        "eigen": out / "eigen.csv",
        "manifest": out / "manifest.json",
    }
    try:
        traj = simulate(model, gains, cfg.network, cfg.initial_state(),
                        cfg.dt, cfg.steps, saturate=cfg.saturation)
    except DivergenceError as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None:
            write_trajectory_csv(paths["trajectory"], partial)
        raise

    write_trajectory_csv(paths["trajectory"], traj)
    write_coefficients_csv(paths["coefficients"], model)
    v = cfg.wing.airspeed
    v_hi = 1.5 * v if v > 0 else 1.0
    grid = np.linspace(0.0, v_hi, 31)
    write_eigen_csv(paths["eigen"], eigen_rows(cfg, grid, law))

    manifest = {
        "config": cfg.to_dict(),
        "law": law,
        "thresholds_exceeded_at": {
            "e_star": _first_exceed(traj.t, traj.energy, cfg.e_star),
            "eps_star": _first_exceed(traj.t, traj.functional, cfg.eps_star),
            "eps_star_star": _first_exceed(traj.t, traj.functional_tilde,
                                           cfg.eps_star_star),
        },
        "artifacts": {p.name: _sha256(p) for p in
                      (paths["trajectory"], paths["coefficients"],
                       paths["eigen"])},
    }
    with open(paths["manifest"], "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


def time_to_half(traj: Trajectory) -> float:
    """First time at which |beta| falls to half its initial value (inf if never)."""
    norms = traj.beta_norms()
    target = 0.5 * norms[0]
    hits = np.nonzero(norms <= target)[0]
    return float(traj.t[hits[0]]) if len(hits) else float("inf")


def compare_laws(cfg: ExperimentConfig,
                 out_dir: Optional[Path] = None) -> Dict:
    """Run all three laws from the identical initial state and rank them.

    Metrics per law: final |beta|, time for |beta| to halve, final energy.
    Writes compare.csv, compare.md and one trajectory CSV per law.
    """
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = build_model(cfg.wing, cfg.feathers, panels=cfg.panels)
    init = cfg.initial_state()
    report = {}
    for law in LAW_ORDER:
        traj = simulate(model, gains_for(cfg, model, law), cfg.network, init,
                        cfg.dt, cfg.steps, saturate=cfg.saturation)
        write_trajectory_csv(out / f"trajectory_{law}.csv", traj)
        report[law] = {
            "beta_final": float(traj.beta_norms()[-1]),
            "time_to_half_beta": time_to_half(traj),
            "energy_final": float(traj.energy[-1]),
        }

    with open(out / "compare.csv", "w", newline="") as fh:
        fh.write("law,beta_final,time_to_half_beta,energy_final\n")
        for law in LAW_ORDER:
            r = report[law]
            fh.write(",".join([law, _fmt(r["beta_final"]),
                               _fmt(r["time_to_half_beta"]),
                               _fmt(r["energy_final"])]) + "\n")

    lines = [
        "# Control law comparison",
        "",
        f"Common initial state: |beta(0)| = {_fmt(float(np.linalg.norm(init.beta)))},"
        f" dt = {_fmt(cfg.dt)}, steps = {cfg.steps}.",
        "",
        "| law | final \\|beta\\| | time to half \\|beta\\| | final E |",
        "|-----|----------------|------------------------|---------|",
    ]
    for law in LAW_ORDER:
        r = report[law]
        lines.append(f"| {law} | {r['beta_final']:.6g} | "
                     f"{r['time_to_half_beta']:.6g} | {r['energy_final']:.6g} |")
    best = min(LAW_ORDER, key=lambda l: report[l]["beta_final"])
    lines += ["", f"Smallest final feather angles: `{best}`."]
    (out / "compare.md").write_text("\n".join(lines) + "\n")
    return report
