"""Experiment configuration: INI-style files, validation, and the built-in preset.

The file format is flat key = value lines grouped in sections ([wing],
[feathers], [network], [control], [sim], [output]).  Unknown sections and
keys are rejected.  ``load_config("paper-sec6")`` returns the built-in
preset used by the reference simulation experiments.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dynamics import SimState
from .errors import ConfigError, FeatherwingError
from .feathers import FeatherSpec
from .model import WingModel, cantilever_modes, elliptical_torsion_inertia, modal_coefficients
from .network import Adjacency, build_topology

PAPER_SEC6 = """
[wing]
half_span = 10.0
chord = 10.0
linear_mass = 10.0
sc_gc_offset = 0.1
elliptical_height = 2.0
bending_stiffness = 50.0
torsion_stiffness = 70.0
sc_position = 2.5
lift_slope = 10.0
airspeed = 10.0
air_density = 1.225

[feathers]
count = 5
span_positions = 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0
x_star = 7.49
x_k = 7.5
sides = lower
beta_limit = 0.3
psi_bar = 0.07853981633974483, 0.15707963267948966, 0.23561944901923448, 0.3141592653589793, 0.39269908169872414, 0.47123889803846897, 0.5497787143782138, 0.6283185307179586, 0.7068583470577035

[network]
kind = path

[control]
law = ma
gamma = 1.0

[sim]
dt = 1e-5
steps = 10
x0 = 0.01, 0.0, 0.0, 0.0
beta0 = 0.02, 0.0, 0.0, 0.0, 0.0
saturation = true
e_star = inf
eps_star = inf
eps_star_star = inf
panels = 256
perturb_scale = 0.0
seed = 0

[output]
dir = featherwing-out
"""

_ALLOWED_KEYS = {
    "wing": {"half_span", "chord", "linear_mass", "sc_gc_offset",
             "torsion_inertia", "elliptical_height", "bending_stiffness",
             "torsion_stiffness", "sc_position", "lift_slope", "airspeed",
             "air_density"},
    "feathers": {"count", "span_positions", "x_star", "x_k", "sides",
                 "beta_limit", "psi_bar"},
    "network": {"kind", "k", "weights"},
    "control": {"law", "gamma"},
    "sim": {"dt", "steps", "x0", "beta0", "saturation", "e_star", "eps_star",
            "eps_star_star", "panels", "perturb_scale", "seed"},
    "output": {"dir"},
}

_REQUIRED_WING = ("half_span", "chord", "linear_mass", "sc_gc_offset",
                  "bending_stiffness", "torsion_stiffness", "sc_position",
                  "lift_slope", "airspeed", "air_density")


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully validated, effective configuration of one experiment."""

    wing: WingModel
    feathers: Tuple[FeatherSpec, ...]
    network: Adjacency
    network_k: int
    control_law: str
    gamma: np.ndarray = field(repr=False)
    dt: float = 1e-5
    steps: int = 10
    x0: np.ndarray = field(default=None, repr=False)
    beta0: np.ndarray = field(default=None, repr=False)
    saturation: bool = True
    e_star: float = float("inf")
    eps_star: float = float("inf")
    eps_star_star: float = float("inf")
    panels: int = 256
    perturb_scale: float = 0.0
    seed: int = 0
    out_dir: str = "featherwing-out"

    @property
    def n_feathers(self) -> int:
        return len(self.feathers)

    def initial_state(self) -> SimState:
        """Configured initial state, with the optional seeded perturbation."""
        x0 = self.x0.copy()
        beta0 = self.beta0.copy()
        if self.perturb_scale > 0:
            rng = np.random.default_rng(self.seed)
            x0 = x0 + self.perturb_scale * rng.standard_normal(4)
        return SimState(t=0.0, x=x0, beta=beta0)

    def to_dict(self) -> Dict:
        """Every effective value of the run, for the manifest."""
        w = self.wing
        return {
            "wing": {
                "half_span": w.half_span, "chord": w.chord,
                "linear_mass": w.linear_mass, "sc_gc_offset": w.sc_gc_offset,
                "torsion_inertia": w.torsion_inertia,
                "bending_stiffness": w.bending_stiffness,
                "torsion_stiffness": w.torsion_stiffness,
                "sc_position": w.sc_position, "lift_slope": w.lift_slope,
                "airspeed": w.airspeed, "air_density": w.air_density,
            },
            "feathers": [
                {"index": f.index, "span_position": f.span_position,
                 "psi_star": f.psi_star, "psi_k": f.psi_k, "side": f.side,
                 "beta_min": f.beta_min, "beta_max": f.beta_max,
                 "psi_bar": f.psi_bar}
                for f in self.feathers
            ],
            "network": {
                "kind": self.network.kind, "k": self.network_k,
                "weights": [
                    [i, j, self.network.weights[i, j]]
                    for i in range(self.network.n)
                    for j in range(i + 1, self.network.n)
                    if self.network.weights[i, j] > 0
                ],
            },
            "control": {"law": self.control_law,
                        "gamma": list(map(float, self.gamma))},
            "sim": {"dt": self.dt, "steps": self.steps,
                    "x0": list(map(float, self.x0)),
                    "beta0": list(map(float, self.beta0)),
                    "saturation": self.saturation, "e_star": self.e_star,
                    "eps_star": self.eps_star,
                    "eps_star_star": self.eps_star_star,
                    "panels": self.panels,
                    "perturb_scale": self.perturb_scale, "seed": self.seed},
            "output": {"dir": str(self.out_dir)},
            "units": "arbitrary (as in the source experiments)",
        }


def _floats(raw: str, where: str) -> List[float]:
    try:
        return [float(tok) for tok in raw.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse number list {raw!r}") from exc


def _float(raw: str, where: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse number {raw!r}") from exc


def _int(raw: str, where: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse integer {raw!r}") from exc


def _bool(raw: str, where: str) -> bool:
    v = raw.strip().lower()
    if v in ("true", "yes", "on", "1"):
        return True
    if v in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{where}: cannot parse boolean {raw!r}")


def _broadcast(values: List[float], n: int, where: str) -> List[float]:
    if len(values) == 1:
        return values * n
    if len(values) < n:
        raise ConfigError(f"{where}: need 1 or >= {n} values, got {len(values)}")
    return values[:n]


def apply_overrides(parser: configparser.ConfigParser,
                    overrides: Sequence[str]) -> None:
    """Apply section.key=value strings on top of the parsed file."""
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must be section.key=value, got {item!r}")
        target, value = item.split("=", 1)
        section, key = target.split(".", 1)
        section, key = section.strip(), key.strip()
        if section not in _ALLOWED_KEYS:
            raise ConfigError(f"override {item!r}: unknown section [{section}]")
        if key not in _ALLOWED_KEYS[section]:
            raise ConfigError(f"override {item!r}: unknown key {section}.{key}")
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value.strip())


def _read_parser(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    if str(path) == "paper-sec6":
        parser.read_file(io.StringIO(PAPER_SEC6), source="paper-sec6")
        return parser
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        with open(p, "r") as fh:
            parser.read_file(fh, source=str(p))
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    return parser


def load_config(path, overrides: Sequence[str] = ()) -> ExperimentConfig:
    """Load, override, and validate an experiment configuration.

    ``path`` may be a file path or the literal preset name ``paper-sec6``.
    Raises :class:`ConfigError` naming the offending section/key on any
    violation, including model-level failures such as an indefinite kinetic
    form from an oversized sc_gc_offset.
    """
    parser = _read_parser(path)
    if overrides:
        apply_overrides(parser, overrides)

    for section in parser.sections():
        if section not in _ALLOWED_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _ALLOWED_KEYS[section]:
                raise ConfigError(f"unknown key {section}.{key}")

    if not parser.has_section("wing"):
        raise ConfigError("missing required section [wing]")
    if not parser.has_section("feathers"):
        raise ConfigError("missing required section [feathers]")
    wing_sec = parser["wing"]
    for key in _REQUIRED_WING:
        if key not in wing_sec:
            raise ConfigError(f"missing required key wing.{key}")

    chord = _float(wing_sec["chord"], "wing.chord")
    if "torsion_inertia" in wing_sec:
        j_m = _float(wing_sec["torsion_inertia"], "wing.torsion_inertia")
    elif "elliptical_height" in wing_sec:
        j_m = elliptical_torsion_inertia(
            _float(wing_sec["elliptical_height"], "wing.elliptical_height"),
            chord)
    else:
        raise ConfigError(
            "wing needs either torsion_inertia or elliptical_height")

    try:
        wing = WingModel(
            half_span=_float(wing_sec["half_span"], "wing.half_span"),
            chord=chord,
            linear_mass=_float(wing_sec["linear_mass"], "wing.linear_mass"),
            sc_gc_offset=_float(wing_sec["sc_gc_offset"], "wing.sc_gc_offset"),
            torsion_inertia=j_m,
            bending_stiffness=_float(wing_sec["bending_stiffness"],
                                     "wing.bending_stiffness"),
            torsion_stiffness=_float(wing_sec["torsion_stiffness"],
                                     "wing.torsion_stiffness"),
            sc_position=_float(wing_sec["sc_position"], "wing.sc_position"),
            lift_slope=_float(wing_sec["lift_slope"], "wing.lift_slope"),
            airspeed=_float(wing_sec["airspeed"], "wing.airspeed"),
            air_density=_float(wing_sec["air_density"], "wing.air_density"),
        )
    except FeatherwingError as exc:
        raise ConfigError(f"[wing]: {exc}") from exc

    f_sec = parser["feathers"]
    for key in ("count", "span_positions", "x_star", "x_k"):
        if key not in f_sec:
            raise ConfigError(f"missing required key feathers.{key}")
    n = _int(f_sec["count"], "feathers.count")
    if n < 1:
        raise ConfigError("feathers.count must be >= 1")
    stations = _floats(f_sec["span_positions"], "feathers.span_positions")
    if len(stations) < n:
        raise ConfigError(
            f"feathers.span_positions: need >= {n} stations, got {len(stations)}")
    stations = stations[:n]  # extra stations beyond count are dropped
    x_star = _broadcast(_floats(f_sec["x_star"], "feathers.x_star"), n,
                        "feathers.x_star")
    x_k = _broadcast(_floats(f_sec["x_k"], "feathers.x_k"), n, "feathers.x_k")
    sides_raw = f_sec.get("sides", "lower").replace(",", " ").split()
    sides = sides_raw * n if len(sides_raw) == 1 else sides_raw[:n]
    if len(sides) < n:
        raise ConfigError(f"feathers.sides: need 1 or >= {n} entries")
    limits = _broadcast(_floats(f_sec.get("beta_limit", "0.3"),
                                "feathers.beta_limit"), n, "feathers.beta_limit")
    psi_bar: List[Optional[float]] = [None] * n
    if "psi_bar" in f_sec:
        bars = _floats(f_sec["psi_bar"], "feathers.psi_bar")
        psi_bar = [bars[i] if i < len(bars) else None for i in range(n)]

    feathers = []
    for i in range(n):
        try:
            feathers.append(FeatherSpec.from_chordwise(
                index=i + 1, span_position=stations[i], x_star=x_star[i],
                x_k=x_k[i], side=sides[i], chord=wing.chord,
                beta_limit=limits[i], psi_bar=psi_bar[i]))
        except FeatherwingError as exc:
            raise ConfigError(f"[feathers] entry {i + 1}: {exc}") from exc

    net_kind = "path"
    net_k = 1
    triples = None
    if parser.has_section("network"):
        net_sec = parser["network"]
        net_kind = net_sec.get("kind", "path").strip()
        net_k = _int(net_sec.get("k", "1"), "network.k")
        if "weights" in net_sec:
            triples = []
            for part in net_sec["weights"].split(","):
                toks = part.split()
                if len(toks) != 3:
                    raise ConfigError(
                        f"network.weights: expected 'i j w' triple, got {part!r}")
                triples.append((int(toks[0]), int(toks[1]), float(toks[2])))
    try:
        network = build_topology(net_kind, n, k=net_k, weights=triples)
    except FeatherwingError as exc:
        raise ConfigError(f"[network]: {exc}") from exc

    law = "ma"
    gamma_vals = [1.0]
    if parser.has_section("control"):
        c_sec = parser["control"]
        law = c_sec.get("law", "ma").strip()
        if law not in ("sg", "nonma", "ma"):
            raise ConfigError(f"control.law must be sg|nonma|ma, got {law!r}")
        gamma_vals = _floats(c_sec.get("gamma", "1.0"), "control.gamma")
    gamma = np.array(_broadcast(gamma_vals, n, "control.gamma"))
    if np.any(gamma <= 0):
        raise ConfigError("control.gamma: all gains must be positive")

    sim = parser["sim"] if parser.has_section("sim") else {}
    get = lambda key, default: sim.get(key, default) if hasattr(sim, "get") else default
    dt = _float(get("dt", "1e-5"), "sim.dt")
    steps = _int(get("steps", "10"), "sim.steps")
    if dt <= 0:
        raise ConfigError("sim.dt must be positive")
    if steps < 1:
        raise ConfigError("sim.steps must be >= 1")
    x0 = np.array(_floats(get("x0", "0.01, 0, 0, 0"), "sim.x0"))
    if x0.shape != (4,):
        raise ConfigError(f"sim.x0 must have four entries, got {len(x0)}")
    beta0 = np.array(_broadcast(_floats(get("beta0", "0.0"), "sim.beta0"),
                                n, "sim.beta0"))
    lo = np.array([f.beta_min for f in feathers])
    hi = np.array([f.beta_max for f in feathers])
    if np.any(beta0 < lo) or np.any(beta0 > hi):
        raise ConfigError("sim.beta0: initial angles violate the feather bounds")
    panels = _int(get("panels", "256"), "sim.panels")
    if panels < 2:
        raise ConfigError("sim.panels must be >= 2")

    cfg = ExperimentConfig(
        wing=wing, feathers=tuple(feathers), network=network, network_k=net_k,
        control_law=law, gamma=gamma, dt=dt, steps=steps, x0=x0, beta0=beta0,
        saturation=_bool(get("saturation", "true"), "sim.saturation"),
        e_star=_float(get("e_star", "inf"), "sim.e_star"),
        eps_star=_float(get("eps_star", "inf"), "sim.eps_star"),
        eps_star_star=_float(get("eps_star_star", "inf"), "sim.eps_star_star"),
        panels=panels,
        perturb_scale=_float(get("perturb_scale", "0.0"), "sim.perturb_scale"),
        seed=_int(get("seed", "0"), "sim.seed"),
        out_dir=(parser["output"].get("dir", "featherwing-out")
                 if parser.has_section("output") else "featherwing-out"),
    )

    # Surface model-level failures (e.g. indefinite kinetic form) at load time
    # with a config key path.
    try:
        modal_coefficients(wing, cantilever_modes(wing), panels=cfg.panels)
    except FeatherwingError as exc:
        raise ConfigError(f"[wing] sc_gc_offset: {exc}") from exc

    return cfg
