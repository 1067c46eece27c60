import numpy as np
import pytest

from featherwing import (FeatherSpec, WingModel, build_model, build_topology,
                         load_config)

# Wing with a genuine oscillatory flutter crossing (V_flat ~ 6.7): the
# stiffness center sits aft of the aerodynamic center but ahead of the point
# where the cross damping term changes sign, so the loop is well damped at
# low speed and a complex pair crosses the axis at finite speed.
FLUTTER_WING = dict(
    half_span=10.0, chord=1.0, linear_mass=5.0, sc_gc_offset=0.02,
    torsion_inertia=0.3, bending_stiffness=1e4, torsion_stiffness=1e3,
    sc_position=0.28, lift_slope=2 * np.pi, airspeed=5.0, air_density=1.225)


@pytest.fixture(scope="session")
def sec6_cfg():
    return load_config("paper-sec6")


@pytest.fixture(scope="session")
def sec6_model(sec6_cfg):
    return build_model(sec6_cfg.wing, sec6_cfg.feathers, panels=sec6_cfg.panels)


@pytest.fixture(scope="session")
def sec6_net(sec6_cfg):
    return sec6_cfg.network


def make_flutter_wing(airspeed=5.0):
    return WingModel(**{**FLUTTER_WING, "airspeed": airspeed})


def make_feathers(n, half_span, chord, side="lower", beta_limit=0.3):
    width = half_span / (n + 1)
    return [FeatherSpec.from_chordwise(
        index=i + 1, span_position=(i + 1) * width, x_star=0.74 * chord,
        x_k=0.76 * chord, side=side, chord=chord, beta_limit=beta_limit)
        for i in range(n)]


@pytest.fixture(scope="session")
def flutter_model():
    wing = make_flutter_wing()
    return build_model(wing, make_feathers(3, wing.half_span, wing.chord))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture(scope="session")
def path_net():
    return build_topology("path", 5)
