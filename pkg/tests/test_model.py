"""Mode shapes, Simpson quadrature, and the modal coefficient build."""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from featherwing import (DomainError, ModelError, ModeShapes, NumericError,
                         ParameterError, WingModel, cantilever_modes,
                         eval_bending_mode, eval_torsion_mode, integrate,
                         modal_coefficients)
from featherwing.model import CANTILEVER_LAMBDA_1

from conftest import make_flutter_wing


def sec6_wing(**kw):
    base = dict(half_span=10.0, chord=10.0, linear_mass=10.0, sc_gc_offset=0.1,
                torsion_inertia=15.103810834566312, bending_stiffness=50.0,
                torsion_stiffness=70.0, sc_position=2.5, lift_slope=10.0,
                airspeed=10.0, air_density=1.225)
    base.update(kw)
    return WingModel(**base)


class TestBendingMode:
    def test_clamped_root(self):
        f, df, _, _ = eval_bending_mode(0.0, sec6_wing())
        assert f == 0.0
        assert df == 0.0

    def test_free_tip_curvature_and_shear(self):
        wing = sec6_wing()
        zs = np.linspace(0, wing.half_span, 101)
        _, _, ddf, dddf = eval_bending_mode(zs, wing)
        assert abs(ddf[-1]) < 1e-9 * np.max(np.abs(ddf))
        assert abs(dddf[-1]) < 1e-9 * np.max(np.abs(dddf))

    def test_tip_value_is_two(self):
        # cosh - cos - sigma (sinh - sin) evaluated at lambda_1 equals 2.
        f, _, _, _ = eval_bending_mode(10.0, sec6_wing())
        assert abs(f - 2.0) < 1e-6

    def test_domain_error(self):
        with pytest.raises(DomainError):
            eval_bending_mode(-0.1, sec6_wing())
        with pytest.raises(DomainError):
            eval_bending_mode(10.1, sec6_wing())


class TestTorsionMode:
    def test_endpoints(self):
        wing = sec6_wing()
        p0, _ = eval_torsion_mode(0.0, wing)
        pl, dpl = eval_torsion_mode(10.0, wing)
        assert p0 == 0.0
        assert pl == 1.0
        assert abs(dpl) < 1e-15

    def test_third_point(self):
        p, _ = eval_torsion_mode(10.0 / 3.0, sec6_wing())
        assert math.isclose(p, 0.5, rel_tol=1e-12)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            eval_torsion_mode(11.0, sec6_wing())


class TestIntegrate:
    def test_simpson_exact_on_quadratic(self):
        assert math.isclose(integrate(lambda z: z ** 2, 0, 1, 2), 1 / 3,
                            rel_tol=1e-14)

    def test_constant(self):
        assert math.isclose(integrate(lambda z: np.ones_like(z), 0, 10, 8),
                            10.0, rel_tol=1e-14)

    def test_quarter_sine(self):
        val = integrate(lambda z: np.sin(np.pi * z / 20.0), 0, 10, 64)
        assert abs(val - 20.0 / np.pi) < 1e-8

    def test_convergence_order(self):
        exact = 20.0 / np.pi
        e64 = abs(integrate(lambda z: np.sin(np.pi * z / 20.0), 0, 10, 64) - exact)
        e128 = abs(integrate(lambda z: np.sin(np.pi * z / 20.0), 0, 10, 128) - exact)
        assert 16 * 0.8 <= e64 / e128 <= 16 * 1.2

    def test_panel_count_validation(self):
        with pytest.raises(ParameterError):
            integrate(lambda z: z, 0, 1, 1)

    def test_nonfinite_sample_reports_abscissa(self):
        fn = lambda z: np.where(z > 5.0, np.nan, 1.0)
        with pytest.raises(NumericError, match="z="):
            integrate(fn, 0, 10, 8)

    def test_scalar_only_integrand(self):
        val = integrate(lambda z: float(z) ** 3, 0.0, 1.0, 4)
        assert math.isclose(val, 0.25, rel_tol=1e-14)


class TestModalCoefficients:
    def test_decoupled_when_offset_zero(self):
        wing = sec6_wing(sc_gc_offset=0.0)
        c = modal_coefficients(wing, cantilever_modes(wing))
        assert c.a21 == 0.0 and c.b11 == 0.0
        assert c.d12 == 0.0 and c.d21 == 0.0
        assert math.isclose(c.d11, 1.0 / c.a11, rel_tol=1e-14)
        assert math.isclose(c.d22, 1.0 / c.b21, rel_tol=1e-14)

    def test_a21_equals_minus_b11_exactly(self, sec6_model):
        assert sec6_model.coeffs.a21 == -sec6_model.coeffs.b11

    def test_modal_mass_is_mass_times_span(self):
        # Orthonormality of the analytic mode: integral of f^2 equals l.
        wing = sec6_wing()
        c256 = modal_coefficients(wing, cantilever_modes(wing), panels=256)
        c512 = modal_coefficients(wing, cantilever_modes(wing), panels=512)
        expected = wing.linear_mass * wing.half_span
        assert abs(c256.a11 - expected) < 1e-9 * expected
        assert abs(c256.a11 - c512.a11) < 1e-10 * expected

    def test_sign_invariants(self, sec6_model):
        c = sec6_model.coeffs
        assert c.a11 > 0 and c.b21 < 0
        assert c.a13 > 0 and c.b23_elastic < 0

    def test_d_is_exact_inverse(self, sec6_model):
        c = sec6_model.coeffs
        mass = np.array([[c.a11, c.b11], [c.a21, c.b21]])
        d = np.array([[c.d11, c.d12], [c.d21, c.d22]])
        assert np.max(np.abs(mass @ d - np.eye(2))) < 1e-12

    def test_integration_by_parts_identities(self):
        wing = sec6_wing()
        modes = cantilever_modes(wing)
        c = modal_coefficients(wing, modes, panels=256)
        a13_ibp = integrate(
            lambda z: wing.bending_stiffness * modes.bending(z)[2] ** 2,
            0, wing.half_span, 256)
        b23_ibp = -integrate(
            lambda z: wing.torsion_stiffness * modes.torsion(z)[1] ** 2,
            0, wing.half_span, 256)
        assert abs(c.a13 - a13_ibp) <= 1e-6 * abs(c.a13)
        assert abs(c.b23_elastic - b23_ibp) <= 1e-6 * abs(c.b23_elastic)

    @pytest.mark.parametrize("wing_fn", [sec6_wing, make_flutter_wing])
    def test_airspeed_scaling(self, wing_fn):
        w1 = wing_fn()
        w2 = dataclasses.replace(w1, airspeed=2 * w1.airspeed)
        c1 = modal_coefficients(w1, cantilever_modes(w1))
        c2 = modal_coefficients(w2, cantilever_modes(w2))
        for name in ("a12", "a22", "b12", "b22"):
            assert math.isclose(getattr(c2, name), 2 * getattr(c1, name),
                                rel_tol=1e-12, abs_tol=1e-300)
        assert math.isclose(c2.b13, 4 * c1.b13, rel_tol=1e-12)
        aero1 = c1.b23 - c1.b23_elastic
        aero2 = c2.b23 - c2.b23_elastic
        assert math.isclose(aero2, 4 * aero1, rel_tol=1e-12, abs_tol=1e-300)
        for name in ("a11", "a13", "a21", "b11", "b21", "b23_elastic"):
            assert getattr(c2, name) == getattr(c1, name)

    def test_indefinite_kinetic_form_rejected(self):
        # PD condition a11 (-b21) > a21^2 fails beyond sigma_T ~ 1.282.
        wing = sec6_wing(sc_gc_offset=1.3)
        with pytest.raises(ModelError, match="sigma_T"):
            modal_coefficients(wing, cantilever_modes(wing))

    def test_bad_mode_shapes_rejected(self):
        wing = sec6_wing()
        broken = ModeShapes(
            length=wing.half_span,
            bending=lambda z: (np.sin(np.pi * z / 10.0),) * 4,
            torsion=lambda z: eval_torsion_mode(z, wing))
        with pytest.raises(ModelError, match="boundary"):
            modal_coefficients(wing, broken)


class TestWingValidation:
    def test_rejects_nonpositive(self):
        with pytest.raises(ParameterError):
            sec6_wing(chord=-1.0)
        with pytest.raises(ParameterError):
            sec6_wing(linear_mass=0.0)

    def test_sc_position_inside_chord(self):
        with pytest.raises(ParameterError):
            sec6_wing(sc_position=10.0)

    def test_conservative_limit_allowed(self):
        sec6_wing(air_density=0.0, airspeed=0.0)


@given(z=st.floats(min_value=0.0, max_value=10.0))
def test_bending_mode_monotone_on_first_mode(z):
    # The first cantilever mode has no interior node: f >= 0, f' >= 0.
    f, df, _, _ = eval_bending_mode(z, sec6_wing())
    assert f >= -1e-12
    assert df >= -1e-12


def test_lambda_constant_satisfies_characteristic_equation():
    lam = CANTILEVER_LAMBDA_1
    assert abs(np.cos(lam) * np.cosh(lam) + 1.0) < 1e-12
