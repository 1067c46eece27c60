"""Topology construction and the functional weights chi, lambda."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from featherwing import (Adjacency, ModeShapes, ParameterError,
                         build_topology, cantilever_modes, chi_lambda,
                         consensus_term)

from test_model import sec6_wing


def linear_modes():
    # Synthetic shapes for hand-checkable chi/lambda values.
    return ModeShapes(length=10.0,
                      bending=lambda z: (np.asarray(z, dtype=float),) * 4,
                      torsion=lambda z: (np.asarray(z, dtype=float),) * 2)


class TestBuildTopology:
    def test_ring_is_row_normalized(self):
        net = build_topology("ring", 4)
        for i in range(4):
            row = net.weights[i]
            assert np.count_nonzero(row) == 2
            assert np.all(row[row > 0] == 0.5)
        assert np.allclose(net.row_sums(), 1.0)

    def test_complete_is_row_normalized(self):
        net = build_topology("complete", 5)
        assert np.allclose(net.row_sums(), 1.0)
        assert np.all(np.diagonal(net.weights) == 0.0)

    def test_path_metropolis_weights(self):
        net = build_topology("path", 3)
        assert math.isclose(net.weights[0, 1], 1 / 3, rel_tol=1e-15)
        assert math.isclose(net.weights[1, 2], 1 / 3, rel_tol=1e-15)
        assert np.array_equal(net.weights, net.weights.T)
        assert np.all(net.row_sums() <= 1.0 + 1e-15)

    def test_k_nearest_row_sums_below_one(self):
        net = build_topology("k_nearest", 7, k=2)
        assert np.all(net.row_sums() <= 1.0 + 1e-15)
        assert np.array_equal(net.weights, net.weights.T)

    def test_single_feather_is_empty(self):
        net = build_topology("path", 1)
        assert net.weights.shape == (1, 1)
        assert np.all(net.weights == 0.0)

    def test_unknown_kind(self):
        with pytest.raises(ParameterError):
            build_topology("star", 4)

    def test_ring_needs_three(self):
        with pytest.raises(ParameterError):
            build_topology("ring", 2)

    def test_explicit_weights_mirrored(self):
        net = build_topology("explicit", 3, weights=[(0, 1, 0.5), (1, 2, 0.25)])
        assert net.weights[1, 0] == 0.5
        assert net.weights[2, 1] == 0.25

    def test_explicit_asymmetric_duplicate_rejected(self):
        with pytest.raises(ParameterError, match="asymmetric"):
            build_topology("explicit", 3,
                           weights=[(0, 1, 0.5), (1, 0, 0.4)])

    def test_adjacency_validation(self):
        with pytest.raises(ParameterError):
            Adjacency(n=2, weights=np.array([[0.0, -1.0], [-1.0, 0.0]]))
        with pytest.raises(ParameterError):
            Adjacency(n=2, weights=np.array([[1.0, 0.5], [0.5, 0.0]]))
        with pytest.raises(ParameterError):
            Adjacency(n=2, weights=np.array([[0.0, 0.5], [0.4, 0.0]]))


class TestChiLambda:
    def test_hand_value_two_feathers(self):
        net = build_topology("explicit", 2, weights=[(0, 1, 0.5)])
        chi, lam = chi_lambda(net, linear_modes(), [0.0, 1.0])
        # ordered double sum: 0.5 * 1 + 0.5 * 1
        assert math.isclose(chi, 1.0, rel_tol=1e-15)
        assert math.isclose(lam, 1.0, rel_tol=1e-15)

    def test_equal_stations_are_singular(self):
        wing = sec6_wing()
        net = build_topology("path", 4)
        with pytest.warns(UserWarning, match="singular"):
            chi, lam = chi_lambda(net, cantilever_modes(wing), [3.0] * 4)
        assert chi == 0.0 and lam == 0.0

    def test_permutation_invariance(self, rng):
        wing = sec6_wing()
        modes = cantilever_modes(wing)
        net = build_topology("k_nearest", 5, k=2)
        stations = np.array([1.0, 3.0, 5.0, 7.0, 9.0])
        chi, lam = chi_lambda(net, modes, stations)
        perm = rng.permutation(5)
        permuted = Adjacency(n=5, weights=net.weights[np.ix_(perm, perm)])
        chi_p, lam_p = chi_lambda(permuted, modes, stations[perm])
        assert math.isclose(chi, chi_p, rel_tol=1e-12)
        assert math.isclose(lam, lam_p, rel_tol=1e-12)

    def test_nonnegative_and_monotone_under_new_edge(self):
        modes = linear_modes()
        stations = [0.0, 2.0, 5.0, 7.0]
        base = build_topology("explicit", 4, weights=[(0, 1, 0.3), (1, 2, 0.3)])
        more = build_topology("explicit", 4,
                              weights=[(0, 1, 0.3), (1, 2, 0.3), (2, 3, 0.2)])
        chi0, lam0 = chi_lambda(base, modes, stations)
        chi1, lam1 = chi_lambda(more, modes, stations)
        assert 0.0 <= chi0 <= chi1
        assert 0.0 <= lam0 <= lam1

    def test_station_count_checked(self):
        net = build_topology("path", 3)
        with pytest.raises(ParameterError):
            chi_lambda(net, linear_modes(), [0.0, 1.0])


class TestConsensusTerm:
    @given(st.lists(st.floats(min_value=-10, max_value=10),
                    min_size=5, max_size=5))
    def test_zero_sum_under_symmetry(self, beta):
        net = build_topology("path", 5)
        total = consensus_term(np.array(beta), net).sum()
        assert abs(total) <= 1e-12 * max(1.0, float(np.max(np.abs(beta))))

    def test_uniform_in_kernel(self):
        net = build_topology("ring", 6)
        out = consensus_term(np.full(6, 0.7), net)
        assert np.max(np.abs(out)) < 1e-15

    def test_shape_check(self):
        net = build_topology("path", 3)
        with pytest.raises(ParameterError):
            consensus_term(np.zeros(4), net)
