"""Closed-form X-state candidates against the brute-force oracle."""

import math

import numpy as np
import pytest

from qdiscord.datagen import SamplerConfig, make_rng, sample_xstate
from qdiscord.quantum_core import (
    BlochDirection,
    conditional_entropy,
    minimize_conditional_entropy,
    validate_density_matrix,
)
from qdiscord.xstate import (
    CandidateSet,
    ConstraintViolatedError,
    DomainError,
    analytic_c,
    bias_entropy,
    example_analytic_c,
    example_oracle_c,
    example_state,
    example_valid_interval,
    pauli_candidates,
    validate_xstate_params,
    xstate_from_params,
)

BELL = np.array([0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0])
MIXED = np.array([0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0])


class TestBiasEntropy:
    def test_endpoints(self):
        assert bias_entropy(0.0) == 1.0
        assert bias_entropy(1.0) == 0.0
        assert bias_entropy(-1.0) == 0.0

    def test_symmetry_and_midpoint(self):
        assert bias_entropy(0.5) == pytest.approx(bias_entropy(-0.5))
        # H(0.25, 0.75) = 2 - 0.75 log2(3)
        assert bias_entropy(0.5) == pytest.approx(2.0 - 0.75 * math.log2(3.0), abs=1e-15)

    def test_monotone_decreasing_on_unit_interval(self):
        grid = np.linspace(0.0, 1.0, 101)
        values = [bias_entropy(t) for t in grid]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_domain_error_beyond_one(self):
        with pytest.raises(DomainError):
            bias_entropy(1.001)
        # tolerance slack: barely-above-one biases clamp instead of raising
        assert bias_entropy(1.0 + 1e-13) == 0.0


class TestParamsAndBuilder:
    def test_wrong_shape(self):
        with pytest.raises(ValueError, match="7"):
            validate_xstate_params(np.zeros(5))

    def test_negative_diagonal(self):
        with pytest.raises(ConstraintViolatedError, match="rho_44"):
            validate_xstate_params(np.array([0.5, 0.4, 0.2, 0, 0, 0, 0]))

    def test_coherence_bounds(self):
        with pytest.raises(ConstraintViolatedError, match="rho_14"):
            validate_xstate_params(np.array([0.25, 0.25, 0.25, 0.3, 0, 0, 0]))
        with pytest.raises(ConstraintViolatedError, match="rho_23"):
            validate_xstate_params(np.array([0.25, 0.25, 0.25, 0, 0, 0.2, 0.2]))

    def test_builder_places_x_pattern(self):
        x = np.array([0.3, 0.25, 0.25, 0.1, -0.05, 0.05, 0.02])
        rho = xstate_from_params(x).matrix
        assert rho[0, 3] == pytest.approx(0.1 - 0.05j)
        assert rho[1, 2] == pytest.approx(0.05 + 0.02j)
        assert rho[3, 0] == np.conj(rho[0, 3])
        for i, j in ((0, 1), (0, 2), (1, 3), (2, 3)):
            assert rho[i, j] == 0.0
        assert np.trace(rho).real == pytest.approx(1.0)


class TestPauliCandidates:
    def test_bell_state_candidates_vanish(self):
        cs = pauli_candidates(BELL)
        assert cs.values() == (0.0, 0.0, 0.0)
        assert cs.min_value() == 0.0

    def test_maximally_mixed_candidates_are_one(self):
        cs = pauli_candidates(MIXED)
        assert cs.values() == (1.0, 1.0, 1.0)

    def test_axes_geometry(self):
        cs = pauli_candidates(np.array([0.3, 0.25, 0.25, 0.1, 0.0, 0.05, 0.0]))
        assert cs.axis_z == BlochDirection(0.0, 0.0)
        assert cs.axis_x.theta == pytest.approx(math.pi / 2)
        assert cs.axis_y.theta == pytest.approx(math.pi / 2)
        # real coherences align on the literal sigma_x / sigma_y azimuths
        assert cs.axis_x.phi == 0.0
        assert cs.axis_y.phi == pytest.approx(math.pi / 2)

    def test_candidates_match_axis_conditional_entropy(self):
        # dual route: closed forms vs the measured conditional entropy
        cfg = SamplerConfig("xstate", 71)
        rng = make_rng(cfg.seed)
        for _ in range(30):
            x = sample_xstate(cfg, rng)
            rho = xstate_from_params(x)
            cs = pauli_candidates(x)
            for value, axis in (
                (cs.s_z, cs.axis_z),
                (cs.s_x, cs.axis_x),
                (cs.s_y, cs.axis_y),
            ):
                assert value == pytest.approx(conditional_entropy(rho, axis), abs=1e-10)

    def test_candidate_min_upper_bounds_oracle(self):
        cfg = SamplerConfig("xstate", 72)
        rng = make_rng(cfg.seed)
        hits = 0
        for _ in range(30):
            x = sample_xstate(cfg, rng)
            oracle = minimize_conditional_entropy(xstate_from_params(x)).c_min
            cand = analytic_c(x)
            assert cand >= oracle - 1e-6
            hits += cand - oracle <= 1e-4
        assert hits >= 24  # the three axes cover most but not all minima

    def test_phase_invariance(self):
        # candidate values depend only on coherence magnitudes, matching
        # the local-unitary freedom that gauges both phases away
        base = np.array([0.3, 0.25, 0.25, 0.12, 0.0, 0.08, 0.0])
        m14, m23 = 0.12, 0.08
        for ph14, ph23 in ((0.7, -1.3), (2.9, 0.4), (-0.2, 3.0)):
            phased = np.array(
                [
                    0.3,
                    0.25,
                    0.25,
                    m14 * math.cos(ph14),
                    m14 * math.sin(ph14),
                    m23 * math.cos(ph23),
                    m23 * math.sin(ph23),
                ]
            )
            cs0, cs1 = pauli_candidates(base), pauli_candidates(phased)
            assert cs1.s_z == pytest.approx(cs0.s_z, abs=1e-12)
            assert cs1.s_x == pytest.approx(cs0.s_x, abs=1e-12)
            assert cs1.s_y == pytest.approx(cs0.s_y, abs=1e-12)
            oracle0 = minimize_conditional_entropy(xstate_from_params(base)).c_min
            oracle1 = minimize_conditional_entropy(xstate_from_params(phased)).c_min
            assert oracle1 == pytest.approx(oracle0, abs=1e-7)

    def test_candidate_set_helpers(self):
        cs = CandidateSet(0.3, 0.2, 0.5, BlochDirection(0, 0), BlochDirection(1, 0), BlochDirection(1, 1))
        assert cs.values() == (0.3, 0.2, 0.5)
        assert cs.min_value() == 0.2


class TestExampleFamily:
    def test_matrix_entries_at_zero(self):
        rho = example_state(0.0)
        expected = np.array(
            [
                [0.35, 0, 0, -0.2],
                [0, 0.25, -0.15, 0],
                [0, -0.15, 0.2, 0],
                [-0.2, 0, 0, 0.2],
            ]
        )
        np.testing.assert_allclose(rho, expected)

    def test_trace_drifts_linearly(self):
        for a in (-0.05, 0.0, 0.3, 1.0):
            assert example_state(a).trace().real == pytest.approx(1.0 + 0.2 * a)

    def test_thetas_at_zero(self):
        curves = example_analytic_c(0.0)
        t1, t2, t3, t4 = curves.thetas
        assert t1 == pytest.approx(0.15 / 0.55, abs=1e-12)
        assert t2 == pytest.approx(0.05 / 0.45, abs=1e-12)
        assert t3 == pytest.approx(math.sqrt(0.53), abs=1e-12)
        assert t4 == pytest.approx(math.sqrt(0.05), abs=1e-12)

    def test_curves_at_zero(self):
        curves = example_analytic_c(0.0)
        s_z = 0.55 * bias_entropy(3.0 / 11.0) + 0.45 * bias_entropy(1.0 / 9.0)
        assert curves.s_z == pytest.approx(s_z, abs=1e-15)
        assert curves.s_x == pytest.approx(bias_entropy(math.sqrt(0.53)), abs=1e-15)
        assert curves.s_y == pytest.approx(bias_entropy(math.sqrt(0.05)), abs=1e-15)
        assert curves.c_min == min(curves.s_z, curves.s_x, curves.s_y)

    def test_analytic_matches_oracle_at_zero(self):
        curves = example_analytic_c(0.0)
        assert example_oracle_c(0.0) == pytest.approx(curves.c_min, abs=1e-4)

    def test_curves_match_measured_entropy_at_zero(self):
        # a=0 is the one point where the raw matrix is exactly normalized,
        # so each literature curve must equal the measured value at its axis
        rho = validate_density_matrix(example_state(0.0))
        curves = example_analytic_c(0.0)
        half_pi = math.pi / 2
        for value, axis in (
            (curves.s_z, BlochDirection(0.0, 0.0)),
            (curves.s_x, BlochDirection(half_pi, 0.0)),
            (curves.s_y, BlochDirection(half_pi, half_pi)),
        ):
            assert value == pytest.approx(conditional_entropy(rho, axis), abs=1e-10)

    def test_domain_error_outside_formula_range(self):
        with pytest.raises(DomainError, match="theta"):
            example_analytic_c(-0.5)

    def test_valid_interval_brackets_zero(self):
        lo, hi = example_valid_interval(-0.2, 1.2, 701)
        assert lo <= 0.0 <= hi
        assert lo == pytest.approx(-0.0739, abs=5e-3)
        assert hi == pytest.approx(1.0, abs=5e-3)
