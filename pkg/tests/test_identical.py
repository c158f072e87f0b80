import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from kdsim.errors import DegenerateStateError, DomainError
from kdsim.grating import GratingConfig
from kdsim.identical import (
    ANALYTIC,
    ParticleStatistics,
    complementarity_sweep,
    diffracted_identical_amplitude,
    entangled_domain_lower_bound,
    norm_integral_identical,
    norm_integral_identical_quadrature,
    normalization_identical,
    overlap,
    overlap_analytic,
    overlap_quadrature,
    pattern_identical_slice,
    symmetrize,
)
from kdsim.multimode import (
    GaussianEntangledState,
    initial_amplitude,
    pattern_slice,
    schmidt_number,
)
from kdsim.numerics import QuadratureSpec, quad2d

FIG4_GRATING = GratingConfig(w=0.3, k=0.2, n_max=2)


def _closed_norm_of_phi0(state):
    return math.pi * state.q_spread * state.q_star_spread * schmidt_number(state) / 2.0


class TestOverlap:
    def test_symmetric_state_has_unit_overlap(self):
        for p_coupling in (0.75, 1.1, 5.0, math.inf):
            assert overlap_analytic(GaussianEntangledState(1.0, 1.0, p_coupling)) == 1.0

    def test_product_limit(self):
        """theta -> 2 Q Q* / (Q^2 + Q*^2) as the coupling opens up."""
        value = overlap_analytic(GaussianEntangledState(1.0, 0.9))
        assert_allclose(value, 1.8 / 1.81, rtol=1e-14)
        near = overlap_analytic(GaussianEntangledState(1.0, 0.9, 100.0))
        assert abs(near - 1.8 / 1.81) < 1e-6

    def test_vanishes_at_domain_boundary(self):
        bound = entangled_domain_lower_bound(1.0, 0.9)
        value = overlap_analytic(GaussianEntangledState(1.0, 0.9, bound * (1.0 + 1e-9)))
        assert value < 1e-3

    def test_quadrature_matches_closed_form(self):
        state = GaussianEntangledState(1.0, 0.9, 1.1)
        assert abs(overlap_quadrature(state) - overlap_analytic(state)) < 1e-8

    def test_quadrature_matches_closed_form_randomized(self, rng):
        for _ in range(5):
            q_spread = float(rng.uniform(0.7, 1.4))
            q_star = float(rng.uniform(0.7, 1.4))
            bound = entangled_domain_lower_bound(q_spread, q_star)
            p_coupling = float(rng.uniform(1.2 * bound, 3.0))
            state = GaussianEntangledState(q_spread, q_star, p_coupling)
            assert abs(overlap_quadrature(state) - overlap_analytic(state)) < 1e-8

    def test_antisymmetric_perturbation_flips_sign(self):
        """Oracle sanity probe: multiplying the kernel by (p - q) makes the
        exchange integral negative."""
        state = GaussianEntangledState(1.0, 0.9, 1.1)

        def crossed(p, q):
            return (p - q) * initial_amplitude(state, p, q) * (q - p) * initial_amplitude(state, q, p)

        value, _ = quad2d(crossed)
        assert value < 0.0

    def test_overlap_estimate_records_method(self):
        est = overlap(GaussianEntangledState(1.0, 0.9, 1.1))
        assert est.method == ANALYTIC
        assert 0.0 <= est.value <= 1.0


class TestSymmetrize:
    def test_boson_with_symmetric_base_matches_plain_pipeline(self):
        """Symmetric entanglement cancels exchange effects for bosons."""
        state = GaussianEntangledState(1.0, 1.0, 1.1)
        pair = symmetrize(state, ParticleStatistics.BOSON, FIG4_GRATING)
        q_axis = np.linspace(-4.0, 4.0, 201)
        with_exchange = pattern_identical_slice(pair, 0.0, q_axis)
        plain = pattern_slice(state, FIG4_GRATING, FIG4_GRATING, 0.0, q_axis)
        assert np.max(np.abs(with_exchange.values - plain.values)) < 1e-10

    def test_fermion_with_symmetric_base_is_degenerate(self):
        state = GaussianEntangledState(1.0, 1.0, 1.1)
        with pytest.raises(DegenerateStateError, match=r"state undefined \(0/0\)"):
            symmetrize(state, ParticleStatistics.FERMION, FIG4_GRATING)

    def test_fermion_with_asymmetric_base_is_valid(self):
        state = GaussianEntangledState(1.0, 0.9, 1.1)
        pair = symmetrize(state, ParticleStatistics.FERMION, FIG4_GRATING)
        assert pair.statistics is ParticleStatistics.FERMION
        assert 0.0 < pair.overlap < 1.0
        assert pair.overlap_method == ANALYTIC

    def test_statistics_signs(self):
        assert ParticleStatistics.BOSON.sign == 1
        assert ParticleStatistics.FERMION.sign == -1


class TestDiffractedIdenticalAmplitude:
    def test_fermion_vanishes_on_the_diagonal(self):
        state = GaussianEntangledState(1.0, 0.9, 1.1)
        pair = symmetrize(state, ParticleStatistics.FERMION, FIG4_GRATING)
        assert diffracted_identical_amplitude(pair, 0.3, 0.3) == 0.0
        assert diffracted_identical_amplitude(pair, -1.7, -1.7) == 0.0
        # and before diffraction (identity grating)
        undiffracted = symmetrize(
            state, ParticleStatistics.FERMION, GratingConfig(w=0.0, k=0.2, n_max=2)
        )
        assert diffracted_identical_amplitude(undiffracted, 0.3, 0.3) == 0.0

    def test_antisymmetry_and_symmetry_under_exchange(self, rng):
        state = GaussianEntangledState(1.0, 0.9, 1.1)
        fermion = symmetrize(state, ParticleStatistics.FERMION, FIG4_GRATING)
        boson = symmetrize(state, ParticleStatistics.BOSON, FIG4_GRATING)
        for _ in range(15):
            p, q = rng.uniform(-2, 2, size=2)
            assert_allclose(
                diffracted_identical_amplitude(fermion, p, q),
                -diffracted_identical_amplitude(fermion, q, p),
                rtol=1e-12,
                atol=1e-300,
            )
            assert_allclose(
                diffracted_identical_amplitude(boson, p, q),
                diffracted_identical_amplitude(boson, q, p),
                rtol=1e-12,
            )

    def test_boson_zero_pulse_area_reproduces_symmetrized_state(self, rng):
        """With w = 0 the amplitude is (2 + 2 theta)^(-1/2) (phi0(p,q) +
        phi0(q,p)) over the normalized base state."""
        state = GaussianEntangledState(1.0, 0.9, 1.1)
        grating = GratingConfig(w=0.0, k=0.2, n_max=2)
        pair = symmetrize(state, ParticleStatistics.BOSON, grating)
        theta = overlap_analytic(state)
        base_norm = math.sqrt(_closed_norm_of_phi0(state))
        for _ in range(10):
            p, q = rng.uniform(-2, 2, size=2)
            expected = (
                (initial_amplitude(state, p, q) + initial_amplitude(state, q, p))
                / base_norm
                / math.sqrt(2.0 + 2.0 * theta)
            )
            assert_allclose(diffracted_identical_amplitude(pair, p, q), expected, rtol=1e-12)

    def test_boson_peak_at_origin(self):
        state = GaussianEntangledState(1.0, 0.9, 1.1)
        pair = symmetrize(state, ParticleStatistics.BOSON, FIG4_GRATING)
        center = abs(diffracted_identical_amplitude(pair, 0.0, 0.0))
        assert center > 0.0


class TestNormalizationIdentical:
    def test_zero_pulse_area_against_quadrature(self):
        state = GaussianEntangledState(1.0, 0.9, 1.1)
        grating = GratingConfig(w=0.0, k=0.2, n_max=2)
        for stats in ParticleStatistics:
            pair = symmetrize(state, stats, grating)

            def integrand(p, q):
                return (
                    initial_amplitude(state, p, q) + stats.sign * initial_amplitude(state, q, p)
                ) ** 2

            brute, _ = quad2d(integrand)
            assert_allclose(norm_integral_identical(pair), brute, rtol=1e-10)

    def test_lattice_sum_matches_quadrature(self):
        for p_coupling in (200.0, 1.1, 0.75):
            state = GaussianEntangledState(1.0, 0.9, p_coupling)
            for stats in ParticleStatistics:
                pair = symmetrize(state, stats, FIG4_GRATING)
                analytic = norm_integral_identical(pair)
                quad = norm_integral_identical_quadrature(pair)
                assert abs(analytic - quad) / analytic < 1e-10

    def test_independent_of_pulse_area(self):
        # the fermion integral is a small difference of two larger sums, so
        # its relative tail sensitivity is amplified by ~1/(1 - theta)
        state = GaussianEntangledState(1.0, 0.9, 1.1)
        reference = None
        for w in (0.0, 0.5, 1.0):
            grating = GratingConfig.auto_truncated(w, 0.2, 1e-15)
            pair = symmetrize(state, ParticleStatistics.FERMION, grating)
            value = norm_integral_identical(pair)
            if reference is None:
                reference = value
            assert abs(value - reference) / reference < 1e-6

    def test_normalized_state_has_unit_norm(self):
        spec = QuadratureSpec(order=128, box_halfwidth=10.0)
        state = GaussianEntangledState(1.0, 0.9, 1.1)
        for stats in ParticleStatistics:
            pair = symmetrize(state, stats, FIG4_GRATING)

            def integrand(p, q):
                return np.abs(diffracted_identical_amplitude(pair, p, q)) ** 2

            value, _ = quad2d(integrand, spec)
            assert abs(value - 1.0) < 1e-6

    def test_normalization_factor_definition(self):
        state = GaussianEntangledState(1.0, 0.9, 1.1)
        pair = symmetrize(state, ParticleStatistics.BOSON, FIG4_GRATING)
        assert_allclose(
            normalization_identical(pair), norm_integral_identical(pair) ** -0.5, rtol=1e-14
        )


class TestPatternIdenticalSlice:
    def _slices(self, p_coupling):
        state = GaussianEntangledState(1.0, 0.9, p_coupling)
        q_axis = np.arange(-4.0, 4.0001, 0.02)
        out = {}
        for stats in ParticleStatistics:
            pair = symmetrize(state, stats, FIG4_GRATING)
            out[stats] = pattern_identical_slice(pair, 0.0, q_axis)
        return q_axis, out

    def test_fermion_valley_with_two_symmetric_peaks(self):
        q_axis, slices = self._slices(1.1)
        values = slices[ParticleStatistics.FERMION].values
        mid = q_axis.size // 2
        assert values[mid] < 1e-25
        peak = int(np.argmax(values))
        assert peak != mid
        mirrored = q_axis.size - 1 - peak
        assert_allclose(values[peak], values[mirrored], rtol=1e-9)
        assert values[peak] > values[mid]

    def test_boson_peaked_at_origin(self):
        q_axis, slices = self._slices(1.1)
        values = slices[ParticleStatistics.BOSON].values
        assert int(np.argmax(values)) == q_axis.size // 2

    def test_visibility_tracks_entanglement(self):
        """max - min over the slice differs across coupling spreads."""
        for stats in ParticleStatistics:
            visibilities = []
            for p_coupling in (200.0, 1.1, 0.75):
                _, slices = self._slices(p_coupling)
                values = slices[stats].values
                visibilities.append(float(values.max() - values.min()))
            for a, b in zip(visibilities, visibilities[1:]):
                assert abs(a - b) / max(a, b) > 0.01

    def test_metadata(self):
        _, slices = self._slices(1.1)
        meta = slices[ParticleStatistics.FERMION].meta
        assert meta["statistics"] == "fermion"
        assert meta["K"] == 0.2
        assert 0.0 < meta["overlap"] < 1.0


class TestComplementaritySweep:
    def test_endpoint_limits(self):
        bound = entangled_domain_lower_bound(1.0, 0.9)
        p_axis = np.concatenate([[bound * (1.0 + 1e-9)], np.geomspace(0.8, 100.0, 12)])
        table = complementarity_sweep(1.0, 0.9, p_axis)
        schmidt = table.rows[:, 1]
        theta = table.rows[:, 2]
        assert theta[0] < 1e-3 and schmidt[0] > 1e3
        assert abs(theta[-1] - 1.8 / 1.81) < 1e-6
        assert abs(schmidt[-1] - 1.0) < 1e-6

    def test_monotone_on_sampled_grid(self):
        p_axis = np.geomspace(0.75, 50.0, 25)
        table = complementarity_sweep(1.0, 0.9, p_axis)
        assert np.all(np.diff(table.rows[:, 1]) <= 0)
        assert np.all(np.diff(table.rows[:, 2]) >= 0)

    def test_symmetric_spreads_pin_overlap_at_one(self):
        table = complementarity_sweep(1.0, 1.0, np.geomspace(0.75, 10.0, 8))
        assert_allclose(table.rows[:, 2], 1.0, atol=1e-12)
        assert table.rows[0, 1] > table.rows[-1, 1]

    def test_outside_domain_rejected(self):
        with pytest.raises(DomainError):
            complementarity_sweep(1.0, 0.9, [0.3])
