import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wwduality.errors import IncompleteBasisError, UndefinedOutcomeError
from wwduality.hilbert import DensityOperator, Ket, MeasurementBasis, haar_unitaries
from wwduality.interferometer import detector_state_quanton_first, detector_state_wwd_first, symmetric_wwd, WwdPair
from wwduality.optimizer import brute_force_reference
from wwduality.whichway import (
    batch_d_values,
    duality_residual,
    englert_basis,
    englert_distinguishability,
    estimate_visibility_from_pattern,
    likelihood,
    outcome_likelihood,
    visibility,
)

R = math.sqrt(0.5)
NATURAL = MeasurementBasis.standard(3)
GRID_50 = 2 * math.pi * np.arange(50) / 50


def quanton_first_rho(v, delta, sigma):
    ket, _ = detector_state_quanton_first(symmetric_wwd(v), delta, sigma)
    return DensityOperator.from_ket(ket)


def natural_line(v, delta, sigma):
    # weights 2V(1 + s cos d), 1-V, 1-V on |0>,|+>,|->; only |+>,|-> are unambiguous
    return 2 * (1 - v) / (2 * v * (1 + sigma * math.cos(delta)) + 2 * (1 - v))


class TestVisibility:
    @pytest.mark.parametrize("v", [0.0, 0.5, 1.0])
    def test_symmetric(self, v):
        assert visibility(symmetric_wwd(v)) == pytest.approx(v, abs=1e-15)

    def test_agrees_with_overlap_for_complex_pair(self):
        w = WwdPair(0.6 * np.exp(0.3j), 0.8, 0.6 * np.exp(-1.1j), 0.8j)
        assert visibility(w) == pytest.approx(abs(np.vdot(w.chi_a.amplitudes, w.chi_b.amplitudes)), abs=1e-12)

    def test_pattern_full(self):
        assert estimate_visibility_from_pattern(symmetric_wwd(1.0), 64) == pytest.approx(1, abs=1e-3)

    def test_pattern_flat(self):
        assert estimate_visibility_from_pattern(symmetric_wwd(0.0), 64) == 0.0

    def test_pattern_dense(self):
        assert estimate_visibility_from_pattern(symmetric_wwd(0.9), 256) == pytest.approx(0.9, abs=1e-3)

    def test_pattern_converges_for_shifted_fringes(self):
        w = WwdPair(0.7, math.sqrt(0.51), 0.7 * np.exp(0.4j), math.sqrt(0.51))
        coarse = abs(estimate_visibility_from_pattern(w, 16) - visibility(w))
        fine = abs(estimate_visibility_from_pattern(w, 4096) - visibility(w))
        assert fine < coarse and fine < 1e-5


class TestOutcomeLikelihood:
    def test_unambiguous(self):
        assert outcome_likelihood(symmetric_wwd(0.5), Ket.basis(3, 1)) == 1.0

    def test_overlap_direction(self):
        assert outcome_likelihood(symmetric_wwd(0.5), Ket.basis(3, 0)) == pytest.approx(0.5)

    def test_mixed_direction(self):
        assert outcome_likelihood(symmetric_wwd(0.5), Ket([R, R, 0])) == pytest.approx(0.8, abs=1e-14)

    def test_orthogonal_to_both(self):
        with pytest.raises(UndefinedOutcomeError):
            outcome_likelihood(symmetric_wwd(0.5), Ket([1, -1, -1]).normalize())


class TestLikelihood:
    def test_natural_basis_wwd_first(self):
        rep = likelihood(symmetric_wwd(0.5), NATURAL, detector_state_wwd_first(symmetric_wwd(0.5)))
        assert [w for _, w in rep.per_outcome] == pytest.approx([0.5, 0.25, 0.25], abs=1e-15)
        assert rep.total_L == pytest.approx(0.75, abs=1e-15)
        assert rep.d_value == pytest.approx(0.5, abs=1e-15)

    def test_identical_states_any_basis(self):
        w = symmetric_wwd(1.0)
        basis = MeasurementBasis(haar_unitaries(np.random.default_rng(0), 1, 3)[0])
        rep = likelihood(w, basis, detector_state_wwd_first(w))
        assert rep.total_L == pytest.approx(0.5, abs=1e-12)
        assert rep.d_value == pytest.approx(0.0, abs=1e-12)

    def test_natural_basis_quanton_first(self):
        rep = likelihood(symmetric_wwd(0.5), NATURAL, quanton_first_rho(0.5, 0.0, 1))
        assert rep.d_value == pytest.approx(1 / 3, abs=1e-14)

    def test_incomplete_basis(self):
        w = symmetric_wwd(0.5)
        with pytest.raises(IncompleteBasisError):
            likelihood(w, MeasurementBasis.from_kets([Ket.basis(3, 0), Ket.basis(3, 1)]), detector_state_wwd_first(w))

    def test_natural_closed_form_grid(self):
        for v in (0.5, 0.9, 0.97):
            for d in GRID_50:
                for s in (1, -1):
                    got = likelihood(symmetric_wwd(v), NATURAL, quanton_first_rho(v, d, s)).d_value
                    assert abs(got - natural_line(v, d, s)) < 1e-12

    def test_basis_completion_invariance(self):
        w = symmetric_wwd(0.6)
        rho = quanton_first_rho(0.6, 2.0, 1)
        full = englert_basis(w)
        # the zero-eigenvalue vector is orthogonal to span{chi_a, chi_b}
        partial = MeasurementBasis.from_kets([full[0], full[2]])
        assert abs(likelihood(w, full, rho).total_L - likelihood(w, partial, rho).total_L) < 1e-12

    @settings(max_examples=50)
    @given(st.floats(0, 1), st.floats(0, 2 * math.pi), st.sampled_from([1, -1]), st.integers(0, 2**32 - 1))
    def test_ranges_and_report_consistency(self, v, d, s, seed):
        w = symmetric_wwd(v)
        try:
            rho = quanton_first_rho(v, d, s)
        except ValueError:
            return
        u = haar_unitaries(np.random.default_rng(seed), 1, 3)[0]
        rep = likelihood(w, MeasurementBasis(u), rho)
        assert all(0.5 - 1e-12 <= lj <= 1 + 1e-12 for lj, _ in rep.per_outcome)
        assert abs(sum(wt for _, wt in rep.per_outcome) - 1) < 1e-10
        assert abs(rep.total_L - sum(lj * wt for lj, wt in rep.per_outcome)) < 1e-12
        assert -1e-12 <= rep.d_value <= 1 + 1e-12


def test_batch_matches_single_basis():
    rng = np.random.default_rng(3)
    for v, d, s in [(0.3, 1.0, 1), (0.9, 2.5, -1), (0.97, 0.1, 1)]:
        w = symmetric_wwd(v)
        ket, _ = detector_state_quanton_first(w, d, s)
        rho = DensityOperator.from_ket(ket)
        us = haar_unitaries(rng, 50, 3)
        batch = batch_d_values(w, ket.amplitudes, us)
        single = [likelihood(w, MeasurementBasis(u), rho).d_value for u in us]
        np.testing.assert_allclose(batch, single, atol=1e-13)


class TestEnglert:
    def test_perfect_detector(self):
        b = englert_basis(symmetric_wwd(0.0))
        overlaps = np.abs(b.vectors) ** 2
        # eigenvalues 1, 0, -1 belong to |+>, |0>, |->
        np.testing.assert_allclose(overlaps, np.eye(3)[:, [1, 0, 2]], atol=1e-12)

    def test_degenerate_returns_natural(self):
        np.testing.assert_array_equal(englert_basis(symmetric_wwd(1.0)).vectors, np.eye(3))

    def test_half_visibility_eigenvalues(self):
        w = symmetric_wwd(0.5)
        b = englert_basis(w)
        rho = (w.chi_a.projector() - w.chi_b.projector()).entries
        vals = [np.vdot(k.amplitudes, rho @ k.amplitudes).real for k in b]
        np.testing.assert_allclose(vals, [math.sqrt(0.75), 0, -math.sqrt(0.75)], atol=1e-12)

    def test_distinguishability_values(self):
        assert englert_distinguishability(symmetric_wwd(0.6)) == pytest.approx(0.8, abs=1e-15)
        assert englert_distinguishability(symmetric_wwd(0.0)) == 1.0
        assert englert_distinguishability(symmetric_wwd(1.0)) == 0.0

    @given(st.floats(0, 1))
    def test_basis_attains_distinguishability(self, v):
        w = symmetric_wwd(v)
        rep = likelihood(w, englert_basis(w), detector_state_wwd_first(w))
        assert abs(rep.d_value - englert_distinguishability(w)) < 1e-10

    def test_optimal_when_detector_read_first(self):
        rng = np.random.default_rng(1996)
        for v in (0.25, 0.5, 0.75, 0.9):
            w = symmetric_wwd(v)
            rho = detector_state_wwd_first(w)
            ds = [likelihood(w, MeasurementBasis(u), rho).d_value for u in haar_unitaries(rng, 1000, 3)]
            assert max(ds) <= englert_distinguishability(w) + 1e-9

    @pytest.mark.parametrize("v", [0.5, 0.9, 0.97])
    def test_quanton_first_anchor_at_zero_phase(self, v):
        w = symmetric_wwd(v)
        d = likelihood(w, englert_basis(w), quanton_first_rho(v, 0.0, 1)).d_value
        assert abs(d - math.sqrt(1 - v * v)) < 1e-10

    def test_anchor_cross_checked_by_brute_force(self):
        w = symmetric_wwd(0.9)
        ref = brute_force_reference(w, 0.0, 1, samples=100_000, seed=8)
        assert abs(ref - math.sqrt(1 - 0.81)) < 5e-3


class TestDualityResidual:
    @given(st.floats(0, 1))
    def test_saturated_by_wwd_first(self, v):
        assert abs(duality_residual(math.sqrt(1 - v * v), v)) < 1e-12

    def test_violation(self):
        assert duality_residual(1.0, 0.9) == pytest.approx(0.81, abs=1e-15)

    def test_null(self):
        assert duality_residual(0.0, 0.0) == -1.0
