"""Unit tests for Gaussian maps: action, composition, positivity battery."""

import numpy as np
import pytest

from gaussdiv import (
    GaussianMap,
    GaussianState,
    SingularMapError,
    apply,
    classify_positivity,
    compose,
    extend,
    is_cp,
    is_kpositive_falsifier,
    is_positive_one_mode,
    is_valid_covariance,
    quantum_limit_gap,
    random_gaussian_map,
    symplectic_form,
    tmsv_witness,
)

SQRT2 = np.sqrt(2.0)


class TestApply:
    def test_identity_on_vacuum(self):
        out = apply(GaussianMap.identity(1), GaussianState.vacuum(1))
        assert np.array_equal(out.sigma, 0.5 * np.eye(2))
        assert np.array_equal(out.D, np.zeros(2))

    def test_attenuator_fixes_vacuum(self):
        """Loss mixes with vacuum: eta/2 + (1 - eta)/2 = 1/2."""
        out = apply(GaussianMap.attenuator(0.5), GaussianState.vacuum(1))
        assert out.sigma == pytest.approx(0.5 * np.eye(2), abs=1e-15)

    def test_scaling_map(self):
        st = GaussianState(1, np.array([1.0, 0.0]), 0.5 * np.eye(2))
        out = apply(GaussianMap(1, 2.0 * np.eye(2), np.zeros((2, 2))), st)
        assert out.D == pytest.approx([2.0, 0.0])
        assert out.sigma == pytest.approx(2.0 * np.eye(2))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mode counts"):
            apply(GaussianMap.identity(2), GaussianState.vacuum(1))


class TestCompose:
    def test_identity_neutral(self, rng):
        for _ in range(10):
            m = GaussianMap(1, rng.uniform(-2, 2, (2, 2)),
                            _random_symmetric(rng))
            c = compose(GaussianMap.identity(1), m)
            assert np.abs(c.X - m.X).max() < 1e-15
            assert np.abs(c.Y - m.Y).max() < 1e-15

    def test_attenuators_multiply(self):
        """Two losses compose to the product transmissivity with vacuum noise."""
        c = compose(GaussianMap.attenuator(0.7), GaussianMap.attenuator(0.4))
        eta = 0.7 * 0.4
        assert c.X == pytest.approx(np.sqrt(eta) * np.eye(2), abs=1e-14)
        assert c.Y == pytest.approx(0.5 * (1 - eta) * np.eye(2), abs=1e-14)

    def test_matches_sequential_apply(self, rng):
        """Composition equals applying the maps one after the other."""
        for _ in range(20):
            m1 = GaussianMap(1, rng.uniform(-2, 2, (2, 2)), _random_symmetric(rng))
            m2 = GaussianMap(1, rng.uniform(-2, 2, (2, 2)), _random_symmetric(rng))
            st = GaussianState(1, rng.uniform(-1, 1, 2), np.eye(2))
            via_compose = apply(compose(m2, m1), st)
            via_sequence = apply(m2, apply(m1, st))
            assert np.abs(via_compose.sigma - via_sequence.sigma).max() < 1e-12
            assert np.abs(via_compose.D - via_sequence.D).max() < 1e-12

    def test_associativity(self, rng):
        for _ in range(20):
            ms = [GaussianMap(1, rng.uniform(-2, 2, (2, 2)), _random_symmetric(rng))
                  for _ in range(3)]
            left = compose(compose(ms[2], ms[1]), ms[0])
            right = compose(ms[2], compose(ms[1], ms[0]))
            assert np.abs(left.X - right.X).max() < 1e-12
            assert np.abs(left.Y - right.Y).max() < 1e-12


def _random_symmetric(rng):
    A = rng.uniform(-1, 1, (2, 2))
    return A + A.T


class TestIsCp:
    def test_quantum_limited_amplifier_is_boundary(self):
        ok, margin = is_cp(GaussianMap.amplifier(SQRT2, 0.5))
        assert ok
        assert margin == pytest.approx(0.0, abs=1e-12)

    def test_sub_limit_amplifier_fails(self):
        ok, margin = is_cp(GaussianMap.amplifier(SQRT2, 0.25))
        assert not ok
        assert margin == pytest.approx(-0.25, abs=1e-12)

    def test_transposition_margin(self):
        """X Omega X^T = -Omega, so the test matrix is -i Omega: margin -1."""
        ok, margin = is_cp(GaussianMap.transposition())
        assert not ok
        assert margin == pytest.approx(-1.0, abs=1e-12)


class TestPositiveOneMode:
    def test_transposition_is_positive(self):
        """Transposed pure covariances stay pure, so the scan never dips."""
        ok, margin, _ = is_positive_one_mode(GaussianMap.transposition())
        assert ok
        assert margin >= -1e-9

    def test_cp_implies_positive(self):
        """Region nesting on 1000 random one-mode maps."""
        checked = 0
        for seed in range(1000):
            m = random_gaussian_map(1, 2.0, seed)
            cp, _ = is_cp(m)
            if not cp or abs(np.linalg.det(m.X)) < 1e-12:
                continue
            ok, _, _ = is_positive_one_mode(m)
            assert ok, f"CP map {seed} failed the positivity scan"
            checked += 1
        assert checked > 100

    def test_negative_noise_detected(self):
        """X = 1, Y = -(1/4) 1 fails already on the vacuum probe."""
        m = GaussianMap(1, np.eye(2), -0.25 * np.eye(2))
        ok, margin, witness = is_positive_one_mode(m)
        assert not ok
        assert margin == pytest.approx(-0.25, abs=1e-9)
        # The witness certifies the violation directly.
        probe = 0.5 * witness @ witness.T
        out = m.X @ probe @ m.X.T + m.Y
        assert not is_valid_covariance(out, tol=1e-9)[0]

    def test_singular_x_rejected(self):
        m = GaussianMap(1, np.diag([1.0, 0.0]), np.eye(2))
        with pytest.raises(SingularMapError):
            is_positive_one_mode(m)


class TestExtend:
    def test_identity_extension(self):
        ext = extend(GaussianMap.identity(1), 1)
        assert ext.n == 2
        assert np.array_equal(ext.X, np.eye(4))
        assert np.array_equal(ext.Y, np.zeros((4, 4)))

    def test_attenuator_extension(self):
        ext = extend(GaussianMap.attenuator(0.5), 1)
        root = np.sqrt(0.5)
        assert ext.X == pytest.approx(np.diag([root, root, 1.0, 1.0]))

    def test_extension_composes(self):
        m = GaussianMap(1, np.diag([1.5, 2.0 / 3.0]), np.eye(2))
        once_twice = extend(extend(m, 1), 1)
        at_once = extend(m, 2)
        assert np.array_equal(once_twice.X, at_once.X)
        assert np.array_equal(once_twice.Y, at_once.Y)


class TestKPositivityFalsifier:
    def test_identity_never_violated(self):
        for k in (1, 2):
            verdict, witness = is_kpositive_falsifier(GaussianMap.identity(1), k)
            assert verdict == "no-violation-found"
            assert witness is None

    def test_transposition_violated_by_squeezed_witness(self):
        verdict, witness = is_kpositive_falsifier(
            GaussianMap.transposition(), 1, r_grid=[1.0], samples=0
        )
        assert verdict == "violated"
        # Brute-force oracle: partially transpose the two-mode squeezed state
        # and check the uncertainty relation directly.
        cov = tmsv_witness(1.0).covariance
        flip = np.diag([1.0, -1.0, 1.0, 1.0])
        transformed = flip @ cov @ flip.T
        omega = symplectic_form(2)
        eigs = np.linalg.eigvalsh(transformed - 0.5j * omega)
        assert eigs[0] < -1e-3
        assert witness.validity(tol=1e-9)[0]

    def test_quantum_limited_amplifier_never_violated(self):
        m = GaussianMap.amplifier(SQRT2, 0.5)
        verdict, _ = is_kpositive_falsifier(m, 1)
        assert verdict == "no-violation-found"


class TestQuantumLimitGap:
    def test_boundary_amplifier(self):
        assert quantum_limit_gap(GaussianMap.amplifier(SQRT2, 0.5)) == pytest.approx(
            0.0, abs=1e-15
        )

    def test_identity(self):
        assert quantum_limit_gap(GaussianMap.identity(1)) == 0.0

    def test_sub_limit(self):
        assert quantum_limit_gap(GaussianMap.amplifier(SQRT2, 0.25)) == pytest.approx(
            -0.25, abs=1e-14
        )

    def test_rejects_phase_sensitive(self):
        with pytest.raises(ValueError, match="identity"):
            quantum_limit_gap(GaussianMap(1, np.diag([2.0, 0.5]), np.zeros((2, 2))))

    def test_gap_sign_matches_cp(self):
        """For phase-insensitive maps: beats the limit iff not CP."""
        for g in (0.5, 1.0, 1.3, SQRT2, 2.0):
            for y in (0.0, 0.1, 0.4, 0.5, 1.0):
                m = GaussianMap.amplifier(g, y)
                gap = quantum_limit_gap(m)
                cp, _ = is_cp(m)
                assert (gap < -1e-9) == (not cp)


class TestCpPreservesValidity:
    def test_random_cp_maps_on_random_states(self, rng):
        """CP maps never break the uncertainty relation of a valid input."""
        from gaussdiv import random_symplectic

        checked = 0
        for seed in range(300):
            m = random_gaussian_map(1, 2.0, seed)
            if not is_cp(m)[0]:
                continue
            S = random_symplectic(1, 1.5, seed)
            sigma = S @ (rng.uniform(0.5, 2.0) * 0.5 * np.eye(2)) @ S.T
            state = GaussianState(1, rng.uniform(-1, 1, 2), sigma)
            out = apply(m, state)
            ok, margin = is_valid_covariance(out.sigma, tol=1e-8)
            assert ok, f"seed {seed}: margin {margin}"
            checked += 1
        assert checked > 50


class TestClassifyPositivity:
    def test_three_classes(self):
        assert classify_positivity(GaussianMap.attenuator(0.5)).klass == "CP"
        assert classify_positivity(GaussianMap.transposition()).klass == "P_not_CP"
        m = GaussianMap(1, np.eye(2), -0.25 * np.eye(2))
        verdict = classify_positivity(m)
        assert verdict.klass == "NP"
        assert verdict.witness is not None

    def test_multimode_falsifier_only(self):
        """Two-mode transposition is flagged NP by sampling, with the caveat."""
        flip = np.diag([1.0, -1.0, 1.0, 1.0])
        m = GaussianMap(2, flip, np.zeros((4, 4)))
        verdict = classify_positivity(m, samples=300)
        assert verdict.klass == "NP"
        assert verdict.falsifier_only
