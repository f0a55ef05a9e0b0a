import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from gatecheck.exceptions import ConstructionError, ProductStateError
from gatecheck.gates import gate_names, named_gate
from gatecheck.kak import MAGIC_BASIS, kak_decompose
from gatecheck.product_finder import (
    T_VECTOR,
    TAU_PROD,
    amplitudes_from_squares,
    find_product_preserving_state,
    invariance_vectors,
    null_space_vector,
    product_condition,
    verify_product_preservation,
)
from gatecheck.qmath import PHI_PLUS, haar_random_ket, haar_random_unitary, is_product, schmidt_decompose

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class InvarianceVectorTests(SimpleTestCase):
    def test_zero_interaction(self):
        vectors = invariance_vectors(np.zeros(4))
        np.testing.assert_array_equal(vectors.t, T_VECTOR)
        np.testing.assert_allclose(vectors.u_re, T_VECTOR)
        np.testing.assert_allclose(vectors.u_im, 0.0)

    def test_null_vector_is_orthogonal_and_l1_normalized(self):
        for lambdas in ([0.9, 0.2, -0.4, -0.7], [0.0] * 4, [np.pi / 4, np.pi / 4, -np.pi / 4, -np.pi / 4]):
            with self.subTest(lambdas=lambdas):
                vectors = invariance_vectors(lambdas)
                v = null_space_vector(vectors)
                np.testing.assert_allclose(vectors.stacked() @ v, 0.0, atol=1e-10)
                self.assertAlmostEqual(np.sum(np.abs(v)), 1.0)

    def test_degenerate_choice_is_deterministic(self):
        vectors = invariance_vectors(np.zeros(4))
        np.testing.assert_array_equal(null_space_vector(vectors), null_space_vector(vectors))


class AmplitudeTests(SimpleTestCase):
    def test_negative_squares_become_imaginary(self):
        alpha = amplitudes_from_squares([0.5, -0.5, 0.0, 0.0])
        np.testing.assert_allclose(alpha, [np.sqrt(0.5), 1j * np.sqrt(0.5), 0, 0])
        np.testing.assert_allclose(alpha**2, [0.5, -0.5, 0, 0], atol=1e-15)

    def test_rejects_unnormalized_squares(self):
        with self.assertRaises(ConstructionError):
            amplitudes_from_squares([0.5, 0.5, 0.5, 0.0])

    @settings(max_examples=40, deadline=None)
    @given(seed_a=seeds, seed_b=seeds)
    def test_product_states_satisfy_the_product_condition(self, seed_a, seed_b):
        psi = np.kron(haar_random_ket(2, seed_a), haar_random_ket(2, seed_b))
        alpha = MAGIC_BASIS.conj().T @ psi
        self.assertAlmostEqual(abs(product_condition(alpha)), 0.0, places=10)

    def test_bell_state_fails_the_product_condition(self):
        alpha = MAGIC_BASIS.conj().T @ PHI_PLUS
        self.assertAlmostEqual(abs(product_condition(alpha)), 1.0)

    def test_schmidt_and_algebraic_checks_agree(self):
        rng = np.random.default_rng(31)
        for trial in range(1000):
            if trial % 4 == 0:
                psi = np.kron(haar_random_ket(2, rng), haar_random_ket(2, rng))
            else:
                psi = haar_random_ket(4, rng)
            s = schmidt_decompose(psi).coefficients
            condition = abs(product_condition(MAGIC_BASIS.conj().T @ psi))
            self.assertAlmostEqual(condition, 2 * s[0] * s[1], delta=1e-12)
            self.assertEqual(bool(is_product(psi)), condition < 2e-8 * s[0])

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds)
    def test_amplitudes_satisfy_both_conditions(self, seed):
        lambdas = kak_decompose(haar_random_unitary(4, seed)).lambdas
        alpha = amplitudes_from_squares(null_space_vector(invariance_vectors(lambdas)))
        self.assertLess(abs(product_condition(alpha)), 1e-10)
        self.assertLess(abs(product_condition(alpha, lambdas)), 1e-10)


class FindProductPreservingStateTests(SimpleTestCase):
    def test_fixture_gates(self):
        for name in gate_names():
            with self.subTest(gate=name):
                u = named_gate(name)
                pair = find_product_preserving_state(u)
                self.assertLess(pair.residual, TAU_PROD)
                self.assertTrue(is_product(u @ pair.input.state))
                self.assertTrue(verify_product_preservation(u, pair.input.state).passed)

    def test_output_factors_match_the_image(self):
        u = haar_random_unitary(4, seed=2024)
        pair = find_product_preserving_state(u)
        image = u @ pair.input.state
        self.assertAlmostEqual(abs(np.vdot(pair.output.state, image)), 1.0, places=10)

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds)
    def test_random_gates(self, seed):
        u = haar_random_unitary(4, seed)
        report = verify_product_preservation(u, find_product_preserving_state(u).input.state)
        self.assertLess(report.input_schmidt2, 1e-8)
        self.assertLess(report.output_schmidt2, 1e-8)

    def test_thousand_haar_gates(self):
        rng = np.random.default_rng(20240601)
        for _ in range(1000):
            u = haar_random_unitary(4, rng)
            pair = find_product_preserving_state(u)
            self.assertLess(pair.residual, 1e-8)

    def test_verification_flags_entangled_inputs(self):
        report = verify_product_preservation(np.eye(4), PHI_PLUS)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.input_schmidt2, np.sqrt(0.5))

    def test_failure_carries_diagnostics(self):
        error = ProductStateError(
            "product-state certificate failed",
            lambdas=[0.1, 0.0, 0.0, -0.1],
            null_vector=[0.5, 0.5, 0.0, 0.0],
            residuals=(1e-3, 2e-3),
        )
        self.assertIn("lambdas=", str(error))
        self.assertIn("residuals=", str(error))
        self.assertIsInstance(error, ArithmeticError)
