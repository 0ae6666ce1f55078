import numpy as np
import pytest

from ctcsim import linalg
from ctcsim.errors import DimensionError, NotHermitianError, NotNormalError

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def rand_matrix(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def rand_hermitian(rng, n):
    m = rand_matrix(rng, n)
    return (m + m.conj().T) / 2


def rand_unitary(rng, n):
    q, r = np.linalg.qr(rand_matrix(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestKron:
    def test_identity(self):
        np.testing.assert_allclose(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_basis_kets(self):
        out = linalg.kron(linalg.basis_ket(0, 2), linalg.basis_ket(1, 2))
        np.testing.assert_allclose(out[:, 0], [0, 1, 0, 0])

    def test_xx_antidiagonal(self):
        np.testing.assert_allclose(linalg.kron(X, X), np.fliplr(np.eye(4)))

    def test_associativity(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a, b, c = (rand_matrix(rng, rng.integers(2, 5)) for _ in range(3))
            left = linalg.kron(linalg.kron(a, b), c)
            right = linalg.kron(a, linalg.kron(b, c))
            np.testing.assert_allclose(left, right, atol=1e-12)


class TestPartialTrace:
    def test_bell_reduction(self):
        bell = np.zeros((4, 1), dtype=complex)
        bell[0] = bell[3] = 2**-0.5
        rho = bell @ bell.conj().T
        np.testing.assert_allclose(
            linalg.partial_trace_raw(rho, [2, 2], keep=[1]), np.eye(2) / 2, atol=1e-12
        )

    def test_product_factorization(self):
        rng = np.random.default_rng(2)
        a = rand_hermitian(rng, 3)
        b = rand_hermitian(rng, 2)
        b = b / np.trace(b)
        out = linalg.partial_trace_raw(np.kron(a, b), [3, 2], keep=[0])
        np.testing.assert_allclose(out, a, atol=1e-10)

    def test_full_trace(self):
        rng = np.random.default_rng(3)
        rho = rand_hermitian(rng, 4)
        rho = rho @ rho.conj().T
        rho /= np.trace(rho)
        out = linalg.partial_trace_raw(rho, [2, 2], keep=[])
        np.testing.assert_allclose(out, [[1]], atol=1e-10)

    def test_trace_preserved(self):
        rng = np.random.default_rng(4)
        m = rand_matrix(rng, 8)
        out = linalg.partial_trace_raw(m, [2, 2, 2], keep=[0, 2])
        assert abs(np.trace(out) - np.trace(m)) < 1e-10

    def test_composes_with_itself(self):
        rng = np.random.default_rng(5)
        m = rand_matrix(rng, 12)
        once = linalg.partial_trace_raw(m, [2, 3, 2], keep=[2])
        step = linalg.partial_trace_raw(m, [2, 3, 2], keep=[1, 2])
        twice = linalg.partial_trace_raw(step, [3, 2], keep=[1])
        np.testing.assert_allclose(once, twice, atol=1e-12)

    def test_errors(self):
        with pytest.raises(DimensionError):
            linalg.partial_trace_raw(np.eye(3), [2, 2], keep=[0])
        with pytest.raises(IndexError):
            linalg.partial_trace_raw(np.eye(4), [2, 2], keep=[0, 0])
        with pytest.raises(IndexError):
            linalg.partial_trace_raw(np.eye(4), [2, 2], keep=[2])


class TestHermitianEig:
    def test_pauli_z(self):
        values, _ = linalg.hermitian_eig(Z)
        np.testing.assert_allclose(values, [-1, 1])

    def test_maximally_mixed(self):
        values, _ = linalg.hermitian_eig(np.eye(2) / 2)
        np.testing.assert_allclose(values, [0.5, 0.5])

    def test_plus_projector(self):
        plus = np.full((2, 2), 0.5, dtype=complex)
        values, _ = linalg.hermitian_eig(plus)
        np.testing.assert_allclose(values, [0, 1], atol=1e-12)

    def test_reconstruction_and_orthonormality(self):
        rng = np.random.default_rng(6)
        for n in (2, 5, 17, 64):
            m = rand_hermitian(rng, n)
            values, vectors = linalg.hermitian_eig(m)
            rebuilt = (vectors * values) @ vectors.conj().T
            assert np.abs(rebuilt - m).max() < 1e-9
            gram = vectors.conj().T @ vectors
            assert np.abs(gram - np.eye(n)).max() < 1e-10
            assert np.all(np.diff(values) >= -1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            linalg.hermitian_eig(np.array([[0, 1], [0, 0]]))


class TestMatrixFunction:
    def test_sqrt(self):
        out = linalg.matrix_function(np.diag([4.0, 9.0]), np.sqrt)
        np.testing.assert_allclose(out, np.diag([2, 3]), atol=1e-12)

    def test_abs(self):
        np.testing.assert_allclose(linalg.matrix_function(Z, np.abs), np.eye(2), atol=1e-12)

    def test_log2(self):
        out = linalg.matrix_function(np.eye(2) / 2, np.log2)
        np.testing.assert_allclose(out, -np.eye(2), atol=1e-12)


class TestNullSpace:
    def test_zero_matrix_gives_standard_basis(self):
        basis = linalg.null_space(np.zeros((3, 3)))
        np.testing.assert_allclose(np.column_stack(basis), np.eye(3))

    def test_rank_one_kernel(self):
        basis = linalg.null_space(np.diag([0.0, 1.0]))
        assert len(basis) == 1
        np.testing.assert_allclose(np.abs(basis[0][:, 0]), [1, 0], atol=1e-12)

    def test_trivial_kernel(self):
        assert linalg.null_space(np.eye(4)) == []

    def test_vectors_annihilated(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            u = rand_unitary(rng, 5)
            m = u @ np.diag([0, 0, 1.0, 2.0, 3.0]) @ u.conj().T
            basis = linalg.null_space(m)
            assert len(basis) == 2
            for v in basis:
                assert np.linalg.norm(m @ v) < 1e-8
                assert abs(np.linalg.norm(v) - 1) < 1e-10

    def test_cnot_feedback_map_kernel(self):
        # Feedback map tau -> p tau + (1-p) X tau X, vectorized row-major as
        # p*I + (1-p)*(X (x) X); its fixed subspace is 2-dimensional.
        p = 0.3
        m = p * np.eye(4) + (1 - p) * np.kron(X, X)
        basis = linalg.null_space(m - np.eye(4))
        rank = np.linalg.matrix_rank(m - np.eye(4), tol=1e-10)
        assert len(basis) == 4 - rank == 2


class TestMatrixPower:
    def test_square_root_of_not(self):
        out = linalg.matrix_power(X, 0.5)
        ref = np.array([[0.5 + 0.5j, 0.5 - 0.5j], [0.5 - 0.5j, 0.5 + 0.5j]])
        np.testing.assert_allclose(out, ref, atol=1e-12)

    def test_unit_power(self):
        rng = np.random.default_rng(8)
        u = rand_unitary(rng, 4)
        np.testing.assert_allclose(linalg.matrix_power(u, 1.0), u, atol=1e-12)

    def test_involutory_closed_form(self):
        rng = np.random.default_rng(9)
        h = rand_hermitian(rng, 4)
        values, vectors = np.linalg.eigh(h)
        involutory = (vectors * np.sign(values)) @ vectors.conj().T
        for p in (0.25, 0.5, 1.7):
            expected = (1 - np.exp(1j * np.pi * p)) / 2 * involutory + (
                1 + np.exp(1j * np.pi * p)
            ) / 2 * np.eye(4)
            np.testing.assert_allclose(
                linalg.matrix_power(involutory, p), expected, atol=1e-9
            )

    def test_power_addition(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            u = rand_unitary(rng, 3)
            p, q = rng.uniform(0, 2, size=2)
            lhs = linalg.matrix_power(u, p) @ linalg.matrix_power(u, q)
            np.testing.assert_allclose(lhs, linalg.matrix_power(u, p + q), atol=1e-9)

    def test_rejects_non_normal(self):
        with pytest.raises(NotNormalError):
            linalg.matrix_power(np.array([[1, 1], [0, 1]]), 0.5)
