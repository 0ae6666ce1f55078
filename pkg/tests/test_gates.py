import numpy as np
import pytest

from ctcsim import (
    QuantumGate,
    diagonal,
    fourier,
    gell_mann,
    hadamard,
    interleave,
    not_gate,
    pauli,
    phase,
    rotation,
    stack,
    summation,
    swap,
)
from ctcsim.errors import CatalogError, CompositionError, GateSpecError
from ctcsim.gates import MeasurementGate

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)


def unitary_defect(m):
    return np.abs(m @ m.conj().T - np.eye(m.shape[0])).max()


class TestEmbedding:
    def test_empty_wire_patterns(self):
        u = np.arange(4, dtype=complex).reshape(2, 2) + 1
        upper = QuantumGate(u, targets=[0], num_systems=2).full_matrix()
        np.testing.assert_allclose(upper, np.kron(u, np.eye(2)))
        lower = QuantumGate(u, targets=[1], num_systems=2).full_matrix()
        np.testing.assert_allclose(lower, np.kron(np.eye(2), u))

    def test_control_below(self):
        u = np.arange(4, dtype=complex).reshape(2, 2) + 1
        out = QuantumGate(u, targets=[0], controls=[1]).full_matrix()
        ref = np.array([
            [1, 0, 0, 0],
            [0, u[0, 0], 0, u[0, 1]],
            [0, 0, 1, 0],
            [0, u[1, 0], 0, u[1, 1]],
        ])
        np.testing.assert_allclose(out, ref)

    def test_control_and_anticontrol(self):
        u = np.arange(4, dtype=complex).reshape(2, 2) + 1
        out = QuantumGate(
            u, targets=[1], anticontrols=[0], controls=[2]
        ).full_matrix()
        ref = np.eye(8, dtype=complex)
        ref[1, 1], ref[1, 3] = u[0, 0], u[0, 1]
        ref[3, 1], ref[3, 3] = u[1, 0], u[1, 1]
        np.testing.assert_allclose(out, ref)

    def test_graded_qudit_control(self):
        # A control at level l applies the l-th power of the core, so the
        # qudit controlled-SUM computes |c, t> -> |c, t+c mod d>.
        gate = summation(shift=1, dim=4, targets=[1], controls=[0])
        full = gate.full_matrix()
        for c in range(4):
            for t in range(4):
                vec = np.zeros(16)
                vec[c * 4 + t] = 1
                out = full @ vec
                assert out[c * 4 + (t + c) % 4] == 1

    def test_graded_anticontrol_activates_on_zero(self):
        gate = summation(shift=1, dim=3, targets=[1], anticontrols=[0])
        full = gate.full_matrix()
        vec = np.zeros(9)
        vec[0 * 3 + 0] = 1  # |0,0> -> core^(d-1) applied
        np.testing.assert_allclose((full @ vec).nonzero()[0], [2])
        vec = np.zeros(9)
        vec[2 * 3 + 0] = 1  # |2,0> -> identity
        np.testing.assert_allclose((full @ vec).nonzero()[0], [6])

    def test_modifier_order(self):
        # exponent applies before coefficient, conjugation last
        gate = pauli(3, exponent=0.5, coefficient=2.0, conjugate=True)
        np.testing.assert_allclose(
            gate.full_matrix(), 2 * np.diag([1, 1j]).conj().T, atol=1e-12
        )

    def test_controlled_exponent(self):
        # controlled-U^p is the controlled version of U^p
        gate = not_gate(targets=[1], controls=[0], exponent=0.5)
        block = gate.full_matrix()[2:, 2:]
        np.testing.assert_allclose(
            block, not_gate(exponent=0.5).full_matrix(), atol=1e-12
        )
        np.testing.assert_allclose(gate.full_matrix()[:2, :2], np.eye(2))

    def test_invariants_rejected(self):
        with pytest.raises(GateSpecError):
            QuantumGate(np.eye(2), targets=[0], controls=[0])
        with pytest.raises(GateSpecError):
            QuantumGate(np.eye(4), targets=[0, 2])
        with pytest.raises(GateSpecError):
            QuantumGate(np.eye(2), targets=[1], num_systems=1)
        with pytest.raises(GateSpecError):
            QuantumGate(np.eye(3, 2))


class TestCatalog:
    def test_not(self):
        np.testing.assert_allclose(not_gate().full_matrix(), X)

    def test_pauli_set(self):
        for index, ref in enumerate([np.eye(2), X, Y, Z]):
            np.testing.assert_allclose(pauli(index).full_matrix(), ref)
        with pytest.raises(CatalogError):
            pauli(4)
        with pytest.raises(CatalogError):
            pauli(1, dim=3)

    def test_gell_mann_set(self):
        lam8 = gell_mann(8).full_matrix()
        np.testing.assert_allclose(lam8, np.diag([1, 1, -2]) / np.sqrt(3))
        for index in range(9):
            m = gell_mann(index).full_matrix()
            np.testing.assert_allclose(m, m.conj().T, atol=1e-12)
        with pytest.raises(CatalogError):
            gell_mann(9)

    def test_hadamard_qutrit(self):
        w = np.exp(2j * np.pi / 3)
        ref = np.array([[1, 1, 1], [1, w**2, w], [1, w, w**2]]) / np.sqrt(3)
        np.testing.assert_allclose(hadamard(dim=3).full_matrix(), ref, atol=1e-12)

    def test_rotation_axes(self):
        theta = 0.7
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        np.testing.assert_allclose(
            rotation(1, theta).full_matrix(), [[c, -1j * s], [-1j * s, c]], atol=1e-12
        )
        np.testing.assert_allclose(
            rotation(2, theta).full_matrix(), [[c, -s], [s, c]], atol=1e-12
        )
        np.testing.assert_allclose(
            rotation(3, theta).full_matrix(),
            np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)]),
            atol=1e-12,
        )
        with pytest.raises(CatalogError):
            rotation(0, 1.0)

    def test_phase_defaults(self):
        np.testing.assert_allclose(phase().full_matrix(), np.diag([1, -1]), atol=1e-12)
        p3 = phase(dim=3).full_matrix()
        np.testing.assert_allclose(
            p3, np.diag([1, np.exp(2j * np.pi / 3), np.exp(-2j * np.pi / 3)]),
            atol=1e-12,
        )

    def test_phase_roots(self):
        np.testing.assert_allclose(
            phase(exponent=0.5).full_matrix(), np.diag([1, 1j]), atol=1e-12
        )
        np.testing.assert_allclose(
            phase(exponent=0.25).full_matrix(),
            np.diag([1, np.exp(1j * np.pi / 4)]), atol=1e-12,
        )

    def test_diagonal(self):
        np.testing.assert_allclose(
            diagonal({0: 2.0, 1: 3.0}).full_matrix(), np.diag([2, 3])
        )
        np.testing.assert_allclose(
            diagonal({1: 0.5}, exponentiation=True).full_matrix(),
            np.diag([1, np.exp(0.5j)]), atol=1e-12,
        )
        # unspecified levels default to 1
        np.testing.assert_allclose(
            diagonal({2: 5.0}, dim=3).full_matrix(), np.diag([1, 1, 5])
        )
        with pytest.raises(CatalogError):
            diagonal({3: 1.0}, dim=2)

    def test_summation(self):
        np.testing.assert_allclose(summation().full_matrix(), X)
        np.testing.assert_allclose(
            summation(shift=1, dim=3).full_matrix(),
            [[0, 0, 1], [1, 0, 0], [0, 1, 0]],
        )
        np.testing.assert_allclose(
            summation(shift=2, dim=3).full_matrix(),
            np.linalg.matrix_power(summation(shift=1, dim=3).full_matrix(), 2),
        )

    def test_swap(self):
        np.testing.assert_allclose(
            swap().full_matrix(), [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]
        )
        s3 = swap(dim=3).full_matrix()
        for j in range(3):
            for k in range(3):
                vec = np.zeros(9)
                vec[j * 3 + k] = 1
                assert (s3 @ vec)[k * 3 + j] == 1
        with pytest.raises(CatalogError):
            swap(targets=[0])

    def test_fourier_elementary(self):
        w = np.exp(2j * np.pi / 3)
        ref = np.array([[1, 1, 1], [1, w, w**2], [1, w**2, w**4]]) / np.sqrt(3)
        np.testing.assert_allclose(fourier(dim=3).full_matrix(), ref, atol=1e-12)

    def test_fourier_composite_two_qubits(self):
        ref = 0.5 * np.array(
            [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1j, -1, -1j], [1, -1j, -1, 1j]]
        )
        np.testing.assert_allclose(
            fourier(targets=[0, 1]).full_matrix(), ref, atol=1e-12
        )

    def test_fourier_reverse_is_transpose(self):
        asc = fourier(targets=[0, 1, 2]).full_matrix()
        desc = fourier(targets=[0, 1, 2], reverse=True).full_matrix()
        np.testing.assert_allclose(desc, asc.T, atol=1e-12)

    def test_fourier_noncomposite_duplicates(self):
        out = fourier(targets=[0, 1], composite=False).full_matrix()
        single = fourier().full_matrix()
        np.testing.assert_allclose(out, np.kron(single, single), atol=1e-12)

    def test_unipartite_duplication(self):
        hh = hadamard(targets=[0, 1]).full_matrix()
        h = hadamard().full_matrix()
        np.testing.assert_allclose(hh, np.kron(h, h), atol=1e-12)

    def test_ising_coupling(self):
        theta = np.pi / 2
        gate = pauli(
            1, targets=[0, 1], exponent=theta / np.pi,
            coefficient=np.exp(-1j * theta / 2),
        )
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        ref = np.array([
            [c, 0, 0, -1j * s],
            [0, c, -1j * s, 0],
            [0, -1j * s, c, 0],
            [-1j * s, 0, 0, c],
        ])
        np.testing.assert_allclose(gate.full_matrix(), ref, atol=1e-12)


class TestGateProperties:
    def all_catalog_gates(self):
        return [
            not_gate(),
            not_gate(targets=[1], controls=[0]),
            not_gate(targets=[1], anticontrols=[0]),
            not_gate(exponent=0.5),
            *[pauli(i) for i in range(4)],
            gell_mann(0),
            hadamard(),
            hadamard(dim=3),
            rotation(1, 0.4),
            rotation(2, 1.1),
            rotation(3, 2.2),
            phase(),
            phase(dim=4),
            diagonal({0: 0.3, 1: -1.2}, exponentiation=True),
            summation(shift=2, dim=3),
            swap(),
            swap(dim=3),
            swap(targets=[1, 2], controls=[0]),
            swap(exponent=0.5),
            fourier(),
            fourier(dim=3),
            fourier(targets=[0, 1]),
        ]

    def test_catalog_unitarity(self):
        for gate in self.all_catalog_gates():
            assert unitary_defect(gate.full_matrix()) < 1e-9, gate.label

    def test_gell_mann_generators_not_unitary(self):
        # The nontrivial Gell-Mann matrices are Hermitian generators, not
        # unitaries (e.g. lambda_1 squared is diag(1,1,0)), so the blanket
        # unitarity check covers only the identity member of that family.
        assert unitary_defect(gell_mann(1).full_matrix()) > 0.1
        assert unitary_defect(gell_mann(8).full_matrix()) > 0.1

    def test_controls_order_irrelevant(self):
        a = not_gate(targets=[2], controls=[0, 1]).full_matrix()
        b = not_gate(targets=[2], controls=[1, 0]).full_matrix()
        np.testing.assert_allclose(a, b)

    def test_exponent_composition_on_involutory(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            p, q = rng.uniform(0.1, 1.0, size=2)
            lhs = QuantumGate(
                not_gate(exponent=p).full_matrix(), exponent=q
            ).full_matrix()
            rhs = not_gate(exponent=p * q).full_matrix()
            np.testing.assert_allclose(lhs, rhs, atol=1e-9)

    def test_swap_squares_to_identity(self):
        m = swap(dim=3).full_matrix()
        np.testing.assert_allclose(m @ m, np.eye(9), atol=1e-9)

    def test_fourier_fourth_power_identity(self):
        m = fourier().full_matrix()
        np.testing.assert_allclose(
            np.linalg.matrix_power(m, 4), np.eye(2), atol=1e-9
        )

    def test_conjugated_equals_dagger(self):
        gate = rotation(1, 0.9)
        np.testing.assert_allclose(
            rotation(1, 0.9, conjugate=True).full_matrix(),
            gate.full_matrix().conj().T,
        )


class TestCompositions:
    def test_interleave_equals_stack(self):
        xii = pauli(1, targets=[0], num_systems=3)
        iyi = pauli(2, targets=[1], num_systems=3)
        iiz = pauli(3, targets=[2], num_systems=3)
        ref = np.kron(np.kron(X, Y), Z)
        np.testing.assert_allclose(interleave([xii, iyi, iiz]).full_matrix(), ref)
        np.testing.assert_allclose(
            stack([pauli(1), pauli(2), pauli(3)]).full_matrix(), ref
        )

    def test_single_gate(self):
        gate = not_gate(targets=[1], controls=[0])
        np.testing.assert_allclose(
            interleave([gate]).full_matrix(), gate.full_matrix()
        )

    def test_identity_interleave(self):
        gates = [pauli(0, targets=[i], num_systems=2) for i in range(2)]
        np.testing.assert_allclose(interleave(gates).full_matrix(), np.eye(4))

    def test_stack_kron_oracle(self):
        rng = np.random.default_rng(22)
        mats = []
        for _ in range(3):
            q, r = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
            mats.append(q)
        gates = [QuantumGate(m) for m in mats]
        expected = np.kron(np.kron(mats[0], mats[1]), mats[2])
        np.testing.assert_allclose(stack(gates).full_matrix(), expected, atol=1e-12)

    def test_interleave_rejects_overlap(self):
        with pytest.raises(CompositionError):
            interleave([
                pauli(1, targets=[0], num_systems=2),
                pauli(2, targets=[0], num_systems=2),
            ])

    def test_interleave_rejects_span_mismatch(self):
        with pytest.raises(CompositionError):
            interleave([pauli(1), pauli(2, targets=[1], num_systems=2)])

    def test_stack_modifiers(self):
        out = stack([pauli(3)], exponent=0.5).full_matrix()
        np.testing.assert_allclose(out, np.diag([1, 1j]), atol=1e-12)


class TestMeasurementGate:
    def test_operator_promotion(self):
        gate = MeasurementGate([np.array([1, 0]), np.array([0, 1])])
        np.testing.assert_allclose(gate.operators[0], np.diag([1, 0.0]))

    def test_embedded_operators(self):
        gate = MeasurementGate(
            [np.array([1, 0]), np.array([0, 1])], targets=[1], num_systems=2
        )
        embedded = gate.embedded_operators()
        np.testing.assert_allclose(embedded[0], np.kron(np.eye(2), np.diag([1, 0.0])))

    def test_shape_check(self):
        with pytest.raises(Exception):
            MeasurementGate([np.eye(3)], targets=[0], dim=2)
