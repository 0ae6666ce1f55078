"""Closed-timelike-curve circuits and their quantum prescriptions.

A CTC circuit partitions the systems into chronology-respecting (CR) and
chronology-violating (CV) sets.  Declared inputs live on the CR systems; the
CV state is determined per prescription:

* Deutsch: the CV state is any fixed point of the map
  ``tau -> Tr_CR[U (rho (x) tau) U†]``.  The fixed points form an affine
  family ``tau* + sum g_k A_k`` intersected with the positive cone; the
  canonical ``tau*`` is the (renormalized) projection of the maximally mixed
  CV state onto the fixed subspace.
* Postselected teleportation: the CR state evolves through the reduced
  operator ``P = Tr_CV[U]`` and is renormalized; the CV state is computed as
  ``Tr_CR[U (rho (x) I/D) U†]``.  This operational CV formula is validated
  against worked interaction examples rather than derived from first
  principles.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from . import linalg
from .circuits import Circuit
from .errors import (
    AnnihilatedStateError,
    DimensionError,
    FixedPointError,
    PartitionError,
    UnphysicalWeightsError,
)
from .states import QuantumState

FIXED_POINT_TOL = 1e-8
PSD_TOL = 1e-9


def permute_systems(m: np.ndarray, dim: int, order: Sequence[int]) -> np.ndarray:
    """Reorder the subsystems of a square matrix.

    ``order[p] = s`` means slot ``p`` of ``m`` holds circuit system ``s``;
    the result has systems in natural ascending order.
    """
    n = len(order)
    inverse = [list(order).index(s) for s in range(n)]
    tensor = m.reshape([dim] * (2 * n))
    tensor = tensor.transpose(inverse + [n + p for p in inverse])
    return tensor.reshape(dim**n, dim**n)


def compose_on_systems(
    parts: Sequence[tuple[np.ndarray, Sequence[int]]], dim: int
) -> np.ndarray:
    """Tensor the given (matrix, systems) parts into natural system order."""
    order = [s for _, systems in parts for s in systems]
    big = linalg.kron_all([m for m, _ in parts])
    return permute_systems(big, dim, order)


class CtcCircuit(Circuit):
    """A circuit whose systems split into CR and CV subsets.

    Declared inputs are bound to the chronology-respecting systems in
    ascending order; chronology-violating systems carry no inputs.
    """

    def __init__(
        self,
        *,
        inputs: Sequence[QuantumState] = (),
        gates: Sequence = (),
        systems_respecting: Iterable[int],
        systems_violating: Iterable[int] | None = None,
        traces: Iterable[int] = (),
        postselections: Sequence[tuple] = (),
        dim: int | None = None,
        num_systems: int | None = None,
    ):
        super().__init__(
            inputs=inputs, gates=gates, traces=traces,
            postselections=postselections, dim=dim, num_systems=num_systems,
        )
        n = self.num_systems
        cr = sorted(set(int(s) for s in systems_respecting))
        if systems_violating is None:
            cv = [s for s in range(n) if s not in cr]
        else:
            cv = sorted(set(int(s) for s in systems_violating))
        if not cr or not cv:
            raise PartitionError("both CR and CV system sets must be nonempty")
        if set(cr) & set(cv):
            raise PartitionError(f"CR/CV overlap: {sorted(set(cr) & set(cv))}")
        if set(cr) | set(cv) != set(range(n)):
            raise PartitionError(
                f"CR {cr} and CV {cv} must partition all {n} systems"
            )
        declared = sum(s.num_systems for s in self.inputs)
        if declared > len(cr):
            raise PartitionError(
                f"inputs span {declared} systems but only {len(cr)} are CR"
            )
        self.systems_respecting = tuple(cr)
        self.systems_violating = tuple(cv)

    def _input_layout(self):
        layout, cursor = [], 0
        for state in self.inputs:
            layout.append((state, self.systems_respecting[cursor]))
            cursor += state.num_systems
        return layout

    def _declared_parts(self) -> list[tuple[np.ndarray, list[int]]]:
        """Input matrices bound to CR systems, with mixed fill for the rest."""
        parts, cursor = [], 0
        for state in self.inputs:
            systems = list(self.systems_respecting[cursor:cursor + state.num_systems])
            parts.append((state.matrix, systems))
            cursor += state.num_systems
        for s in self.systems_respecting[cursor:]:
            parts.append((np.eye(self.dim) / self.dim, [s]))
        return parts

    def _input_payload(self):
        parts = self._declared_parts()
        parts.extend((np.eye(self.dim) / self.dim, [s]) for s in self.systems_violating)
        return compose_on_systems(parts, self.dim), False

    def cr_input_matrix(self) -> np.ndarray:
        """Composite CR input density matrix, in CR-local system order."""
        local = {s: i for i, s in enumerate(self.systems_respecting)}
        parts = [
            (m, [local[s] for s in systems]) for m, systems in self._declared_parts()
        ]
        return compose_on_systems(parts, self.dim)

    def cr_input_vector(self) -> np.ndarray | None:
        """CR input as a ket, or None when it is not a pure product of kets."""
        declared = sum(s.num_systems for s in self.inputs)
        if declared < len(self.systems_respecting) or not self.inputs:
            return None
        if any(s.form != "vector" for s in self.inputs):
            return None
        return linalg.kron_all([s.ket for s in self.inputs])

    def total_unitary(self) -> np.ndarray:
        return self.total_gate().full_matrix()

    def _cv_side(self) -> int:
        return self.dim ** len(self.systems_violating)


def _evolved_composite(circuit: CtcCircuit, cv_matrix: np.ndarray) -> np.ndarray:
    """``U (rho_CR (x) cv) U†`` in natural system order."""
    parts = circuit._declared_parts()
    parts.append((cv_matrix, list(circuit.systems_violating)))
    composite = compose_on_systems(parts, circuit.dim)
    unitary = circuit.total_unitary()
    return unitary @ composite @ linalg.dagger(unitary)


def deutsch_map(circuit: CtcCircuit) -> np.ndarray:
    """Matrix of the linear map ``tau -> Tr_CR[U (rho (x) tau) U†]``.

    Acts on row-major vectorized CV operators: ``vec(Map(tau)) = M vec(tau)``.
    """
    d = circuit.dim
    cv = list(circuit.systems_violating)
    side = circuit._cv_side()
    dims = [d] * circuit.num_systems
    columns = []
    for i in range(side):
        for j in range(side):
            basis = np.zeros((side, side), dtype=complex)
            basis[i, j] = 1.0
            evolved = _evolved_composite(circuit, basis)
            reduced = linalg.partial_trace_raw(evolved, dims, cv)
            columns.append(reduced.reshape(-1))
    return np.column_stack(columns)


def apply_map(map_matrix: np.ndarray, operator: np.ndarray) -> np.ndarray:
    side = operator.shape[0]
    return (map_matrix @ operator.reshape(-1)).reshape(side, side)


def choi_matrix(map_matrix: np.ndarray) -> np.ndarray:
    """Choi matrix of a vectorized map; positive semidefinite iff the map is CP."""
    side = round(map_matrix.shape[0] ** 0.5)
    choi = np.zeros((side * side, side * side), dtype=complex)
    for i in range(side):
        for j in range(side):
            block = map_matrix[:, i * side + j].reshape(side, side)
            choi[i * side:(i + 1) * side, j * side:(j + 1) * side] = block
    return choi


class DctcSolutionFamily:
    """Affine parametrization of the fixed-point set of a Deutsch map.

    ``evaluate(weights)`` returns ``tau_star + sum w_k directions[k]``.  The
    directions are traceless Hermitian and orthonormal under the
    Hilbert-Schmidt inner product; weights are real.  Parameters are named
    ``g, g2, g3, ...`` in direction order.
    """

    def __init__(self, map_matrix, tau_star, directions, free_symbol="g"):
        self.map_matrix = map_matrix
        self.tau_star = tau_star
        self.directions = list(directions)
        self.free_symbol = free_symbol

    @property
    def parameter_names(self) -> list[str]:
        return [
            self.free_symbol if k == 0 else f"{self.free_symbol}{k + 1}"
            for k in range(len(self.directions))
        ]

    def _weights(self, weights) -> list[float]:
        weights = [float(w) for w in weights]
        if len(weights) != len(self.directions):
            raise DimensionError(
                f"expected {len(self.directions)} weight(s), got {len(weights)}"
            )
        return weights

    def evaluate(self, weights: Sequence[float] = ()) -> np.ndarray:
        tau = self.tau_star.copy()
        for w, direction in zip(self._weights(weights), self.directions):
            tau = tau + w * direction
        return tau

    def is_physical(self, weights: Sequence[float] = (), tol: float = PSD_TOL) -> bool:
        values = np.linalg.eigvalsh(self.evaluate(weights))
        return bool(values.min() >= -tol)

    def residual(self, weights: Sequence[float] = ()) -> float:
        tau = self.evaluate(weights)
        return float(np.abs(apply_map(self.map_matrix, tau) - tau).max())


def _hermitian_fixed_basis(kernel: list[np.ndarray], side: int) -> list[np.ndarray]:
    candidates = []
    for column in kernel:
        op = column.reshape(side, side)
        candidates.append((op + linalg.dagger(op)) / 2)
        candidates.append((op - linalg.dagger(op)) / 2j)
    basis: list[np.ndarray] = []
    for cand in candidates:
        for b in basis:
            cand = cand - np.real(np.trace(linalg.dagger(b) @ cand)) * b
        norm = float(np.linalg.norm(cand))
        if norm > 1e-8:
            basis.append(cand / norm)
    return basis


def dctc_fixed_points(circuit: CtcCircuit) -> DctcSolutionFamily:
    """Solve the Deutsch fixed-point condition for the CV state.

    The kernel of (map - identity) is Hermitian-symmetrized and
    orthogonalized; ``tau_star`` is the renormalized projection of the
    maximally mixed CV state onto the fixed subspace, and the remaining
    traceless directions span the solution family.
    """
    side = circuit._cv_side()
    map_matrix = deutsch_map(circuit)
    kernel = linalg.null_space(map_matrix - np.eye(side * side))
    if not kernel:
        raise FixedPointError("Deutsch map has an empty fixed-point set")
    basis = _hermitian_fixed_basis(kernel, side)
    if not basis:
        raise FixedPointError("fixed subspace has no Hermitian elements")

    mixed = np.eye(side, dtype=complex) / side
    projected = sum(
        np.real(np.trace(linalg.dagger(b) @ mixed)) * b for b in basis
    )
    trace = float(np.real(np.trace(projected)))
    if abs(trace) < 1e-10:
        raise FixedPointError("fixed subspace contains no unit-trace element")
    tau_star = projected / trace
    if np.abs(apply_map(map_matrix, tau_star) - tau_star).max() > FIXED_POINT_TOL:
        raise FixedPointError("canonical fixed point fails the residual bound")

    traces = np.array([np.real(np.trace(b)) for b in basis])
    null_weights = linalg.null_space(traces.reshape(1, -1), tol=1e-10)
    directions = []
    for w in null_weights:
        direction = sum(float(np.real(c)) * b for c, b in zip(w[:, 0], basis))
        direction = direction - np.trace(direction) / side * np.eye(side)
        norm = float(np.linalg.norm(direction))
        if norm < 1e-10:
            continue
        direction = direction / norm
        anchor = np.unravel_index(np.abs(direction).argmax(), direction.shape)
        pivot = direction[anchor]
        if (abs(pivot.real) >= abs(pivot.imag) and pivot.real < 0) or (
            abs(pivot.imag) > abs(pivot.real) and pivot.imag < 0
        ):
            direction = -direction
        directions.append(direction)
    return DctcSolutionFamily(map_matrix, tau_star, directions)


def _as_state(payload, circuit, n, *, label, norm) -> QuantumState:
    state = QuantumState(
        payload, form="matrix", kind="mixed", dim=circuit.dim,
        num_systems=n, label=label,
    )
    if norm is not None and norm is not False:
        state = state.normalize(1.0 if norm is True else float(norm))
    return state


def dctc_state_respecting(
    circuit: CtcCircuit,
    weights: Sequence[float] = (),
    *,
    family: DctcSolutionFamily | None = None,
    norm=None,
    label: str = "ρ_D",
) -> QuantumState:
    """CR output ``Tr_CV[U (rho (x) tau(weights)) U†]`` of the Deutsch solution."""
    family = dctc_fixed_points(circuit) if family is None else family
    if not family.is_physical(weights):
        raise UnphysicalWeightsError(
            f"weights {list(weights)} give a non-positive CV state"
        )
    evolved = _evolved_composite(circuit, family.evaluate(weights))
    reduced = linalg.partial_trace_raw(
        evolved, [circuit.dim] * circuit.num_systems, circuit.systems_respecting
    )
    return _as_state(
        reduced, circuit, len(circuit.systems_respecting), label=label, norm=norm
    )


def dctc_state_violating(
    circuit: CtcCircuit,
    weights: Sequence[float] = (),
    *,
    family: DctcSolutionFamily | None = None,
    norm=None,
    label: str = "τ_D",
) -> QuantumState:
    """CV solution ``tau(weights)`` of the Deutsch fixed-point condition."""
    family = dctc_fixed_points(circuit) if family is None else family
    if not family.is_physical(weights):
        raise UnphysicalWeightsError(
            f"weights {list(weights)} give a non-positive CV state"
        )
    return _as_state(
        family.evaluate(weights), circuit, len(circuit.systems_violating),
        label=label, norm=norm,
    )


def pctc_reduced_operator(circuit: CtcCircuit) -> np.ndarray:
    """Non-unitary CR evolution operator ``P = Tr_CV[U]``."""
    unitary = circuit.total_unitary()
    return linalg.partial_trace_raw(
        unitary, [circuit.dim] * circuit.num_systems, circuit.systems_respecting
    )


def pctc_state_respecting(circuit: CtcCircuit, *, label: str | None = None) -> QuantumState:
    """Renormalized CR output ``P rho P† / tr`` (``P|psi>/||..||`` for kets)."""
    reduced_op = pctc_reduced_operator(circuit)
    ket = circuit.cr_input_vector()
    if ket is not None:
        out = reduced_op @ ket
        norm = float(np.linalg.norm(out))
        if norm < 1e-12:
            raise AnnihilatedStateError("postselection annihilated the CR state")
        return QuantumState(
            out / norm, form="vector", dim=circuit.dim,
            num_systems=len(circuit.systems_respecting),
            label=label if label is not None else "ψ_P",
        )
    rho = reduced_op @ circuit.cr_input_matrix() @ linalg.dagger(reduced_op)
    trace = float(np.real(np.trace(rho)))
    if trace < 1e-12:
        raise AnnihilatedStateError("postselection annihilated the CR state")
    return QuantumState(
        rho / trace, form="matrix", kind="mixed", dim=circuit.dim,
        num_systems=len(circuit.systems_respecting),
        label=label if label is not None else "ρ_P",
    )


def pctc_state_violating(circuit: CtcCircuit, *, label: str = "τ_P") -> QuantumState:
    """CV state ``Tr_CR[U (rho (x) I/D) U†]`` (unit trace by construction)."""
    side = circuit._cv_side()
    evolved = _evolved_composite(circuit, np.eye(side, dtype=complex) / side)
    reduced = linalg.partial_trace_raw(
        evolved, [circuit.dim] * circuit.num_systems, circuit.systems_violating
    )
    return QuantumState(
        reduced, form="matrix", kind="mixed", dim=circuit.dim,
        num_systems=len(circuit.systems_violating), label=label,
    )
