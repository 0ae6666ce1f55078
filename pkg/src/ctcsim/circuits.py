"""Circuits: ordered inputs, a gate sequence, and terminal reductions.

A circuit is an immutable assembly.  Evolution stays in vector form while the
running state is a vector and every gate is linear, and switches to density
form at the first measurement gate (or immediately, for matrix inputs).
Terminal postselections and partial traces are resolved against the original
circuit space and applied together at the end.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import DimensionError, NonLinearError, OverlapError
from .gates import MeasurementGate, QuantumGate
from .states import QuantumState, _infer_num_systems


def _promote_postselection(op, dim: int):
    """Return (vector_or_None, matrix_or_None, span, label) for a postselection."""
    label = op.label if isinstance(op, QuantumState) else "φ"
    raw = op.data if isinstance(op, QuantumState) else np.asarray(op, dtype=complex)
    raw = linalg.as_matrix(raw)
    if 1 in raw.shape:
        vec = raw.reshape(-1, 1)
        return vec, None, _infer_num_systems(vec.shape[0], dim), label
    if raw.shape[0] != raw.shape[1]:
        raise DimensionError("postselection operator must be square")
    return None, raw, _infer_num_systems(raw.shape[0], dim), label


class Circuit:
    """Inputs + gates + terminal traces/postselections.

    ``inputs`` occupy systems from the top (index 0) in order; systems not
    covered by an input are filled with the maximally mixed state ``I/d``.
    ``postselections`` is a sequence of ``(state_or_array, start_index)``
    pairs applied at the circuit terminus together with ``traces``.
    """

    def __init__(
        self,
        *,
        inputs: Sequence[QuantumState] = (),
        gates: Sequence[QuantumGate | MeasurementGate] = (),
        traces: Iterable[int] = (),
        postselections: Sequence[tuple] = (),
        dim: int | None = None,
        num_systems: int | None = None,
    ):
        dims = {s.dim for s in inputs} | {g.dim for g in gates}
        if dim is not None:
            dims.add(int(dim))
        if len(dims) > 1:
            raise DimensionError(f"conflicting dimensions in circuit: {sorted(dims)}")
        self.dim = dims.pop() if dims else 2

        input_span = sum(s.num_systems for s in inputs)
        candidates = [g.num_systems for g in gates]
        if num_systems is not None:
            candidates.append(int(num_systems))
        if not candidates:
            candidates.append(max(input_span, 1))
        self.num_systems = max(candidates)
        if input_span > self.num_systems:
            raise DimensionError(
                f"inputs span {input_span} systems, circuit has {self.num_systems}"
            )
        for g in gates:
            if g.num_systems != self.num_systems:
                raise DimensionError(
                    f"gate {g.label!r} spans {g.num_systems} systems, "
                    f"circuit has {self.num_systems}"
                )

        self.inputs = tuple(inputs)
        self.gates = tuple(gates)
        self.traces = tuple(sorted(set(int(t) for t in traces)))
        self.postselections = tuple((op, int(start)) for op, start in postselections)
        self._validate_terminals()

    # Start system of each declared input, in order.
    def _input_layout(self) -> list[tuple[QuantumState, int]]:
        layout, cursor = [], 0
        for state in self.inputs:
            layout.append((state, cursor))
            cursor += state.num_systems
        return layout

    def _validate_terminals(self):
        for t in self.traces:
            if not 0 <= t < self.num_systems:
                raise IndexError(f"trace index {t} out of range")
        claimed = set(self.traces)
        for op, start in self.postselections:
            _, _, span, _ = _promote_postselection(op, self.dim)
            systems = set(range(start, start + span))
            if start < 0 or start + span > self.num_systems:
                raise IndexError(f"postselection span {sorted(systems)} out of range")
            if systems & claimed:
                raise OverlapError(
                    f"postselection systems {sorted(systems & claimed)} conflict "
                    "with other terminal reductions"
                )
            claimed |= systems

    # -- composite input -------------------------------------------------------

    def _input_payload(self) -> tuple[np.ndarray, bool]:
        """(payload, is_vector) of the composite input with mixed fill."""
        layout = self._input_layout()
        covered = sum(s.num_systems for s, _ in layout)
        fill = self.num_systems - covered
        vector = fill == 0 and all(s.form == "vector" for s, _ in layout) and layout
        if vector:
            # Flat outer products; much cheaper than np.kron on small kets.
            flat = layout[0][0].ket[:, 0]
            for s, _ in layout[1:]:
                flat = (flat[:, None] * s.ket[None, :, 0]).reshape(-1)
            return flat.reshape(-1, 1), True
        factors = [s.matrix for s, _ in layout]
        factors.extend([np.eye(self.dim) / self.dim] * fill)
        if not factors:
            factors = [np.eye(self.dim) / self.dim] * self.num_systems
        return linalg.kron_all(factors), False

    def input_state(self, label: str | None = None) -> QuantumState:
        """Tensor product of the declared inputs (plus maximally mixed fill)."""
        payload, is_vector = self._input_payload()
        if label is None:
            label = "⊗".join(s.label for s in self.inputs) if self.inputs else "I/d"
        form = "vector" if is_vector else "matrix"
        kind = "pure" if is_vector else "mixed"
        return QuantumState(
            payload, form=form, kind=kind, dim=self.dim,
            num_systems=self.num_systems, label=label,
        )

    # -- gate extraction ---------------------------------------------------------

    def total_gate(self, label: str = "U") -> QuantumGate:
        """Single gate equal to the whole sequence (product in application order)."""
        full = np.eye(self.dim**self.num_systems, dtype=complex)
        for gate in self.gates:
            if isinstance(gate, MeasurementGate):
                raise NonLinearError("circuit contains a measurement gate")
            full = gate.full_matrix() @ full
        return QuantumGate(
            full,
            targets=range(self.num_systems),
            dim=self.dim,
            num_systems=self.num_systems,
            label=label,
        )

    # -- evolution ----------------------------------------------------------------

    def _evolve(self) -> tuple[np.ndarray, bool]:
        payload, is_vector = self._input_payload()
        for gate in self.gates:
            if isinstance(gate, MeasurementGate):
                if is_vector:
                    payload = payload @ linalg.dagger(payload)
                    is_vector = False
                embedded = gate.embedded_operators()
                if gate.observable:
                    payload = sum(
                        np.real(np.trace(op @ payload)) * op for op in embedded
                    )
                else:
                    payload = sum(op @ payload @ linalg.dagger(op) for op in embedded)
            else:
                full = gate.full_matrix()
                payload = full @ payload if is_vector else full @ payload @ linalg.dagger(full)
        return payload, is_vector

    def output_state(
        self,
        *,
        traces: Iterable[int] = (),
        postprocessing: bool = True,
        norm=None,
        label: str | None = None,
    ) -> QuantumState:
        """Evolve the input through the gate sequence and reduce.

        ``traces`` here are extra partial traces indexed relative to the
        state space left after the circuit's own postselections and traces;
        set ``postprocessing=False`` to skip the latter.
        """
        payload, is_vector = self._evolve()
        n = self.num_systems
        if postprocessing and (self.postselections or self.traces):
            payload, is_vector, n = self._postprocess(payload, is_vector)

        extra = sorted(set(int(t) for t in traces))
        if extra:
            for t in extra:
                if not 0 <= t < n:
                    raise IndexError(f"trace index {t} out of range for {n} systems")
            if is_vector:
                payload = payload @ linalg.dagger(payload)
                is_vector = False
            keep = [k for k in range(n) if k not in extra]
            payload = linalg.partial_trace_raw(payload, [self.dim] * n, keep)
            n = len(keep)

        form = "vector" if is_vector else "matrix"
        state = QuantumState(
            payload,
            form=form,
            kind="pure" if is_vector else "mixed",
            dim=self.dim,
            num_systems=n,
            label=label if label is not None else ("ψ′" if is_vector else "ρ′"),
        )
        if norm is not None and norm is not False:
            state = state.normalize(1.0 if norm is True else float(norm))
        return state

    def _postprocess(self, payload, is_vector) -> tuple[np.ndarray, bool, int]:
        d, n = self.dim, self.num_systems
        items = []
        for op, start in self.postselections:
            vec, mat, span, _ = _promote_postselection(op, d)
            items.append((vec, mat, start, span))

        all_vector = is_vector and all(vec is not None for vec, _, _, _ in items)
        if not all_vector and is_vector:
            payload = payload @ linalg.dagger(payload)
            is_vector = False

        removed: list[int] = []
        for vec, mat, start, span in items:
            offset = sum(1 for r in removed if r < start)
            s = start - offset
            m = n - len(removed)
            if is_vector:
                pre, mid, post = d**s, d**span, d ** (m - s - span)
                psi = payload.reshape(pre, mid, post)
                payload = np.einsum("s,asb->ab", np.conj(vec[:, 0]), psi).reshape(-1, 1)
            else:
                omega = mat if mat is not None else vec @ linalg.dagger(vec)
                embedded = linalg.kron_all(
                    [np.eye(d**s), omega, np.eye(d ** (m - s - span))]
                )
                keep = [k for k in range(m) if not s <= k < s + span]
                payload = linalg.partial_trace_raw(embedded @ payload, [d] * m, keep)
            removed.extend(range(start, start + span))

        if self.traces:
            if is_vector:
                payload = payload @ linalg.dagger(payload)
                is_vector = False
            m = n - len(removed)
            adjusted = [
                t - sum(1 for r in removed if r < t) for t in self.traces
            ]
            keep = [k for k in range(m) if k not in adjusted]
            payload = linalg.partial_trace_raw(payload, [d] * m, keep)
            removed.extend(self.traces)

        return payload, is_vector, n - len(removed)

    def measure(
        self,
        operators: Sequence,
        targets: Iterable[int] | None = None,
        observable: bool = False,
        statistics: bool = False,
    ):
        """Measure the circuit's post-processed output state."""
        return self.output_state().measure(
            operators, targets=targets, observable=observable, statistics=statistics
        )

    def __repr__(self):
        return (
            f"Circuit(dim={self.dim}, num_systems={self.num_systems}, "
            f"inputs={len(self.inputs)}, gates={len(self.gates)})"
        )
