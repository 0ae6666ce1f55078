"""Quantum gates: core matrices embedded on targets with control nodes.

A gate owns a core matrix acting on consecutive target systems, plus control
and anticontrol nodes on other systems.  Control nodes are graded: when the
node system is at basis level ``l``, the core is applied to the power ``l``
(so qubit controls behave classically, and a qudit controlled-SUM performs
the usual ``|c, t> -> |c, t + c mod d>``).  Anticontrol nodes grade in the
reversed level order, ``d - 1 - l``, activating on level 0.  With several
nodes the exponents multiply.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import CatalogError, CompositionError, DimensionError, GateSpecError
from .states import QuantumState, _infer_num_systems


class QuantumGate:
    """A circuit slice: core matrix on targets, nodes elsewhere, modifiers.

    Instances are immutable; the embedded full matrix is computed lazily and
    cached.  Modifiers apply to the core in the order exponent, coefficient,
    conjugation, before any control embedding.
    """

    def __init__(
        self,
        spec,
        *,
        targets: Sequence[int] | None = None,
        controls: Iterable[int] = (),
        anticontrols: Iterable[int] = (),
        dim: int = 2,
        num_systems: int | None = None,
        exponent: float = 1,
        coefficient: complex = 1,
        conjugate: bool = False,
        label: str = "U",
        family: str = "GATE",
    ):
        core = linalg.as_matrix(spec)
        if core.shape[0] != core.shape[1]:
            raise GateSpecError(f"gate core must be square, got {core.shape}")
        if dim < 2:
            raise DimensionError(f"dim must be at least 2, got {dim}")
        span = _infer_num_systems(core.shape[0], dim)
        if targets is None:
            targets = list(range(span))
        targets = [int(t) for t in targets]
        if sorted(targets) != list(range(min(targets), min(targets) + len(targets))):
            raise GateSpecError(f"targets must be consecutive, got {targets}")
        if len(targets) != span:
            raise GateSpecError(
                f"core spans {span} system(s) but {len(targets)} target(s) given"
            )
        controls = sorted(int(c) for c in controls)
        anticontrols = sorted(int(a) for a in anticontrols)
        occupied = list(targets) + controls + anticontrols
        if len(set(occupied)) != len(occupied):
            raise GateSpecError(
                "targets, controls, and anticontrols must be pairwise disjoint"
            )
        if min(occupied) < 0:
            raise GateSpecError("system indices must be non-negative")
        if num_systems is None:
            num_systems = max(occupied) + 1
        if max(occupied) >= num_systems:
            raise GateSpecError(
                f"system index {max(occupied)} exceeds num_systems={num_systems}"
            )

        self.core = core
        self.targets = tuple(sorted(targets))
        self.controls = tuple(controls)
        self.anticontrols = tuple(anticontrols)
        self.dim = int(dim)
        self.num_systems = int(num_systems)
        self.exponent = exponent
        self.coefficient = coefficient
        self.conjugated = bool(conjugate)
        self.label = label
        self.family = family
        self.parts: tuple[tuple[QuantumGate, int], ...] = ()
        self.merged = True
        self._full: np.ndarray | None = None

    @property
    def span(self) -> tuple[int, ...]:
        """All systems the gate touches (targets and nodes)."""
        return tuple(sorted(self.targets + self.controls + self.anticontrols))

    def modified_core(self) -> np.ndarray:
        """Core with exponent, coefficient, and conjugation applied."""
        core = self.core
        if self.exponent != 1:
            core = linalg.matrix_power(core, self.exponent)
        if self.coefficient != 1:
            core = core * complex(self.coefficient)
        if self.conjugated:
            core = linalg.dagger(core)
        return core

    def full_matrix(self) -> np.ndarray:
        """The gate embedded in the full ``d**num_systems`` space."""
        if self._full is None:
            self._full = self._embed()
        return self._full

    def _embed(self) -> np.ndarray:
        d = self.dim
        core = self.modified_core()
        nodes = sorted(self.controls + self.anticontrols)
        if not nodes:
            return self._laced(core, {})
        side = d**self.num_systems
        full = np.zeros((side, side), dtype=complex)
        powers: dict[int, np.ndarray] = {}
        for assignment in itertools.product(range(d), repeat=len(nodes)):
            exponent = 1
            for system, level in zip(nodes, assignment):
                exponent *= level if system in self.controls else d - 1 - level
            if exponent not in powers:
                powers[exponent] = np.linalg.matrix_power(core, exponent)
            projectors = dict(zip(nodes, assignment))
            full += self._laced(powers[exponent], projectors)
        return full

    def _laced(self, block: np.ndarray, node_levels: dict[int, int]) -> np.ndarray:
        d = self.dim
        factors = []
        system = 0
        while system < self.num_systems:
            if system == self.targets[0]:
                factors.append(block)
                system += len(self.targets)
            elif system in node_levels:
                level = node_levels[system]
                proj = np.zeros((d, d), dtype=complex)
                proj[level, level] = 1.0
                factors.append(proj)
                system += 1
            else:
                factors.append(np.eye(d))
                system += 1
        return linalg.kron_all(factors)

    def __repr__(self):
        return (
            f"QuantumGate(label={self.label!r}, dim={self.dim}, "
            f"num_systems={self.num_systems}, targets={list(self.targets)}, "
            f"controls={list(self.controls)}, anticontrols={list(self.anticontrols)})"
        )


class MeasurementGate:
    """A measurement placed in a gate sequence.

    Not a linear gate: inside a circuit it always mutates the running density
    matrix with its operators embedded on the target systems.
    """

    def __init__(
        self,
        operators: Sequence,
        *,
        observable: bool = False,
        targets: Sequence[int] | None = None,
        num_systems: int | None = None,
        dim: int = 2,
        label: str = "M",
    ):
        if targets is None:
            targets = [0]
        targets = sorted(int(t) for t in targets)
        if targets != list(range(targets[0], targets[0] + len(targets))):
            raise GateSpecError(f"measurement targets must be consecutive, got {targets}")
        if num_systems is None:
            num_systems = max(targets) + 1
        side = dim ** len(targets)
        mats = []
        for op in operators:
            raw = op.data if isinstance(op, QuantumState) else np.asarray(op, dtype=complex)
            raw = linalg.as_matrix(raw)
            if raw.shape == (side, 1):
                mats.append(raw @ linalg.dagger(raw))
            elif raw.shape == (1, side):
                mats.append(linalg.dagger(raw) @ raw)
            elif raw.shape == (side, side):
                mats.append(raw)
            else:
                raise DimensionError(
                    f"operator shape {raw.shape} does not fit {len(targets)} "
                    f"system(s) of dim {dim}"
                )
        if not mats:
            raise GateSpecError("measurement needs at least one operator")

        self.operators = tuple(mats)
        self.observable = bool(observable)
        self.targets = tuple(targets)
        self.controls = ()
        self.anticontrols = ()
        self.num_systems = int(num_systems)
        self.dim = int(dim)
        self.label = label
        self.family = "MEASUREMENT"
        self.parts: tuple = ()

    @property
    def span(self) -> tuple[int, ...]:
        return self.targets

    def embedded_operators(self) -> list[np.ndarray]:
        d, n = self.dim, self.num_systems
        pre = np.eye(d ** self.targets[0])
        post = np.eye(d ** (n - self.targets[-1] - 1))
        return [linalg.kron_all([pre, op, post]) for op in self.operators]


# -- named catalog -------------------------------------------------------------


def _duplicated(elementary: np.ndarray, targets) -> np.ndarray:
    count = len(targets) if targets else 1
    return linalg.kron_all([elementary] * count)


def _targets_of(kwargs) -> list[int]:
    return list(kwargs.get("targets") or [0])


def not_gate(**kwargs) -> QuantumGate:
    """NOT (bit-flip) gate; qubits only."""
    if kwargs.pop("dim", 2) != 2:
        raise CatalogError("NOT gate is 2-dimensional")
    core = _duplicated(np.array([[0, 1], [1, 0]], dtype=complex), _targets_of(kwargs))
    kwargs.setdefault("label", "N")
    return QuantumGate(core, dim=2, **kwargs)


_PAULI = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def pauli(index: int, **kwargs) -> QuantumGate:
    """Pauli gate by index: 0 identity, 1 x, 2 y, 3 z; qubits only."""
    if kwargs.pop("dim", 2) != 2:
        raise CatalogError("Pauli gates are 2-dimensional")
    if index not in (0, 1, 2, 3):
        raise CatalogError(f"Pauli index must be 0..3, got {index}")
    core = _duplicated(_PAULI[index], _targets_of(kwargs))
    kwargs.setdefault("label", "IXYZ"[index])
    return QuantumGate(core, dim=2, **kwargs)


def _gell_mann_matrix(index: int) -> np.ndarray:
    if index == 0:
        return np.eye(3, dtype=complex)
    m = np.zeros((3, 3), dtype=complex)
    pairs = {1: (0, 1), 2: (0, 1), 4: (0, 2), 5: (0, 2), 6: (1, 2), 7: (1, 2)}
    if index in (1, 4, 6):
        a, b = pairs[index]
        m[a, b] = m[b, a] = 1
    elif index in (2, 5, 7):
        a, b = pairs[index]
        m[a, b] = -1j
        m[b, a] = 1j
    elif index == 3:
        m[0, 0], m[1, 1] = 1, -1
    elif index == 8:
        m[0, 0] = m[1, 1] = 1 / math.sqrt(3)
        m[2, 2] = -2 / math.sqrt(3)
    else:
        raise CatalogError(f"Gell-Mann index must be 0..8, got {index}")
    return m


def gell_mann(index: int, **kwargs) -> QuantumGate:
    """Gell-Mann gate by index 0..8 (0 is the identity); qutrits only."""
    if kwargs.pop("dim", 3) != 3:
        raise CatalogError("Gell-Mann gates are 3-dimensional")
    core = _duplicated(_gell_mann_matrix(index), _targets_of(kwargs))
    kwargs.setdefault("label", f"L{index}")
    return QuantumGate(core, dim=3, **kwargs)


def hadamard(*, dim: int = 2, **kwargs) -> QuantumGate:
    """Generalized Hadamard: ``(1/sqrt(d)) sum omega^(k(d-j)) |j><k|``."""
    omega = np.exp(2j * np.pi / dim)
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    elementary = omega ** (k * (dim - j)) / math.sqrt(dim)
    core = _duplicated(elementary, _targets_of(kwargs))
    kwargs.setdefault("label", "H")
    return QuantumGate(core, dim=dim, **kwargs)


def rotation(axis: int, angle: float, **kwargs) -> QuantumGate:
    """Bloch rotation ``exp(-i sigma_axis angle / 2)``; qubits only."""
    if kwargs.pop("dim", 2) != 2:
        raise CatalogError("rotation gates are 2-dimensional")
    if axis not in (1, 2, 3):
        raise CatalogError(f"rotation axis must be 1, 2, or 3, got {axis}")
    half = float(angle) / 2
    c, s = math.cos(half), math.sin(half)
    if axis == 1:
        elementary = np.array([[c, -1j * s], [-1j * s, c]])
    elif axis == 2:
        elementary = np.array([[c, -s], [s, c]])
    else:
        elementary = np.array([[np.exp(-1j * half), 0], [0, np.exp(1j * half)]])
    core = _duplicated(elementary, _targets_of(kwargs))
    kwargs.setdefault("label", ["Rx", "Ry", "Rz"][axis - 1])
    return QuantumGate(core, dim=2, **kwargs)


def phase(phase_factor: complex | None = None, *, dim: int = 2, **kwargs) -> QuantumGate:
    """Phase gate ``sum omega^k |k><k|``; omega defaults to ``exp(2 pi i / d)``."""
    omega = np.exp(2j * np.pi / dim) if phase_factor is None else complex(phase_factor)
    elementary = np.diag(omega ** np.arange(dim)).astype(complex)
    core = _duplicated(elementary, _targets_of(kwargs))
    kwargs.setdefault("label", "P")
    return QuantumGate(core, dim=dim, **kwargs)


def diagonal(
    entries: dict[int, complex],
    *,
    exponentiation: bool = False,
    dim: int = 2,
    **kwargs,
) -> QuantumGate:
    """Diagonal gate from a level-to-entry mapping; unspecified levels are 1.

    With ``exponentiation``, each supplied entry ``x`` becomes ``exp(i x)``.
    """
    diag = np.ones(dim, dtype=complex)
    for level, value in entries.items():
        if not 0 <= int(level) < dim:
            raise CatalogError(f"diagonal level {level} out of range for dim {dim}")
        diag[int(level)] = np.exp(1j * complex(value)) if exponentiation else complex(value)
    core = _duplicated(np.diag(diag), _targets_of(kwargs))
    kwargs.setdefault("label", "D")
    return QuantumGate(core, dim=dim, **kwargs)


def summation(shift: int = 1, *, dim: int = 2, **kwargs) -> QuantumGate:
    """Cyclic shift ``sum |k + n mod d><k|`` (the qudit NOT generalization)."""
    if shift < 0:
        raise CatalogError(f"shift must be non-negative, got {shift}")
    elementary = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        elementary[(k + shift) % dim, k] = 1
    core = _duplicated(elementary, _targets_of(kwargs))
    kwargs.setdefault("label", "SUM")
    return QuantumGate(core, dim=dim, **kwargs)


def swap(*, dim: int = 2, **kwargs) -> QuantumGate:
    """Exchange of two systems: ``sum |j><k| (x) |k><j|``."""
    targets = kwargs.get("targets")
    if targets is None:
        targets = kwargs["targets"] = [0, 1]
    if len(set(targets)) != 2:
        raise CatalogError(f"swap needs exactly two targets, got {list(targets)}")
    core = np.zeros((dim * dim, dim * dim), dtype=complex)
    for j in range(dim):
        for k in range(dim):
            core[k * dim + j, j * dim + k] = 1
    kwargs.setdefault("label", "SWAP")
    kwargs.setdefault("family", "SWAP")
    return QuantumGate(core, dim=dim, **kwargs)


def _digit_reversal(dim: int, count: int) -> np.ndarray:
    """Permutation matrix reversing the base-d digit order of basis indices."""
    size = dim**count
    perm = np.zeros((size, size), dtype=complex)
    for idx in range(size):
        digits, rest = [], idx
        for _ in range(count):
            digits.append(rest % dim)
            rest //= dim
        # digits are least-significant first, so re-accumulating them in this
        # order yields the digit-reversed index.
        rev = 0
        for digit in digits:
            rev = rev * dim + digit
        perm[rev, idx] = 1
    return perm


def fourier(
    *, dim: int = 2, composite: bool = True, reverse: bool = False, **kwargs
) -> QuantumGate:
    """Fourier gate.

    The composite form on n targets is the size ``d**n`` transform with its
    output digits reversed (the bare transform circuit without terminal
    swaps); ``reverse`` flips which end of the target list is treated as most
    significant.  With ``composite=False`` the elementary single-system
    transform is duplicated onto each target instead.
    """
    targets = _targets_of(kwargs)
    omega = np.exp(2j * np.pi / dim)
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    elementary = omega ** (j * k) / math.sqrt(dim)
    if composite and len(targets) > 1:
        size = dim ** len(targets)
        w = np.exp(2j * np.pi / size)
        r, c = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
        dft = w ** (r * c) / math.sqrt(size)
        rev = _digit_reversal(dim, len(targets))
        core = dft @ rev if reverse else rev @ dft
    elif composite:
        core = elementary
    else:
        core = _duplicated(elementary, targets)
    kwargs.setdefault("label", "F")
    return QuantumGate(core, dim=dim, **kwargs)


# -- compositions ---------------------------------------------------------------


def interleave(gates: Sequence[QuantumGate], *, merge: bool = False, **modifiers) -> QuantumGate:
    """Single slice acting as all ``gates`` at once (matrix product).

    The gates must share ``dim`` and ``num_systems`` and touch pairwise
    disjoint systems.
    """
    if not gates:
        raise CompositionError("interleave needs at least one gate")
    first = gates[0]
    occupied: set[int] = set()
    for g in gates:
        if isinstance(g, MeasurementGate):
            raise CompositionError("measurement gates cannot be composed")
        if g.dim != first.dim or g.num_systems != first.num_systems:
            raise CompositionError("interleaved gates must share dim and num_systems")
        span = set(g.span)
        if span & occupied:
            raise CompositionError("interleaved gates must not share systems")
        occupied |= span
    full = np.eye(first.dim**first.num_systems, dtype=complex)
    for g in gates:
        full = g.full_matrix() @ full
    modifiers.setdefault("label", "·".join(g.label for g in gates))
    out = QuantumGate(
        full,
        targets=range(first.num_systems),
        dim=first.dim,
        num_systems=first.num_systems,
        **modifiers,
    )
    out.parts = tuple((g, 0) for g in gates)
    out.merged = merge
    return out


def stack(gates: Sequence[QuantumGate], *, merge: bool = False, **modifiers) -> QuantumGate:
    """Tensor product of ``gates``; spans the sum of their system counts."""
    if not gates:
        raise CompositionError("stack needs at least one gate")
    dim = gates[0].dim
    parts, offset = [], 0
    for g in gates:
        if isinstance(g, MeasurementGate):
            raise CompositionError("measurement gates cannot be composed")
        if g.dim != dim:
            raise CompositionError("stacked gates must share dim")
        parts.append((g, offset))
        offset += g.num_systems
    full = linalg.kron_all([g.full_matrix() for g in gates])
    modifiers.setdefault("label", "⊗".join(g.label for g in gates))
    out = QuantumGate(
        full, targets=range(offset), dim=dim, num_systems=offset, **modifiers
    )
    out.parts = tuple(parts)
    out.merged = merge
    return out
