"""Qudit quantum states: construction, transformation, and scalar quantities.

States are plain values: every operation returns a new :class:`QuantumState`
and never mutates its input, so instances can be shared freely.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import (
    DimensionError,
    InvalidKindError,
    LevelError,
    NotHermitianError,
    OverlapError,
    ZeroNormError,
)

COEFF_EPS = 1e-12
SUPPORT_EPS = 1e-12


def _is_weighted_kets(spec) -> bool:
    if not isinstance(spec, (list, tuple)) or not spec:
        return False
    return all(
        isinstance(item, tuple)
        and len(item) == 2
        and isinstance(item[1], (list, tuple))
        for item in spec
    )


def _infer_num_systems(size: int, dim: int) -> int:
    n = round(math.log(size, dim)) if size > 1 else 0
    if n < 1 or dim**n != size:
        raise DimensionError(f"size {size} is not a positive power of dim {dim}")
    return n


class QuantumState:
    """A ``dim``-level, ``num_systems``-fold quantum state.

    ``spec`` may be a list of ``(coefficient, levels)`` pairs (one level per
    system), or a raw vector/matrix as a nested list or numpy array.  With
    ``form="vector"`` the weighted kets are summed into a state vector; with
    ``form="matrix"`` they produce the outer product (``kind="pure"``) or the
    diagonal mixture ``sum c |levels><levels|`` (``kind="mixed"``).

    ``norm`` rescales so the inner product (vectors) or trace (matrices)
    equals the given value; ``True`` means 1, ``None``/``False`` leaves the
    state untouched.  ``conjugate`` turns a ket into a bra.
    """

    def __init__(
        self,
        spec,
        *,
        form: str = "vector",
        kind: str = "pure",
        dim: int = 2,
        num_systems: int | None = None,
        norm=None,
        conjugate: bool = False,
        label: str | None = None,
    ):
        if form not in ("vector", "matrix"):
            raise InvalidKindError(f"unknown form {form!r}")
        if kind not in ("pure", "mixed"):
            raise InvalidKindError(f"unknown kind {kind!r}")
        if form == "vector" and kind == "mixed":
            raise InvalidKindError('form "vector" cannot be paired with kind "mixed"')
        if dim < 2:
            raise DimensionError(f"dim must be at least 2, got {dim}")

        self.dim = int(dim)
        self.form = form
        self.kind = kind
        payload, n_sys = self._build_payload(spec, form, kind, dim)
        if num_systems is not None and num_systems != n_sys:
            raise DimensionError(
                f"spec spans {n_sys} system(s), but num_systems={num_systems}"
            )
        self.num_systems = n_sys
        self.conjugated = False
        self._payload = payload

        if norm is not None and norm is not False:
            target = 1.0 if norm is True else float(norm)
            self._payload = self._normalized_payload(target)
        if conjugate:
            if form == "vector":
                self.conjugated = True
            else:
                self._payload = linalg.dagger(self._payload)
        self.label = label if label is not None else ("ψ" if form == "vector" else "ρ")
        self._initial = (self._payload.copy(), form, kind, self.conjugated, n_sys)

    # -- construction internals ---------------------------------------------

    @staticmethod
    def _build_payload(spec, form, kind, dim):
        if _is_weighted_kets(spec):
            return QuantumState._from_weighted_kets(spec, form, kind, dim)

        raw = np.asarray(spec, dtype=complex)
        if raw.ndim == 1:
            raw = raw.reshape(-1, 1)
        if raw.ndim != 2:
            raise DimensionError("state spec must be a vector or matrix")
        if 1 in raw.shape and raw.size > 1 or raw.shape == (1, 1):
            ket = raw.reshape(-1, 1)
            n = _infer_num_systems(ket.shape[0], dim)
            if form == "vector":
                return ket, n
            return ket @ linalg.dagger(ket), n
        if raw.shape[0] != raw.shape[1]:
            raise DimensionError(f"matrix spec must be square, got {raw.shape}")
        if form == "vector":
            raise DimensionError("a square matrix spec cannot build a vector state")
        if not linalg.is_hermitian(raw, tol=1e-9):
            raise NotHermitianError("matrix state payload must be Hermitian")
        return raw, _infer_num_systems(raw.shape[0], dim)

    @staticmethod
    def _from_weighted_kets(spec, form, kind, dim):
        n = len(spec[0][1])
        if n == 0:
            raise LevelError("each ket needs at least one level")
        size = dim**n
        for coeff, levels in spec:
            if len(levels) != n:
                raise LevelError("all kets must span the same number of systems")
            for level in levels:
                if not 0 <= int(level) < dim:
                    raise LevelError(f"level {level} out of range for dim {dim}")

        def index(levels):
            idx = 0
            for level in levels:
                idx = idx * dim + int(level)
            return idx

        if form == "vector" or kind == "pure":
            ket = np.zeros((size, 1), dtype=complex)
            for coeff, levels in spec:
                ket[index(levels), 0] += complex(coeff)
            if form == "vector":
                return ket, n
            return ket @ linalg.dagger(ket), n

        rho = np.zeros((size, size), dtype=complex)
        for coeff, levels in spec:
            c = complex(coeff)
            if abs(c.imag) > COEFF_EPS:
                raise InvalidKindError(
                    f"mixed-state weights must be real probabilities, got {coeff}"
                )
            rho[index(levels), index(levels)] += c.real
        return rho, n

    def _normalized_payload(self, target: float) -> np.ndarray:
        if self.form == "vector":
            current = float(np.real(np.vdot(self._payload, self._payload)))
            if current <= COEFF_EPS:
                raise ZeroNormError("cannot normalize a zero vector")
            return self._payload * math.sqrt(target / current)
        current = float(np.real(np.trace(self._payload)))
        if abs(current) <= COEFF_EPS:
            raise ZeroNormError("cannot normalize a traceless matrix")
        return self._payload * (target / current)

    def _replace(self, payload, *, form=None, kind=None, conjugated=None,
                 num_systems=None, label=None) -> "QuantumState":
        out = object.__new__(QuantumState)
        out.dim = self.dim
        out.form = self.form if form is None else form
        out.kind = self.kind if kind is None else kind
        out.conjugated = self.conjugated if conjugated is None else conjugated
        out.num_systems = self.num_systems if num_systems is None else num_systems
        out.label = self.label if label is None else label
        out._payload = np.asarray(payload, dtype=complex)
        out._initial = self._initial
        return out

    # -- inspection -----------------------------------------------------------

    @property
    def data(self) -> np.ndarray:
        """Raw payload: a column vector (vectors) or square matrix."""
        return self._payload

    @property
    def matrix(self) -> np.ndarray:
        """Density-matrix representation regardless of form."""
        if self.form == "matrix":
            return self._payload
        return self._payload @ linalg.dagger(self._payload)

    @property
    def ket(self) -> np.ndarray:
        if self.form != "vector":
            raise DimensionError("matrix state has no ket representation")
        return self._payload

    def __repr__(self):
        return (
            f"QuantumState(dim={self.dim}, num_systems={self.num_systems}, "
            f"form={self.form!r}, kind={self.kind!r}, label={self.label!r})"
        )

    def __str__(self):
        return self.braket()

    # -- transformations -------------------------------------------------------

    def densify(self) -> "QuantumState":
        """Density-matrix form of the state; matrices pass through unchanged."""
        if self.form == "matrix":
            return self
        return self._replace(self.matrix, form="matrix", conjugated=False)

    def dagger(self) -> "QuantumState":
        """Conjugate transpose; toggles the bra flag on vectors."""
        if self.form == "vector":
            return self._replace(self._payload, conjugated=not self.conjugated)
        return self._replace(linalg.dagger(self._payload))

    def normalize(self, norm: float = 1.0) -> "QuantumState":
        return self._replace(self._normalized_payload(float(norm)))

    def coefficient(self, scalar) -> "QuantumState":
        return self._replace(self._payload * complex(scalar))

    def reset(self) -> "QuantumState":
        payload, form, kind, conjugated, n = self._initial
        return self._replace(
            payload.copy(), form=form, kind=kind, conjugated=conjugated, num_systems=n
        )

    def partial_trace(self, targets: Iterable[int], discard: bool = True) -> "QuantumState":
        """Trace out ``targets`` (or everything but them when ``discard`` is False)."""
        targets = sorted(set(self._check_systems(targets)))
        keep = [k for k in range(self.num_systems) if k not in targets] if discard else targets
        reduced = linalg.partial_trace_raw(
            self.matrix, [self.dim] * self.num_systems, keep
        )
        return self._replace(
            reduced, form="matrix", kind="mixed",
            conjugated=False, num_systems=len(keep),
        )

    def _check_systems(self, systems) -> list[int]:
        systems = [int(s) for s in systems]
        for s in systems:
            if not 0 <= s < self.num_systems:
                raise IndexError(f"system {s} out of range for {self.num_systems}")
        if len(set(systems)) != len(systems):
            raise IndexError(f"duplicate system index in {systems}")
        return systems

    def measure(
        self,
        operators: Sequence,
        targets: Iterable[int] | None = None,
        observable: bool = False,
        statistics: bool = False,
    ):
        """Measure the systems in ``targets`` (all by default).

        Returns a list of probabilities ``tr[K† K ρ]`` or expectation values
        ``tr[O ρ]`` when ``statistics`` is set; otherwise returns the
        post-measurement state ``Σ K ρ K†`` (or ``Σ tr[O ρ] O``).  Systems
        outside ``targets`` are traced out first.  Supplied POVMs are not
        checked for completeness, and the result is not renormalized.
        """
        if targets is None:
            targets = range(self.num_systems)
        targets = sorted(set(self._check_systems(targets)))
        side = self.dim ** len(targets)
        mats, kets = [], []
        for op in operators:
            raw = op.data if isinstance(op, QuantumState) else np.asarray(op, dtype=complex)
            raw = linalg.as_matrix(raw)
            if raw.shape == (side, 1):
                kets.append(raw)
                mats.append(raw @ linalg.dagger(raw))
            elif raw.shape == (1, side):
                kets.append(linalg.dagger(raw))
                mats.append(linalg.dagger(raw) @ raw)
            elif raw.shape == (side, side):
                kets.append(None)
                mats.append(raw)
            else:
                raise DimensionError(
                    f"operator shape {raw.shape} does not fit {len(targets)} "
                    f"target system(s) of dim {self.dim}"
                )

        full = len(targets) == self.num_systems
        if (
            not statistics
            and not observable
            and len(mats) == 1
            and self.form == "vector"
            and full
        ):
            k = mats[0] if kets[0] is None else kets[0] @ linalg.dagger(kets[0])
            new = k @ self._payload
            weight = float(np.real(np.vdot(new, new)))
            if weight <= COEFF_EPS:
                raise ZeroNormError("measurement annihilated the state")
            return self._replace(new / math.sqrt(weight))

        rho = self.matrix
        if not full:
            rho = linalg.partial_trace_raw(rho, [self.dim] * self.num_systems, targets)

        if statistics:
            if observable:
                return [float(np.real(np.trace(m @ rho))) for m in mats]
            return [float(np.real(np.trace(linalg.dagger(m) @ m @ rho))) for m in mats]

        if observable:
            out = sum(np.real(np.trace(m @ rho)) * m for m in mats)
        else:
            out = sum(m @ rho @ linalg.dagger(m) for m in mats)
        return self._replace(
            out, form="matrix", kind="mixed", conjugated=False,
            num_systems=len(targets),
        )

    def postselect(self, postselections: Sequence[tuple]) -> "QuantumState":
        """Contract the state against ``(operator, start_index)`` pairs.

        Each operator spans consecutive systems beginning at its start index.
        Vector rules contract ``<phi|Psi>``; matrix rules compute
        ``tr_span[w rho]``.  No renormalization is applied.
        """
        items = []
        for op, start in postselections:
            raw = op.data if isinstance(op, QuantumState) else np.asarray(op, dtype=complex)
            raw = linalg.as_matrix(raw)
            if 1 in raw.shape:
                vec = raw.reshape(-1, 1)
                span = _infer_num_systems(vec.shape[0], self.dim)
                items.append((vec, None, int(start), span))
            else:
                if raw.shape[0] != raw.shape[1]:
                    raise DimensionError("postselection operator must be square")
                span = _infer_num_systems(raw.shape[0], self.dim)
                items.append((None, raw, int(start), span))

        spans = []
        for _, _, start, span in items:
            if start < 0 or start + span > self.num_systems:
                raise IndexError(
                    f"postselection span [{start}, {start + span}) out of range"
                )
            spans.extend(range(start, start + span))
        if len(set(spans)) != len(spans):
            raise IndexError("postselection spans overlap")

        state = self
        removed: list[int] = []
        for vec, mat, start, span in items:
            offset = sum(1 for r in removed if r < start)
            state = state._postselect_one(vec, mat, start - offset, span)
            removed.extend(range(start, start + span))
        return state

    def _postselect_one(self, vec, mat, start, span) -> "QuantumState":
        d, n = self.dim, self.num_systems
        if vec is not None and self.form == "vector":
            pre, mid, post = d**start, d**span, d ** (n - start - span)
            psi = self._payload.reshape(pre, mid, post)
            new = np.einsum("s,asb->ab", np.conj(vec[:, 0]), psi).reshape(-1, 1)
            return self._replace(new, num_systems=n - span)
        omega = mat if mat is not None else vec @ linalg.dagger(vec)
        embedded = linalg.kron_all(
            [np.eye(d**start), omega, np.eye(d ** (n - start - span))]
        )
        rho = embedded @ self.matrix
        keep = [k for k in range(n) if not start <= k < start + span]
        reduced = linalg.partial_trace_raw(rho, [d] * n, keep)
        return self._replace(
            reduced, form="matrix", kind="mixed",
            conjugated=False, num_systems=len(keep),
        )

    # -- quantities -------------------------------------------------------------

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def purity(self) -> float:
        rho = self.matrix
        return float(np.real(np.trace(rho @ rho)))

    def distance(self, other: "QuantumState") -> float:
        """Trace distance ``(1/2) tr|rho - tau|``."""
        self._check_compatible(other)
        diff = self.matrix - other.matrix
        values = np.linalg.eigvalsh((diff + linalg.dagger(diff)) / 2)
        return float(np.sum(np.abs(values)) / 2)

    def fidelity(self, other: "QuantumState") -> float:
        """Uhlmann fidelity ``(tr sqrt(sqrt(rho) tau sqrt(rho)))**2``."""
        self._check_compatible(other)
        root = linalg.matrix_function(self.matrix, lambda w: np.sqrt(np.clip(w, 0, None)))
        inner = root @ other.matrix @ root
        values = np.linalg.eigvalsh((inner + linalg.dagger(inner)) / 2)
        return float(np.sum(np.sqrt(np.clip(values, 0, None))) ** 2)

    def entropy(self, other: "QuantumState" | None = None, base=2) -> float:
        """Von Neumann entropy, or relative entropy against ``other``.

        Returns ``inf`` when the support of this state is not contained in
        the support of ``other``.
        """
        log_base = math.log(self.dim if base == "d" else float(base))
        values = np.clip(np.linalg.eigvalsh(self.matrix), 0, None)
        nonzero = values > SUPPORT_EPS
        plain = -float(np.sum(values[nonzero] * np.log(values[nonzero])))
        if other is None:
            return plain / log_base
        self._check_compatible(other)
        tau_values, tau_vectors = np.linalg.eigh(other.matrix)
        null = tau_values <= SUPPORT_EPS
        if np.any(null):
            proj = tau_vectors[:, null]
            leak = float(np.real(np.trace(linalg.dagger(proj) @ self.matrix @ proj)))
            if leak > SUPPORT_EPS:
                return math.inf
        log_tau_values = np.where(null, 0.0, np.log(np.where(null, 1.0, tau_values)))
        log_tau = (tau_vectors * log_tau_values) @ linalg.dagger(tau_vectors)
        cross = float(np.real(np.trace(self.matrix @ log_tau)))
        return (-plain - cross) / log_base

    def mutual(self, systems_a: Iterable[int], systems_b: Iterable[int], base=None) -> float:
        """Mutual information ``S(A) + S(B) - S(A,B)`` between two subsystems."""
        a = sorted(set(self._check_systems(systems_a)))
        b = sorted(set(self._check_systems(systems_b)))
        if set(a) & set(b):
            raise OverlapError(f"subsystems overlap: {sorted(set(a) & set(b))}")
        base = self.dim if base is None else base
        joint = self.partial_trace(a + b, discard=False)
        pos_a = [sorted(a + b).index(s) for s in a]
        pos_b = [sorted(a + b).index(s) for s in b]
        s_a = joint.partial_trace(pos_a, discard=False).entropy(base=base)
        s_b = joint.partial_trace(pos_b, discard=False).entropy(base=base)
        return s_a + s_b - joint.entropy(base=base)

    def _check_compatible(self, other: "QuantumState"):
        if self.dim != other.dim or self.num_systems != other.num_systems:
            raise DimensionError(
                f"states of shape (dim={self.dim}, N={self.num_systems}) and "
                f"(dim={other.dim}, N={other.num_systems}) are incompatible"
            )

    # -- rendering ----------------------------------------------------------------

    def braket(self, delimiter: str = ",", product: bool = False) -> str:
        """Dirac-notation text form of the state."""
        if self.form == "vector":
            entries = np.conj(self._payload[:, 0]) if self.conjugated else self._payload[:, 0]
            terms = [
                (coeff, self._basis_text(i, delimiter, bra=self.conjugated, product=product))
                for i, coeff in enumerate(entries)
                if abs(coeff) >= COEFF_EPS
            ]
            prefix = f"⟨{self.label}| = " if self.conjugated else f"|{self.label}⟩ = "
        else:
            terms = []
            for i in range(self._payload.shape[0]):
                for j in range(self._payload.shape[1]):
                    coeff = self._payload[i, j]
                    if abs(coeff) >= COEFF_EPS:
                        terms.append((coeff, self._pair_text(i, j, delimiter, product)))
            prefix = (
                f"|{self.label}⟩⟨{self.label}| = "
                if self.kind == "pure"
                else f"{self.label} = "
            )
        if not terms:
            return prefix + "0"
        return prefix + _join_terms(terms)

    def _levels(self, index: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.num_systems):
            digits.append(index % self.dim)
            index //= self.dim
        return tuple(reversed(digits))

    def _basis_text(self, index: int, delimiter: str, bra: bool, product: bool) -> str:
        levels = self._levels(index)
        if product:
            shape = "⟨{}|" if bra else "|{}⟩"
            return "⊗".join(shape.format(level) for level in levels)
        inner = delimiter.join(str(level) for level in levels)
        return ("⟨" + inner + "|") if bra else ("|" + inner + "⟩")

    def _pair_text(self, i: int, j: int, delimiter: str, product: bool) -> str:
        row, col = self._levels(i), self._levels(j)
        if product:
            return "⊗".join(f"|{a}⟩⟨{b}|" for a, b in zip(row, col))
        left = delimiter.join(str(level) for level in row)
        right = delimiter.join(str(level) for level in col)
        return f"|{left}⟩⟨{right}|"


def format_number(value: complex) -> str:
    """Six significant digits, trailing zeros trimmed, ``a+bi`` for complex."""
    re, im = value.real, value.imag
    if abs(im) < COEFF_EPS:
        return f"{re:.6g}"
    if abs(re) < COEFF_EPS:
        return f"{im:.6g}i"
    sign = "+" if im >= 0 else "-"
    return f"({re:.6g}{sign}{abs(im):.6g}i)"


def _join_terms(terms: list[tuple[complex, str]]) -> str:
    pieces = []
    for coeff, basis in terms:
        text = format_number(coeff)
        negative = text.startswith("-")
        if negative:
            text = text[1:]
        if not pieces:
            pieces.append(("-" if negative else "") + text + basis)
        else:
            pieces.append((" - " if negative else " + ") + text + basis)
    return "".join(pieces)
