"""Dense complex linear algebra shared by the whole simulator.

Everything here works on plain ``numpy`` arrays of ``complex128``.  Systems
are ordered most-significant first: the composite basis index of levels
``(l_0, ..., l_{N-1})`` is ``sum(l_k * d**(N-1-k))``, matching the order of
factors in :func:`kron`.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DimensionError, NotHermitianError, NotNormalError

HERMITIAN_TOL = 1e-10
NORMAL_TOL = 1e-9
NULL_SPACE_TOL = 1e-8


def as_matrix(m) -> np.ndarray:
    """Coerce input to a 2-D complex array (column shape for 1-D input)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of rank {a.ndim}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.abs(m).max()))
    return float(np.abs(m - dagger(m)).max()) <= tol * scale


def kron(a, b) -> np.ndarray:
    """Kronecker product in standard (row-major, left factor significant) order."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    out = None
    for f in factors:
        out = as_matrix(f) if out is None else kron(out, f)
    if out is None:
        raise DimensionError("empty tensor product")
    return out


def basis_ket(level: int, dim: int) -> np.ndarray:
    v = np.zeros((dim, 1), dtype=complex)
    v[level, 0] = 1.0
    return v


def partial_trace_raw(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` gives the dimension of each subsystem in order; ``m`` must be
    square with side ``prod(dims)``.  The kept subsystems retain their
    relative order.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    side = int(np.prod(dims))
    if m.shape != (side, side):
        raise DimensionError(
            f"matrix of shape {m.shape} does not match subsystem dimensions {dims}"
        )
    keep = list(keep)
    n = len(dims)
    if len(set(keep)) != len(keep):
        raise IndexError(f"duplicate subsystem index in {keep}")
    for k in keep:
        if not 0 <= k < n:
            raise IndexError(f"subsystem index {k} out of range for {n} subsystems")
    keep = sorted(keep)

    tensor = m.reshape(dims + dims)
    # Trace over discarded axes from the highest index down so that earlier
    # axis numbers stay valid.
    discarded = [k for k in range(n) if k not in keep]
    remaining = n
    for k in reversed(discarded):
        tensor = np.trace(tensor, axis1=k, axis2=k + remaining)
        remaining -= 1
    side_out = int(np.prod([dims[k] for k in keep])) if keep else 1
    return tensor.reshape(side_out, side_out)


class EigenDecomposition(NamedTuple):
    """Eigenvalues (real, ascending) and orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian_eig(m) -> EigenDecomposition:
    m = as_matrix(m)
    if not is_hermitian(m):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    values, vectors = np.linalg.eigh(m)
    return EigenDecomposition(values.real, vectors)


def matrix_function(m, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Spectral calculus ``V f(Λ) V†`` for Hermitian ``m``; ``f`` acts on eigenvalues."""
    values, vectors = hermitian_eig(m)
    fv = np.asarray(f(values), dtype=complex)
    return (vectors * fv) @ dagger(vectors)


def null_space(m, tol: float = NULL_SPACE_TOL) -> list[np.ndarray]:
    """Orthonormal basis (column vectors) of the numerical kernel of ``m``.

    Kernel membership is decided by singular values below ``tol`` times the
    largest one.
    """
    m = as_matrix(m)
    cols = m.shape[1]
    _, sigma, vh = np.linalg.svd(m)
    if sigma.size == 0 or sigma[0] <= tol:
        return [basis_ket(i, cols) for i in range(cols)]
    rank = int(np.sum(sigma > tol * sigma[0]))
    return [vh[i].conj().reshape(-1, 1) for i in range(rank, cols)]


def is_normal(m, tol: float = NORMAL_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.abs(m).max()) ** 2)
    comm = m @ dagger(m) - dagger(m) @ m
    return float(np.abs(comm).max()) <= tol * scale


def matrix_power(m, p: float) -> np.ndarray:
    """Principal matrix power of a normal matrix.

    Eigenvalues are raised via the principal branch (argument in (-pi, pi]),
    so for an involutory matrix this reproduces the closed form
    ``(1 - e^{i pi p})/2 * m + (1 + e^{i pi p})/2 * I``.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError("matrix_power expects a square matrix")
    if not is_normal(m):
        raise NotNormalError("fractional powers require a normal matrix")
    if float(p) == int(p) and int(p) >= 0:
        return np.linalg.matrix_power(m, int(p))
    t, q = scipy.linalg.schur(m, output="complex")
    diag = np.diagonal(t).copy()
    powered = np.zeros_like(diag)
    nonzero = np.abs(diag) > 1e-300
    # Eigenvalues sitting on the branch cut (negative real axis) may come out
    # with a tiny negative imaginary part; snap them to the +pi side so that
    # e.g. (-1)**0.5 is deterministically +i.
    args = np.angle(diag[nonzero])
    args = np.where(args <= -np.pi + 1e-9, args + 2 * np.pi, args)
    powered[nonzero] = np.abs(diag[nonzero]) ** p * np.exp(1j * p * args)
    return (q * powered) @ dagger(q)
