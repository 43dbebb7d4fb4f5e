"""
Dense complex linear algebra for small multipartite systems.

Kronecker products, partial traces, subsystem permutations, Hermitian
eigendecompositions, projectors and the Hermitian/real-embedding helpers the
SDP layer needs. All functions are pure and operate on numpy arrays.
"""
from functools import reduce
from typing import Iterable, List, Sequence, Tuple
import logging

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .models import ZesimError, DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complexfloating]
SystemDims = Sequence[int]


class LinalgError(ZesimError):
    """Base class for linear-algebra errors."""


class DimensionMismatchError(LinalgError, ValueError):
    """Raised when subsystem dimensions do not match a matrix."""


class EigenDecompositionError(LinalgError):
    """Raised when the Hermitian eigensolver does not converge."""


def as_matrix(data) -> ComplexMatrix:
    """Coerce to a finite 2-D complex array."""
    m = np.asarray(data, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got an array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise LinalgError("matrix has non-finite entries")
    return m


def hermitian_part(m: ComplexMatrix) -> ComplexMatrix:
    return (m + m.conj().T) / 2


def is_hermitian(m: ComplexMatrix, atol: float = DEFAULT_TOLERANCES.hermitian) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and bool(np.allclose(m, m.conj().T, rtol=0.0, atol=atol))


def kron(*factors: ComplexMatrix) -> ComplexMatrix:
    """Kronecker product of one or more matrices, left to right."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, (np.asarray(f) for f in factors))


def check_dims(dims: SystemDims, size: int) -> Tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionMismatchError(f"invalid subsystem dimensions {dims}")
    if int(np.prod(dims)) != size:
        raise DimensionMismatchError(f"dimensions {dims} do not multiply to {size}")
    return dims


def partial_trace(m: ComplexMatrix, dims: SystemDims, keep: Iterable[int]) -> ComplexMatrix:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems stay in their original relative order. Works for any
    square operator, Hermitian or not.
    """
    m = np.asarray(m)
    dims = check_dims(dims, m.shape[0])
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError("partial_trace needs a square matrix")
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionMismatchError(f"subsystem index out of range in {keep}")

    n = len(dims)
    t = m.reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    # trace from the highest axis down so remaining axis numbers stay valid
    for offset, k in enumerate(sorted(traced, reverse=True)):
        width = n - offset
        t = np.trace(t, axis1=k, axis2=k + width)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def permute_systems(m: ComplexMatrix, dims: SystemDims, perm: Sequence[int]) -> ComplexMatrix:
    """Reorder tensor factors: output factor ``i`` is input factor ``perm[i]``."""
    m = np.asarray(m)
    dims = check_dims(dims, m.shape[0])
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(len(dims))):
        raise DimensionMismatchError(f"{perm} is not a permutation of {len(dims)} systems")
    n = len(dims)
    cols = m.shape[1]
    if cols == m.shape[0]:
        t = m.reshape(dims + dims).transpose(perm + [n + p for p in perm])
        return t.reshape(m.shape)
    if cols == 1:
        return m.reshape(dims).transpose(perm).reshape(m.shape)
    raise DimensionMismatchError("permute_systems needs a square matrix or a column vector")


def permute_vector(v: np.ndarray, dims: SystemDims, perm: Sequence[int]) -> np.ndarray:
    v = np.asarray(v)
    return permute_systems(v.reshape(-1, 1), dims, perm).ravel()


def eig_hermitian(m: ComplexMatrix) -> Tuple[np.ndarray, ComplexMatrix]:
    """Ascending eigenvalues and unitary eigenvectors of the Hermitian part of ``m``."""
    h = hermitian_part(np.asarray(m, dtype=complex))
    try:
        evals, evecs = scipy.linalg.eigh(h)
    except np.linalg.LinAlgError as e:
        raise EigenDecompositionError(f"eigensolver failed on a {h.shape[0]}x{h.shape[0]} matrix: {e}") from e
    return evals, evecs


def eigvals_hermitian(m: ComplexMatrix) -> np.ndarray:
    h = hermitian_part(np.asarray(m, dtype=complex))
    try:
        return scipy.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as e:
        raise EigenDecompositionError(str(e)) from e


def min_eigenvalue(m: ComplexMatrix) -> float:
    return float(eigvals_hermitian(m)[0])


def max_eigenvalue(m: ComplexMatrix) -> float:
    return float(eigvals_hermitian(m)[-1])


def is_psd(m: ComplexMatrix, tol: float = DEFAULT_TOLERANCES.psd) -> bool:
    return min_eigenvalue(m) >= -tol


def orthonormal_span(vectors: Sequence[np.ndarray], tol: float = DEFAULT_TOLERANCES.rank,
                     dim: int = 0) -> ComplexMatrix:
    """Isometry whose columns are an orthonormal basis of span(vectors).

    Singular values below ``tol`` times the largest are dropped. An empty
    family gives a ``dim x 0`` isometry.
    """
    if len(vectors) == 0:
        return np.zeros((dim, 0), dtype=complex)
    a = np.column_stack([np.asarray(v, dtype=complex).ravel() for v in vectors])
    u, s, _ = scipy.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    rank = int(np.sum(s >= tol * s[0]))
    return u[:, :rank]


def projector_onto_span(vectors: Sequence[np.ndarray], tol: float = DEFAULT_TOLERANCES.rank,
                        dim: int = 0) -> ComplexMatrix:
    """Orthogonal projector onto span(vectors); zero matrix for an empty list."""
    q = orthonormal_span(vectors, tol, dim)
    return q @ q.conj().T


def numerical_rank(m: ComplexMatrix, tol: float = DEFAULT_TOLERANCES.rank) -> int:
    s = scipy.linalg.svdvals(np.asarray(m, dtype=complex))
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s >= tol * s[0]))


def max_entangled_vector(d: int) -> np.ndarray:
    """Unnormalized sum_k |kk>."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    return np.eye(d, dtype=complex).ravel()


def basis_vector(d: int, k: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[k] = 1.0
    return v


def outer(u: np.ndarray, v: np.ndarray) -> ComplexMatrix:
    """|u><v|."""
    return np.outer(np.asarray(u).ravel(), np.asarray(v).ravel().conj())


# ============================================================================
# Hermitian coordinates
# ============================================================================

def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal basis of d x d Hermitian matrices under <A, B> = tr(AB).

    Order: diagonal units, then symmetric (e_jk + e_kj)/sqrt2, then
    antisymmetric (-i e_jk + i e_kj)/sqrt2 for j < k. Shape (d*d, d, d).
    """
    out = np.zeros((d * d, d, d), dtype=complex)
    for j in range(d):
        out[j, j, j] = 1.0
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    r = 1 / np.sqrt(2)
    for idx, (j, k) in enumerate(pairs):
        out[d + idx, j, k] = out[d + idx, k, j] = r
        out[d + len(pairs) + idx, j, k] = -1j * r
        out[d + len(pairs) + idx, k, j] = 1j * r
    return out


def hermitian_coordinates(m: ComplexMatrix) -> np.ndarray:
    """Real coordinates of a (Hermitian) matrix in ``hermitian_basis``."""
    m = np.asarray(m, dtype=complex)
    basis = hermitian_basis(m.shape[0])
    return np.einsum('kij,ji->k', basis, m).real


def from_hermitian_coordinates(coords: np.ndarray, d: int) -> ComplexMatrix:
    return np.einsum('k,kij->ij', np.asarray(coords, dtype=float), hermitian_basis(d))


def gell_mann_basis(d: int) -> np.ndarray:
    """Generalized Gell-Mann matrices: d*d - 1 traceless Hermitian matrices."""
    mats: List[np.ndarray] = []
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            anti = np.zeros((d, d), dtype=complex)
            anti[j, k] = -1j
            anti[k, j] = 1j
            mats.extend([sym, anti])
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.sqrt(2 / (l * (l + 1))) * np.diag(diag).astype(complex))
    if not mats:
        return np.zeros((0, d, d), dtype=complex)
    return np.array(mats)


# ============================================================================
# Real symmetric embedding
# ============================================================================

def embed_real(h: ComplexMatrix) -> np.ndarray:
    """[[Re, -Im], [Im, Re]]; doubles the Hilbert-Schmidt inner product."""
    h = np.asarray(h, dtype=complex)
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


def unembed_real(y: np.ndarray) -> ComplexMatrix:
    """Complex matrix whose embedding is the structured part of ``y``."""
    y = np.asarray(y, dtype=float)
    d = y.shape[0] // 2
    a, b = y[:d, :d], y[:d, d:]
    c, e = y[d:, :d], y[d:, d:]
    return (a + e) / 2 + 1j * (c - b) / 2
