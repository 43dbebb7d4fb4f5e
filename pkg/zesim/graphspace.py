"""
Quantum channels, non-commutative bipartite graphs and no-signalling maps.

Conventions: a Kraus operator E maps A -> B and is stored as a dim_b x dim_a
matrix. Its Choi vector (1 (x) E)|Phi> lives on A (x) B with A first, so
``vec = E.T.ravel()`` and ``E = vec.reshape(dim_a, dim_b).T``. Composite
graphs order systems A1 A2 ... B1 B2 ...
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np

from .models import ZesimError, SolverOptions, DEFAULT_TOLERANCES
from .linalg import (
    ComplexMatrix, as_matrix, kron, partial_trace, permute_systems, eig_hermitian,
    min_eigenvalue, orthonormal_span, gell_mann_basis,
    basis_vector, outer, DimensionMismatchError,
)
from .sdpcore import SdpProblem, Sense, SolveStatus, SolverError, solve

logger = logging.getLogger(__name__)


class InvalidChannelError(ZesimError, ValueError):
    """Raised when Kraus operators do not form a channel."""


class InvalidGraphError(ZesimError, ValueError):
    """Raised for malformed graph data."""


def choi_vector(kraus_op: ComplexMatrix) -> np.ndarray:
    """(1 (x) E)|Phi> for E: A -> B."""
    return np.asarray(kraus_op, dtype=complex).T.ravel()


def kraus_from_vector(vec: np.ndarray, dim_a: int, dim_b: int) -> ComplexMatrix:
    return np.asarray(vec, dtype=complex).reshape(dim_a, dim_b).T


@dataclass(frozen=True, eq=False)
class Channel:
    dim_a: int
    dim_b: int
    kraus: Tuple[np.ndarray, ...]

    @classmethod
    def from_kraus(cls, kraus: Sequence[ComplexMatrix], tol: float = DEFAULT_TOLERANCES.channel) -> 'Channel':
        ops = tuple(as_matrix(k) for k in kraus)
        if not ops:
            raise InvalidChannelError("a channel needs at least one Kraus operator")
        dim_b, dim_a = ops[0].shape
        if any(k.shape != (dim_b, dim_a) for k in ops):
            raise InvalidChannelError("Kraus operators must share one shape")
        total = sum(k.conj().T @ k for k in ops)
        err = float(np.max(np.abs(total - np.eye(dim_a))))
        if err > tol:
            raise InvalidChannelError(f"sum of E^dag E deviates from identity by {err:.3e}")
        return cls(dim_a, dim_b, ops)

    @classmethod
    def from_choi(cls, choi: ComplexMatrix, dim_a: int, dim_b: int,
                  tol: float = DEFAULT_TOLERANCES.rank) -> 'Channel':
        """Kraus form of a Choi matrix, renormalized to be exactly trace preserving."""
        choi = as_matrix(choi)
        if choi.shape != (dim_a * dim_b, dim_a * dim_b):
            raise DimensionMismatchError(f"Choi matrix must be {dim_a * dim_b} square")
        evals, evecs = eig_hermitian(choi)
        keep = evals > tol * max(float(evals[-1]), 1.0)
        ops = [np.sqrt(lam) * kraus_from_vector(evecs[:, k], dim_a, dim_b)
               for k, lam in zip(np.nonzero(keep)[0], evals[keep])]
        if not ops:
            raise InvalidChannelError("Choi matrix has no positive part")
        total = sum(k.conj().T @ k for k in ops)
        w, u = eig_hermitian(total)
        if w[0] <= 0:
            raise InvalidChannelError("Choi matrix is not trace preserving on the whole input")
        inv_sqrt = (u / np.sqrt(w)) @ u.conj().T
        return cls.from_kraus([k @ inv_sqrt for k in ops])

    @classmethod
    def identity(cls, d: int) -> 'Channel':
        return cls(d, d, (np.eye(d, dtype=complex),))

    @classmethod
    def constant(cls, beta: np.ndarray, dim_a: int) -> 'Channel':
        """rho -> |beta><beta|."""
        beta = np.asarray(beta, dtype=complex).ravel()
        beta = beta / np.linalg.norm(beta)
        return cls.from_kraus([outer(beta, basis_vector(dim_a, a)) for a in range(dim_a)])

    @classmethod
    def classical(cls, stochastic: np.ndarray) -> 'Channel':
        """Classical channel from a column-stochastic matrix N[b, a]."""
        n = np.asarray(stochastic, dtype=float)
        if np.any(n < 0) or not np.allclose(n.sum(axis=0), 1.0, atol=DEFAULT_TOLERANCES.channel):
            raise InvalidChannelError("classical channel needs nonnegative columns summing to 1")
        dim_b, dim_a = n.shape
        ops = [np.sqrt(n[b, a]) * outer(basis_vector(dim_b, b), basis_vector(dim_a, a))
               for a in range(dim_a) for b in range(dim_b) if n[b, a] > 0]
        return cls.from_kraus(ops)

    def apply(self, rho: ComplexMatrix) -> ComplexMatrix:
        return sum(k @ rho @ k.conj().T for k in self.kraus)


def choi_of_channel(channel: Channel) -> ComplexMatrix:
    """J_AB = sum_k (1 (x) E_k)|Phi><Phi|(1 (x) E_k)^dag."""
    vecs = [choi_vector(k) for k in channel.kraus]
    return sum(np.outer(v, v.conj()) for v in vecs)


@dataclass(frozen=True, eq=False)
class NCBGraph:
    """Choi-Kraus operator space K, stored by an orthonormal basis of its Choi vectors."""
    dim_a: int
    dim_b: int
    support_basis: np.ndarray  # (dim_a * dim_b) x rank isometry

    @classmethod
    def from_vectors(cls, dim_a: int, dim_b: int, vectors: Sequence[np.ndarray],
                     tol: float = DEFAULT_TOLERANCES.rank) -> 'NCBGraph':
        n = dim_a * dim_b
        for v in vectors:
            if np.asarray(v).size != n:
                raise InvalidGraphError(f"support vectors must have length {n}")
        q = orthonormal_span(vectors, tol, n)
        if q.shape[1] == 0:
            raise InvalidGraphError("graph is the zero space")
        return cls(dim_a, dim_b, q)

    @classmethod
    def from_kraus(cls, kraus: Sequence[ComplexMatrix], tol: float = DEFAULT_TOLERANCES.rank) -> 'NCBGraph':
        ops = [as_matrix(k) for k in kraus]
        if not ops:
            raise InvalidGraphError("graph needs at least one operator")
        dim_b, dim_a = ops[0].shape
        if any(k.shape != (dim_b, dim_a) for k in ops):
            raise InvalidGraphError("operators must share one shape")
        return cls.from_vectors(dim_a, dim_b, [choi_vector(k) for k in ops], tol)

    @property
    def n(self) -> int:
        return self.dim_a * self.dim_b

    @property
    def rank(self) -> int:
        return self.support_basis.shape[1]

    @property
    def dims(self) -> Tuple[int, int]:
        return (self.dim_a, self.dim_b)

    @cached_property
    def support_projection(self) -> ComplexMatrix:
        q = self.support_basis
        return q @ q.conj().T

    @cached_property
    def basis(self) -> Tuple[np.ndarray, ...]:
        return tuple(kraus_from_vector(self.support_basis[:, k], self.dim_a, self.dim_b)
                     for k in range(self.rank))

    def contains(self, op: ComplexMatrix, tol: float = 1e-9) -> bool:
        v = choi_vector(op)
        q = self.support_basis
        return float(np.linalg.norm(v - q @ (q.conj().T @ v))) <= tol * max(1.0, float(np.linalg.norm(v)))


def graph_of_channel(channel: Channel) -> NCBGraph:
    return NCBGraph.from_kraus(channel.kraus)


def kalpha(alpha: float) -> NCBGraph:
    """Qubit-to-qutrit graph spanned by psi_0, psi_1(alpha), psi_2."""
    c2 = np.cos(alpha) ** 2
    if not 1e-15 < c2 < 1.0 - 1e-15:
        raise InvalidGraphError(f"cos^2(alpha) must lie strictly inside (0, 1), got {c2}")
    return NCBGraph.from_vectors(2, 3, kalpha_vectors(alpha))


def kalpha_vectors(alpha: float) -> List[np.ndarray]:
    def k(a: int, b: int) -> np.ndarray:
        return kron(basis_vector(2, a), basis_vector(3, b))

    psi0 = (k(0, 0) + k(0, 1) + k(1, 2)) / np.sqrt(3)
    psi1 = np.cos(alpha) * k(0, 2) + np.sin(alpha) * k(1, 1)
    psi2 = k(1, 0)
    return [psi0, psi1, psi2]


def delta_ell(l: int) -> NCBGraph:
    """Graph of the noiseless l-symbol channel."""
    if l < 1:
        raise InvalidGraphError(f"number of symbols must be positive, got {l}")
    return NCBGraph.from_vectors(l, l, [kron(basis_vector(l, k), basis_vector(l, k)) for k in range(l)])


def classical_graph(adjacency: np.ndarray) -> NCBGraph:
    """Graph spanned by |b><a| for every edge ``adjacency[b][a]``."""
    adj = np.asarray(adjacency, dtype=bool)
    if adj.ndim != 2:
        raise InvalidGraphError("adjacency must be a matrix")
    empty = np.nonzero(~adj.any(axis=0))[0]
    if empty.size:
        raise InvalidGraphError(f"inputs {empty.tolist()} have no outgoing edge")
    dim_b, dim_a = adj.shape
    vecs = [kron(basis_vector(dim_a, a), basis_vector(dim_b, b))
            for a in range(dim_a) for b in range(dim_b) if adj[b, a]]
    return NCBGraph.from_vectors(dim_a, dim_b, vecs)


def tensor_graph(k1: NCBGraph, k2: NCBGraph) -> NCBGraph:
    """K1 (x) K2 on A1 A2 B1 B2."""
    q = np.kron(k1.support_basis, k2.support_basis)
    q = q.reshape(k1.dim_a, k1.dim_b, k2.dim_a, k2.dim_b, -1).transpose(0, 2, 1, 3, 4)
    return NCBGraph(k1.dim_a * k2.dim_a, k1.dim_b * k2.dim_b,
                    q.reshape(k1.n * k2.n, -1))


def graph_power(k: NCBGraph, power: int) -> NCBGraph:
    if power < 1:
        raise ValueError(f"power must be at least 1, got {power}")
    out = k
    for _ in range(power - 1):
        out = tensor_graph(out, k)
    return out


def graph_feasibility(k: NCBGraph, options: Optional[SolverOptions] = None,
                      threshold: float = DEFAULT_TOLERANCES.feasibility) -> Optional[Channel]:
    """A channel whose Kraus span lies inside K, or None when none exists.

    First measures the distance ``min eps`` with ``-eps 1 <= tr_B(V) - 1_A <= eps 1``
    over PSD V supported on K. When that distance vanishes, maximizes t with
    X >= t 1 so the returned channel has full rank on the support.
    """
    options = options or SolverOptions()
    q = k.support_basis
    da, db, r = k.dim_a, k.dim_b, k.rank
    eye_a = np.eye(da)

    def tr_b_adjoint(g: np.ndarray) -> np.ndarray:
        return q.conj().T @ np.kron(g, np.eye(db)) @ q

    dist = SdpProblem(sense=Sense.MIN)
    x = dist.psd(r, name="X")
    e_plus = dist.psd(da, name="E+")
    e_minus = dist.psd(da, name="E-")
    eps = dist.nonneg(1, name="eps")
    dist.set_objective(eps, 1.0)
    dist.add_matrix_equality({eps: lambda g: np.real(np.trace(g)), x: lambda g: -tr_b_adjoint(g),
                              e_plus: lambda g: -g}, -eye_a)
    dist.add_matrix_equality({eps: lambda g: np.real(np.trace(g)), x: tr_b_adjoint,
                              e_minus: lambda g: -g}, eye_a)
    sol = solve(dist, options)
    if not sol.accepted(options.relaxed_tol):
        raise SolverError(f"feasibility distance solve ended with {sol.status.value}", sol)
    if sol.primal_value > threshold:
        logger.info("graph is infeasible: distance %.3e", sol.primal_value)
        return None

    interior = SdpProblem(sense=Sense.MAX)
    x = interior.psd(r, name="X")
    rest = interior.psd(r, name="R")
    t = interior.free(1, name="t")
    interior.set_objective(t, 1.0)
    interior.add_matrix_equality({x: tr_b_adjoint}, eye_a)
    interior.add_matrix_equality({x: lambda g: g, rest: lambda g: -g,
                                  t: lambda g: -np.real(np.trace(g))}, np.zeros((r, r)))
    sol = solve(interior, options)
    if not sol.accepted(options.relaxed_tol):
        raise SolverError(f"feasibility interior solve ended with {sol.status.value}", sol)
    choi = q @ sol.primal_point[x] @ q.conj().T
    return Channel.from_choi((choi + choi.conj().T) / 2, da, db)


# ============================================================================
# Quantum no-signalling correlations
# ============================================================================

@dataclass(frozen=True, eq=False)
class QnscMap:
    """Bipartite channel A_i B_i -> A_o B_o with Choi matrix on A_i' A_o B_i' B_o."""
    dim_ai: int
    dim_ao: int
    dim_bi: int
    dim_bo: int
    choi: np.ndarray

    def __post_init__(self):
        n = self.dim_ai * self.dim_ao * self.dim_bi * self.dim_bo
        if np.asarray(self.choi).shape != (n, n):
            raise DimensionMismatchError(f"QNSC Choi matrix must be {n}x{n}")

    @property
    def dims(self) -> List[int]:
        return [self.dim_ai, self.dim_ao, self.dim_bi, self.dim_bo]

    @classmethod
    def from_kraus(cls, kraus: Sequence[ComplexMatrix], dim_ai: int, dim_ao: int,
                   dim_bi: int, dim_bo: int) -> 'QnscMap':
        """Kraus operators map A_i B_i -> A_o B_o (each (ao*bo) x (ai*bi))."""
        vecs = [choi_vector(k) for k in kraus]
        choi = sum(np.outer(v, v.conj()) for v in vecs)
        # Choi of the joint map is ordered A_i' B_i' A_o B_o
        choi = permute_systems(choi, [dim_ai, dim_bi, dim_ao, dim_bo], [0, 2, 1, 3])
        return cls(dim_ai, dim_ao, dim_bi, dim_bo, choi)

    @classmethod
    def product(cls, channel_a: Channel, channel_b: Channel) -> 'QnscMap':
        return cls(channel_a.dim_a, channel_a.dim_b, channel_b.dim_a, channel_b.dim_b,
                   np.kron(choi_of_channel(channel_a), choi_of_channel(channel_b)))


@dataclass
class QnscReport:
    positivity: float
    normalization: float
    no_signalling_a_to_b: float
    no_signalling_b_to_a: float
    tol: float

    def violations(self) -> Dict[str, float]:
        return {
            'positivity': self.positivity,
            'normalization': self.normalization,
            'no_signalling_a_to_b': self.no_signalling_a_to_b,
            'no_signalling_b_to_a': self.no_signalling_b_to_a,
        }

    def failures(self) -> List[str]:
        return [name for name, value in self.violations().items() if value > self.tol]

    @property
    def passed(self) -> bool:
        return not self.failures()


def qnsc_check(pi: QnscMap, tol: float = 1e-8) -> QnscReport:
    """Worst violation of each QNSC constraint family."""
    omega = np.asarray(pi.choi, dtype=complex)
    dims = pi.dims
    ai, ao, bi, bo = dims

    positivity = max(0.0, -min_eigenvalue(omega))
    marginal = partial_trace(omega, dims, keep=[0, 2])
    normalization = float(np.linalg.norm(marginal - np.eye(ai * bi), 2))

    a_to_b = 0.0
    for x in gell_mann_basis(ai):
        op = omega @ kron(x.T, np.eye(ao * bi * bo))
        a_to_b = max(a_to_b, float(np.linalg.norm(partial_trace(op, dims, keep=[2, 3]), 2)))
    b_to_a = 0.0
    for y in gell_mann_basis(bi):
        op = omega @ kron(np.eye(ai * ao), y.T, np.eye(bo))
        b_to_a = max(b_to_a, float(np.linalg.norm(partial_trace(op, dims, keep=[0, 1]), 2)))
    return QnscReport(positivity, normalization, a_to_b, b_to_a, tol)


def compose_qnsc(pi: QnscMap, channel: Channel) -> ComplexMatrix:
    """Choi matrix on A_i B_o of the map obtained by wiring A_o -> B_i through ``channel``."""
    if (channel.dim_a, channel.dim_b) != (pi.dim_ao, pi.dim_bi):
        raise DimensionMismatchError(
            f"channel must map {pi.dim_ao} -> {pi.dim_bi}, got {channel.dim_a} -> {channel.dim_b}")
    ai, ao, bi, bo = pi.dims
    omega = np.asarray(pi.choi).reshape(ai, ao, bi, bo, ai, ao, bi, bo)
    j_e = choi_of_channel(channel).reshape(ao, bi, ao, bi)
    out = np.einsum('uvxy,auvbcxyd->abcd', j_e, omega)
    return out.reshape(ai * bo, ai * bo)
