"""
Standard-form semidefinite programs and a dense interior-point solver.

A problem is a list of blocks (Hermitian PSD, nonnegative orthant, free),
an objective and a list of scalar equality constraints::

    min / max   sum_j <C_j, X_j>
    s.t.        sum_j <A_ij, X_j> = b_i,   X_j in K_j

The solver is an infeasible-start primal-dual path-following method with
Nesterov-Todd scaling and a Mehrotra predictor-corrector. Complex Hermitian
blocks are solved through the real symmetric embedding [[Re, -Im], [Im, Re]].
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Tuple, Union
import logging

import numpy as np
import scipy.linalg

from .models import SolverOptions, ZesimError, DEFAULT_TOLERANCES
from .linalg import (
    embed_real, unembed_real, hermitian_basis, hermitian_coordinates,
    from_hermitian_coordinates, is_hermitian, eigvals_hermitian,
)

logger = logging.getLogger(__name__)

Coefficient = Union[np.ndarray, float]
BlockValue = np.ndarray


class ConeKind(str, Enum):
    PSD = "psd"
    NONNEG = "nonneg"
    FREE = "free"


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal-infeasible"
    DUAL_INFEASIBLE = "dual-infeasible"
    NUMERICAL_FAILURE = "numerical-failure"


class SdpError(ZesimError):
    """Raised for malformed problems."""


class SolverError(ZesimError):
    """Raised by callers when a solve did not reach an acceptable status."""

    def __init__(self, message: str, solution: Optional['SdpSolution'] = None):
        super().__init__(message)
        self.solution = solution


class _NumericalBreakdown(Exception):
    pass


@dataclass(frozen=True)
class Block:
    """A variable block.

    For PSD blocks ``dim`` is the matrix side. For a free block with
    ``hermitian=True`` the variable is a ``dim x dim`` Hermitian matrix stored
    as ``dim**2`` real coordinates; otherwise ``dim`` is the vector length.
    """
    kind: ConeKind
    dim: int
    hermitian: bool = False
    name: str = ""

    @property
    def size(self) -> int:
        """Number of real coordinates for vector blocks."""
        if self.kind == ConeKind.FREE and self.hermitian:
            return self.dim * self.dim
        return self.dim

    @property
    def is_matrix(self) -> bool:
        return self.kind == ConeKind.PSD or self.hermitian


@dataclass
class Constraint:
    coeffs: Dict[int, np.ndarray]
    rhs: float


@dataclass
class SdpProblem:
    blocks: List[Block] = field(default_factory=list)
    objective: Dict[int, np.ndarray] = field(default_factory=dict)
    constraints: List[Constraint] = field(default_factory=list)
    sense: Sense = Sense.MIN

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------
    def add_block(self, kind: ConeKind, dim: int, hermitian: bool = False, name: str = "") -> int:
        if dim < 1:
            raise SdpError(f"block dimension must be positive, got {dim}")
        if hermitian and kind != ConeKind.FREE:
            raise SdpError("only free blocks take the hermitian flag")
        self.blocks.append(Block(ConeKind(kind), int(dim), hermitian, name))
        return len(self.blocks) - 1

    def psd(self, dim: int, name: str = "") -> int:
        return self.add_block(ConeKind.PSD, dim, name=name)

    def nonneg(self, dim: int, name: str = "") -> int:
        return self.add_block(ConeKind.NONNEG, dim, name=name)

    def free(self, dim: int, name: str = "") -> int:
        return self.add_block(ConeKind.FREE, dim, name=name)

    def free_hermitian(self, dim: int, name: str = "") -> int:
        return self.add_block(ConeKind.FREE, dim, hermitian=True, name=name)

    def coerce(self, block: int, coeff: Coefficient) -> np.ndarray:
        """Normalize a coefficient to the stored form for ``block``."""
        blk = self.blocks[block]
        c = np.asarray(coeff)
        if blk.kind == ConeKind.PSD:
            c = np.asarray(c, dtype=complex)
            if c.shape != (blk.dim, blk.dim):
                raise SdpError(f"block {block} needs a {blk.dim}x{blk.dim} coefficient, got {c.shape}")
            if not is_hermitian(c, 1e-10):
                raise SdpError(f"coefficient on PSD block {block} is not Hermitian")
            return (c + c.conj().T) / 2
        if blk.hermitian and c.ndim == 2:
            if c.shape != (blk.dim, blk.dim):
                raise SdpError(f"block {block} needs a {blk.dim}x{blk.dim} coefficient, got {c.shape}")
            return hermitian_coordinates(c)
        c = np.atleast_1d(np.asarray(c, dtype=float)).ravel()
        if c.shape != (blk.size,):
            raise SdpError(f"block {block} needs {blk.size} coefficients, got {c.shape}")
        return c

    def set_objective(self, block: int, coeff: Coefficient) -> None:
        self.objective[block] = self.coerce(block, coeff)

    def add_constraint(self, coeffs: Dict[int, Coefficient], rhs: float) -> int:
        stored = {j: self.coerce(j, c) for j, c in coeffs.items()}
        self.constraints.append(Constraint(stored, float(rhs)))
        return len(self.constraints) - 1

    def add_matrix_equality(self, terms: Dict[int, Callable[[np.ndarray], Coefficient]],
                            rhs: np.ndarray) -> range:
        """Add ``sum_j L_j(X_j) = rhs`` for a d x d Hermitian ``rhs``.

        Each term is given by the adjoint ``H -> L_j^*(H)``; one scalar
        constraint is emitted per element of ``hermitian_basis(d)``. Returns
        the range of constraint indices, in basis order.
        """
        rhs = np.asarray(rhs, dtype=complex)
        start = len(self.constraints)
        for g in hermitian_basis(rhs.shape[0]):
            self.add_constraint({j: adj(g) for j, adj in terms.items()},
                                float(np.real(np.trace(g @ rhs))))
        return range(start, len(self.constraints))

    # ------------------------------------------------------------------
    # checks
    # ------------------------------------------------------------------
    def validate(self) -> None:
        if not self.blocks:
            raise SdpError("problem has no blocks")
        if not self.constraints:
            raise SdpError("problem has no constraints")
        if not any(b.kind != ConeKind.FREE for b in self.blocks):
            raise SdpError("problem needs at least one cone block")
        for i, con in enumerate(self.constraints):
            for j in con.coeffs:
                if not 0 <= j < len(self.blocks):
                    raise SdpError(f"constraint {i} refers to unknown block {j}")
        for j in self.objective:
            if not 0 <= j < len(self.blocks):
                raise SdpError(f"objective refers to unknown block {j}")

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def inner(self, block: int, coeff: np.ndarray, value: BlockValue) -> float:
        blk = self.blocks[block]
        value = np.asarray(value)
        if blk.kind == ConeKind.PSD:
            return float(np.real(np.sum(coeff * value.T)))
        if blk.hermitian and value.ndim == 2:
            value = hermitian_coordinates(value)
        return float(np.dot(coeff, np.atleast_1d(value).real.ravel()))

    def objective_value(self, point: Sequence[BlockValue]) -> float:
        return sum(self.inner(j, c, point[j]) for j, c in self.objective.items())

    def constraint_values(self, point: Sequence[BlockValue]) -> np.ndarray:
        return np.array([
            sum(self.inner(j, c, point[j]) for j, c in con.coeffs.items())
            for con in self.constraints
        ])

    @property
    def rhs(self) -> np.ndarray:
        return np.array([c.rhs for c in self.constraints])


@dataclass
class Residuals:
    primal: float
    dual: float
    gap: float

    def worst(self) -> float:
        return max(self.primal, self.dual, self.gap)


@dataclass
class SdpSolution:
    status: SolveStatus
    primal_value: float
    dual_value: float
    primal_point: List[BlockValue]
    y: np.ndarray
    dual_slacks: List[Optional[BlockValue]]
    iterations: int
    residuals: Residuals

    @property
    def optimal(self) -> bool:
        return self.status == SolveStatus.OPTIMAL

    def accepted(self, relaxed_tol: float) -> bool:
        """Optimal, or stopped on numerical failure within ``relaxed_tol``."""
        if self.optimal:
            return True
        return self.status == SolveStatus.NUMERICAL_FAILURE and self.residuals.worst() <= relaxed_tol

    def multiplier_matrix(self, rows: range) -> np.ndarray:
        """Hermitian matrix sum_k y_k G_k for rows built by ``add_matrix_equality``."""
        d = int(round(np.sqrt(len(rows))))
        return from_hermitian_coordinates(self.y[rows.start:rows.stop], d)

    def summary(self) -> Dict[str, object]:
        return {
            'status': self.status.value,
            'primal_value': self.primal_value,
            'dual_value': self.dual_value,
            'iterations': self.iterations,
            'residuals': {
                'primal': self.residuals.primal,
                'dual': self.residuals.dual,
                'gap': self.residuals.gap,
            },
        }


# ============================================================================
# Internal real conic data
# ============================================================================

class _ConicData:
    """Real, minimization-form copy of a problem."""

    def __init__(self, problem: SdpProblem):
        self.problem = problem
        self.sign = 1.0 if problem.sense == Sense.MIN else -1.0
        m = problem.num_constraints
        self.m = m
        self.b = problem.rhs

        self.psd_index: List[int] = []
        self.psd_embedded: List[bool] = []
        self.psd_A: List[np.ndarray] = []
        self.psd_C: List[np.ndarray] = []
        self.lp_slices: Dict[int, slice] = {}
        self.fr_slices: Dict[int, slice] = {}
        lp_cols, fr_cols = 0, 0

        for j, blk in enumerate(problem.blocks):
            if blk.kind == ConeKind.PSD:
                self._add_psd(j, blk)
            elif blk.kind == ConeKind.NONNEG:
                self.lp_slices[j] = slice(lp_cols, lp_cols + blk.size)
                lp_cols += blk.size
            else:
                self.fr_slices[j] = slice(fr_cols, fr_cols + blk.size)
                fr_cols += blk.size

        self.lp_A, self.lp_c = self._vector_part(self.lp_slices, lp_cols)
        self.fr_A, self.fr_c = self._vector_part(self.fr_slices, fr_cols)

    def _add_psd(self, j: int, blk: Block) -> None:
        p = self.problem
        coeffs = [con.coeffs.get(j) for con in p.constraints]
        obj = p.objective.get(j)
        embedded = any(c is not None and np.any(c.imag != 0) for c in coeffs + [obj])
        n = 2 * blk.dim if embedded else blk.dim

        def convert(c: Optional[np.ndarray]) -> np.ndarray:
            if c is None:
                return np.zeros((n, n))
            # halved so inner products match the complex program
            return embed_real(c) / 2 if embedded else c.real.copy()

        A = np.zeros((self.m, n, n))
        for i, c in enumerate(coeffs):
            if c is not None:
                A[i] = convert(c)
        self.psd_index.append(j)
        self.psd_embedded.append(embedded)
        self.psd_A.append(A)
        self.psd_C.append(self.sign * convert(obj))

    def _vector_part(self, slices: Dict[int, slice], cols: int) -> Tuple[np.ndarray, np.ndarray]:
        A = np.zeros((self.m, cols))
        c = np.zeros(cols)
        for j, sl in slices.items():
            for i, con in enumerate(self.problem.constraints):
                if j in con.coeffs:
                    A[i, sl] = con.coeffs[j]
            if j in self.problem.objective:
                c[sl] = self.sign * self.problem.objective[j]
        return A, c

    @property
    def psd_dims(self) -> List[int]:
        return [A.shape[1] for A in self.psd_A]

    def apply_A(self, X: List[np.ndarray], xl: np.ndarray, xf: np.ndarray) -> np.ndarray:
        out = self.lp_A @ xl + self.fr_A @ xf
        for A, Xj in zip(self.psd_A, X):
            out = out + np.tensordot(A, Xj, axes=([1, 2], [0, 1]))
        return out

    def apply_At(self, y: np.ndarray) -> List[np.ndarray]:
        return [np.tensordot(y, A, axes=(0, 0)) for A in self.psd_A]

    def c_norm(self) -> float:
        total = sum(float(np.sum(C * C)) for C in self.psd_C)
        return float(np.sqrt(total + self.lp_c @ self.lp_c + self.fr_c @ self.fr_c))


@dataclass
class _Iterate:
    X: List[np.ndarray]
    Z: List[np.ndarray]
    xl: np.ndarray
    zl: np.ndarray
    xf: np.ndarray
    y: np.ndarray

    def copy(self) -> '_Iterate':
        return _Iterate([x.copy() for x in self.X], [z.copy() for z in self.Z],
                        self.xl.copy(), self.zl.copy(), self.xf.copy(), self.y.copy())


def _start_scale(A_rows: np.ndarray, b: np.ndarray, C_norm: float, n: int) -> Tuple[float, float]:
    norms = np.sqrt(np.sum(A_rows.reshape(A_rows.shape[0], -1) ** 2, axis=1))
    active = norms > 0
    xi = max(10.0, np.sqrt(n))
    eta = max(10.0, np.sqrt(n), C_norm)
    if np.any(active):
        xi = max(xi, n * float(np.max((1 + np.abs(b[active])) / (1 + norms[active]))))
        eta = max(eta, float(np.max(norms[active])))
    return xi, eta


def _factor(X: np.ndarray) -> np.ndarray:
    """F with X = F F^T; Cholesky when possible, otherwise a clipped square root."""
    try:
        return np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        evals, evecs = np.linalg.eigh((X + X.T) / 2)
        floor = abs(float(evals[-1])) * 1e-16 + 1e-300
        return evecs * np.sqrt(np.maximum(evals, floor))


def _nt_scaling(X: np.ndarray, Z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """G and v with G^{-1} X G^{-T} = G^T Z G = diag(v)."""
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Z))):
        raise _NumericalBreakdown("non-finite iterate")
    Lx = _factor(X)
    Lz = _factor(Z)
    _, s, Vt = np.linalg.svd(Lz.T @ Lx)
    if np.any(s <= 0) or not np.all(np.isfinite(s)):
        raise _NumericalBreakdown("degenerate NT scaling")
    G = (Lx @ Vt.T) / np.sqrt(s)
    return G, s


def _max_step(v: np.ndarray, dscaled: np.ndarray) -> float:
    """Largest alpha with diag(v) + alpha * dscaled PSD."""
    r = 1 / np.sqrt(v)
    m = dscaled * np.outer(r, r)
    lam = float(np.linalg.eigvalsh((m + m.T) / 2)[0])
    return np.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(v: np.ndarray, dscaled: np.ndarray) -> float:
    neg = dscaled < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(v[neg] / -dscaled[neg]))


class _NewtonSystem:
    """Schur complement system with free variables folded in by an augmented Lagrangian term."""

    def __init__(self, M: np.ndarray, F: np.ndarray):
        if not np.all(np.isfinite(M)):
            raise _NumericalBreakdown("non-finite Schur complement")
        self.F = F
        self.rho = 0.0
        if F.shape[1]:
            ff = F @ F.T
            scale = np.trace(ff)
            self.rho = np.trace(M) / scale if scale > 0 and np.trace(M) > 0 else 1.0
            M = M + self.rho * ff
        self.chol = self._cholesky(M)
        if F.shape[1]:
            minv_f = scipy.linalg.cho_solve(self.chol, F)
            S = F.T @ minv_f
            self.s_pinv = scipy.linalg.pinvh((S + S.T) / 2)

    @staticmethod
    def _cholesky(M: np.ndarray):
        shift = 0.0
        base = max(1.0, float(np.max(np.abs(np.diag(M))))) if M.size else 1.0
        for _ in range(8):
            try:
                return scipy.linalg.cho_factor(M + shift * np.eye(M.shape[0]), lower=True)
            except np.linalg.LinAlgError:
                shift = base * (1e-14 if shift == 0 else shift / base * 100)
        raise _NumericalBreakdown("Schur complement is not positive definite")

    def solve(self, h: np.ndarray, rf: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if not self.F.shape[1]:
            return scipy.linalg.cho_solve(self.chol, h), np.zeros(0)
        h2 = h + self.rho * (self.F @ rf)
        dxf = self.s_pinv @ (self.F.T @ scipy.linalg.cho_solve(self.chol, h2) - rf)
        dy = scipy.linalg.cho_solve(self.chol, h2 - self.F @ dxf)
        return dy, dxf


class InteriorPointSolver:
    """Primal-dual path-following solver for ``SdpProblem``."""

    def __init__(self, options: Optional[SolverOptions] = None):
        self.options = options or SolverOptions()

    def solve(self, problem: SdpProblem) -> SdpSolution:
        problem.validate()
        data = _ConicData(problem)
        opts = self.options
        state = self._initial_point(data)

        nu = sum(data.psd_dims) + data.lp_c.size
        norm_b = float(np.linalg.norm(data.b))
        norm_c = data.c_norm()

        best: Optional[Tuple[float, _Iterate, Residuals, Tuple[float, float]]] = None
        best_pinf = best_dinf = np.inf
        stall_p = stall_d = 0
        tiny_steps = 0
        status = SolveStatus.NUMERICAL_FAILURE
        iteration = 0

        for iteration in range(opts.max_iter + 1):
            rp = data.b - data.apply_A(state.X, state.xl, state.xf)
            aty = data.apply_At(state.y)
            Rd = [C - a - Z for C, a, Z in zip(data.psd_C, aty, state.Z)]
            rdl = data.lp_c - data.lp_A.T @ state.y - state.zl
            rdf = data.fr_c - data.fr_A.T @ state.y

            pobj = (sum(float(np.sum(C * X)) for C, X in zip(data.psd_C, state.X))
                    + data.lp_c @ state.xl + data.fr_c @ state.xf)
            dobj = float(data.b @ state.y)
            pinf = float(np.linalg.norm(rp)) / (1 + norm_b)
            dinf = float(np.sqrt(sum(float(np.sum(R * R)) for R in Rd)
                                 + rdl @ rdl + rdf @ rdf)) / (1 + norm_c)
            gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
            res = Residuals(pinf, dinf, gap)

            if not all(np.isfinite([pobj, dobj, pinf, dinf])):
                logger.warning("non-finite iterate at iteration %d", iteration)
                break
            if best is None or res.worst() < best[0]:
                best = (res.worst(), state.copy(), res, (pobj, dobj))

            logger.debug("iter %3d  pobj % .10e  dobj % .10e  pinf %.2e  dinf %.2e  gap %.2e",
                         iteration, data.sign * pobj, data.sign * dobj, pinf, dinf, gap)

            if pinf <= opts.feas_tol and dinf <= opts.feas_tol and gap <= opts.gap_tol:
                status = SolveStatus.OPTIMAL
                break
            if iteration == opts.max_iter:
                logger.warning("iteration cap %d reached", opts.max_iter)
                break

            stall_p = stall_p + 1 if pinf > opts.relaxed_tol and pinf >= 0.95 * best_pinf else 0
            stall_d = stall_d + 1 if dinf > opts.relaxed_tol and dinf >= 0.95 * best_dinf else 0
            best_pinf = min(best_pinf, pinf)
            best_dinf = min(best_dinf, dinf)
            if stall_p >= opts.stall_window:
                status = SolveStatus.PRIMAL_INFEASIBLE
                break
            if stall_d >= opts.stall_window:
                status = SolveStatus.DUAL_INFEASIBLE
                break

            try:
                alpha_p, alpha_d = self._step(data, state, rp, Rd, rdl, rdf, nu)
            except (_NumericalBreakdown, np.linalg.LinAlgError, ValueError) as e:
                logger.warning("numerical breakdown at iteration %d: %s", iteration, e)
                break
            tiny_steps = tiny_steps + 1 if max(alpha_p, alpha_d) < 1e-10 else 0
            if tiny_steps >= 2 * opts.stall_window:
                logger.warning("step lengths vanished at iteration %d", iteration)
                break

        if status == SolveStatus.NUMERICAL_FAILURE and best is not None:
            _, state, res, (pobj, dobj) = best
        elif best is not None:
            res = Residuals(pinf, dinf, gap)

        solution = self._package(data, state, status, pobj, dobj, iteration, res)
        logger.info("solve finished: %s after %d iterations (value %.10g, gap %.1e)",
                    status.value, iteration, solution.primal_value, res.gap)
        return solution

    # ------------------------------------------------------------------
    @staticmethod
    def _initial_point(data: _ConicData) -> _Iterate:
        X, Z = [], []
        for A, C in zip(data.psd_A, data.psd_C):
            n = A.shape[1]
            xi, eta = _start_scale(A, data.b, float(np.linalg.norm(C)), n)
            X.append(xi * np.eye(n))
            Z.append(eta * np.eye(n))
        l = data.lp_c.size
        if l:
            xi, eta = _start_scale(data.lp_A, data.b, float(np.linalg.norm(data.lp_c)), l)
        else:
            xi = eta = 1.0
        return _Iterate(X, Z, xi * np.ones(l), eta * np.ones(l),
                        np.zeros(data.fr_c.size), np.zeros(data.m))

    def _step(self, data: _ConicData, st: _Iterate, rp, Rd, rdl, rdf, nu: int) -> Tuple[float, float]:
        scalings = [_nt_scaling(X, Z) for X, Z in zip(st.X, st.Z)]
        Ws = [G @ G.T for G, _ in scalings]
        gl = np.sqrt(st.xl / st.zl)
        vl = np.sqrt(st.xl * st.zl)
        wl = st.xl / st.zl

        M = (data.lp_A * wl) @ data.lp_A.T
        for A, W in zip(data.psd_A, Ws):
            WAW = np.matmul(np.matmul(W, A), W)
            M = M + A.reshape(data.m, -1) @ WAW.reshape(data.m, -1).T
        system = _NewtonSystem((M + M.T) / 2, data.fr_A)

        mu = (sum(float(v @ v) for _, v in scalings) + float(vl @ vl)) / nu

        def direction(D_list, Dl):
            Rc = [G @ D @ G.T for (G, _), D in zip(scalings, D_list)]
            rcl = gl * Dl
            h = rp - data.lp_A @ (rcl - wl * rdl)
            for A, R, W, Rdj in zip(data.psd_A, Rc, Ws, Rd):
                h = h - np.tensordot(A, R - W @ Rdj @ W, axes=([1, 2], [0, 1]))
            dy, dxf = system.solve(h, rdf)
            aty = data.apply_At(dy)
            dZ = [Rdj - a for Rdj, a in zip(Rd, aty)]
            dX = [R - W @ dz @ W for R, W, dz in zip(Rc, Ws, dZ)]
            dzl = rdl - data.lp_A.T @ dy
            dxl = rcl - wl * dzl
            dZs = [G.T @ dz @ G for (G, _), dz in zip(scalings, dZ)]
            dXs = [D - dzs for D, dzs in zip(D_list, dZs)]
            return dy, dxf, dX, dZ, dxl, dzl, dXs, dZs, Dl - gl * dzl, gl * dzl

        def step_lengths(dXs, dZs, dxls, dzls):
            ap = min([_max_step(v, d) for (_, v), d in zip(scalings, dXs)] + [_max_step_lp(vl, dxls)])
            ad = min([_max_step(v, d) for (_, v), d in zip(scalings, dZs)] + [_max_step_lp(vl, dzls)])
            return ap, ad

        # predictor
        pred = direction([-np.diag(v) for _, v in scalings], -vl)
        _, _, _, _, _, _, dXs_a, dZs_a, dxls_a, dzls_a = pred
        ap, ad = step_lengths(dXs_a, dZs_a, dxls_a, dzls_a)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = sum(float(np.sum((np.diag(v) + ap * dx) * (np.diag(v) + ad * dz).T))
                     for (_, v), dx, dz in zip(scalings, dXs_a, dZs_a))
        mu_aff += float((vl + ap * dxls_a) @ (vl + ad * dzls_a))
        mu_aff /= nu
        expon = max(1.0, 3 * min(ap, ad) ** 2)
        sigma = min(1.0, max(0.0, mu_aff / mu) ** expon)

        # corrector
        D_list = []
        for (_, v), dx, dz in zip(scalings, dXs_a, dZs_a):
            prod = dx @ dz
            R = sigma * mu * np.eye(v.size) - np.diag(v * v) - (prod + prod.T) / 2
            D_list.append(2 * R / (v[:, None] + v[None, :]))
        Dl = (sigma * mu - vl * vl - dxls_a * dzls_a) / vl if vl.size else vl
        dy, dxf, dX, dZ, dxl, dzl, dXs, dZs, dxls, dzls = direction(D_list, Dl)

        gamma = 0.9 + 0.09 * min(ap, ad)
        max_p, max_d = step_lengths(dXs, dZs, dxls, dzls)
        alpha_p = min(1.0, gamma * max_p)
        alpha_d = min(1.0, gamma * max_d)

        for j in range(len(st.X)):
            st.X[j] = st.X[j] + alpha_p * dX[j]
            st.X[j] = (st.X[j] + st.X[j].T) / 2
            st.Z[j] = st.Z[j] + alpha_d * dZ[j]
            st.Z[j] = (st.Z[j] + st.Z[j].T) / 2
        st.xl = st.xl + alpha_p * dxl
        st.zl = st.zl + alpha_d * dzl
        st.xf = st.xf + alpha_p * dxf
        st.y = st.y + alpha_d * dy
        logger.debug("      sigma %.2e  alpha_p %.3f  alpha_d %.3f", sigma, alpha_p, alpha_d)
        return alpha_p, alpha_d

    @staticmethod
    def _package(data: _ConicData, st: _Iterate, status: SolveStatus, pobj: float, dobj: float,
                 iterations: int, res: Residuals) -> SdpSolution:
        p = data.problem
        primal: List[Optional[BlockValue]] = [None] * len(p.blocks)
        slacks: List[Optional[BlockValue]] = [None] * len(p.blocks)
        for k, j in enumerate(data.psd_index):
            if data.psd_embedded[k]:
                primal[j] = unembed_real(st.X[k])
                slacks[j] = 2 * unembed_real(st.Z[k])
            else:
                primal[j] = st.X[k].astype(complex)
                slacks[j] = st.Z[k].astype(complex)
        for j, sl in data.lp_slices.items():
            primal[j] = st.xl[sl].copy()
            slacks[j] = st.zl[sl].copy()
        for j, sl in data.fr_slices.items():
            blk = p.blocks[j]
            primal[j] = (from_hermitian_coordinates(st.xf[sl], blk.dim) if blk.hermitian
                         else st.xf[sl].copy())
        return SdpSolution(
            status=status,
            primal_value=data.sign * pobj,
            dual_value=data.sign * dobj,
            primal_point=primal,
            y=data.sign * st.y,
            dual_slacks=slacks,
            iterations=iterations,
            residuals=res,
        )


def solve(problem: SdpProblem, options: Optional[SolverOptions] = None) -> SdpSolution:
    """Solve ``problem`` with the interior-point method."""
    return InteriorPointSolver(options).solve(problem)


# ============================================================================
# Verification, dualization, dumps
# ============================================================================

@dataclass
class FeasibilityReport:
    max_residual: float
    worst_constraint: int
    cone_margins: Dict[int, float]
    objective: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol and all(m >= -self.tol for m in self.cone_margins.values())

    @property
    def worst_cone_margin(self) -> float:
        return min(self.cone_margins.values(), default=np.inf)


def verify_feasibility(problem: SdpProblem, point: Sequence[BlockValue],
                       tol: float = DEFAULT_TOLERANCES.feasibility) -> FeasibilityReport:
    """Constraint residuals and cone margins of ``point``."""
    if len(point) != len(problem.blocks):
        raise SdpError(f"point has {len(point)} blocks, problem has {len(problem.blocks)}")
    margins: Dict[int, float] = {}
    for j, blk in enumerate(problem.blocks):
        value = np.asarray(point[j])
        if blk.kind == ConeKind.PSD:
            if value.shape != (blk.dim, blk.dim):
                raise SdpError(f"block {j} value has shape {value.shape}")
            margins[j] = float(eigvals_hermitian(value)[0])
        elif blk.kind == ConeKind.NONNEG:
            margins[j] = float(np.min(value))
    residual = np.abs(problem.constraint_values(point) - problem.rhs)
    worst = int(np.argmax(residual))
    return FeasibilityReport(
        max_residual=float(residual[worst]),
        worst_constraint=worst,
        cone_margins=margins,
        objective=problem.objective_value(point),
        tol=tol,
    )


def dualize(problem: SdpProblem) -> SdpProblem:
    """Conic dual of ``problem``.

    For ``min <C, X> s.t. A(X) = b`` this is ``max b.y s.t. C - A*(y) in K*``;
    for a max problem it is ``min b.y s.t. A*(y) - C in K*``. Multipliers form
    one free block (block 0); each cone block gets a slack block of its own.
    """
    problem.validate()
    s = 1.0 if problem.sense == Sense.MIN else -1.0
    m = problem.num_constraints
    dual = SdpProblem(sense=Sense.MAX if problem.sense == Sense.MIN else Sense.MIN)
    y = dual.free(m, name="y")
    dual.set_objective(y, problem.rhs)

    for j, blk in enumerate(problem.blocks):
        rows = [i for i, con in enumerate(problem.constraints) if j in con.coeffs]
        obj = problem.objective.get(j)
        if blk.kind == ConeKind.PSD:
            coeffs = {i: problem.constraints[i].coeffs[j] for i in rows}
            c = obj if obj is not None else np.zeros((blk.dim, blk.dim), dtype=complex)
            z = dual.psd(blk.dim, name=f"slack{j}")

            def y_coeff(g, coeffs=coeffs):
                out = np.zeros(m)
                for i, a in coeffs.items():
                    out[i] = s * float(np.real(np.trace(g @ a)))
                return out

            dual.add_matrix_equality({z: lambda g: g, y: y_coeff}, s * c)
        else:
            c = obj if obj is not None else np.zeros(blk.size)
            slack = dual.nonneg(blk.size, name=f"slack{j}") if blk.kind == ConeKind.NONNEG else None
            for e in range(blk.size):
                out = np.zeros(m)
                for i in rows:
                    out[i] = s * problem.constraints[i].coeffs[j][e]
                coeffs: Dict[int, Coefficient] = {y: out}
                if slack is not None:
                    unit = np.zeros(blk.size)
                    unit[e] = 1.0
                    coeffs[slack] = unit
                dual.add_constraint(coeffs, s * c[e])
    return dual


def dump_problem(problem: SdpProblem, stream: TextIO) -> None:
    """Write a sparse triplet listing: ``constraint block row col re im``.

    Constraint 0 is the objective; constraints are numbered from 1. Vector
    blocks use ``row = col = entry``.
    """
    stream.write(f"# zesim sdp dump\nsense {problem.sense.value}\n")
    for j, blk in enumerate(problem.blocks):
        tag = " hermitian" if blk.hermitian else ""
        stream.write(f"block {j} {blk.kind.value} {blk.dim}{tag}\n")
    for i, con in enumerate(problem.constraints, start=1):
        stream.write(f"rhs {i} {con.rhs!r}\n")

    def write_coeffs(i: int, coeffs: Dict[int, np.ndarray]) -> None:
        for j in sorted(coeffs):
            c = coeffs[j]
            if c.ndim == 2:
                for r, col in zip(*np.nonzero(c)):
                    v = c[r, col]
                    stream.write(f"{i} {j} {r} {col} {float(v.real)!r} {float(v.imag)!r}\n")
            else:
                for e in np.nonzero(c)[0]:
                    stream.write(f"{i} {j} {e} {e} {float(c[e])!r} 0.0\n")

    write_coeffs(0, problem.objective)
    for i, con in enumerate(problem.constraints, start=1):
        write_coeffs(i, con.coeffs)
