"""
No-signalling assisted zero-error simulation cost.

Builds the simulation-cost SDPs for channels and Choi-Kraus operator spaces,
verifies lower (S, U) and upper (V, T) certificates, searches for the
multiplicativity condition, and brackets the asymptotic cost between
log2 of the restricted and the one-shot values.

For a graph K with support isometry Q (so P = Q Q^dag)::

    upper side   min tr T   s.t.  0 <= V <= 1 (x) T,  tr_B V = 1_A,  V = Q X Q^dag
    lower side   max tr S   s.t.  U >= 0,  tr_A U = 1_B,  Q^dag (S (x) 1 - U) Q <= 0
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple
import logging
import math

import numpy as np
import scipy.linalg

from .models import (
    ZesimConfig, ZesimError, CertificatePayload, MatrixPayload, ResultPayload,
    DEFAULT_TOLERANCES,
)
from .linalg import (
    kron, partial_trace, permute_systems, min_eigenvalue, max_eigenvalue,
    eigvals_hermitian, hermitian_part, basis_vector,
)
from .graphspace import (
    Channel, NCBGraph, choi_of_channel, graph_feasibility, graph_power, kalpha,
)
from .sdpcore import SdpProblem, SdpSolution, Sense, SolveStatus, SolverError, solve

logger = logging.getLogger(__name__)


class InfeasibleGraphError(ZesimError):
    """Raised when no channel is consistent with a graph."""


class DimensionCapError(ZesimError, ValueError):
    """Raised when a tensor power would exceed the configured dimension cap."""


class CertificateKind(str, Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass
class Certificate:
    """Lower certificate (S, U) or upper certificate (V, T)."""
    kind: CertificateKind
    first: np.ndarray
    second: np.ndarray
    margins: Dict[str, float] = field(default_factory=dict)

    @property
    def bound(self) -> float:
        m = self.first if self.kind == CertificateKind.LOWER else self.second
        return float(np.real(np.trace(m)))

    def to_payload(self) -> CertificatePayload:
        names = ('S', 'U') if self.kind == CertificateKind.LOWER else ('V', 'T')
        return CertificatePayload(
            kind=self.kind.value,
            bound=self.bound,
            margins=self.margins,
            **{names[0]: MatrixPayload.from_array(self.first),
               names[1]: MatrixPayload.from_array(self.second)},
        )

    @classmethod
    def from_payload(cls, payload: CertificatePayload) -> 'Certificate':
        if payload.kind == CertificateKind.LOWER.value:
            return cls(CertificateKind.LOWER, payload.S.to_array(), payload.U.to_array(), dict(payload.margins))
        return cls(CertificateKind.UPPER, payload.V.to_array(), payload.T.to_array(), dict(payload.margins))


@dataclass
class CertificateCheck:
    passed: bool
    bound: float
    margins: Dict[str, float]
    strict: bool = False

    @property
    def worst_margin(self) -> float:
        return min(self.margins.values(), default=math.nan)


@dataclass
class SimCostResult:
    """Value of the program that was solved and the certificates read off it."""
    value: float
    dual_value: float
    lower: Optional[Certificate]
    upper: Optional[Certificate]
    solution: SdpSolution
    extras: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def status(self) -> SolveStatus:
        return self.solution.status

    def to_payload(self) -> ResultPayload:
        certificates = {}
        if self.lower is not None:
            certificates['lower'] = self.lower.to_payload().model_dump()
        if self.upper is not None:
            certificates['upper'] = self.upper.to_payload().model_dump()
        return ResultPayload(value=self.value, dualValue=self.dual_value,
                             status=self.status.value, certificates=certificates)


@dataclass
class BoundsResult:
    lower: float
    upper: float
    power_values: List[Tuple[int, float]]
    sigma_minus: float
    sigma: float
    tight: bool

    def to_dict(self) -> Dict[str, object]:
        return {
            'lower': self.lower,
            'upper': self.upper,
            'power_values': [[n, v] for n, v in self.power_values],
            'sigma_minus': self.sigma_minus,
            'sigma': self.sigma,
            'tight': self.tight,
        }


@dataclass
class FullRankCheck:
    full_rank: bool
    t: float
    V: np.ndarray
    cost: float = math.nan


@dataclass
class Prop3Report:
    min_eig_w: float
    trace_wj: float
    trace_gap: float
    w_norm: float
    tol: float

    @property
    def w_psd(self) -> bool:
        return self.min_eig_w >= -self.tol

    @property
    def consistent(self) -> bool:
        """tr(WJ) and tr(UJ) - tr S vanish whenever W is PSD."""
        if not self.w_psd:
            return True
        return abs(self.trace_wj) <= self.tol and self.trace_gap <= self.tol


# ============================================================================
# program builders
# ============================================================================

def _config(config: Optional[ZesimConfig]) -> ZesimConfig:
    return config or ZesimConfig()


def _tr_a_adjoint(da: int):
    eye = np.eye(da)
    return lambda g: np.kron(eye, g)


def _tr_b_adjoint(db: int):
    eye = np.eye(db)
    return lambda g: np.kron(g, eye)


@dataclass
class _LowerLayout:
    u: int
    s: int
    w: Optional[int]
    rows_b: range
    rows_support: range


def build_lower_program(k: NCBGraph, s_psd: bool = False, equality: bool = False) -> Tuple[SdpProblem, _LowerLayout]:
    q, qh = k.support_basis, k.support_basis.conj().T
    da, db, r = k.dim_a, k.dim_b, k.rank
    p = SdpProblem(sense=Sense.MAX)
    u = p.psd(k.n, name="U")
    s = p.psd(da, name="S") if s_psd else p.free_hermitian(da, name="S")
    w = None if equality else p.psd(r, name="W")
    p.set_objective(s, np.eye(da))
    rows_b = p.add_matrix_equality({u: _tr_a_adjoint(da)}, np.eye(db))
    terms = {
        u: lambda g: q @ g @ qh,
        s: lambda g: -partial_trace(q @ g @ qh, [da, db], keep=[0]),
    }
    if w is not None:
        terms[w] = lambda g: -g
    rows_support = p.add_matrix_equality(terms, np.zeros((r, r)))
    return p, _LowerLayout(u, s, w, rows_b, rows_support)


@dataclass
class _UpperLayout:
    x: int
    z: int
    t: int
    rows_z: range
    rows_a: range


def build_upper_program(k: NCBGraph) -> Tuple[SdpProblem, _UpperLayout]:
    q, qh = k.support_basis, k.support_basis.conj().T
    da, db = k.dim_a, k.dim_b
    p = SdpProblem(sense=Sense.MIN)
    x = p.psd(k.rank, name="X")
    z = p.psd(k.n, name="Z")
    t = p.free_hermitian(db, name="T")
    p.set_objective(t, np.eye(db))
    rows_z = p.add_matrix_equality({
        z: lambda g: g,
        x: lambda g: qh @ g @ q,
        t: lambda g: -partial_trace(g, [da, db], keep=[1]),
    }, np.zeros((k.n, k.n)))
    tr_b = _tr_b_adjoint(db)
    rows_a = p.add_matrix_equality({x: lambda g: qh @ tr_b(g) @ q}, np.eye(da))
    return p, _UpperLayout(x, z, t, rows_z, rows_a)


def _run(problem: SdpProblem, config: ZesimConfig, what: str,
         graph: Optional[NCBGraph] = None) -> SdpSolution:
    sol = solve(problem, config.solver)
    if sol.optimal:
        return sol
    if sol.accepted(config.solver.relaxed_tol):
        logger.warning("%s: accepting %s result with residuals %.1e", what, sol.status.value,
                       sol.residuals.worst())
        return sol
    if graph is not None and graph_feasibility(graph, config.solver, config.tolerances.feasibility) is None:
        raise InfeasibleGraphError(f"{what}: no channel is consistent with the graph")
    raise SolverError(f"{what}: solver ended with {sol.status.value}", sol)


def _lower_certificates(k: NCBGraph, sol: SdpSolution, lay: _LowerLayout) -> Tuple[Certificate, Certificate]:
    q = k.support_basis
    S = hermitian_part(sol.primal_point[lay.s])
    U = hermitian_part(sol.primal_point[lay.u])
    T = hermitian_part(sol.multiplier_matrix(lay.rows_b))
    V = hermitian_part(-q @ sol.multiplier_matrix(lay.rows_support) @ q.conj().T)
    return (Certificate(CertificateKind.LOWER, S, U), Certificate(CertificateKind.UPPER, V, T))


# ============================================================================
# costs
# ============================================================================

def sigma_channel(channel: Channel, config: Optional[ZesimConfig] = None) -> SimCostResult:
    """Sigma(N) = min tr T s.t. J <= 1 (x) T, solved through max tr(J U)."""
    config = _config(config)
    J = choi_of_channel(channel)
    da, db = channel.dim_a, channel.dim_b
    p = SdpProblem(sense=Sense.MAX)
    u = p.psd(da * db, name="U")
    p.set_objective(u, J)
    rows_b = p.add_matrix_equality({u: _tr_a_adjoint(da)}, np.eye(db))
    sol = _run(p, config, "sigma_channel")
    U = hermitian_part(sol.primal_point[u])
    T = hermitian_part(sol.multiplier_matrix(rows_b))
    upper = Certificate(CertificateKind.UPPER, J, T)
    return SimCostResult(sol.dual_value, sol.primal_value, None, upper, sol, extras={'U': U})


def sigma_graph_primal(k: NCBGraph, config: Optional[ZesimConfig] = None) -> SimCostResult:
    """Sigma(K) as the minimum of tr T over channels consistent with K."""
    config = _config(config)
    p, lay = build_upper_program(k)
    sol = _run(p, config, "sigma_graph_primal", k)
    q = k.support_basis
    V = hermitian_part(q @ sol.primal_point[lay.x] @ q.conj().T)
    T = hermitian_part(sol.primal_point[lay.t])
    U = hermitian_part(-sol.multiplier_matrix(lay.rows_z))
    S = hermitian_part(sol.multiplier_matrix(lay.rows_a))
    return SimCostResult(sol.primal_value, sol.dual_value,
                         Certificate(CertificateKind.LOWER, S, U),
                         Certificate(CertificateKind.UPPER, V, T), sol)


def sigma_graph_dual(k: NCBGraph, config: Optional[ZesimConfig] = None) -> SimCostResult:
    """Sigma(K) as the maximum of tr S over lower certificates."""
    config = _config(config)
    p, lay = build_lower_program(k)
    sol = _run(p, config, "sigma_graph_dual", k)
    lower, upper = _lower_certificates(k, sol, lay)
    return SimCostResult(sol.primal_value, sol.dual_value, lower, upper, sol)


def sigma_graph(k: NCBGraph, config: Optional[ZesimConfig] = None) -> SimCostResult:
    """Sigma(K) through the smaller of the two programs."""
    return sigma_graph_dual(k, config)


def sigma_minus(k: NCBGraph, config: Optional[ZesimConfig] = None) -> SimCostResult:
    """Restricted value with S >= 0; super-multiplicative and never above Sigma(K)."""
    config = _config(config)
    p, lay = build_lower_program(k, s_psd=True)
    sol = _run(p, config, "sigma_minus", k)
    lower, upper = _lower_certificates(k, sol, lay)
    return SimCostResult(sol.primal_value, sol.dual_value, lower, upper, sol)


def sigma_equality_dual(k: NCBGraph, config: Optional[ZesimConfig] = None) -> SimCostResult:
    """max tr S with Q^dag (S (x) 1 - U) Q = 0; equals Sigma(K) on cheapest-full-rank graphs."""
    config = _config(config)
    p, lay = build_lower_program(k, equality=True)
    sol = _run(p, config, "sigma_equality_dual", k)
    lower, _ = _lower_certificates(k, sol, lay)
    return SimCostResult(sol.primal_value, sol.dual_value, lower, None, sol)


def cheapest_channel(k: NCBGraph, config: Optional[ZesimConfig] = None) -> Channel:
    """A channel consistent with K whose cost is Sigma(K)."""
    result = sigma_graph_dual(k, config)
    return Channel.from_choi(result.upper.first, k.dim_a, k.dim_b)


# ============================================================================
# certificates
# ============================================================================

def verify_lower_certificate(k: NCBGraph, S: np.ndarray, U: np.ndarray,
                             tol: float = DEFAULT_TOLERANCES.certificate, strict: bool = False,
                             strict_margin: float = DEFAULT_TOLERANCES.strict_margin) -> CertificateCheck:
    """Check (S, U) against the lower-side constraints; on success tr S <= Sigma(K).

    Margins are signed so that nonnegative means satisfied. Strict mode
    additionally asks for a support margin of at least ``strict_margin``.
    """
    S, U = np.asarray(S, dtype=complex), np.asarray(U, dtype=complex)
    if S.shape != (k.dim_a, k.dim_a) or U.shape != (k.n, k.n):
        raise ValueError(f"expected S {k.dim_a}x{k.dim_a} and U {k.n}x{k.n}")
    q = k.support_basis
    marginal = partial_trace(U, k.dims, keep=[1])
    margins = {
        'U_psd': min_eigenvalue(U),
        'trace_A': -float(np.linalg.norm(marginal - np.eye(k.dim_b), 2)),
        'support': -max_eigenvalue(q.conj().T @ (np.kron(S, np.eye(k.dim_b)) - U) @ q),
    }
    passed = all(m >= -tol for m in margins.values())
    if strict:
        passed = passed and margins['support'] >= strict_margin
    return CertificateCheck(passed, float(np.real(np.trace(S))), margins, strict)


def verify_upper_certificate(k: NCBGraph, V: np.ndarray, T: np.ndarray,
                             tol: float = DEFAULT_TOLERANCES.certificate, strict: bool = False,
                             strict_margin: float = DEFAULT_TOLERANCES.strict_margin) -> CertificateCheck:
    """Check (V, T) against the upper-side constraints; on success Sigma(K) <= tr T."""
    V, T = np.asarray(V, dtype=complex), np.asarray(T, dtype=complex)
    if V.shape != (k.n, k.n) or T.shape != (k.dim_b, k.dim_b):
        raise ValueError(f"expected V {k.n}x{k.n} and T {k.dim_b}x{k.dim_b}")
    outside = np.eye(k.n) - k.support_projection
    margins = {
        'V_psd': min_eigenvalue(V),
        'dominance': min_eigenvalue(np.kron(np.eye(k.dim_a), T) - V),
        'trace_B': -float(np.linalg.norm(partial_trace(V, k.dims, keep=[0]) - np.eye(k.dim_a), 2)),
        'support': -abs(float(np.real(np.trace(outside @ V)))),
    }
    passed = all(m >= -tol for m in margins.values())
    if strict:
        passed = passed and margins['dominance'] >= strict_margin
    return CertificateCheck(passed, float(np.real(np.trace(T))), margins, strict)


def verify_certificate(k: NCBGraph, cert: Certificate, tol: float = DEFAULT_TOLERANCES.certificate,
                       strict: bool = False) -> CertificateCheck:
    if cert.kind == CertificateKind.LOWER:
        return verify_lower_certificate(k, cert.first, cert.second, tol, strict)
    return verify_upper_certificate(k, cert.first, cert.second, tol, strict)


def paper_certificate_pi3() -> Certificate:
    """Published lower certificate for K at alpha = pi/3."""
    def k(a: int, b: int) -> np.ndarray:
        return kron(basis_vector(2, a), basis_vector(3, b))

    u1 = (10 / (3 * np.sqrt(33)) * k(0, 0) + (5 / 3) * np.sqrt(2 / 33) * k(0, 1)
          + 7 / (3 * np.sqrt(11)) * k(1, 2))
    u2 = (1 / np.sqrt(51) * k(0, 2) - (5 / 3) * np.sqrt(2 / 17) * k(1, 0)
          + 10 / (3 * np.sqrt(17)) * k(1, 1))
    S = np.diag([3.1102, -0.5386]).astype(complex)
    U = 99 / 50 * np.outer(u1, u1.conj()) + 51 / 50 * np.outer(u2, u2.conj())
    cert = Certificate(CertificateKind.LOWER, S, U)
    cert.margins = verify_lower_certificate(kalpha(np.pi / 3), S, U).margins
    return cert


def tensor_lower_certificate(k1: NCBGraph, c1: Certificate, k2: NCBGraph, c2: Certificate) -> Certificate:
    """Product point {S1 (x) S2, U1 (x) U2} for K1 (x) K2, U reordered to A1 A2 B1 B2."""
    if c1.kind != CertificateKind.LOWER or c2.kind != CertificateKind.LOWER:
        raise ValueError("tensor_lower_certificate needs lower certificates")
    S = np.kron(c1.first, c2.first)
    U = permute_systems(np.kron(c1.second, c2.second),
                        [k1.dim_a, k1.dim_b, k2.dim_a, k2.dim_b], [0, 2, 1, 3])
    return Certificate(CertificateKind.LOWER, S, U)


# ============================================================================
# multiplicativity checks
# ============================================================================

def check_theorem1_condition(k: NCBGraph, S: np.ndarray, tol: float = DEFAULT_TOLERANCES.psd) -> bool:
    """True iff P (S (x) 1) P is PSD within ``tol``."""
    P = k.support_projection
    return min_eigenvalue(P @ np.kron(S, np.eye(k.dim_b)) @ P) >= -tol


# Weight on the cost term of the two-stage programs. Near-optimality is
# priced into the objective and checked afterwards against ``_band``.
NEAR_OPTIMAL_WEIGHT = 100.0


def _band(slack: float, sigma: float) -> float:
    return 10 * slack * (1 + abs(sigma))


def _scalar(sol: SdpSolution, block: int) -> float:
    return float(np.asarray(sol.primal_point[block]).ravel()[0])


def search_condition_dual(k: NCBGraph, slack: Optional[float] = None, sigma: Optional[float] = None,
                          config: Optional[ZesimConfig] = None) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Look for a near-optimal lower certificate with P (S (x) 1) P >= 0.

    Maximizes t + w tr S over feasible (S, U) with Q^dag (S (x) 1) Q >= t 1.
    Returns (S, U) when t >= -slack and tr S is within the slack band of
    Sigma(K); otherwise None.
    """
    config = _config(config)
    slack = config.slack if slack is None else slack
    if sigma is None:
        sigma = sigma_graph(k, config).value
    q, qh = k.support_basis, k.support_basis.conj().T
    da, db, r = k.dim_a, k.dim_b, k.rank

    p = SdpProblem(sense=Sense.MAX)
    u = p.psd(k.n, name="U")
    s = p.free_hermitian(da, name="S")
    w = p.psd(r, name="W")
    rest = p.psd(r, name="R")
    t = p.free(1, name="t")
    p.set_objective(t, 1.0)
    p.set_objective(s, NEAR_OPTIMAL_WEIGHT * np.eye(da))

    def s_term(g):
        return partial_trace(q @ g @ qh, [da, db], keep=[0])

    p.add_matrix_equality({u: _tr_a_adjoint(da)}, np.eye(db))
    p.add_matrix_equality({u: lambda g: q @ g @ qh, s: lambda g: -s_term(g), w: lambda g: -g},
                          np.zeros((r, r)))
    p.add_matrix_equality({s: s_term, t: lambda g: -np.real(np.trace(g)), rest: lambda g: -g},
                          np.zeros((r, r)))

    try:
        sol = _run(p, config, "search_condition_dual", k)
    except SolverError as e:
        if e.solution is not None and e.solution.status == SolveStatus.PRIMAL_INFEASIBLE:
            logger.info("condition search: program infeasible, no pair")
            return None
        raise
    S = hermitian_part(sol.primal_point[s])
    t_opt = _scalar(sol, t)
    trace_s = float(np.real(np.trace(S)))
    logger.info("condition search: t* = %.3e, tr S = %.10g (Sigma %.10g, slack %.1e)",
                t_opt, trace_s, sigma, slack)
    if t_opt < -slack or trace_s < sigma - _band(slack, sigma):
        return None
    return S, hermitian_part(sol.primal_point[u])


def cheapest_full_rank_check(k: NCBGraph, slack: Optional[float] = None, sigma: Optional[float] = None,
                             config: Optional[ZesimConfig] = None) -> FullRankCheck:
    """Is there a cheapest channel whose Choi matrix has full rank on the support?

    Maximizes t - w tr T over upper points with X >= t 1. Full rank means
    ``t > 10 * slack`` at a point whose cost stays within the slack band of
    Sigma(K).
    """
    config = _config(config)
    slack = config.slack if slack is None else slack
    if sigma is None:
        sigma = sigma_graph(k, config).value
    q, qh = k.support_basis, k.support_basis.conj().T
    da, db, r = k.dim_a, k.dim_b, k.rank

    p = SdpProblem(sense=Sense.MAX)
    x = p.psd(r, name="X")
    z = p.psd(k.n, name="Z")
    rest = p.psd(r, name="R")
    tb = p.free_hermitian(db, name="T")
    t = p.free(1, name="t")
    p.set_objective(t, 1.0)
    p.set_objective(tb, -NEAR_OPTIMAL_WEIGHT * np.eye(db))
    p.add_matrix_equality({
        z: lambda g: g,
        x: lambda g: qh @ g @ q,
        tb: lambda g: -partial_trace(g, [da, db], keep=[1]),
    }, np.zeros((k.n, k.n)))
    tr_b = _tr_b_adjoint(db)
    p.add_matrix_equality({x: lambda g: qh @ tr_b(g) @ q}, np.eye(da))
    p.add_matrix_equality({x: lambda g: g, rest: lambda g: -g, t: lambda g: -np.real(np.trace(g))},
                          np.zeros((r, r)))

    sol = _run(p, config, "cheapest_full_rank_check", k)
    V = hermitian_part(q @ sol.primal_point[x] @ qh)
    t_opt = _scalar(sol, t)
    cost = float(np.real(np.trace(sol.primal_point[tb])))
    logger.info("full-rank check: t* = %.3e (threshold %.1e), tr T = %.10g (Sigma %.10g)",
                t_opt, 10 * slack, cost, sigma)
    full = t_opt > 10 * slack and cost <= sigma + _band(slack, sigma)
    return FullRankCheck(bool(full), t_opt, V, cost)


def nontrivial_check(k: NCBGraph, tol: float = DEFAULT_TOLERANCES.rank) -> bool:
    """True iff no constant channel rho -> |beta><beta| has its Kraus span inside K."""
    outside = np.eye(k.n) - k.support_projection
    eye_b = np.eye(k.dim_b)
    stacked = np.vstack([outside @ np.kron(basis_vector(k.dim_a, a).reshape(-1, 1), eye_b)
                         for a in range(k.dim_a)])
    return scipy.linalg.null_space(stacked, rcond=tol).shape[1] == 0


def property_prop3_check(k: NCBGraph, tol: float = 1e-6,
                         config: Optional[ZesimConfig] = None) -> Prop3Report:
    """Complementarity between the optimal W = P(U - S (x) 1)P and a cheapest Choi J."""
    result = sigma_graph_dual(k, config)
    S, U = result.lower.first, result.lower.second
    J = result.upper.first
    P = k.support_projection
    q = k.support_basis
    gap_op = U - np.kron(S, np.eye(k.dim_b))
    W = P @ gap_op @ P
    return Prop3Report(
        min_eig_w=float(eigvals_hermitian(q.conj().T @ gap_op @ q)[0]),
        trace_wj=float(np.real(np.trace(W @ J))),
        trace_gap=abs(float(np.real(np.trace(U @ J) - np.trace(S)))),
        w_norm=float(np.linalg.norm(W, 2)),
        tol=tol,
    )


# ============================================================================
# asymptotic bounds
# ============================================================================

def s0ns_bounds(k: NCBGraph, max_power: int = 1, config: Optional[ZesimConfig] = None) -> BoundsResult:
    """log2 Sigma^-(K) <= cost <= min_n (1/n) log2 Sigma(K^n), in bits."""
    config = _config(config)
    if max_power < 1:
        raise ValueError(f"max_power must be at least 1, got {max_power}")
    size = k.n ** max_power
    if size > config.dimension_cap:
        raise DimensionCapError(
            f"dimension {size} of power {max_power} exceeds the cap {config.dimension_cap}")

    minus = sigma_minus(k, config).value
    powers: List[Tuple[int, float]] = []
    sigma_one = math.nan
    for n in range(1, max_power + 1):
        value = sigma_graph(graph_power(k, n), config).value
        if n == 1:
            sigma_one = value
        powers.append((n, math.log2(value) / n))
        logger.info("power %d: Sigma = %.10g", n, value)
    upper = min(v for _, v in powers)
    lower = math.log2(minus)
    tight = bool(abs(minus - sigma_one) <= 1e-6 * (1 + sigma_one))
    return BoundsResult(lower, upper, powers, minus, sigma_one, tight)
