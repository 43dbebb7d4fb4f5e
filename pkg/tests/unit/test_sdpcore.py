"""
Unit tests for the SDP model and the interior-point solver.
"""
import io
import math

import numpy as np
import pytest

import zesim.sdpcore
from zesim.models import SolverOptions
from zesim.sdpcore import (
    ConeKind, SdpError, SdpProblem, Sense, SolveStatus, dualize, dump_problem, solve,
    verify_feasibility, _NewtonSystem, _NumericalBreakdown, _nt_scaling,
)

from conftest import random_hermitian


def diagonal_problem(c, sense=Sense.MIN) -> SdpProblem:
    """min/max <diag(c), X> s.t. tr X = 1, X >= 0."""
    p = SdpProblem(sense=sense)
    x = p.psd(len(c), name="X")
    p.set_objective(x, np.diag(c))
    p.add_constraint({x: np.eye(len(c))}, 1.0)
    return p


class TestSdpProblem:
    """Tests for problem construction."""

    def test_blocks(self):
        """Block helpers return consecutive indices."""
        p = SdpProblem()
        assert p.psd(3) == 0
        assert p.nonneg(2) == 1
        assert p.free(4) == 2
        assert p.free_hermitian(2) == 3
        assert p.blocks[3].size == 4
        assert p.blocks[0].kind == ConeKind.PSD

    def test_hermitian_flag_only_on_free(self):
        """PSD blocks do not take the hermitian flag."""
        with pytest.raises(SdpError):
            SdpProblem().add_block(ConeKind.PSD, 2, hermitian=True)

    def test_coefficient_shape(self):
        """Coefficients must match the block."""
        p = SdpProblem()
        x = p.psd(2)
        with pytest.raises(SdpError):
            p.set_objective(x, np.eye(3))

    def test_non_hermitian_coefficient(self):
        """PSD coefficients must be Hermitian."""
        p = SdpProblem()
        x = p.psd(2)
        with pytest.raises(SdpError):
            p.add_constraint({x: np.array([[0, 1], [0, 0]])}, 0.0)

    def test_validate(self):
        """A problem needs constraints and a cone block."""
        p = SdpProblem()
        y = p.free(1)
        with pytest.raises(SdpError):
            p.validate()
        p.add_constraint({y: 1.0}, 1.0)
        with pytest.raises(SdpError, match="cone"):
            p.validate()

    def test_matrix_equality_rows(self):
        """One scalar row per Hermitian basis element."""
        p = SdpProblem()
        x = p.psd(3)
        rows = p.add_matrix_equality({x: lambda g: g}, np.eye(3))
        assert rows == range(0, 9)
        assert np.allclose(p.rhs[:3], 1.0)
        assert np.allclose(p.rhs[3:], 0.0)

    def test_hermitian_free_block_matrix_coefficient(self):
        """Matrix coefficients on Hermitian free blocks become coordinates."""
        p = SdpProblem()
        s = p.free_hermitian(2)
        p.set_objective(s, np.eye(2))
        assert np.allclose(p.objective[s], [1, 1, 0, 0])


class TestSolver:
    """Tests for the interior-point solver."""

    def test_diagonal_min(self):
        """min <diag(c), X> over density matrices is min(c)."""
        sol = solve(diagonal_problem([3.0, 1.5, 2.0]))
        assert sol.status == SolveStatus.OPTIMAL
        assert abs(sol.primal_value - 1.5) <= 1.5e-7
        assert abs(sol.dual_value - 1.5) <= 1.5e-7
        assert np.isclose(sol.primal_point[0][1, 1].real, 1.0, atol=1e-6)

    def test_diagonal_max(self):
        """max <diag(c), X> over density matrices is max(c)."""
        sol = solve(diagonal_problem([3.0, 1.5, 2.0], Sense.MAX))
        assert sol.optimal
        assert abs(sol.primal_value - 3.0) <= 3e-7

    def test_complex_max_eigenvalue(self, rng):
        """max <H, X> over density matrices is the top eigenvalue, complex H included."""
        h = random_hermitian(rng, 3)
        p = SdpProblem(sense=Sense.MAX)
        x = p.psd(3)
        p.set_objective(x, h)
        p.add_constraint({x: np.eye(3)}, 1.0)
        sol = solve(p)
        top = np.linalg.eigvalsh(h)[-1]
        assert sol.optimal
        assert abs(sol.primal_value - top) <= 1e-7 * max(1.0, abs(top))
        assert np.allclose(sol.primal_point[x], sol.primal_point[x].conj().T)

    def test_linear_program(self):
        """Nonnegative blocks solve an LP."""
        p = SdpProblem()
        x = p.nonneg(3)
        p.set_objective(x, [2.0, 0.5, 1.0])
        p.add_constraint({x: [1.0, 1.0, 1.0]}, 2.0)
        sol = solve(p)
        assert sol.optimal
        assert abs(sol.primal_value - 1.0) <= 1e-7

    def test_free_variable(self):
        """A free scalar bounded through a PSD block: max t s.t. X = diag(2, 5) - t I >= 0."""
        p = SdpProblem(sense=Sense.MAX)
        x = p.psd(2)
        t = p.free(1)
        p.set_objective(t, 1.0)
        p.add_matrix_equality({x: lambda g: g, t: lambda g: np.real(np.trace(g))}, np.diag([2.0, 5.0]))
        sol = solve(p)
        assert sol.optimal
        assert abs(sol.primal_value - 2.0) <= 1e-7

    def test_constraint_multiplier(self):
        """The multiplier of tr X = 1 in max <diag(1, 0), X> is the top eigenvalue."""
        p = SdpProblem(sense=Sense.MAX)
        x = p.psd(2)
        p.set_objective(x, np.diag([1.0, 0.0]))
        rows = p.add_constraint({x: np.eye(2)}, 1.0)
        sol = solve(p)
        assert rows == 0
        assert abs(sol.y[0] - 1.0) <= 1e-6

    def test_infeasible(self):
        """tr X = -1 has no PSD solution."""
        p = SdpProblem()
        x = p.psd(2)
        p.set_objective(x, np.eye(2))
        p.add_constraint({x: np.eye(2)}, -1.0)
        sol = solve(p, SolverOptions(max_iter=60))
        assert not sol.optimal
        assert not sol.accepted(1e-6)

    def test_summary(self):
        """Summaries carry the status string."""
        sol = solve(diagonal_problem([1.0, 2.0]))
        summary = sol.summary()
        assert summary['status'] == "optimal"
        assert summary['iterations'] == sol.iterations


class TestBreakdown:
    """Overflowing iterates end the solve with the best iterate, never a raw exception."""

    def test_scaling_rejects_non_finite(self):
        """NT scaling refuses infinite or NaN iterates."""
        with pytest.raises(_NumericalBreakdown):
            _nt_scaling(np.full((2, 2), np.inf), np.eye(2))
        with pytest.raises(_NumericalBreakdown):
            _nt_scaling(np.eye(2), np.array([[1.0, np.nan], [np.nan, 1.0]]))

    def test_schur_rejects_non_finite(self):
        """A NaN Schur complement is a breakdown, not a scipy ValueError."""
        with pytest.raises(_NumericalBreakdown):
            _NewtonSystem(np.full((2, 2), np.nan), np.zeros((2, 0)))

    def test_value_error_becomes_numerical_failure(self, monkeypatch):
        """scipy's 'infs or NaNs' ValueError inside a step is caught."""
        class Exploding:
            def __init__(self, M, F):
                raise ValueError("array must not contain infs or NaNs")

        monkeypatch.setattr(zesim.sdpcore, "_NewtonSystem", Exploding)
        sol = solve(diagonal_problem([3.0, 1.5, 2.0]))
        assert sol.status == SolveStatus.NUMERICAL_FAILURE
        assert math.isfinite(sol.primal_value)
        assert not sol.accepted(1e-6)


class TestVerification:
    """Tests for verify_feasibility, dualize and dump_problem."""

    def test_verify_feasible_point(self):
        """A density matrix is feasible for the diagonal problem."""
        p = diagonal_problem([1.0, 2.0])
        report = verify_feasibility(p, [np.diag([0.25, 0.75])])
        assert report.passed
        assert np.isclose(report.objective, 1.75)

    def test_verify_infeasible_point(self):
        """A point with a negative eigenvalue fails."""
        p = diagonal_problem([1.0, 2.0])
        report = verify_feasibility(p, [np.diag([1.5, -0.5])])
        assert not report.passed
        assert report.worst_cone_margin == pytest.approx(-0.5)

    def test_verify_block_count(self):
        """One value per block is required."""
        with pytest.raises(SdpError):
            verify_feasibility(diagonal_problem([1.0]), [])

    def test_dualize_min(self):
        """The dual of min <diag(c), X> is max y s.t. diag(c) - y I >= 0."""
        p = diagonal_problem([3.0, 1.5, 2.0])
        dual = dualize(p)
        assert dual.sense == Sense.MAX
        assert dual.blocks[0].kind == ConeKind.FREE
        sol = solve(dual)
        assert sol.optimal
        assert abs(sol.primal_value - 1.5) <= 1e-6

    def test_dualize_max(self):
        """The dual of a max problem is a min problem with the same value."""
        dual = dualize(diagonal_problem([3.0, 1.5, 2.0], Sense.MAX))
        assert dual.sense == Sense.MIN
        assert abs(solve(dual).primal_value - 3.0) <= 1e-6

    def test_dump_problem(self):
        """Triplets list the objective as constraint 0."""
        p = diagonal_problem([1.0, 2.0])
        out = io.StringIO()
        dump_problem(p, out)
        lines = out.getvalue().splitlines()
        assert lines[0] == "# zesim sdp dump"
        assert lines[1] == "sense min"
        assert lines[2] == "block 0 psd 2"
        assert "rhs 1 1.0" in lines
        assert "0 0 1 1 2.0 0.0" in lines
        assert "1 0 0 0 1.0 0.0" in lines
