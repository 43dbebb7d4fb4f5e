"""
Unit tests for the dense linear-algebra helpers.
"""
import numpy as np
import pytest

from zesim.graphspace import kalpha_vectors
from zesim.linalg import (
    DimensionMismatchError, LinalgError, as_matrix, basis_vector, embed_real, eigvals_hermitian,
    from_hermitian_coordinates, gell_mann_basis, hermitian_basis, hermitian_coordinates,
    is_hermitian, is_psd, kron, max_entangled_vector, numerical_rank, orthonormal_span,
    outer, partial_trace, permute_systems, permute_vector, projector_onto_span, unembed_real,
)


class TestKron:
    """Tests for kron."""

    def test_identities(self):
        """I2 (x) I3 is I6."""
        assert np.allclose(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_diagonal(self):
        """Diagonal factors multiply entrywise."""
        out = kron(np.diag([1, 2]), np.diag([3, 4]))
        assert np.allclose(out, np.diag([3, 4, 6, 8]))

    def test_rank_one_factors(self):
        """|0><1| (x) |1><0| is |01><10|."""
        e0, e1 = basis_vector(2, 0), basis_vector(2, 1)
        out = kron(outer(e0, e1), outer(e1, e0))
        assert np.allclose(out, outer(kron(e0, e1), kron(e1, e0)))

    def test_no_factors(self):
        """An empty product is rejected."""
        with pytest.raises(ValueError):
            kron()


class TestPartialTrace:
    """Tests for partial_trace."""

    def test_product_state(self, rng):
        """Tracing out sigma from rho (x) sigma leaves tr(sigma) rho."""
        rho = rng.normal(size=(2, 2))
        sigma = rng.normal(size=(3, 3))
        out = partial_trace(np.kron(rho, sigma), [2, 3], keep=[0])
        assert np.allclose(out, np.trace(sigma) * rho)

    def test_keep_second_system(self, rng):
        """Keeping the second factor gives tr(rho) sigma."""
        rho = rng.normal(size=(3, 3))
        sigma = rng.normal(size=(2, 2))
        out = partial_trace(np.kron(rho, sigma), [3, 2], keep=[1])
        assert np.allclose(out, np.trace(rho) * sigma)

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_maximally_entangled_marginal(self, d):
        """The marginal of |Phi><Phi| is the identity."""
        phi = max_entangled_vector(d)
        assert np.allclose(partial_trace(np.outer(phi, phi.conj()), [d, d], keep=[1]), np.eye(d))

    def test_kalpha_choi_marginal(self):
        """a = (1.35, 0.4, 0.25) sums to 2 and gives tr_B J = 1_A at alpha = pi/3."""
        a = [1.35, 0.4, 0.25]
        vecs = kalpha_vectors(np.pi / 3)
        J = sum(w * np.outer(v, v.conj()) for w, v in zip(a, vecs))
        assert np.isclose(sum(a), 2.0)
        assert np.allclose(partial_trace(J, [2, 3], keep=[0]), np.eye(2))

    def test_trace_preserved(self, rng):
        """Total trace survives any partial trace."""
        m = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
        for keep in ([0], [1], [2], [0, 2]):
            assert np.isclose(np.trace(partial_trace(m, [2, 3, 2], keep)), np.trace(m))

    def test_dimension_mismatch(self):
        """Dimensions must multiply to the matrix size."""
        with pytest.raises(DimensionMismatchError):
            partial_trace(np.eye(6), [2, 2], keep=[0])

    def test_empty_keep(self):
        """At least one system must be kept."""
        with pytest.raises(ValueError):
            partial_trace(np.eye(4), [2, 2], keep=[])


class TestPermuteSystems:
    """Tests for permute_systems and permute_vector."""

    def test_swap_product(self, rng):
        """Swapping two factors of a product swaps the factors."""
        a = rng.normal(size=(2, 2))
        b = rng.normal(size=(3, 3))
        out = permute_systems(np.kron(a, b), [2, 3], [1, 0])
        assert np.allclose(out, np.kron(b, a))

    def test_spectrum_invariant(self, rng):
        """Permutation is a unitary conjugation."""
        m = rng.normal(size=(12, 12))
        m = m + m.T
        out = permute_systems(m, [2, 3, 2], [2, 0, 1])
        assert np.allclose(np.sort(eigvals_hermitian(out)), np.sort(eigvals_hermitian(m)))

    def test_vector(self):
        """|01> becomes |10> under a swap."""
        v = kron(basis_vector(2, 0), basis_vector(3, 1))
        out = permute_vector(v, [2, 3], [1, 0])
        assert np.allclose(out, kron(basis_vector(3, 1), basis_vector(2, 0)))

    def test_invalid_permutation(self):
        """Repeated indices are rejected."""
        with pytest.raises(DimensionMismatchError):
            permute_systems(np.eye(4), [2, 2], [0, 0])


class TestSpans:
    """Tests for spans, projectors and rank."""

    def test_span_drops_dependent_vectors(self):
        """A dependent vector does not add to the span."""
        e0, e1 = basis_vector(3, 0), basis_vector(3, 1)
        q = orthonormal_span([e0, e1, e0 + 2 * e1])
        assert q.shape == (3, 2)
        assert np.allclose(q.conj().T @ q, np.eye(2))

    def test_empty_span(self):
        """An empty family spans the zero space."""
        assert orthonormal_span([], dim=4).shape == (4, 0)
        assert np.allclose(projector_onto_span([], dim=4), 0)

    def test_projector_idempotent(self, rng):
        """P^2 = P and P is Hermitian."""
        vecs = [rng.normal(size=5) + 1j * rng.normal(size=5) for _ in range(2)]
        p = projector_onto_span(vecs)
        assert np.allclose(p @ p, p)
        assert is_hermitian(p, 1e-10)
        assert np.isclose(np.trace(p).real, 2.0)

    def test_numerical_rank(self):
        """Rank ignores singular values below the relative tolerance."""
        m = np.diag([1.0, 1e-3, 1e-14])
        assert numerical_rank(m) == 2
        assert numerical_rank(np.zeros((3, 3))) == 0


class TestChecks:
    """Tests for coercion and PSD checks."""

    def test_as_matrix_rejects_nan(self):
        """Non-finite entries are rejected."""
        with pytest.raises(LinalgError):
            as_matrix([[1.0, np.nan], [0.0, 1.0]])

    def test_as_matrix_rejects_vectors(self):
        """One-dimensional data is not a matrix."""
        with pytest.raises(DimensionMismatchError):
            as_matrix([1.0, 2.0])

    def test_is_psd(self):
        """Small negative eigenvalues within tolerance are accepted."""
        assert is_psd(np.diag([1.0, 0.0]))
        assert is_psd(np.diag([1.0, -1e-12]))
        assert not is_psd(np.diag([1.0, -1e-3]))


class TestHermitianCoordinates:
    """Tests for the Hermitian basis, Gell-Mann matrices and the real embedding."""

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_basis_orthonormal(self, d):
        """tr(G_j G_k) = delta_jk and every element is Hermitian."""
        basis = hermitian_basis(d)
        gram = np.einsum('jab,kba->jk', basis, basis)
        assert np.allclose(gram, np.eye(d * d))
        assert all(is_hermitian(g) for g in basis)

    def test_basis_order(self):
        """Diagonal units come first, then symmetric, then antisymmetric elements."""
        basis = hermitian_basis(2)
        assert np.allclose(basis[0], np.diag([1, 0]))
        assert np.allclose(basis[1], np.diag([0, 1]))
        assert np.allclose(basis[2], np.array([[0, 1], [1, 0]]) / np.sqrt(2))
        assert np.allclose(basis[3], np.array([[0, -1j], [1j, 0]]) / np.sqrt(2))

    def test_coordinates_reconstruct(self, rng):
        """Coordinates determine the matrix."""
        g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        h = (g + g.conj().T) / 2
        assert np.allclose(from_hermitian_coordinates(hermitian_coordinates(h), 3), h)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_gell_mann(self, d):
        """d^2 - 1 traceless Hermitian matrices with tr(G_j G_k) = 2 delta_jk."""
        basis = gell_mann_basis(d)
        assert basis.shape == (d * d - 1, d, d)
        assert np.allclose(np.einsum('kaa->k', basis), 0)
        assert np.allclose(np.einsum('jab,kba->jk', basis, basis), 2 * np.eye(d * d - 1))

    def test_embedding_spectrum(self, rng):
        """The real embedding doubles every eigenvalue's multiplicity."""
        g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        h = (g + g.conj().T) / 2
        y = embed_real(h)
        assert np.allclose(y, y.T)
        expected = np.sort(np.repeat(eigvals_hermitian(h), 2))
        assert np.allclose(np.sort(np.linalg.eigvalsh(y)), expected)
        assert np.allclose(unembed_real(y), h)
