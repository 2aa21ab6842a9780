import numpy as np
import pytest

from coneflats.cartan import PPotential, commutators, make_basis


class TestSemisimpleBasis:
    def test_first_generator_entries(self, basis3):
        a1 = basis3.basis[0]
        expected = np.zeros((6, 6))
        expected[0, 3] = 1.0
        expected[3, 0] = -1.0
        assert np.array_equal(a1, expected)

    def test_timelike_generator_entries(self, basis3):
        a3 = basis3.basis[2]
        expected = np.zeros((6, 6))
        expected[2, 5] = -1.0
        expected[5, 2] = -1.0
        assert np.array_equal(a3, expected)

    def test_generators_skew_for_ambient_form(self, basis3):
        I = np.diag(basis3.form.diag_I)
        for a in basis3.basis:
            assert np.max(np.abs(a.T @ I + I @ a)) == 0.0

    def test_generators_block_anti_diagonal(self, basis3):
        rho = basis3.form.rho
        for a in basis3.basis:
            assert np.max(np.abs(rho[:, None] * a * rho[None, :] + a)) == 0.0

    def test_pairwise_commutators_vanish(self, basis3):
        for i in range(3):
            for j in range(3):
                bracket = basis3.basis[i] @ basis3.basis[j] - basis3.basis[j] @ basis3.basis[i]
                assert np.max(np.abs(bracket)) < 1e-12

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            make_basis(2)
        with pytest.raises(ValueError):
            make_basis(3, "semisimple", p=1)
        with pytest.raises(ValueError):
            make_basis(3, "channel", p=2)
        with pytest.raises(ValueError):
            make_basis(3, "other")


class TestChannelBasis:
    def test_leading_generators_match_semisimple(self, channel_basis3, basis3):
        assert np.array_equal(channel_basis3.basis[0], basis3.basis[0])

    def test_nilpotent_cube(self, channel_basis3):
        a2 = channel_basis3.basis[1]
        assert np.max(np.abs(a2 @ a2)) > 0
        assert np.max(np.abs(a2 @ a2 @ a2)) == 0.0

    def test_abelian_and_skew(self, channel_basis3):
        I = np.diag(channel_basis3.form.diag_I)
        for a in channel_basis3.basis:
            assert np.max(np.abs(a.T @ I + I @ a)) == 0.0
        for i in range(3):
            for j in range(3):
                br = channel_basis3.basis[i] @ channel_basis3.basis[j] \
                    - channel_basis3.basis[j] @ channel_basis3.basis[i]
                assert np.max(np.abs(br)) < 1e-12

    def test_trace_null_nilpotents(self, channel_basis3):
        # the nilpotent generators pair to zero with themselves under the
        # trace form, which is why the solution slice is the ad-kernel
        # complement rather than the trace complement
        for j in (1, 2):
            a = channel_basis3.basis[j]
            assert abs(np.trace(a @ a)) == 0.0


class TestEmbed:
    def test_zero(self, basis3):
        assert np.max(np.abs(basis3.embed(np.zeros((3, 3))))) == 0.0

    def test_block_pattern(self, basis3):
        xi = np.zeros((3, 3))
        xi[0, 1] = 1.0
        X = basis3.embed(xi)
        expected = np.zeros((6, 6))
        expected[1, 3] = 1.0   # upper-right block = xi^T
        expected[3, 1] = -1.0  # lower-left block = -J xi
        assert np.array_equal(X, expected)

    def test_embed_lands_in_p_and_algebra(self, basis3):
        rng = np.random.default_rng(0)
        xi = basis3.constrain(rng.normal(size=(3, 3)))
        X = basis3.embed(xi)
        I = np.diag(basis3.form.diag_I)
        rho = basis3.form.rho
        assert np.max(np.abs(X.T @ I + I @ X)) < 1e-12
        assert np.max(np.abs(rho[:, None] * X * rho[None, :] + X)) < 1e-12

    def test_trace_orthogonality_semisimple(self, basis3):
        rng = np.random.default_rng(1)
        xi = basis3.constrain(rng.normal(size=(3, 3)))
        assert np.max(np.abs(basis3.trace_pairings(xi))) < 1e-12

    def test_trace_orthogonality_channel_rank_one_part(self, channel_basis3):
        # only the semisimple-type generators pair to zero with the slice;
        # the nilpotent directions are trace-null and their pairing with a
        # generic slice element is genuinely nonzero
        rng = np.random.default_rng(2)
        xi = channel_basis3.constrain(rng.normal(size=(3, 3)))
        pairings = channel_basis3.trace_pairings(xi)
        assert abs(pairings[0]) < 1e-12

    def test_constraint_violation_rejected(self, basis3):
        xi = np.eye(3)
        with pytest.raises(ValueError):
            basis3.embed(xi)

    def test_linear_and_injective_on_slice(self, basis3):
        rng = np.random.default_rng(3)
        xi1 = basis3.constrain(rng.normal(size=(3, 3)))
        xi2 = basis3.constrain(rng.normal(size=(3, 3)))
        lhs = basis3.embed(0.3 * xi1 + 1.7 * xi2)
        rhs = 0.3 * basis3.embed(xi1) + 1.7 * basis3.embed(xi2)
        assert np.max(np.abs(lhs - rhs)) < 1e-12
        assert np.max(np.abs(basis3.xi_of(basis3.embed(xi1)) - xi1)) < 1e-12


class TestSlice:
    def test_semisimple_slice_is_offdiagonal(self, basis3):
        xi = np.arange(9.0).reshape(3, 3)
        expected = xi - np.diag(np.diag(xi))
        assert np.allclose(basis3.constrain(xi), expected)

    def test_channel_slice_kills_kernel_directions(self, channel_basis3):
        # generators in xi-coordinates are invisible to the system and are
        # projected away
        xi_a1 = np.zeros((3, 3)); xi_a1[0, 0] = 1.0
        anti = np.zeros((3, 3)); anti[1, 2] = 1.0; anti[2, 2] = -1.0
        for k in (xi_a1, anti):
            K = commutators(channel_basis3.basis, channel_basis3.embed_unchecked(k))
            assert np.max(np.abs(K)) < 1e-12
            assert np.max(np.abs(channel_basis3.constrain(k))) < 1e-12

    def test_slice_dimension(self, basis3, channel_basis3):
        assert basis3.constrained_dim == 6
        assert channel_basis3.constrained_dim == 6

    def test_regular_direction_injectivity(self, basis3):
        # for b = sum b_i a_i with distinct nonzero coefficients, ad(b) is
        # injective on the slice: the induced linear map has full rank
        b = np.einsum("i,ikl->kl", np.array([1.0, 2.0, -1.5]), basis3.basis)
        cols = []
        for c in range(basis3.span.shape[1]):
            xi = basis3.span[:, c].reshape(3, 3)
            X = basis3.embed_unchecked(xi)
            cols.append((b @ X - X @ b).reshape(-1))
        rank = np.linalg.matrix_rank(np.stack(cols, axis=1), tol=1e-10)
        assert rank == basis3.constrained_dim


class TestExtraction:
    @pytest.mark.parametrize("variant,p", [("semisimple", None), ("channel", 1)])
    def test_roundtrip_through_connection(self, variant, p):
        basis = make_basis(3, variant, p)
        rng = np.random.default_rng(4)
        xi = basis.constrain(rng.normal(size=(3, 3)))
        K = commutators(basis.basis, basis.embed_unchecked(xi))
        rec = basis.xi_from_connection(K)
        assert np.max(np.abs(rec - xi)) < 1e-10

    def test_canonicalize_is_idempotent_on_slice(self, channel_basis3):
        rng = np.random.default_rng(5)
        xi = channel_basis3.constrain(rng.normal(size=(3, 3)))
        assert np.max(np.abs(channel_basis3.canonicalize(xi) - xi)) < 1e-10

    def test_kernel_components_dropped(self, channel_basis3):
        rng = np.random.default_rng(6)
        xi = channel_basis3.constrain(rng.normal(size=(3, 3)))
        kernel = np.zeros((3, 3)); kernel[1, 2] = 1.0; kernel[2, 2] = -1.0
        assert np.max(np.abs(channel_basis3.canonicalize(xi + kernel) - xi)) < 1e-10


class TestPPotential:
    def test_valid(self, basis3):
        xi = np.zeros((3, 3)); xi[0, 1] = 0.5
        pot = PPotential(basis3, xi)
        assert pot.embedded.shape == (6, 6)

    def test_invalid(self, basis3):
        with pytest.raises(ValueError):
            PPotential(basis3, np.eye(3))
