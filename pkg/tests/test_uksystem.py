import numpy as np
import pytest

from coneflats.cartan import commutators
from coneflats.dressing import dressed_solution
from coneflats.errors import DegenerateMetric
from coneflats.grids import GridBox, central_diff, fd_tol
from coneflats.uksystem import (
    DOUBLE_COMMUTATOR_SIGN,
    SolutionGrid,
    flatness_residual,
    lax_coefficient,
    theta_of_solution,
    uk_residual,
    xi_from_metric,
)


def offdiag(xi):
    return xi - np.diag(np.diag(xi))


class TestLaxCoefficient:
    def test_vacuum(self, basis3):
        theta = lax_coefficient(basis3, np.zeros((3, 3)), 0, 1.0)
        assert np.array_equal(theta, basis3.basis[0])

    def test_zero_parameter_block_diagonal(self, basis3):
        xi = np.zeros((3, 3)); xi[0, 1] = 1.0
        theta = lax_coefficient(basis3, xi, 0, 0.0)
        assert np.max(np.abs(theta[:3, 3:])) == 0.0
        assert np.max(np.abs(theta[3:, :3])) == 0.0

    def test_matches_dense_commutator(self, basis3):
        xi = np.zeros((3, 3)); xi[0, 1] = 1.0
        X = basis3.embed(xi)
        a = basis3.basis[0]
        expected = a @ X - X @ a
        theta = lax_coefficient(basis3, xi, 0, 0.0)
        assert np.max(np.abs(theta - expected)) == 0.0

    def test_affine_in_lambda(self, basis3):
        rng = np.random.default_rng(0)
        xi = basis3.constrain(rng.normal(size=(3, 3)))
        t0 = lax_coefficient(basis3, xi, 1, 0.0)
        t1 = lax_coefficient(basis3, xi, 1, 1.0)
        recovered_a = t1 - t0
        assert np.max(np.abs(recovered_a - basis3.basis[1])) < 1e-12
        t2 = lax_coefficient(basis3, xi, 1, 2.0)
        assert np.max(np.abs(2 * t1 - t0 - t2)) < 1e-12

    def test_bad_axis(self, basis3):
        with pytest.raises(ValueError):
            lax_coefficient(basis3, np.zeros((3, 3)), 3, 1.0)


class TestUKResidual:
    def test_vacuum_exactly_zero(self, basis3, small_box):
        res = uk_residual(SolutionGrid.vacuum(basis3, small_box))
        assert res.max == 0.0
        assert np.nanmax(res.field) == 0.0

    def test_constant_solution_residual(self, basis3, small_box):
        rng = np.random.default_rng(1)
        C = basis3.constrain(rng.normal(size=(3, 3)))
        grid = SolutionGrid.constant(basis3, small_box, C)
        res = uk_residual(grid)
        # derivative terms vanish so only the double commutator survives;
        # evaluate it independently with dense matrix products
        X = basis3.embed(C)
        expected = 0.0
        for i in range(3):
            for j in range(i + 1, 3):
                Ki = basis3.basis[i] @ X - X @ basis3.basis[i]
                Kj = basis3.basis[j] @ X - X @ basis3.basis[j]
                expected = max(expected, np.max(np.abs(Ki @ Kj - Kj @ Ki)))
        assert res.max == pytest.approx(expected, rel=1e-12)

    def test_dressed_solution_within_gate(self, dressed_frame, small_box):
        sol = dressed_solution(dressed_frame, small_box)
        res = uk_residual(sol)
        assert res.max <= fd_tol(small_box)

    def test_sign_convention_is_the_frame_compatible_one(self, dressed_frame, small_box):
        # flipping the double-commutator sign must break the residual of a
        # genuine dressed solution
        sol = dressed_solution(dressed_frame, small_box)
        good = uk_residual(sol, sign=DOUBLE_COMMUTATOR_SIGN).max
        bad = uk_residual(sol, sign=-DOUBLE_COMMUTATOR_SIGN).max
        assert good <= fd_tol(small_box)
        assert bad > 10 * good

    def test_too_coarse_grid_rejected(self, basis3):
        with pytest.raises(ValueError):
            SolutionGrid.vacuum(basis3, GridBox.cube(3, 1.0, 4))


class TestFlatness:
    def test_vacuum_connection_flat(self, basis3, small_box):
        def theta(mesh, lam):
            return lam * np.broadcast_to(
                basis3.basis, mesh.shape[:-1] + basis3.basis.shape
            ).copy()
        assert flatness_residual(theta, small_box, 1.7) == 0.0

    def test_solution_connection_flat(self, dressed_frame, small_box):
        sol = dressed_solution(dressed_frame, small_box)
        res = flatness_residual(theta_of_solution(sol), small_box, 1.0)
        assert res <= fd_tol(small_box)

    def test_non_solution_detected(self, basis3, small_box):
        def theta(mesh, lam):
            xi = np.zeros(mesh.shape[:-1] + (3, 3))
            xi[..., 0, 1] = np.sin(mesh[..., 1] * mesh[..., 2])
            xi[..., 2, 0] = mesh[..., 0]
            X = basis3.embed_unchecked(basis3.constrain(xi))
            return lam * basis3.basis + commutators(basis3.basis, X)
        res = flatness_residual(theta, small_box, 1.0)
        assert res > 0.5  # bounded away from zero, far above the FD gate


class TestXiFromMetric:
    def test_constant_coefficients(self, small_box):
        h = np.ones(small_box.steps + (3,))
        assert np.max(np.abs(xi_from_metric(h, small_box))) == 0.0

    def test_single_linear_coefficient(self):
        # h_1 = x_2 (on a box with x_2 > 0), h_2 = h_3 = 1: the only nonzero
        # entry is xi_12 = -eps_1 eps_2 (dh_1/dx_2)/h_2 = -1 in the frame
        # convention used throughout (dPhi = Phi theta); the positive value
        # belongs to the opposite convention.
        box = GridBox((-1.0, 0.5, -1.0), (1.0, 1.5, 1.0), (9, 9, 9))
        mesh = box.mesh()
        h = np.ones(box.steps + (3,))
        h[..., 0] = mesh[..., 1]
        xi = xi_from_metric(h, box)
        inner_sl = (slice(1, -1),) * 3
        assert np.max(np.abs(xi[..., 0, 1] + 1.0)[inner_sl]) < 1e-9
        others = xi.copy()
        others[..., 0, 1] = 0.0
        assert np.max(np.abs(others[inner_sl])) < 1e-9

    def test_nonpositive_rejected(self, small_box):
        h = np.ones(small_box.steps + (3,))
        h[0, 0, 0, 0] = 0.0
        with pytest.raises(DegenerateMetric):
            xi_from_metric(h, small_box)

    def test_reproduces_dressed_solution(self, dressed_frame, small_box, c_default):
        from coneflats.immersion import build_immersion

        sol = dressed_solution(dressed_frame, small_box)
        imm = build_immersion(dressed_frame, small_box, c_default)
        xi = xi_from_metric(imm.h, small_box)
        inner_sl = (slice(1, -1),) * 3
        assert np.max(np.abs((xi - sol.xi)[inner_sl])) <= fd_tol(small_box)


class TestSolutionGrid:
    def test_constraint_checked(self, basis3, small_box):
        bad = np.ones(small_box.steps + (3, 3))
        with pytest.raises(ValueError):
            SolutionGrid(basis3, small_box, bad)

    def test_at_returns_potential(self, basis3, small_box):
        grid = SolutionGrid.vacuum(basis3, small_box)
        pot = grid.at((0, 0, 0))
        assert pot.xi.shape == (3, 3)

    def test_central_diff_second_order(self):
        # halving h divides the interior error by ~4
        def error(npts):
            box = GridBox((0.0,), (1.0,), (npts,))
            x = box.axes()[0]
            vals = np.sin(3.0 * x)
            d = central_diff(vals, 0, box.spacing[0])
            return np.max(np.abs(d - 3.0 * np.cos(3.0 * x))[1:-1])
        ratio = error(11) / error(21)
        assert 3.0 < ratio < 5.0
