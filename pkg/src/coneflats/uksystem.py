"""The first-order system on the Cartan data and its residual certificates.

For a maximal abelian subspace spanned by a_1..a_n, a map Xi into the
constrained part of p solves the system iff the lambda-family of connection
forms

    theta_lambda = sum_i (lambda a_i + [a_i, Xi]) dx_i

is flat for every lambda; with frames attached on the right
(dPhi = Phi theta_lambda) the zero-curvature condition reads

    [a_i, Xi_{x_j}] - [a_j, Xi_{x_i}] + s [[a_i, Xi], [a_j, Xi]] = 0,  s = -1.

Everything here is checked by second-order finite differences on a uniform
grid; residual reductions run over interior nodes only, so the gates scale
as 25 h^2 with the mesh width h.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cartan import CartanBasis, PPotential, commutators
from .errors import DegenerateMetric
from .grids import GridBox, central_diff, dilate_mask, masked_max
from .lorentz import QuadraticForm

# Sign on the double-commutator term.  The frame convention dPhi = Phi theta
# forces s = -1 (the opposite sign corresponds to frames solving
# dPhi = theta Phi, equivalently Xi -> -Xi).  Kept as a constant so the
# convention is explicit and flippable.
DOUBLE_COMMUTATOR_SIGN = -1.0


@dataclass(frozen=True)
class SolutionGrid:
    """Sampled solution candidate xi over a rectangular box.

    xi has shape (*steps, n, n) and satisfies the variant constraint of its
    basis at every node.  An optional boolean mask flags nodes where the
    values are unusable (e.g. a dressing degeneracy); masked nodes and their
    finite-difference neighbourhoods are excluded from residuals.
    """

    basis: CartanBasis
    box: GridBox
    xi: np.ndarray = field(repr=False)
    mask: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        n = self.basis.n
        if self.box.ndim != n:
            raise ValueError("box dimension must match the basis rank")
        if any(s < 5 for s in self.box.steps):
            raise ValueError("need at least 5 points per axis for interior stencils")
        xi = np.asarray(self.xi, dtype=float)
        if xi.shape != self.box.steps + (n, n):
            raise ValueError(f"xi has shape {xi.shape}, expected {self.box.steps + (n, n)}")
        clean = xi if self.mask is None else np.where(
            np.asarray(self.mask, bool)[..., None, None], 0.0, xi
        )
        violation = float(np.max(np.abs(clean - self.basis.constrain(clean))))
        if violation > 1e-8 * max(float(np.max(np.abs(clean))), 1.0):
            raise ValueError(f"grid values violate the constraint by {violation:.3e}")
        object.__setattr__(self, "xi", xi)
        if self.mask is not None:
            object.__setattr__(self, "mask", np.asarray(self.mask, dtype=bool))

    @classmethod
    def vacuum(cls, basis: CartanBasis, box: GridBox) -> "SolutionGrid":
        return cls(basis, box, np.zeros(box.steps + (basis.n, basis.n)))

    @classmethod
    def constant(cls, basis: CartanBasis, box: GridBox, xi) -> "SolutionGrid":
        field_ = np.broadcast_to(
            np.asarray(xi, float), box.steps + (basis.n, basis.n)
        ).copy()
        return cls(basis, box, field_)

    @property
    def n(self) -> int:
        return self.basis.n

    def embedded(self) -> np.ndarray:
        return self.basis.embed_unchecked(self.xi)

    def at(self, index: tuple[int, ...]) -> PPotential:
        return PPotential(self.basis, self.xi[tuple(index)])

    def stencil_mask(self, margin: int = 1) -> np.ndarray | None:
        """Mask grown so finite differences never read a masked node."""
        if self.mask is None:
            return None
        return dilate_mask(self.mask, self.box.ndim, repeats=margin)


def lax_coefficient(basis: CartanBasis, potential, i: int, lam) -> np.ndarray:
    """Coefficient of dx_i in the lambda-family: lambda a_i + [a_i, Xi].

    `potential` may be a PPotential, a constrained xi matrix, or an already
    embedded 2n x 2n matrix.
    """
    if not 0 <= i < basis.n:
        raise ValueError(f"axis index {i} out of range for n = {basis.n}")
    if isinstance(potential, PPotential):
        X = potential.embedded
    else:
        potential = np.asarray(potential)
        if potential.shape[-2:] == (basis.n, basis.n):
            X = basis.embed(potential)
        elif potential.shape[-2:] == (basis.dim, basis.dim):
            X = potential
        else:
            raise ValueError("potential must be n x n (xi) or 2n x 2n (embedded)")
    a = basis.basis[i]
    return lam * a + (a @ X - X @ a)


@dataclass(frozen=True)
class ResidualField:
    """A per-point residual magnitude field plus its masked interior max."""

    field: np.ndarray
    max: float
    masked_points: int = 0


def uk_residual(grid: SolutionGrid, *, sign: float = DOUBLE_COMMUTATOR_SIGN) -> ResidualField:
    """Finite-difference residual of the first-order system, all pairs i < j.

    Returns the pointwise max (over pairs and matrix entries) of

        [a_i, dXi/dx_j] - [a_j, dXi/dx_i] + sign * [[a_i, Xi], [a_j, Xi]]

    with central differences, reduced over interior unmasked nodes.
    """
    basis = grid.basis
    n = basis.n
    if any(s < 5 for s in grid.box.steps):
        raise ValueError("grid too coarse for interior residuals")
    X = grid.embedded()
    h = grid.box.spacing
    K = commutators(basis.basis, X)  # (..., n, 2n, 2n), K[..., i] = [a_i, Xi]
    dX = [central_diff(X, axis=a, h=h[a]) for a in range(n)]

    out = np.zeros(grid.box.steps)
    for i in range(n):
        for j in range(i + 1, n):
            term = (
                commutators(basis.basis[i : i + 1], dX[j])[..., 0, :, :]
                - commutators(basis.basis[j : j + 1], dX[i])[..., 0, :, :]
            )
            double = K[..., i, :, :] @ K[..., j, :, :] - K[..., j, :, :] @ K[..., i, :, :]
            res = term + sign * double
            np.maximum(out, np.max(np.abs(res), axis=(-2, -1)), out=out)

    mask = grid.stencil_mask()
    masked = int(np.count_nonzero(mask)) if mask is not None else 0
    return ResidualField(out, masked_max(out, mask, ndim=n, margin=1), masked)


def flatness_residual(theta_fn, box: GridBox, lam) -> float:
    """Zero-curvature defect of a connection family at one lambda.

    `theta_fn(X, lam)` must map a coordinate mesh of shape (*steps, n) to the
    stacked coefficients (*steps, n, 2n, 2n).  Returns the interior max of
    | d_i theta_j - d_j theta_i + [theta_i, theta_j] | over all pairs.
    """
    mesh = box.mesh()
    theta = np.asarray(theta_fn(mesh, lam))
    n = box.ndim
    h = box.spacing
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            di_tj = central_diff(theta[..., j, :, :], axis=i, h=h[i])
            dj_ti = central_diff(theta[..., i, :, :], axis=j, h=h[j])
            bracket = (
                theta[..., i, :, :] @ theta[..., j, :, :]
                - theta[..., j, :, :] @ theta[..., i, :, :]
            )
            res = di_tj - dj_ti + bracket
            worst = max(worst, masked_max(res, ndim=n, margin=1))
    return worst


def theta_of_solution(grid: SolutionGrid):
    """Connection-family evaluator for a sampled solution (grid nodes only)."""

    K = commutators(grid.basis.basis, grid.embedded())

    def theta_fn(mesh, lam):
        expected = grid.box.mesh()
        if mesh.shape != expected.shape or not np.allclose(mesh, expected):
            raise ValueError("evaluator is defined on the grid of its solution")
        return lam * grid.basis.basis + K

    return theta_fn


def xi_from_metric(h_field: np.ndarray, box: GridBox) -> np.ndarray:
    """Recover the off-diagonal potential from positive metric coefficients.

    For a lift with induced metric sum_i h_i(x)^2 dx_i^2 written against the
    frame conventions used here (dPhi = Phi theta, lift coefficients q with
    h_i = |q_i|), the structure equations give

        xi_ij = -eps_i eps_j (dh_i/dx_j) / h_j,   i != j,

    where eps = diag(J).  (The bare (dh_i/dx_j)/h_j variant belongs to the
    opposite frame convention; this one closes the loop against dressed
    solutions, which is what the metric oracle is for.)  Central differences,
    zero diagonal.
    """
    h_field = np.asarray(h_field, dtype=float)
    n = h_field.shape[-1]
    if box.ndim != n:
        raise ValueError("metric coefficient count must match the box dimension")
    if np.any(h_field <= 0):
        raise DegenerateMetric("metric coefficients must be positive")
    eps = QuadraticForm(n).diag_J
    spacing = box.spacing
    xi = np.zeros(h_field.shape[:-1] + (n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dhi_dj = central_diff(h_field[..., i], axis=j, h=spacing[j])
            xi[..., i, j] = -eps[i] * eps[j] * dhi_dj / h_field[..., j]
    return xi
