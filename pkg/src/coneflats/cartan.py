"""Cartan data for the symmetric pair O(2n-1,1) / O(n) x O(n-1,1).

The Lie algebra splits into k (block-diagonal pairs, fixed by conjugation
with rho) plus p (block-anti-diagonal).  p is parameterised by n x n
matrices xi through

    embed(xi) = [[0, xi^T], [-J xi, 0]],

which is skew for the ambient form for every xi.  Two maximal abelian
subspaces of p are built here:

* semisimple: a_i has entry (i, n+i) = J_ii and (n+i, i) = -1, a paired
  rotation (i < n) or boost (i = n) generator per axis;
* channel(p): a_i as above for i <= p, while for j > p the generator
  a_j = [[0, e_{j,n-1} - e_{j,n}], [-(e_{n-1,j} + e_{n,j}), 0]] is nilpotent
  (a_j^3 = 0) and trace-null.

The first-order system sees xi only through the joint commutator map
ad: xi -> ([a_i, embed(xi)])_i, so solutions are classes modulo ker(ad) and
need a slice to become concrete matrices.  The semisimple kernel is exactly
the diagonal (the generators themselves), giving the classical off-diagonal
parameterisation.  For the channel variant the trace form degenerates on
the nilpotent generators, and the trace-orthogonal complement of span{a_i}
turns out to contain *no* representative of generic (e.g. dressed)
solutions; the slice used throughout is therefore the Euclidean
orthocomplement of ker(ad) in xi-coordinates, computed numerically from the
null space of the joint commutator matrix.  It has dimension n^2 - n in
both variants and reduces to the off-diagonal slice in the semisimple case.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lorentz import QuadraticForm


def _semisimple_generators(n: int) -> np.ndarray:
    J = QuadraticForm(n).diag_J
    basis = np.zeros((n, 2 * n, 2 * n))
    for i in range(n):
        basis[i, i, n + i] = J[i]
        basis[i, n + i, i] = -1.0
    return basis


def _channel_generators(n: int, p: int) -> np.ndarray:
    basis = _semisimple_generators(n)[:p].copy()
    extra = np.zeros((n - p, 2 * n, 2 * n))
    for idx, j in enumerate(range(p, n)):
        # upper-right block e_{j,n-1} - e_{j,n}; lower-left -(e_{n-1,j} + e_{n,j})
        extra[idx, j, n + n - 2] = 1.0
        extra[idx, j, n + n - 1] = -1.0
        extra[idx, n + n - 2, j] = -1.0
        extra[idx, n + n - 1, j] = -1.0
    return np.concatenate([basis, extra], axis=0)


def _embed_raw(xi, n: int) -> np.ndarray:
    J = QuadraticForm(n).diag_J
    xi = np.asarray(xi)
    out = np.zeros(xi.shape[:-2] + (2 * n, 2 * n), dtype=xi.dtype)
    out[..., :n, n:] = np.swapaxes(xi, -1, -2)
    out[..., n:, :n] = -J[:, None] * xi
    return out


@dataclass(frozen=True)
class CartanBasis:
    """A maximal abelian subspace of p together with derived linear data."""

    n: int
    variant: str
    p: int | None
    basis: np.ndarray = field(repr=False)
    # Euclidean-orthogonal projector onto the constrained xi-space (n^2 x n^2)
    constraint_proj: np.ndarray = field(repr=False)
    # orthonormal basis of the constrained xi-space, columns, (n^2 x k)
    span: np.ndarray = field(repr=False)
    # pseudo-inverse of xi-coords -> stacked [a_i, embed(xi)] (k x n*(2n)^2)
    ad_pinv: np.ndarray = field(repr=False)

    @property
    def form(self) -> QuadraticForm:
        return QuadraticForm(self.n)

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def constrained_dim(self) -> int:
        return self.span.shape[1]

    def embed(self, xi) -> np.ndarray:
        """Block-anti-diagonal embedding [[0, xi^T], [-J xi, 0]].

        Accepts leading batch axes.  Raises if xi violates the variant
        constraint beyond tolerance.
        """
        xi = np.asarray(xi)
        if xi.shape[-2:] != (self.n, self.n):
            raise ValueError(f"expected {self.n} x {self.n} xi, got {xi.shape[-2:]}")
        violation = self.constraint_violation(xi)
        scale = max(float(np.max(np.abs(xi))), 1.0)
        if violation > 1e-8 * scale:
            raise ValueError(
                f"xi violates the {self.variant} constraint by {violation:.3e}"
            )
        return self.embed_unchecked(xi)

    def embed_unchecked(self, xi) -> np.ndarray:
        xi = np.asarray(xi)
        n = self.n
        shape = xi.shape[:-2] + (2 * n, 2 * n)
        out = np.zeros(shape, dtype=xi.dtype)
        J = self.form.diag_J
        out[..., :n, n:] = np.swapaxes(xi, -1, -2)
        out[..., n:, :n] = -J[:, None] * xi
        return out

    def xi_of(self, X) -> np.ndarray:
        """Read xi back from (the p-part of) a Lie-algebra element.

        Averages the two block readings, which agree exactly on p.
        """
        X = np.asarray(X)
        n = self.n
        J = self.form.diag_J
        upper = np.swapaxes(X[..., :n, n:], -1, -2)
        lower = -J[:, None] * X[..., n:, :n]
        return 0.5 * (upper + lower)

    def p_part(self, X) -> np.ndarray:
        """Component of X anti-commuting with the block involution."""
        X = np.asarray(X)
        rho = self.form.rho
        return 0.5 * (X - rho[:, None] * X * rho[None, :])

    def constrain(self, xi) -> np.ndarray:
        """Euclidean-orthogonal projection onto the constrained xi-space."""
        xi = np.asarray(xi)
        flat = xi.reshape(xi.shape[:-2] + (self.n * self.n,))
        out = flat @ self.constraint_proj.T
        return out.reshape(xi.shape)

    def constraint_violation(self, xi) -> float:
        xi = np.asarray(xi)
        return float(np.max(np.abs(xi - self.constrain(xi))))

    def trace_pairings(self, xi) -> np.ndarray:
        """tr(embed(xi) a_i) for each i; all zero on the constrained space."""
        X = self.embed_unchecked(np.asarray(xi))
        return np.einsum("...kl,ilk->...i", X, self.basis)

    def xi_from_connection(self, K) -> np.ndarray:
        """Recover xi from the n connection coefficients K_i = [a_i, embed(xi)].

        K has shape (..., n, 2n, 2n).  Returns the canonical minimum-norm
        constrained xi (unique in the semisimple case; the channel ad-kernel
        component is dropped).
        """
        K = np.asarray(K)
        d = self.dim
        if K.shape[-3:] != (self.n, d, d):
            raise ValueError("expected stacked coefficients of shape (n, 2n, 2n)")
        flat = K.reshape(K.shape[:-3] + (self.n * d * d,))
        coords = flat @ self.ad_pinv.T
        xi_flat = coords @ self.span.T
        return xi_flat.reshape(K.shape[:-3] + (self.n, self.n))

    def canonicalize(self, xi) -> np.ndarray:
        """Map xi to the canonical representative with the same ad-image."""
        K = commutators(self.basis, self.embed_unchecked(self.constrain(xi)))
        return self.xi_from_connection(K)


def commutators(basis: np.ndarray, X) -> np.ndarray:
    """[a_i, X] for every generator, stacked on a new axis before the matrix ones."""
    X = np.asarray(X)
    left = np.einsum("ikl,...lm->...ikm", basis, X)
    right = np.einsum("...kl,ilm->...ikm", X, basis)
    return left - right


def make_basis(n: int, variant: str = "semisimple", p: int | None = None) -> CartanBasis:
    """Construct the chosen maximal abelian subspace and its derived data.

    Semisimple requires n >= 3; channel additionally 1 <= p <= n - 2.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if variant == "semisimple":
        if p is not None:
            raise ValueError("p only applies to the channel variant")
        gens = _semisimple_generators(n)
        p_eff = n
    elif variant == "channel":
        if p is None or not 1 <= p <= n - 2:
            raise ValueError(f"channel variant needs 1 <= p <= {n - 2}, got {p}")
        gens = _channel_generators(n, p)
        p_eff = p
    else:
        raise ValueError(f"unknown variant {variant!r}")

    # Joint commutator matrix over the full xi-space; its row space (in
    # xi-coordinates) is the solution slice, its null space the invisible
    # directions (which always include the generators themselves).
    d = 2 * n
    cols = []
    for c in range(n * n):
        xi = np.zeros(n * n)
        xi[c] = 1.0
        cols.append(commutators(gens, _embed_raw(xi.reshape(n, n), n)).reshape(-1))
    ad_full = np.stack(cols, axis=1)  # (n * d * d, n^2)
    _, s, vt = np.linalg.svd(ad_full, full_matrices=True)
    rank = int(np.sum(s > 1e-10 * s[0]))
    if rank != n * n - n:
        raise RuntimeError(
            f"unexpected ad-kernel dimension {n * n - rank} for {variant}"
        )
    span = vt[:rank].T.copy()  # (n^2, k) orthonormal basis of the slice
    proj = span @ span.T
    ad_pinv = np.linalg.pinv(ad_full @ span, rcond=1e-12)

    return CartanBasis(
        n=n,
        variant=variant,
        p=None if variant == "semisimple" else p_eff,
        basis=gens,
        constraint_proj=proj,
        span=span,
        ad_pinv=ad_pinv,
    )


@dataclass(frozen=True)
class PPotential:
    """A single constrained value xi together with its Cartan data."""

    basis: CartanBasis
    xi: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        if xi.shape != (self.basis.n, self.basis.n):
            raise ValueError("xi has the wrong shape for this basis")
        violation = self.basis.constraint_violation(xi)
        if violation > 1e-8 * max(float(np.max(np.abs(xi))), 1.0):
            raise ValueError(f"xi violates the variant constraint by {violation:.3e}")
        object.__setattr__(self, "xi", xi)

    @property
    def embedded(self) -> np.ndarray:
        return self.basis.embed_unchecked(self.xi)
