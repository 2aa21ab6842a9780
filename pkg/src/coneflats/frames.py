"""Extended flat frames: closed-form vacuum cores, dressing chains, and ODE
integration of arbitrary sampled solutions.

A frame here is the lambda-family Phi_lambda(x) normalized to the identity at
the origin, solving dPhi = Phi theta_lambda on the right.  The vacuum family
is the explicit exponential exp(lambda sum_i x_i a_i), evaluated in closed
form: per-axis rotation/boost blocks for the semisimple generators, and an
exact quadratic polynomial for the nilpotent channel directions (whose cross
products all vanish, so the exponential factorizes).

Dressing factors are kept symbolically as a chain applied on the left; the
chain is evaluated pointwise via

    Phi^(k)_lambda(x) = p_k(lambda) Phi^(k-1)_lambda(x) q_k(x, lambda)^(-1)

where q_k(x, .) is the simple element at the transported line
Phi^(k-1)_{alpha_k}(x)^(-1) L_k, and q_k^(-1) has a closed 2x2-block formula
in the normalized span (W; Z).  Chain elements only need to expose
``alpha``, ``line`` and ``evaluate(lam)``, so this module stays independent
of the dressing machinery.
"""

from __future__ import annotations

import numpy as np

from .cartan import CartanBasis
from .errors import IntegrationError, NumericalError, PoleError, StructureError
from .grids import GridBox, central_diff
from .lorentz import QuadraticForm, split_normalize

BLOCK_TOL = 1e-9


def _scalarize(lam):
    lam = complex(lam)
    if lam.imag == 0.0:
        return lam.real
    return lam


def vacuum_frame(basis: CartanBasis, x, lam) -> np.ndarray:
    """Closed-form exp(lambda sum_i x_i a_i); batched over leading axes of x.

    Semisimple axes give 2x2 rotation blocks in coordinates (i, n+i) for
    J_ii = +1 and the hyperbolic block for the time-like axis; channel axes
    beyond p contribute the exact polynomial I + N + N^2/2 of the nilpotent
    part.  The result is float for real lambda, complex otherwise.
    """
    lam = _scalarize(lam)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != basis.n:
        raise ValueError(f"expected coordinates of length {basis.n}")
    n = basis.n
    t = lam * x
    dtype = complex if isinstance(lam, complex) else float

    p_rot = basis.p if basis.variant == "channel" else n
    out = np.zeros(x.shape[:-1] + (2 * n, 2 * n), dtype=dtype)
    idx = np.arange(2 * n)
    out[..., idx, idx] = 1.0

    for i in range(p_rot):
        if basis.variant == "semisimple" and i == n - 1:
            ch, sh = np.cosh(t[..., i]), np.sinh(t[..., i])
            out[..., i, i] = ch
            out[..., i, n + i] = -sh
            out[..., n + i, i] = -sh
            out[..., n + i, n + i] = ch
        else:
            c, s = np.cos(t[..., i]), np.sin(t[..., i])
            out[..., i, i] = c
            out[..., i, n + i] = s
            out[..., n + i, i] = -s
            out[..., n + i, n + i] = c

    if basis.variant == "channel":
        N = np.einsum("...j,jkl->...kl", t[..., p_rot:].astype(dtype),
                      basis.basis[p_rot:].astype(dtype))
        poly = np.eye(2 * n, dtype=dtype) + N + 0.5 * (N @ N)
        out = out @ poly
    return out


class ExtendedFrame:
    """A normalized extended frame: closed-form core plus a dressing chain.

    ``core`` is None for the vacuum or a sampled solution grid whose frame is
    obtained by integration (see integrate_frame); in the latter case the
    family is only evaluable on that grid.  Grid evaluations are cached per
    (box, chain level, lambda).
    """

    def __init__(self, basis: CartanBasis, chain=(), core=None):
        self.basis = basis
        self.chain = tuple(chain)
        self.core = core
        self._grid_cache: dict = {}
        self._line_cache: dict = {}

    @property
    def form(self) -> QuadraticForm:
        return self.basis.form

    def with_element(self, elem) -> "ExtendedFrame":
        if getattr(elem, "line", None) is not None and elem.line.n != self.basis.n:
            raise ValueError("element dimension does not match the frame")
        return ExtendedFrame(self.basis, self.chain + (elem,), core=self.core)

    def _check_poles(self, lam, level):
        lam = complex(lam)
        for elem in self.chain[:level]:
            a = complex(elem.alpha)
            if min(abs(lam - a), abs(lam + a)) < 1e-12 * max(1.0, abs(a)):
                raise PoleError(f"lambda = {lam} is a pole of a chain element")

    # -- single-point evaluation -------------------------------------------

    def evaluate(self, x, lam, level: int | None = None) -> np.ndarray:
        """Phi_lambda(x) at a single coordinate point."""
        level = len(self.chain) if level is None else level
        self._check_poles(lam, level)
        x = np.asarray(x, dtype=float)
        if level == 0:
            return self._core_point(x, lam)
        elem = self.chain[level - 1]
        prev = self.evaluate(x, lam, level - 1)
        prev_alpha = self.evaluate(x, elem.alpha, level - 1)
        y = np.linalg.solve(prev_alpha, elem.line.v.astype(complex))
        W, Z, ok = split_normalize(y, self.basis.n)
        if not bool(np.all(ok)):
            from .errors import DegenerateLine

            raise DegenerateLine(f"dressing degenerates at x = {x.tolist()}")
        q_inv = inverse_simple_from_span(W, Z, elem.alpha, _scalarize(lam), self.basis.n)
        out = elem.evaluate(lam) @ prev @ q_inv
        if complex(lam).imag == 0.0 and elem.line.flavor == "real" and not np.iscomplexobj(prev):
            out = out.real
        return out

    def _core_point(self, x, lam):
        if self.core is None:
            return vacuum_frame(self.basis, x, lam)
        values = self._core_grid(lam)
        box: GridBox = self.core.box
        idx = []
        for a, coord in zip(box.axes(), np.atleast_1d(x)):
            k = int(np.argmin(np.abs(a - coord)))
            if abs(a[k] - coord) > 1e-9:
                raise ValueError("integrated cores evaluate on grid nodes only")
            idx.append(k)
        return values[tuple(idx)]

    # -- grid evaluation ----------------------------------------------------

    def evaluate_grid(self, box: GridBox, lam, level: int | None = None):
        """Phi_lambda on every node of a box: (values, degeneracy mask)."""
        level = len(self.chain) if level is None else level
        self._check_poles(lam, level)
        key = (box, level, complex(lam))
        if key in self._grid_cache:
            return self._grid_cache[key]
        if level == 0:
            if self.core is None:
                values = vacuum_frame(self.basis, box.mesh(), lam)
            else:
                if box != self.core.box:
                    raise ValueError("integrated cores evaluate on their own grid")
                values = self._core_grid(lam)
            mask = np.zeros(box.steps, dtype=bool)
        else:
            elem = self.chain[level - 1]
            prev, mask_prev = self.evaluate_grid(box, lam, level - 1)
            W, Z, mask_line = self.transported_grid(box, level - 1, elem)
            q_inv = inverse_simple_from_span(W, Z, elem.alpha, _scalarize(lam), self.basis.n)
            p = elem.evaluate(lam)
            values = np.einsum("kl,...lm,...mo->...ko", p, prev.astype(q_inv.dtype), q_inv)
            mask = mask_prev | mask_line
            if complex(lam).imag == 0.0:
                # real lambda of a reality-respecting family: strip dust
                dust = np.max(np.abs(values.imag)) if np.iscomplexobj(values) else 0.0
                if dust < 1e-8:
                    values = np.ascontiguousarray(values.real)
        # setdefault keeps concurrent insertions consistent (worst case a
        # duplicate computation, never a torn entry)
        return self._grid_cache.setdefault(key, (values, mask))

    def transported_grid(self, box: GridBox, level: int, elem):
        """Normalized transported spans (W, Z, degeneracy mask) for one element."""
        key = (box, level, complex(elem.alpha), id(elem))
        if key in self._line_cache:
            return self._line_cache[key]
        prev_alpha, mask_prev = self.evaluate_grid(box, elem.alpha, level)
        v = elem.line.v.astype(complex)
        y = np.linalg.solve(prev_alpha.astype(complex), np.broadcast_to(
            v, prev_alpha.shape[:-2] + (2 * self.basis.n,)
        )[..., None])[..., 0]
        W, Z, ok = split_normalize(y, self.basis.n)
        mask = mask_prev | ~ok
        return self._line_cache.setdefault(key, (W, Z, mask))

    def _core_grid(self, lam):
        key = ("core", complex(lam))
        if key not in self._grid_cache:
            return self._grid_cache.setdefault(key, integrate_frame(self.core, lam))
        return self._grid_cache[key]

    def grid_mask(self, box: GridBox) -> np.ndarray:
        _, mask = self.evaluate_grid(box, 1.0)
        return mask


def inverse_simple_from_span(W, Z, alpha, lam, n: int) -> np.ndarray:
    """Closed block form of p_{alpha, <(W;Z)>}(lambda)^(-1).

    With |W|^2 = -Z^T J Z = 2 the inverse factor is

        [[ I + a2 W W^T,  -al W Z^T J ],
         [ al Z W^T,       I - a2 Z Z^T J ]],

    a2 = alpha^2/(lam^2 - alpha^2), al = alpha lam/(lam^2 - alpha^2).
    Batched over the leading axes of W, Z.
    """
    alpha = complex(alpha)
    lam = complex(lam)
    denom = lam * lam - alpha * alpha
    if abs(denom) < 1e-14 * max(1.0, abs(alpha) ** 2):
        raise PoleError(f"lambda = {lam} sits at a pole (+/- {alpha})")
    a2 = alpha * alpha / denom
    al = alpha * lam / denom

    W = np.asarray(W)
    Z = np.asarray(Z)
    J = QuadraticForm(n).diag_J
    ZJ = Z * J

    real_ok = (
        lam.imag == 0.0
        and alpha.imag == 0.0
        and not np.iscomplexobj(Z)
    )
    dtype = float if real_ok else complex
    out = np.zeros(W.shape[:-1] + (2 * n, 2 * n), dtype=dtype)
    idx = np.arange(2 * n)
    out[..., idx, idx] = 1.0

    WW = np.einsum("...i,...j->...ij", W, W)
    WZJ = np.einsum("...i,...j->...ij", W, ZJ)
    ZW = np.einsum("...i,...j->...ij", Z, W)
    ZZJ = np.einsum("...i,...j->...ij", Z, ZJ)

    out[..., :n, :n] += np.asarray(a2 * WW, dtype=dtype)
    out[..., :n, n:] += np.asarray(-al * WZJ, dtype=dtype)
    out[..., n:, :n] += np.asarray(al * ZW, dtype=dtype)
    out[..., n:, n:] += np.asarray(-a2 * ZZJ, dtype=dtype)
    return out


# -- integration of sampled solutions ---------------------------------------


def _rk4_segment(phi, theta_at, s0, s1, substeps):
    """March dPhi/ds = Phi theta(s) from s0 to s1 with classical RK4."""
    step = (s1 - s0) / substeps
    s = s0
    for _ in range(substeps):
        k1 = phi @ theta_at(s)
        k2 = (phi + 0.5 * step * k1) @ theta_at(s + 0.5 * step)
        k3 = (phi + 0.5 * step * k2) @ theta_at(s + 0.5 * step)
        k4 = (phi + step * k3) @ theta_at(s + step)
        phi = phi + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s += step
    return phi


def integrate_frame(grid, lam, base=None, substeps: int = 4) -> np.ndarray:
    """Integrate dPhi = Phi theta_lambda over a solution grid.

    Marches along axis-ordered paths from the origin node with classical
    fourth-order steps, `substeps` per cell; the potential is interpolated
    linearly within each cell.  Returns frame values at every node.
    """
    basis: CartanBasis = grid.basis
    box: GridBox = grid.box
    n = basis.n
    lam = _scalarize(lam)
    dtype = complex if isinstance(lam, complex) else float
    gens = basis.basis.astype(dtype)
    X = basis.embed_unchecked(grid.xi).astype(dtype)

    origin = box.origin_index()
    values = np.full(box.steps + (2 * n, 2 * n), np.nan, dtype=dtype)
    start = np.eye(2 * n, dtype=dtype) if base is None else np.asarray(base, dtype=dtype)
    values[origin] = start

    spacing = box.spacing

    def theta_maker(axis, Xa, Xb, h_signed):
        # linear interpolation of the embedded potential across one cell
        def theta_at(s):
            w = s / h_signed
            Xi = (1.0 - w) * Xa + w * Xb
            return lam * gens[axis] + (gens[axis] @ Xi - Xi @ gens[axis])
        return theta_at

    # Fill axis by axis: after handling axis a, values are known on the
    # subgrid where axes > a sit at the origin index.
    for axis in range(n):
        h = spacing[axis]
        o = origin[axis]
        prefix = box.steps[:axis]
        fixed_tail = origin[axis + 1:]

        def cell(idx_prefix, i_from, i_to):
            src = idx_prefix + (i_from,) + fixed_tail
            dst = idx_prefix + (i_to,) + fixed_tail
            sgn = 1.0 if i_to > i_from else -1.0
            theta_at = theta_maker(axis, X[src], X[dst], sgn * h)
            values[dst] = _rk4_segment(values[src], theta_at, 0.0, sgn * h, substeps)

        for idx_prefix in np.ndindex(*prefix):
            for i in range(o + 1, box.steps[axis]):
                cell(idx_prefix, i - 1, i)
            for i in range(o - 1, -1, -1):
                cell(idx_prefix, i + 1, i)

    if not np.all(np.isfinite(values.view(float))):
        raise IntegrationError("frame integration produced non-finite values")
    return values


def integrated_frame(grid, base=None) -> ExtendedFrame:
    """ExtendedFrame whose core is a sampled solution grid."""
    frame = ExtendedFrame(grid.basis, core=grid)
    if base is not None:
        raise ValueError("non-identity bases are handled by integrate_frame directly")
    return frame


# -- frame diagnostics -------------------------------------------------------


def split_blocks(values, n: int):
    """Split (..., 2n, 2n) matrices into their diagonal blocks (g1, g2) and
    report the worst off-diagonal leakage."""
    values = np.asarray(values)
    g1 = values[..., :n, :n]
    g2 = values[..., n:, n:]
    leak = max(
        float(np.max(np.abs(values[..., :n, n:]))),
        float(np.max(np.abs(values[..., n:, :n]))),
    )
    return g1, g2, leak


def split_at_zero(frame: ExtendedFrame, x):
    """Blocks (g_1, g_2) of Phi_0(x); raises StructureError on block leakage.

    g_1 is orthogonal and g_2 preserves the normal form J whenever the frame
    satisfies the reality condition; both are returned as real matrices.
    """
    n = frame.basis.n
    values = frame.evaluate(x, 0.0)
    g1, g2, leak = split_blocks(values, n)
    if leak > BLOCK_TOL:
        raise StructureError(f"Phi_0 off-diagonal leakage {leak:.3e} exceeds {BLOCK_TOL}")
    if np.iscomplexobj(values):
        dust = max(float(np.max(np.abs(g1.imag))), float(np.max(np.abs(g2.imag))))
        if dust > BLOCK_TOL:
            raise NumericalError(f"Phi_0 blocks carry imaginary dust {dust:.3e}")
        g1, g2 = g1.real, g2.real
    return g1, g2


def log_derivative(evaluate, x, lam, step: float = 1e-5):
    """Phi^(-1) dPhi/dx_i by central differences around one point.

    `evaluate(x, lam)` must work on a stencil neighbourhood of x.  Returns a
    list of n matrices.
    """
    x = np.asarray(x, dtype=float)
    center = np.asarray(evaluate(x, lam))
    try:
        inv = np.linalg.inv(center)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("frame is singular at the requested point") from exc
    out = []
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = step
        plus = np.asarray(evaluate(x + e, lam))
        minus = np.asarray(evaluate(x - e, lam))
        out.append(inv @ (plus - minus) / (2.0 * step))
    return out


def log_derivative_grid(values, box: GridBox):
    """Phi^(-1) d_i Phi over a grid of frame values: (*steps, n, 2n, 2n).

    Central differences inside, one-sided second order on the faces.
    """
    values = np.asarray(values)
    n = box.ndim
    derivs = [central_diff(values, axis=a, h=box.spacing[a]) for a in range(n)]
    stacked = np.stack(derivs, axis=-3)
    try:
        return np.linalg.solve(values[..., None, :, :], stacked)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("singular frame value in a grid log-derivative") from exc
