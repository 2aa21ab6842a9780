"""Flat lifts into the light-cone, projection to the conformal sphere, and
finite-difference curvature certificates.

A frame family evaluated at lambda = 1 supplies an adapted frame
(e_1..e_n, u_1..u_n); with m = g_2^(-1) c for a constant null c, the flat
lift is F = sum_j m_j u_j and its coordinate tangents are

    dF/dx_i = eps_i m_i e_i                (multiplicity-one generators)
    dF/dx_j = (m_{n-1} - m_n) e_j          (nilpotent channel directions),

so the induced metric coefficients are |m_i| resp. |m_{n-1} - m_n| and the
curvature normals come out in closed form as

    v_i = -eps_i u_i / m_i,                v_rep = -(u_{n-1} + u_n)/(m_{n-1} - m_n),

the latter isotropic and shared by all channel directions.  These satisfy
the reconstruction identity F = -sum_j v_j/(v_j, v_j) exactly in the
multiplicity-one case.  Every closed-form quantity here is paired with an
independent finite-difference route; agreement gates scale as 25 h^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMetric, StructureError
from .frames import ExtendedFrame, split_blocks
from .grids import GridBox, central_diff, dilate_mask, interior_slices, masked_max
from .lorentz import QuadraticForm, inner, require_real

# lift coefficients below this magnitude make the curvature normal blow up
COEFF_TOL = 1e-6
PROJECTION_TOL = 1e-12
BLOCK_TOL = 1e-9


@dataclass(frozen=True)
class ImmersionGrid:
    """Per-node lift, sphere point, adapted frame and curvature data."""

    variant: str
    p: int | None
    box: GridBox
    c: np.ndarray
    F: np.ndarray = field(repr=False)         # (*steps, 2n)
    f: np.ndarray = field(repr=False)         # (*steps, 2n)
    u: np.ndarray = field(repr=False)         # (*steps,) log|(F, t0)|
    tangents: np.ndarray = field(repr=False)  # (*steps, n, 2n), rows e_i
    normals: np.ndarray = field(repr=False)   # (*steps, n, 2n), rows u_i
    q: np.ndarray = field(repr=False)         # (*steps, n)
    h: np.ndarray = field(repr=False)         # (*steps, n) FD metric coefficients
    v: np.ndarray = field(repr=False)         # (*steps, n, 2n) closed-form normals
    eps: np.ndarray = field(repr=False)       # (*steps, n) signs of (v_i, v_i)
    n_abs: np.ndarray = field(repr=False)     # (*steps, n) |(v_i, v_i)|^(1/2)
    mask: np.ndarray = field(repr=False)      # (*steps,) unusable nodes

    @property
    def n(self) -> int:
        return self.q.shape[-1]

    @property
    def form(self) -> QuadraticForm:
        return QuadraticForm(self.n)

    @property
    def masked_points(self) -> int:
        return int(np.count_nonzero(self.mask))

    def stencil_mask(self, margin: int = 1) -> np.ndarray:
        return dilate_mask(self.mask, self.box.ndim, repeats=margin)


def flat_lift(frame_at_one, g2, c) -> tuple[np.ndarray, np.ndarray]:
    """Lift F = Phi_1 (0; g_2^(-1) c) and its coefficients q = g_2^(-1) c.

    frame_at_one: (..., 2n, 2n) frame values at lambda = 1; g2: (..., n, n)
    normal block of Phi_0; c: constant null vector of the normal form J.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    form = QuadraticForm(n)
    cJc = float(np.sum(form.diag_J * c * c))
    if abs(cJc) > 1e-10 * max(float(c @ c), 1.0) or not np.any(c):
        raise ValueError("c must be a nonzero null vector of the normal form")
    q = np.linalg.solve(np.asarray(g2), np.broadcast_to(c, g2.shape[:-2] + (n,))[..., None])[..., 0]
    normals = np.swapaxes(np.asarray(frame_at_one)[..., :, n:], -1, -2)
    F = np.einsum("...j,...jk->...k", q, normals)
    return F, q


def project_to_sphere(F):
    """Sphere point f = -F/(F, t0) - t0 and conformal factor u = log |(F, t0)|.

    The formula for f is invariant under F -> -F, so no explicit sign fix is
    needed; nodes with (F, t0) ~ 0 are masked (the excluded tangent-parallel
    configuration).  Returns (f, u, mask).
    """
    F = np.asarray(F)
    n = F.shape[-1] // 2
    form = QuadraticForm(n)
    phi = inner(F, np.broadcast_to(form.t0, F.shape), form)
    bad = np.abs(phi) < PROJECTION_TOL
    safe = np.where(bad, 1.0, phi)
    f = -F / safe[..., None]
    f[..., form.t0_index] -= 1.0
    u = np.log(np.abs(safe))
    return f, u, bad


def build_immersion(frame: ExtendedFrame, box: GridBox, c,
                    *, coeff_tol: float = COEFF_TOL) -> ImmersionGrid:
    """Assemble the full immersion grid from a frame family and a null vector."""
    basis = frame.basis
    n = basis.n
    form = basis.form
    eps_J = form.diag_J

    values1, mask1 = frame.evaluate_grid(box, 1.0)
    values0, mask0 = frame.evaluate_grid(box, 0.0)
    values1 = require_real(values1, tol=1e-8, what="frame at lambda = 1")
    values0 = require_real(values0, tol=1e-8, what="frame at lambda = 0")
    _, g2, leak = split_blocks(values0, n)
    if leak > BLOCK_TOL:
        raise StructureError(f"Phi_0 off-diagonal leakage {leak:.3e}")

    F, q = flat_lift(values1, g2, c)
    tangents = np.swapaxes(values1[..., :, :n], -1, -2)
    normals = np.swapaxes(values1[..., :, n:], -1, -2)
    f, u, proj_bad = project_to_sphere(F)

    h = np.empty(box.steps + (n,))
    for i in range(n):
        dFi = central_diff(F, axis=i, h=box.spacing[i])
        sq = inner(dFi, dFi, form)
        h[..., i] = np.sqrt(np.maximum(sq, 0.0))

    mask = mask1 | mask0 | proj_bad
    v = np.empty(box.steps + (n, 2 * n))
    if basis.variant == "semisimple":
        coeff_bad = np.any(np.abs(q) < coeff_tol, axis=-1)
        safe_q = np.where(np.abs(q) < coeff_tol, 1.0, q)
        v[:] = -(eps_J / safe_q)[..., :, None] * normals
        mask = mask | coeff_bad
        p = None
    else:
        p = basis.p
        tau = q[..., n - 2] - q[..., n - 1]
        coeff_bad = np.any(np.abs(q[..., :p]) < coeff_tol, axis=-1) | (
            np.abs(tau) < coeff_tol
        )
        safe_q = np.where(np.abs(q[..., :p]) < coeff_tol, 1.0, q[..., :p])
        v[..., :p, :] = -(1.0 / safe_q)[..., :, None] * normals[..., :p, :]
        safe_tau = np.where(np.abs(tau) < coeff_tol, 1.0, tau)
        v_rep = -(normals[..., n - 2, :] + normals[..., n - 1, :]) / safe_tau[..., None]
        v[..., p:, :] = v_rep[..., None, :]
        mask = mask | coeff_bad

    vv = inner(v, v, form)
    eps = np.sign(vv)
    n_abs = np.sqrt(np.abs(vv))

    return ImmersionGrid(
        variant=basis.variant,
        p=p,
        box=box,
        c=np.asarray(c, dtype=float),
        F=F,
        f=f,
        u=u,
        tangents=tangents,
        normals=normals,
        q=q,
        h=h,
        v=v,
        eps=eps,
        n_abs=n_abs,
        mask=mask,
    )


@dataclass(frozen=True)
class FundamentalData:
    """Metric coefficients, second-fundamental coefficients and the two
    curvature-normal routes with their agreement residual."""

    h: np.ndarray
    sff: np.ndarray          # (*steps, n, n): components of v_i on the normal frame
    v_closed: np.ndarray
    v_fd: np.ndarray
    agreement: float
    orthogonality: float
    masked_points: int


def fundamental_data(imm: ImmersionGrid) -> FundamentalData:
    """Curvature normals by the frame route and by finite differences.

    The FD route projects d e_i / dx_i to the normal bundle and divides by
    the tangential coefficient (dF/dx_i, e_i); it never reads the closed
    form, so agreement with it certifies the curvature-normal formulas.
    """
    box = imm.box
    n = imm.n
    form = imm.form
    J = form.diag_J

    v_fd = np.empty_like(imm.v)
    I_amb = form.diag_I
    for i in range(n):
        de = central_diff(imm.tangents[..., i, :], axis=i, h=box.spacing[i])
        dF = central_diff(imm.F, axis=i, h=box.spacing[i])
        coeff = inner(dF, imm.tangents[..., i, :], form)
        comp = np.einsum("b,k,...k,...bk->...b", J, I_amb, de, imm.normals)
        normal_part = np.einsum("...b,...bk->...k", comp, imm.normals)
        safe = np.where(np.abs(coeff) < COEFF_TOL, 1.0, coeff)
        v_fd[..., i, :] = normal_part / safe[..., None]

    mask = imm.stencil_mask()
    agreement = masked_max(imm.v - v_fd, mask, ndim=box.ndim, margin=1)

    ortho = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            pair = inner(imm.v[..., i, :], imm.v[..., j, :], form)
            ortho = max(ortho, masked_max(pair, mask, ndim=box.ndim, margin=1))

    sff = np.einsum("b,k,...ik,...bk->...ib", J, I_amb, imm.v, imm.normals)
    return FundamentalData(
        h=imm.h,
        sff=sff,
        v_closed=imm.v,
        v_fd=v_fd,
        agreement=agreement,
        orthogonality=ortho,
        masked_points=imm.masked_points,
    )


@dataclass(frozen=True)
class CurvatureReport:
    reconstruction: float
    orthogonality: float
    eps_pattern_ok: bool
    masked_points: int


def curvature_identities(imm: ImmersionGrid, *, isotropy_guard: float = 1e-6) -> CurvatureReport:
    """Reconstruction of the lift from curvature normals plus orthogonality.

    Only meaningful in the multiplicity-one case: an isotropic curvature
    normal in that pipeline signals accidental degeneracy and raises.
    """
    if imm.variant != "semisimple":
        raise StructureError("reconstruction identities need multiplicity one")
    form = imm.form
    box = imm.box
    mask = imm.stencil_mask(0)

    vv = inner(imm.v, imm.v, form)
    min_vv = np.min(np.abs(vv)[~mask]) if not mask.all() else np.inf
    if min_vv < isotropy_guard:
        raise StructureError(
            f"near-isotropic curvature normal (|(v,v)| = {min_vv:.3e}) in a "
            "multiplicity-one pipeline"
        )
    recon = imm.F + np.einsum("...ik,...i->...k", imm.v, 1.0 / vv)
    reconstruction = masked_max(recon, mask, ndim=box.ndim, margin=1)

    ortho = 0.0
    for i in range(imm.n):
        for j in range(i + 1, imm.n):
            pair = inner(imm.v[..., i, :], imm.v[..., j, :], form)
            ortho = max(ortho, masked_max(pair, mask, ndim=box.ndim, margin=1))

    negatives = np.sum(imm.eps < 0, axis=-1)
    eps_ok = bool(np.all(negatives[~mask] == 1)) if not mask.all() else False
    return CurvatureReport(reconstruction, ortho, eps_ok, imm.masked_points)


def metric_flatness_residual(h_field, box: GridBox) -> float:
    """Max finite-difference Riemann component of the metric sum h_i^2 dx_i^2.

    Christoffel symbols of the diagonal metric are formed from central
    differences of g_i = h_i^2, then differentiated again; the reduction
    runs over nodes two layers inside the boundary so every stencil stays
    second order.
    """
    h_field = np.asarray(h_field, dtype=float)
    if np.any(h_field <= 0):
        raise DegenerateMetric("metric coefficients must be positive")
    n = h_field.shape[-1]
    g = h_field * h_field
    dg = np.stack([central_diff(g, axis=a, h=box.spacing[a]) for a in range(n)], axis=0)
    # Gamma[k, i, j] with the diagonal-metric closed form
    gamma = np.zeros((n, n, n) + g.shape[:-1])
    for k in range(n):
        inv = 0.5 / g[..., k]
        for i in range(n):
            for j in range(n):
                term = 0.0
                if k == j:
                    term = term + dg[i][..., j]
                if k == i:
                    term = term + dg[j][..., i]
                if i == j:
                    term = term - dg[k][..., i]
                gamma[k, i, j] = inv * np.asarray(term, dtype=float)

    worst = 0.0
    core = interior_slices(box.ndim, margin=2)
    for l in range(n):
        dgam = [central_diff(gamma[l], axis=2 + a, h=box.spacing[a]) for a in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(n):
                    quad = np.zeros(g.shape[:-1])
                    for m in range(n):
                        quad += gamma[l, i, m] * gamma[m, j, k]
                        quad -= gamma[l, j, m] * gamma[m, i, k]
                    comp = dgam[i][j, k] - dgam[j][i, k] + quad
                    worst = max(worst, float(np.max(np.abs(comp[core]))))
    return worst


def sine_of_angle(a, b, *, floor: float = COEFF_TOL):
    """Sine of the Euclidean angle between vector fields, via rejection.

    Computed as |a - proj_b(a)| / |a|, which stays at rounding level for
    truly parallel vectors (the sqrt(1 - cos^2) form loses half the digits).
    Returns (sine, ok) with ok False where either argument is too short.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    ok = (na > floor) & (nb > floor)
    safe_nb2 = np.where(ok, nb * nb, 1.0)
    coeff = np.sum(a * b, axis=-1) / safe_nb2
    rej = a - coeff[..., None] * b
    sine = np.linalg.norm(rej, axis=-1) / np.where(ok, na, 1.0)
    return np.where(ok, sine, 1.0), ok


@dataclass(frozen=True)
class CombescureResult:
    parallelism: float
    flag: np.ndarray          # per-point orientation-reversal flag
    flag_defined: np.ndarray  # where both products are away from zero
    masked_points: int


def combescure_compare(imm_a: ImmersionGrid, imm_b: ImmersionGrid) -> CombescureResult:
    """Sine of the angle between corresponding coordinate tangents, plus the
    orientation flag from the sign of prod_i q_i on each lift."""
    if imm_a.box != imm_b.box:
        raise ValueError("lifts must share one grid")
    box = imm_a.box
    n = imm_a.n
    worst = 0.0
    mask = dilate_mask(imm_a.mask | imm_b.mask, box.ndim)
    for i in range(n):
        ta = central_diff(imm_a.F, axis=i, h=box.spacing[i])
        tb = central_diff(imm_b.F, axis=i, h=box.spacing[i])
        sine, ok = sine_of_angle(ta, tb)
        worst = max(worst, masked_max(sine, mask | ~ok, ndim=box.ndim, margin=1))

    prod_a = np.prod(imm_a.q, axis=-1)
    prod_b = np.prod(imm_b.q, axis=-1)
    defined = (np.abs(prod_a) > 1e-10) & (np.abs(prod_b) > 1e-10)
    flag = (prod_a * prod_b < 0) & defined
    return CombescureResult(worst, flag, defined, int(np.count_nonzero(mask)))


@dataclass(frozen=True)
class ChannelData:
    """Repeated-curvature data of a channel immersion."""

    p: int
    y: np.ndarray            # lift coefficients g_2^(-1) c
    v_iso: np.ndarray        # (*steps, 2n) the repeated isotropic normal
    multiplicities: tuple


def channel_immersion(frame: ExtendedFrame, box: GridBox, c):
    """Immersion grid plus channel data for a frame on a channel basis."""
    if frame.basis.variant != "channel":
        raise ValueError("channel_immersion needs a channel-basis frame")
    imm = build_immersion(frame, box, c)
    p = frame.basis.p
    data = ChannelData(
        p=p,
        y=imm.q,
        v_iso=imm.v[..., p, :],
        multiplicities=(1,) * p + (imm.n - p,),
    )
    return imm, data


def sphere_normal_projector(imm: ImmersionGrid):
    """Pointwise projector onto the normal bundle of f inside the sphere.

    Realized by subtracting components along the (orthonormalized) FD
    tangents of f, along f itself and along t0.  Returns a closure
    w -> pi(w) operating on (*steps, 2n) fields, plus a mask of nodes where
    a tangent could not be normalized.
    """
    box = imm.box
    form = imm.form
    taus = []
    bad = np.zeros(box.steps, dtype=bool)
    for i in range(imm.n):
        t = central_diff(imm.f, axis=i, h=box.spacing[i])
        norm = np.sqrt(np.maximum(inner(t, t, form), 0.0))
        bad |= norm < COEFF_TOL
        taus.append(t / np.where(norm < COEFF_TOL, 1.0, norm)[..., None])

    t0 = form.t0

    def project(w):
        out = np.asarray(w, dtype=float).copy()
        for t in taus:
            out -= inner(out, t, form)[..., None] * t
        out -= inner(out, imm.f, form)[..., None] * imm.f
        out += inner(out, np.broadcast_to(t0, out.shape), form)[..., None] * t0
        return out

    return project, bad


def channel_leaf_residual(imm: ImmersionGrid, data: ChannelData) -> float:
    """Constancy defect of f + vR/(vR, vR) along the repeated directions.

    vR is the Euclidean curvature normal of f for the repeated distribution,
    obtained from the lift normal via vS = -(F, t0) pi_{N_f} v and
    vR = vS - f.  Its leaf spheres are centred at the returned field, so the
    finite-difference derivative along each channel axis gauges the claim.
    """
    form = imm.form
    box = imm.box
    project, bad = sphere_normal_projector(imm)
    phi = inner(imm.F, np.broadcast_to(form.t0, imm.F.shape), form)
    vS = -phi[..., None] * project(data.v_iso)
    vR = vS - imm.f
    vv = inner(vR, vR, form)
    bad = bad | (np.abs(vv) < COEFF_TOL)
    center = imm.f + vR / np.where(np.abs(vv) < COEFF_TOL, 1.0, vv)[..., None]

    mask = dilate_mask(imm.mask | bad, box.ndim)
    worst = 0.0
    for j in range(data.p, imm.n):
        d = central_diff(center, axis=j, h=box.spacing[j])
        worst = max(worst, masked_max(d, mask, ndim=box.ndim, margin=1))
    return worst


def sphere_tangent_alignment(imm: ImmersionGrid) -> float:
    """Sine of the angle between FD tangents of f and their predicted
    transforms -e_i + (e_i, t0) F/(F, t0); certifies that F and f share
    curvature directions."""
    form = imm.form
    box = imm.box
    phi = inner(imm.F, np.broadcast_to(form.t0, imm.F.shape), form)
    mask = dilate_mask(imm.mask, box.ndim)
    worst = 0.0
    for i in range(imm.n):
        t = central_diff(imm.f, axis=i, h=box.spacing[i])
        e = imm.tangents[..., i, :]
        pred = -e + (inner(e, np.broadcast_to(form.t0, e.shape), form) / phi)[..., None] * imm.F
        sine, ok = sine_of_angle(t, pred)
        worst = max(worst, masked_max(sine, mask | ~ok, ndim=box.ndim, margin=1))
    return worst


def sphere_curvature_relation(imm: ImmersionGrid) -> float:
    """Residual of the curvature-normal comparison between f and its lift:
    the FD curvature normal of f (as a sphere map) against -(F, t0) pi_{N_f} v_i."""
    form = imm.form
    box = imm.box
    project, bad = sphere_normal_projector(imm)
    phi = inner(imm.F, np.broadcast_to(form.t0, imm.F.shape), form)
    mask = dilate_mask(imm.mask | bad, box.ndim, repeats=2)
    worst = 0.0
    for i in range(imm.n):
        t = central_diff(imm.f, axis=i, h=box.spacing[i])
        speed = np.sqrt(np.maximum(inner(t, t, form), 0.0))
        ok = speed > COEFF_TOL
        tau = t / np.where(ok, speed, 1.0)[..., None]
        dtau = central_diff(tau, axis=i, h=box.spacing[i])
        v_fd = project(dtau) / np.where(ok, speed, 1.0)[..., None]
        v_pred = -phi[..., None] * project(imm.v[..., i, :])
        worst = max(
            worst, masked_max(v_fd - v_pred, mask | ~ok, ndim=box.ndim, margin=2)
        )
    return worst
