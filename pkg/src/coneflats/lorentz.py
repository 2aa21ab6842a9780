"""Indefinite linear algebra on R^{2n-1,1} and its complexification.

The ambient form is the diagonal matrix diag(1, ..., 1, -1) on R^{2n},
paired *bilinearly* (no conjugation), so isotropy, orthogonality and group
membership extend verbatim to complex vectors and matrices.  The block
splitting R^n (+) R^{n-1,1} is recorded by the sign involution
rho = diag(+1 x n, -1 x n); the normal-space form J is the restriction of
the ambient form to the last n coordinates.

All numeric helpers broadcast over leading axes, so a "vector" argument of
shape (..., 2n) or a "matrix" argument of shape (..., 2n, 2n) is processed
pointwise over a grid in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLine, NumericalError

# |(v, rho v)| below this multiple of |v|^2 (Euclidean) counts as degenerate:
# the dressing construction blows up as rho(L) -> L, so fail loudly early.
DEGENERACY_RATIO = 1e-8

# Tolerated relative magnitude of rounding dust when a quantity is known to
# be exactly real / exactly patterned.
DUST_TOL = 1e-8


@dataclass(frozen=True)
class QuadraticForm:
    """Ambient quadratic-form data for half-dimension n (total dimension 2n)."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"half-dimension must be positive, got {self.n}")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def diag_I(self) -> np.ndarray:
        """Signs of the ambient form: (+1, ..., +1, -1)."""
        d = np.ones(self.dim)
        d[-1] = -1.0
        return d

    @property
    def diag_J(self) -> np.ndarray:
        """Signs of the normal-space form: restriction to the last n slots."""
        return self.diag_I[self.n:]

    @property
    def rho(self) -> np.ndarray:
        """Sign vector of the block involution (+1 on tangent, -1 on normal slots)."""
        d = np.ones(self.dim)
        d[self.n:] = -1.0
        return d

    @property
    def t0_index(self) -> int:
        """Index of the time-like anchor (last basis vector)."""
        return self.dim - 1

    @property
    def t0(self) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.t0_index] = 1.0
        return v


def inner(x, y, form: QuadraticForm):
    """Bilinear Lorentzian pairing x^T I y; symmetric, no conjugation.

    Broadcasts over leading axes and returns a scalar (or array of scalars).
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape[-1] != form.dim or y.shape[-1] != form.dim:
        raise ValueError(
            f"expected vectors of length {form.dim}, got {x.shape[-1]} and {y.shape[-1]}"
        )
    return np.sum(form.diag_I * x * y, axis=-1)


def normal_inner(a, b, form: QuadraticForm):
    """J-pairing a^T J b on the length-n normal factor."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] != form.n or b.shape[-1] != form.n:
        raise ValueError(f"expected length-{form.n} vectors on the normal factor")
    return np.sum(form.diag_J * a * b, axis=-1)


def group_residual(M, form: QuadraticForm):
    """Max-norm of M^T I M - I; zero iff M preserves the ambient form.

    Accepts a single 2n x 2n matrix or an array of them (leading axes).
    """
    M = np.asarray(M)
    if M.shape[-2:] != (form.dim, form.dim):
        raise ValueError(f"expected {form.dim} x {form.dim} matrices, got {M.shape[-2:]}")
    G = np.einsum("...ji,j,...jk->...ik", M, form.diag_I, M)
    G = G - np.diag(form.diag_I)
    return np.max(np.abs(G), axis=(-2, -1))


def _isotropy_defect(v, form):
    scale = np.sum(np.abs(v) ** 2, axis=-1)
    return np.abs(inner(v, v, form)), scale


@dataclass(frozen=True)
class IsotropicLine:
    """A span L = <v> of an isotropic vector, marked with its reality flavor.

    flavor "real": v has (numerically) all-real entries.
    flavor "split": the first n entries are real, the last n purely imaginary.
    Both flavors exclude lines with rho(L) = L, where the projector
    decomposition (and hence dressing) degenerates.
    """

    v: np.ndarray
    flavor: str

    def __post_init__(self):
        v = np.asarray(self.v, dtype=complex)
        if v.ndim != 1 or v.shape[0] % 2:
            raise ValueError("line spans must be vectors of even length 2n")
        object.__setattr__(self, "v", v)
        form = self.form
        defect, scale = _isotropy_defect(v, form)
        if scale == 0:
            raise ValueError("zero vector cannot span a line")
        if defect > 1e-9 * scale:
            raise ValueError(f"span is not isotropic: |(v,v)| = {defect:.3e}")
        pairing = abs(inner(v, form.rho * v, form))
        if pairing <= DEGENERACY_RATIO * scale:
            raise DegenerateLine(
                f"|(v, rho v)| = {pairing:.3e} below threshold; rho(L) ~ L"
            )
        n = form.n
        if self.flavor == "real":
            dust = np.max(np.abs(v.imag))
        elif self.flavor == "split":
            dust = max(np.max(np.abs(v[:n].imag)), np.max(np.abs(v[n:].real)))
        else:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if dust > 1e-9 * np.sqrt(scale):
            raise ValueError(f"entries do not match the {self.flavor!r} pattern")

    @property
    def n(self) -> int:
        return self.v.shape[0] // 2

    @property
    def form(self) -> QuadraticForm:
        return QuadraticForm(self.n)

    @classmethod
    def from_real(cls, w, z) -> "IsotropicLine":
        """Real line from tangent/normal halves (w in R^n, z in R^{n-1,1})."""
        return cls(np.concatenate([np.asarray(w, float), np.asarray(z, float)]), "real")

    @classmethod
    def from_split(cls, w, gamma) -> "IsotropicLine":
        """Split line <(w; i*gamma)> from real halves."""
        v = np.concatenate(
            [np.asarray(w, float).astype(complex), 1j * np.asarray(gamma, float)]
        )
        return cls(v, "split")


def random_isotropic_line(n: int, flavor: str, rng: np.random.Generator) -> IsotropicLine:
    """Draw a seeded isotropic line of the requested flavor.

    Real flavor: w random, z = (z', z_n) with z_n^2 = |z'|^2 + |w|^2.
    Split flavor: w random, gamma = (g', g_n) with |g'|^2 = |w|^2 + g_n^2,
    so that (w; i*gamma) is isotropic.
    """
    w = rng.uniform(-1.0, 1.0, size=n)
    while np.linalg.norm(w) < 0.3:
        w = rng.uniform(-1.0, 1.0, size=n)
    if flavor == "real":
        zp = rng.uniform(-1.0, 1.0, size=n - 1)
        zn = np.sqrt(zp @ zp + w @ w) * rng.choice([-1.0, 1.0])
        return IsotropicLine.from_real(w, np.concatenate([zp, [zn]]))
    if flavor == "split":
        gn = rng.uniform(-1.0, 1.0)
        gp = rng.uniform(-1.0, 1.0, size=n - 1)
        gp *= np.sqrt(w @ w + gn * gn) / np.linalg.norm(gp)
        return IsotropicLine.from_split(w, np.concatenate([gp, [gn]]))
    raise ValueError(f"unknown flavor {flavor!r}")


def line_projector(line: IsotropicLine, form: QuadraticForm):
    """Projector pair (pi_L, pi_rhoL) for an isotropic line L = <v>.

    pi_L projects onto L along (rho L)^perp:  pi_L x = ((x, rho v)/(v, rho v)) v,
    written matricially as  v v^T (rho I) / (v, rho v).  pi_rhoL is its
    conjugate rho pi_L rho.  Both are idempotent and sum (with the remaining
    eigenprojector) to the identity.
    """
    v = np.asarray(line.v, dtype=complex)
    if v.shape[-1] != form.dim:
        raise ValueError("line and form dimensions disagree")
    rv = form.rho * v
    denom = inner(v, rv, form)
    scale = np.sum(np.abs(v) ** 2)
    if abs(denom) <= DEGENERACY_RATIO * scale:
        raise DegenerateLine(f"|(v, rho v)| = {abs(denom):.3e}; rho(L) ~ L")
    w = form.diag_I * rv
    pi = np.outer(v, w) / denom
    pi_rho = form.rho[:, None] * pi * form.rho[None, :]
    return pi, pi_rho


def split_normalize(y, n: int, *, degeneracy_ratio: float = DEGENERACY_RATIO,
                    dust_tol: float = DUST_TOL):
    """Gauge a spanning vector of an isotropic line into the (W; Z) form.

    The returned representative satisfies |W|^2 = 2 (Euclidean) and
    Z^T J Z = -2, with W real, Z real for lines of real flavor and purely
    imaginary for split ones.  The overall sign is fixed by making the first
    entry of W of magnitude > 1e-6 positive.  Works on batched input
    (leading axes) and returns (W, Z, ok) where ok flags points at which the
    line is too close to the excluded locus rho(L) = L (equivalently
    |W| -> 0) or the phase gauge could not be applied cleanly.
    """
    y = np.asarray(y, dtype=complex)
    if y.shape[-1] != 2 * n:
        raise ValueError(f"expected vectors of length {2 * n}")
    y1 = y[..., :n]
    y2 = y[..., n:]
    scale2 = np.sum(np.abs(y) ** 2, axis=-1)

    # Phase gauge: rotate the span so the top block is real.  Anchored at the
    # largest |y1| component per point; any anchor works when the line is
    # genuinely gaugeable, and degenerate points are flagged instead.
    k = np.argmax(np.abs(y1), axis=-1)
    anchor = np.take_along_axis(y1, k[..., None], axis=-1)[..., 0]
    anchor_abs = np.abs(anchor)
    ok = anchor_abs > 1e-30
    phase = np.where(ok, anchor / np.where(anchor_abs == 0, 1.0, anchor_abs), 1.0)
    z1 = y1 * np.conj(phase)[..., None]
    z2 = y2 * np.conj(phase)[..., None]

    dust = np.max(np.abs(z1.imag), axis=-1)
    ok = ok & (dust <= dust_tol * np.sqrt(np.maximum(scale2, 1e-300)))

    W = z1.real
    normW2 = np.sum(W * W, axis=-1)
    # |(v, rho v)| = 2 |W|^2 for isotropic v in this gauge.
    ok = ok & (2.0 * normW2 > degeneracy_ratio * scale2)

    mu = np.sqrt(2.0 / np.where(normW2 == 0, 1.0, normW2))
    W = W * mu[..., None]
    Z = z2 * mu[..., None]

    # Z^T J Z = -|W|^2 is forced by isotropy; treat violations as degeneracy.
    diag_J = np.ones(n)
    diag_J[-1] = -1.0
    zjz = np.sum(diag_J * Z * Z, axis=-1)
    ok = ok & (np.abs(zjz + 2.0) < 1e-6)

    # Deterministic sign gauge.
    big = np.abs(W) > 1e-6
    first = np.argmax(big, axis=-1)
    lead = np.take_along_axis(W, first[..., None], axis=-1)[..., 0]
    sign = np.where(lead < 0, -1.0, 1.0)
    W = W * sign[..., None]
    Z = Z * sign[..., None]
    return W, Z, ok


def span_margin(y, n: int):
    """Degeneracy margin 2 |W_raw|^2 / |y|^2 of a line span (batched).

    This is |(v, rho v)| / |v|^2 for isotropic v; the dressing machinery is
    well-conditioned only where it stays clear of zero.
    """
    y = np.asarray(y, dtype=complex)
    y1 = y[..., :n]
    k = np.argmax(np.abs(y1), axis=-1)
    anchor = np.take_along_axis(y1, k[..., None], axis=-1)[..., 0]
    anchor_abs = np.abs(anchor)
    phase = np.where(anchor_abs > 0, anchor / np.where(anchor_abs == 0, 1.0, anchor_abs), 1.0)
    w = (y1 * np.conj(phase)[..., None]).real
    return 2.0 * np.sum(w * w, axis=-1) / np.sum(np.abs(y) ** 2, axis=-1)


def split_normalize_strict(y, n: int):
    """As split_normalize, for a single vector; raises DegenerateLine instead
    of flagging."""
    W, Z, ok = split_normalize(y, n)
    if not bool(np.all(ok)):
        raise DegenerateLine("line span cannot be normalized; rho(L) ~ L")
    return W, Z


def require_real(values, *, tol: float = 1e-9, what: str = "array"):
    """Strip an array known to be real, raising if rounding dust is large."""
    values = np.asarray(values)
    if not np.iscomplexobj(values):
        return values
    dust = np.max(np.abs(values.imag)) if values.size else 0.0
    scale = max(np.max(np.abs(values.real)) if values.size else 0.0, 1.0)
    if dust > tol * scale:
        raise NumericalError(f"{what} expected real, imaginary dust {dust:.3e}")
    return np.ascontiguousarray(values.real)
