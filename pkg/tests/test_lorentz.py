import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coneflats.errors import DegenerateLine
from coneflats.lorentz import (
    IsotropicLine,
    QuadraticForm,
    group_residual,
    inner,
    line_projector,
    random_isotropic_line,
    span_margin,
    split_normalize,
    split_normalize_strict,
)


@pytest.fixture
def form():
    return QuadraticForm(3)


def unit(form, k):
    v = np.zeros(form.dim)
    v[k] = 1.0
    return v


class TestForm:
    def test_signs(self, form):
        assert form.dim == 6
        assert list(form.diag_I) == [1, 1, 1, 1, 1, -1]
        assert list(form.diag_J) == [1, 1, -1]
        assert list(form.rho) == [1, 1, 1, -1, -1, -1]
        assert form.t0_index == 5

    def test_rho_squares_to_identity(self, form):
        assert np.array_equal(form.rho * form.rho, np.ones(form.dim))

    def test_j_is_restriction_of_i(self, form):
        assert np.array_equal(form.diag_J, form.diag_I[form.n:])


class TestInner:
    def test_first_basis_vector(self, form):
        assert inner(unit(form, 0), unit(form, 0), form) == 1.0

    def test_timelike_direction(self, form):
        assert inner(unit(form, 5), unit(form, 5), form) == -1.0

    def test_null_vector(self, form):
        v = np.zeros(form.dim)
        v[0] = 1.0
        v[-1] = 1.0
        assert inner(v, v, form) == 0.0

    def test_dimension_mismatch(self, form):
        with pytest.raises(ValueError):
            inner(np.ones(4), np.ones(6), form)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_bilinear_symmetric(self, seed):
        form = QuadraticForm(3)
        rng = np.random.default_rng(seed)
        x, y, z = rng.normal(size=(3, form.dim))
        a, b = rng.normal(size=2)
        left = inner(a * x + b * y, z, form)
        assert abs(left - (a * inner(x, z, form) + b * inner(y, z, form))) < 1e-12
        assert abs(inner(x, y, form) - inner(y, x, form)) < 1e-12


class TestGroupResidual:
    def test_identity(self, form):
        assert group_residual(np.eye(form.dim), form) == 0.0

    def test_stretched_diagonal(self, form):
        M = np.eye(form.dim)
        M[0, 0] = 2.0
        assert group_residual(M, form) == pytest.approx(3.0)

    def test_plane_rotation(self, form):
        t = 0.7
        M = np.eye(form.dim)
        M[0, 0] = M[1, 1] = np.cos(t)
        M[0, 1] = np.sin(t)
        M[1, 0] = -np.sin(t)
        assert group_residual(M, form) < 1e-15

    def test_closure_under_products(self, form):
        rng = np.random.default_rng(3)
        def rotation(i, j, t):
            M = np.eye(form.dim)
            M[i, i] = M[j, j] = np.cos(t)
            M[i, j] = np.sin(t)
            M[j, i] = -np.sin(t)
            return M
        def boost(i, t):
            M = np.eye(form.dim)
            M[i, i] = M[-1, -1] = np.cosh(t)
            M[i, -1] = M[-1, i] = np.sinh(t)
            return M
        for _ in range(20):
            M = np.eye(form.dim)
            for _ in range(6):
                if rng.uniform() < 0.5:
                    i, j = rng.choice(form.dim - 1, size=2, replace=False)
                    M = M @ rotation(i, j, rng.uniform(-1, 1))
                else:
                    M = M @ boost(rng.integers(0, form.dim - 1), rng.uniform(-1, 1))
            assert group_residual(M, form) < 1e-12

    def test_batched(self, form):
        Ms = np.stack([np.eye(form.dim), 2 * np.eye(form.dim)])
        res = group_residual(Ms, form)
        assert res.shape == (2,)
        assert res[0] == 0.0 and res[1] > 0


class TestIsotropicLine:
    def test_real_line_roundtrip(self):
        rng = np.random.default_rng(0)
        line = random_isotropic_line(3, "real", rng)
        assert line.flavor == "real"
        form = line.form
        assert abs(inner(line.v, line.v, form)) < 1e-9

    def test_split_line(self):
        rng = np.random.default_rng(1)
        line = random_isotropic_line(3, "split", rng)
        assert line.flavor == "split"
        assert np.max(np.abs(line.v[:3].imag)) == 0.0
        assert np.max(np.abs(line.v[3:].real)) == 0.0

    def test_non_isotropic_rejected(self):
        with pytest.raises(ValueError):
            IsotropicLine(np.ones(6), "real")

    def test_degenerate_rejected(self):
        # W = 0 makes rho(L) = L
        z = np.array([1.0, 0.0, 1.0])
        with pytest.raises(DegenerateLine):
            IsotropicLine.from_real(np.zeros(3), z)

    def test_flavor_pattern_enforced(self):
        v = np.array([1.0, 0, 0, 1.0j, 0, 1.0])  # mixed pattern
        with pytest.raises(ValueError):
            IsotropicLine(v, "real")


class TestLineProjector:
    @pytest.fixture
    def line(self):
        return random_isotropic_line(3, "real", np.random.default_rng(5))

    def test_idempotent(self, line, form):
        pi, pi_rho = line_projector(line, form)
        assert np.max(np.abs(pi @ pi - pi)) < 1e-12
        assert np.max(np.abs(pi_rho @ pi_rho - pi_rho)) < 1e-12

    def test_image(self, line, form):
        pi, _ = line_projector(line, form)
        assert np.max(np.abs(pi @ line.v - line.v)) < 1e-12

    def test_rho_conjugation_exact(self, line, form):
        pi, pi_rho = line_projector(line, form)
        conj = form.rho[:, None] * pi * form.rho[None, :]
        assert np.array_equal(conj, pi_rho)

    def test_completeness(self, line, form):
        pi, pi_rho = line_projector(line, form)
        pi_perp = np.eye(form.dim) - pi - pi_rho
        assert np.max(np.abs(pi + pi_rho + pi_perp - np.eye(form.dim))) < 1e-15
        assert np.max(np.abs(pi_perp @ line.v)) < 1e-12
        assert np.max(np.abs(pi_perp @ (form.rho * line.v))) < 1e-12
        # the complementary projector is itself idempotent
        assert np.max(np.abs(pi_perp @ pi_perp - pi_perp)) < 1e-12

    def test_kernel_contains_rho_perp(self, line, form):
        pi, _ = line_projector(line, form)
        rng = np.random.default_rng(11)
        rv = form.rho * line.v
        for _ in range(5):
            w = rng.normal(size=form.dim)
            w = w - inner(w, rv, form) / inner(line.v, rv, form) * line.v
            # w is now orthogonal to rho v, i.e. in (rho L)^perp
            assert abs(inner(w, rv, form)) < 1e-9
            assert np.max(np.abs(pi @ w)) < 1e-9


class TestSplitNormalize:
    def test_real_flavor_norms(self):
        line = random_isotropic_line(3, "real", np.random.default_rng(7))
        W, Z = split_normalize_strict(line.v, 3)
        J = np.array([1.0, 1.0, -1.0])
        assert W @ W == pytest.approx(2.0, abs=1e-12)
        assert np.sum(J * Z * Z).real == pytest.approx(-2.0, abs=1e-12)
        assert np.max(np.abs(Z.imag)) < 1e-12

    def test_split_flavor_norms(self):
        line = random_isotropic_line(3, "split", np.random.default_rng(8))
        W, Z = split_normalize_strict(line.v, 3)
        assert W @ W == pytest.approx(2.0, abs=1e-12)
        assert np.max(np.abs(Z.real)) < 1e-12

    def test_phase_gauge(self):
        line = random_isotropic_line(3, "real", np.random.default_rng(9))
        W0, Z0 = split_normalize_strict(line.v, 3)
        W1, Z1 = split_normalize_strict(np.exp(0.37j) * line.v, 3)
        assert np.max(np.abs(W0 - W1)) < 1e-12
        assert np.max(np.abs(Z0 - Z1)) < 1e-12

    def test_sign_gauge_deterministic(self):
        line = random_isotropic_line(3, "real", np.random.default_rng(10))
        W, _ = split_normalize_strict(-line.v, 3)
        W2, _ = split_normalize_strict(line.v, 3)
        assert np.max(np.abs(W - W2)) < 1e-12
        lead = W[np.argmax(np.abs(W) > 1e-6)]
        assert lead > 0

    def test_degenerate_flagged(self):
        z = np.array([1.0, 0.0, 1.0])
        y = np.concatenate([np.zeros(3), z]).astype(complex)
        _, _, ok = split_normalize(y, 3)
        assert not bool(np.all(ok))
        with pytest.raises(DegenerateLine):
            split_normalize_strict(y, 3)

    def test_margin_matches_pairing(self, form):
        line = random_isotropic_line(3, "real", np.random.default_rng(12))
        margin = float(span_margin(line.v, 3))
        pairing = abs(inner(line.v, form.rho * line.v, form))
        scale = float(np.sum(np.abs(line.v) ** 2))
        assert margin == pytest.approx(pairing / scale, rel=1e-9)
