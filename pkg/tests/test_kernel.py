import math

import numpy as np
import pytest

from weylsym.basis import EigenBasis, Model, box_wavefunctions, gauss_legendre
from weylsym.kernel import (
    EvalMode,
    KernelEval,
    dirichlet_kernel,
    projection_kernel,
    sine_kernel,
    truncated_operator_kernel,
)
from weylsym.truncate import box_momentum_matrix, box_multiplication_matrix


def box_eval(N, L, mode=EvalMode.CLOSED_FORM, hbar=1.0):
    return KernelEval(
        basis=EigenBasis(model=Model.BOX, hbar=hbar, box_half_width=L),
        n_levels=N,
        mode=mode,
    )


class TestDirichletKernel:
    def test_peak_value(self):
        assert dirichlet_kernel(5, 0.0) == pytest.approx(11.0, rel=1e-15)

    def test_periodicity(self):
        assert dirichlet_kernel(3, 2 * math.pi) == pytest.approx(7.0, rel=1e-9)

    def test_matches_cosine_sum(self):
        x = 0.73
        want = 1.0 + 2.0 * sum(math.cos(k * x) for k in range(1, 5))
        assert dirichlet_kernel(4, x) == pytest.approx(want, abs=1e-13)

    def test_even_and_bounded(self):
        xs = np.linspace(-8.0, 8.0, 1000)
        for N in (1, 4, 9):
            vals = dirichlet_kernel(N, xs)
            np.testing.assert_allclose(vals, dirichlet_kernel(N, -xs), atol=1e-10)
            assert np.max(np.abs(vals)) <= 2 * N + 1 + 1e-9

    def test_degenerate_rank(self):
        assert dirichlet_kernel(0, 0.3) == pytest.approx(1.0, rel=1e-15)


class TestSineKernel:
    def test_removable_singularity(self):
        assert sine_kernel(0.0) == 1.0

    def test_at_pi(self):
        assert sine_kernel(math.pi) == pytest.approx(2.0 / math.pi, rel=1e-15)

    def test_matches_integral_definition(self):
        # S(x) = int_{-1/2}^{1/2} cos(k x) dk
        x = 0.37
        ks, ws = gauss_legendre(50, -0.5, 0.5)
        want = float(np.sum(ws * np.cos(ks * x)))
        assert sine_kernel(x) == pytest.approx(want, abs=1e-12)

    def test_taylor_branch_is_smooth(self):
        eps = 1e-4
        below = sine_kernel(eps * (1 - 1e-9))
        above = sine_kernel(eps * (1 + 1e-9))
        assert below == pytest.approx(above, abs=1e-14)

    def test_envelope_bounds(self):
        xs = np.linspace(-60.0, 60.0, 3000)
        vals = np.asarray(sine_kernel(xs))
        assert np.max(np.abs(vals)) <= 1.0 + 1e-12
        far = np.abs(xs) >= 2.0
        assert np.all(np.abs(vals[far]) <= 2.0 / np.abs(xs[far]) + 1e-12)


class TestProjectionKernel:
    def test_support(self):
        ke = box_eval(5, 1.0)
        assert projection_kernel(ke, 1.2, 0.3) == 0.0
        assert projection_kernel(ke, 0.3, -1.0) == 0.0

    def test_closed_form_equals_sum(self):
        for mode_pair in [(7, 1.0, 0.2, -0.4), (3, 1.7, -0.9, 1.1), (12, 0.6, 0.11, 0.13)]:
            N, L, x, y = mode_pair
            closed = projection_kernel(box_eval(N, L, EvalMode.CLOSED_FORM), x, y)
            summed = projection_kernel(box_eval(N, L, EvalMode.SUM), x, y)
            assert closed == pytest.approx(summed, abs=1e-12)

    def test_diag_trace(self):
        # midpoint rule over 4000 cells of K(x, x) equals the rank
        N, L = 7, 1.0
        ke = box_eval(N, L)
        n = 4000
        dx = 2 * L / n
        xs = -L + (np.arange(n) + 0.5) * dx
        tr = float(np.sum(projection_kernel(ke, xs, xs)) * dx)
        assert tr == pytest.approx(N, abs=1e-6)

    def test_oscillator_closed_form_refused(self):
        with pytest.raises(ValueError, match="closed form unavailable"):
            KernelEval(
                basis=EigenBasis(model=Model.OSCILLATOR, hbar=1.0),
                n_levels=3,
                mode=EvalMode.CLOSED_FORM,
            )

    def test_oscillator_sum_mode(self):
        ke = KernelEval(basis=EigenBasis(model=Model.OSCILLATOR, hbar=0.5), n_levels=4)
        # symmetric kernel
        assert projection_kernel(ke, 0.3, -0.2) == pytest.approx(
            projection_kernel(ke, -0.2, 0.3), rel=1e-13
        )

    def test_reproducing_property(self):
        # int K(x, z) K(z, y) dz = K(x, y)
        L = 1.0
        zs, ws = gauss_legendre(200, -L, L)
        rng = np.random.default_rng(4)
        for N in (2, 5, 10):
            ke = box_eval(N, L)
            for _ in range(5):
                x, y = rng.uniform(-0.95 * L, 0.95 * L, size=2)
                lhs = float(np.sum(ws * projection_kernel(ke, x, zs) * projection_kernel(ke, zs, y)))
                assert lhs == pytest.approx(projection_kernel(ke, x, y), abs=1e-8)


class TestTruncatedOperatorKernel:
    def test_identity_matrix_reduces_to_projection(self):
        N, L = 6, 1.0
        basis = EigenBasis(model=Model.BOX, hbar=1.0, box_half_width=L)
        eye = np.eye(N, dtype=complex)
        ke = box_eval(N, L)
        for (x, y) in [(0.1, 0.7), (-0.3, -0.3), (0.99, -0.2)]:
            got = truncated_operator_kernel(eye, basis, x, y)
            assert got.imag == 0.0
            assert got.real == pytest.approx(projection_kernel(ke, x, y), abs=1e-13)

    def test_tridiagonal_kernel_identity(self):
        # kernel of the truncated multiplication operator equals
        # -(1/(2 sqrt(L))) sum_k [u_k(x) u_{k+1}(y) + u_{k+1}(x) u_k(y)]
        N, L = 5, 1.0
        basis = EigenBasis(model=Model.BOX, hbar=1.0, box_half_width=L)
        mat = box_multiplication_matrix(N, L)
        x, y = 0.1, 0.3
        got = truncated_operator_kernel(mat, basis, x, y)
        ux = box_wavefunctions(N, L, np.array([x]))[:, 0]
        uy = box_wavefunctions(N, L, np.array([y]))[:, 0]
        want = -sum(ux[k] * uy[k + 1] + ux[k + 1] * uy[k] for k in range(N - 1)) / (2 * math.sqrt(L))
        assert got.real == pytest.approx(want, abs=1e-13)
        assert got.imag == pytest.approx(0.0, abs=1e-15)

    def test_hermitian_matrix_gives_hermitian_kernel(self):
        N, L, hbar = 6, 1.3, 0.25
        basis = EigenBasis(model=Model.BOX, hbar=hbar, box_half_width=L)
        mat = box_momentum_matrix(N, L, hbar)
        rng = np.random.default_rng(9)
        for _ in range(20):
            x, y = rng.uniform(-L, L, size=2)
            kxy = truncated_operator_kernel(mat, basis, x, y)
            kyx = truncated_operator_kernel(mat, basis, y, x)
            assert kxy == pytest.approx(np.conj(kyx), abs=1e-13)

    def test_rejects_nonsquare(self):
        basis = EigenBasis(model=Model.BOX, hbar=1.0, box_half_width=1.0)
        with pytest.raises(ValueError):
            truncated_operator_kernel(np.zeros((2, 3)), basis, 0.0, 0.0)
