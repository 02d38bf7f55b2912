import json
import math

import numpy as np
import pytest

from weylsym.diag import (
    SweepConfig,
    TailDeficitWarning,
    angular_integral,
    box_momentum_tail_norm_sq,
    catalan_limit_value,
    default_n_levels,
    hs_norm_sq_symbol,
    l2_distance_with_tail,
    offdiag_block_norm_sq,
    run_sweep,
)
from weylsym.limits import ClassicalRegion, indicator
from weylsym.scale import PhaseGrid, SemiclassicalScale
from weylsym.truncate import (
    OperatorMatrix,
    box_momentum_matrix,
    box_multiplication_matrix,
    matrix_linear_power,
)
from weylsym.weyl import projection_symbol_field, symbol_oscillator_projection


def identity_matrix(N):
    return OperatorMatrix(entries=np.eye(N, dtype=complex), basis=None)


class TestHsNorm:
    def test_identity_projection(self):
        for N in (1, 7, 64):
            hbar = 1.0 / N
            assert hs_norm_sq_symbol(identity_matrix(N), hbar) == pytest.approx(
                2 * math.pi * hbar * N, rel=1e-14
            )

    def test_zero_matrix(self):
        z = OperatorMatrix(entries=np.zeros((5, 5), dtype=complex), basis=None)
        assert hs_norm_sq_symbol(z, 0.3) == 0.0

    def test_box_momentum_approaches_limit(self):
        N, mu, L = 256, 1.0, 1.0
        hbar = mu / N
        val = hs_norm_sq_symbol(box_momentum_matrix(N, L, hbar), hbar)
        limit = math.pi**3 * mu**3 / (6 * L**2)
        assert abs(val - limit) / limit < 0.05

    def test_tridiag_exact_identity(self):
        mu, L = 1.0, 1.3
        for N in (2, 17, 301):
            hbar = mu / N
            val = hs_norm_sq_symbol(box_multiplication_matrix(N, L), hbar)
            assert val == pytest.approx(math.pi * hbar * (N - 1) / L, rel=1e-12)


class TestOffdiagBlock:
    def test_diagonal_matrix_has_no_coupling(self):
        m = OperatorMatrix(entries=np.diag(np.arange(1.0, 7.0)).astype(complex), basis=None)
        assert offdiag_block_norm_sq(m, 3, 0.5) == 0.0

    def test_requires_padding(self):
        m = identity_matrix(4)
        with pytest.raises(ValueError):
            offdiag_block_norm_sq(m, 4, 0.5)

    def test_momentum_block_scales_as_inverse_N(self):
        # rank-one block for n = 1: exactly pi hbar^2 N = pi mu^2 / N
        mu = 1.0
        vals = {}
        for N in (64, 128, 256):
            scale = SemiclassicalScale.from_mu(N, mu)
            padded = matrix_linear_power(0.0, 1.0, 1, scale, N + 1)
            vals[N] = offdiag_block_norm_sq(padded, N, scale.hbar)
            assert vals[N] == pytest.approx(math.pi * scale.hbar**2 * N, rel=1e-12)
        assert vals[128] / vals[64] == pytest.approx(0.5, abs=1e-12)

    def test_box_momentum_tail_halves(self):
        mu, L = 1.0, 1.0
        prev = None
        for N in (128, 256):
            B = box_momentum_tail_norm_sq(N, L, mu / N)
            if prev is not None:
                assert B / prev < 0.75
            prev = B


class TestDistanceWithTail:
    def grid(self, L):
        return PhaseGrid(-1.5 * L, 1.5 * L, -3.0, 3.0, 200, 200)

    def test_field_equal_target_is_small(self):
        # field sampled from the target itself, matrix norm matched to the
        # windowed mass: distance collapses to rounding
        from weylsym.scale import SymbolField

        g = PhaseGrid(-2.0, 2.0, -2.0, 2.0, 128, 128)
        target = lambda x, p: np.maximum(0.0, 1.0 - (x**2 + p**2))  # support r <= 1
        fld = SymbolField.sample(target, g)
        hbar = 0.25
        mass = float(np.sum(fld.values**2)) * g.dx * g.dp
        amp = math.sqrt(mass / (2 * math.pi * hbar))
        m = OperatorMatrix(entries=np.array([[amp]], dtype=complex), basis=None)
        d = l2_distance_with_tail(fld, target, m, hbar)
        assert d == pytest.approx(0.0, abs=1e-12)

    def test_distance_to_rectangle_decreases(self):
        mu, L = 1.0, math.sqrt(math.pi / 2.0)
        region = ClassicalRegion.rectangle(mu, L)
        target = lambda x, p: np.asarray(indicator(region, x, p), dtype=float)
        g = PhaseGrid(-1.5 * L, 1.5 * L, -3.0, 3.0, 400, 400)
        d = {}
        for N in (20, 80):
            hbar = mu / N
            fld = projection_symbol_field(N, hbar, L, g)
            d[N] = l2_distance_with_tail(fld, target, identity_matrix(N), hbar)
        assert d[80] < d[20]

    def test_target_support_must_fit(self):
        mu, L = 1.0, 1.0
        g = PhaseGrid(-0.9 * L, 0.9 * L, -2.0, 2.0, 64, 64)  # cuts the rectangle
        region = ClassicalRegion.rectangle(mu, L)
        target = lambda x, p: np.asarray(indicator(region, x, p), dtype=float)
        fld = projection_symbol_field(4, mu / 4, L, g)
        with pytest.raises(ValueError, match="target support exceeds window"):
            l2_distance_with_tail(fld, target, identity_matrix(4), mu / 4)

    def test_tail_deficit_flagged(self):
        # a field holding more mass than the matrix norm allows
        g = PhaseGrid(-1.0, 1.0, -1.0, 1.0, 32, 32)
        from weylsym.scale import SymbolField

        fld = SymbolField.sample(lambda x, p: np.ones_like(x * p), g)
        target = lambda x, p: np.zeros(np.broadcast(x, p).shape)
        tiny = OperatorMatrix(entries=np.eye(2, dtype=complex) * 1e-3, basis=None)
        with pytest.warns(TailDeficitWarning):
            l2_distance_with_tail(fld, target, tiny, 1e-3)


class TestCatalanAndAngular:
    def test_catalan_base_case(self):
        for mu in (0.5, 1.0, 2.0):
            assert catalan_limit_value(0, 3.0, -2.0, mu) == pytest.approx(2 * math.pi * mu)

    def test_catalan_momentum_n1(self):
        assert catalan_limit_value(1, 0.0, 1.0, 1.0) == pytest.approx(math.pi, rel=1e-14)

    def test_catalan_n2_mixed(self):
        # 2 pi mu^3 ((a^2+b^2)/2)^2 C_2 at a=b=1, mu=1: 2 pi * 1 * 2 = 4 pi
        assert catalan_limit_value(2, 1.0, 1.0, 1.0) == pytest.approx(4 * math.pi, rel=1e-14)

    def test_angular_base(self):
        assert angular_integral(0, 5.0, 5.0) == pytest.approx(2 * math.pi)

    def test_angular_n1(self):
        assert angular_integral(1, 1.0, 0.0) == pytest.approx(math.pi, rel=1e-14)

    @pytest.mark.parametrize("n,a,b", [(1, 1.0, 0.0), (2, 0.3, 1.1), (3, 2.0, 1.0), (4, -1.0, 2.5)])
    def test_angular_matches_trapezoid(self, n, a, b):
        ts = np.linspace(0.0, 2 * math.pi, 2001)
        f = (a * np.cos(ts) + b * np.sin(ts)) ** (2 * n)
        want = float(np.trapezoid(f, ts))
        assert angular_integral(n, a, b) == pytest.approx(want, rel=1e-9)


class TestOscillatorParitySpot:
    @pytest.mark.parametrize("N", [4, 5, 6, 7])
    def test_origin_value_tight(self, N):
        hbar = 1.0 / N
        got = symbol_oscillator_projection(N, hbar, 0.0, 0.0)
        assert abs(got - (1 + (-1) ** (N + 1))) <= 1e-6


class TestConditionC1Bounded:
    def test_norms_bounded_along_sweeps(self):
        mu, L = 1.0, 1.0
        seqs = {"tridiag": [], "momentum": [], "power2": []}
        for N in (16, 32, 64, 128):
            hbar = mu / N
            seqs["tridiag"].append(hs_norm_sq_symbol(box_multiplication_matrix(N, L), hbar))
            seqs["momentum"].append(hs_norm_sq_symbol(box_momentum_matrix(N, L, hbar), hbar))
            scale = SemiclassicalScale.from_mu(N, mu)
            seqs["power2"].append(hs_norm_sq_symbol(matrix_linear_power(0.0, 1.0, 2, scale, N), hbar))
        for name, vals in seqs.items():
            assert max(vals) / min(vals) < 3.0, name


class TestParsevalConsistency:
    def test_figure_configuration(self):
        N, mu = 40, 1.0
        L = math.sqrt(math.pi / 2.0)
        hbar = mu / N
        g = PhaseGrid(-1.5 * L, 1.5 * L, -3.0, 3.0, 500, 500)
        fld = projection_symbol_field(N, hbar, L, g)
        windowed = float(np.sum(fld.values**2)) * g.dx * g.dp
        total = hs_norm_sq_symbol(identity_matrix(N), hbar)
        tail = total - windowed
        assert tail >= 0
        assert windowed + tail == pytest.approx(total, rel=1e-12)
        assert windowed == pytest.approx(total, rel=0.01)  # window holds 99%


class TestSweeps:
    def test_unknown_experiment(self):
        with pytest.raises(ValueError, match="unknown experiment"):
            run_sweep(SweepConfig(experiment="no-such", n_levels=(4, 8)))

    def test_empty_n_list(self):
        with pytest.raises(ValueError, match="nonempty"):
            SweepConfig(experiment="osc-catalan", n_levels=())

    def test_non_increasing_n_list(self):
        with pytest.raises(ValueError, match="increasing"):
            SweepConfig(experiment="osc-catalan", n_levels=(8, 8))

    def test_budget_guard(self):
        cfg = SweepConfig(
            experiment="box-projection-l2",
            n_levels=(10, 20, 40, 20000),
            grid_shape=(20000, 20000),
        )
        with pytest.raises(ValueError, match="resource guard"):
            run_sweep(cfg)

    def test_box_projection_small(self):
        cfg = SweepConfig(
            experiment="box-projection-l2",
            n_levels=(5, 10, 20),
            mu=1.0,
            L=math.sqrt(math.pi / 2.0),
            grid_shape=(240, 240),
        )
        rep = run_sweep(cfg)
        assert rep.experiment == "box-projection-l2"
        vals = rep.values("distance_sq")
        assert len(vals) == 3
        assert vals[2] < vals[0]
        names = [v.name for v in rep.verdicts]
        assert "distance-decreasing" in names and "final-below-threshold" in names

    def test_tridiag_sweep_passes(self):
        rep = run_sweep(SweepConfig(experiment="box-tridiag-norm", n_levels=(16, 64, 256)))
        assert rep.passed

    def test_origin_parity_sweep(self):
        rep = run_sweep(SweepConfig(experiment="osc-origin-parity", n_levels=(4, 5, 6, 7)))
        assert rep.passed

    def test_default_n_levels_known(self):
        assert default_n_levels("box-bulk-sup") == (50, 100, 200, 400)
        with pytest.raises(ValueError):
            default_n_levels("nope")

    def test_report_serialization(self, tmp_path):
        rep = run_sweep(SweepConfig(experiment="box-tridiag-norm", n_levels=(8, 16)))
        jpath = tmp_path / "r.json"
        cpath = tmp_path / "r.csv"
        rep.to_json(jpath)
        rep.to_csv(cpath)
        payload = json.loads(jpath.read_text())
        assert payload["experiment"] == "box-tridiag-norm"
        assert {"N", "hbar", "metric", "value"} <= set(payload["rows"][0])
        assert {"name", "passed", "detail"} <= set(payload["verdicts"][0])
        lines = cpath.read_text().strip().splitlines()
        assert lines[0] == "N,hbar,metric,value"
        assert len(lines) == 1 + len(payload["rows"])
