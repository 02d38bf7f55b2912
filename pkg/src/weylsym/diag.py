"""Norm and convergence diagnostics for the semiclassical limits.

Absolute symbol norms always go through the trace identity (exact, no grid);
grids only enter distances to compactly supported targets, where the
outside-window symbol mass is restored through the tail trick.  A registry
of named experiments drives the N-sweeps behind the acceptance criteria.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .basis import EigenBasis, Model
from .kernel import EvalMode, KernelEval
from .limits import (
    ClassicalRegion,
    bulk_profile_box,
    bulk_sup_constant,
    edge_profile_p,
    edge_profile_x,
    indicator,
)
from .moyal import moyal_direct
from .scale import PhaseGrid, SemiclassicalScale, SymbolField, pairwise_sum
from .truncate import (
    OperatorMatrix,
    box_momentum_entry,
    box_multiplication_matrix,
    matrix_linear_power,
)
from .weyl import (
    projection_symbol_field,
    rescaled_kernel_f2,
    symbol_oscillator_projection,
    symbol_projection_box,
)

__all__ = [
    "TailDeficitWarning",
    "hs_norm_sq_symbol",
    "offdiag_block_norm_sq",
    "l2_distance_with_tail",
    "catalan_limit_value",
    "angular_integral",
    "box_momentum_tail_norm_sq",
    "SweepConfig",
    "SweepRow",
    "Verdict",
    "SweepReport",
    "EXPERIMENTS",
    "default_n_levels",
    "run_sweep",
]

# Largest N * nx * np a single sweep row may request.
_BUDGET = 2_000_000_000


class TailDeficitWarning(UserWarning):
    """Windowed mass exceeds the exact total norm by more than quadrature noise."""


def hs_norm_sq_symbol(matrix: OperatorMatrix, hbar: float) -> float:
    """Exact squared L2 norm of the symbol: 2 pi hbar sum |M_jk|^2."""
    return 2.0 * math.pi * hbar * pairwise_sum(np.abs(matrix.entries) ** 2)


def offdiag_block_norm_sq(padded: OperatorMatrix, N: int, hbar: float) -> float:
    """Squared symbol norm of the block coupling levels <= N to levels > N.

    `padded` must hold the observable on more than N levels; rows j > N,
    columns k <= N form the block whose norm is the decay condition on
    truncation error.
    """
    if padded.n <= N:
        raise ValueError(f"padded dimension {padded.n} must exceed N = {N}")
    block = padded.entries[N:, :N]
    return 2.0 * math.pi * hbar * pairwise_sum(np.abs(block) ** 2)


def l2_distance_with_tail(field: SymbolField, target, matrix: OperatorMatrix, hbar: float) -> float:
    """Global squared L2 distance from the sampled symbol to a compactly
    supported target: windowed distance plus the symbol mass outside the
    window, recovered exactly from the trace identity.

    `target` is a broadcastable callable (x, p) -> values, supported strictly
    inside the grid window (checked on the outermost cell ring).
    """
    g = field.grid
    x, p = g.meshgrid()
    tvals = np.broadcast_to(np.asarray(target(x, p), dtype=float), (g.nx, g.np))
    ring = np.zeros((g.nx, g.np), dtype=bool)
    ring[0, :] = ring[-1, :] = True
    ring[:, 0] = ring[:, -1] = True
    if np.any(tvals[ring] != 0.0):
        raise ValueError("target support exceeds window")

    cell = g.dx * g.dp
    windowed_dist = pairwise_sum((field.values - tvals) ** 2) * cell
    windowed_mass = pairwise_sum(field.values**2) * cell
    total = hs_norm_sq_symbol(matrix, hbar)
    tail = total - windowed_mass
    if tail < -1e-3 * total:
        warnings.warn(
            f"windowed mass {windowed_mass:g} exceeds the exact norm {total:g}; "
            "window or grid is inconsistent with the matrix",
            TailDeficitWarning,
        )
    return windowed_dist + max(tail, 0.0)


def catalan_limit_value(n: int, a: float, b: float, mu: float) -> float:
    """Limit of the squared symbol norm of truncated (a x + b p)^n:
    2 pi mu^(n+1) ((a^2 + b^2)/2)^n C_n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    catalan = math.comb(2 * n, n) // (n + 1)
    return 2.0 * math.pi * mu ** (n + 1) * ((a * a + b * b) / 2.0) ** n * catalan


def angular_integral(n: int, a: float, b: float) -> float:
    """int_0^{2 pi} (a cos t + b sin t)^{2n} dt = 2 pi (a^2+b^2)^n binom(2n, n) / 4^n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return 2.0 * math.pi * (a * a + b * b) ** n * math.comb(2 * n, n) / 4.0**n


def box_momentum_tail_norm_sq(N: int, L: float, hbar: float, j_factor: int = 64) -> float:
    """B(N): squared symbol norm of the momentum block coupling levels <= N
    to levels > N, with the j-sum truncated at j_factor * N (relative
    truncation error ~ 1 / (3 j_factor log N))."""
    if N < 1:
        raise ValueError("N must be >= 1")
    js = np.arange(N + 1, j_factor * N + 1, dtype=float)
    total = 0.0
    for k in range(1, N + 1):
        c = box_momentum_entry(js, float(k), L, hbar)
        total += float(np.sum(np.abs(c) ** 2))
    return 2.0 * math.pi * hbar * total


# --- sweeps -------------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    """One registered experiment plus its numeric knobs.

    Every field has an experiment-appropriate default except the N list,
    which must be nonempty and strictly increasing.
    """

    experiment: str
    n_levels: tuple[int, ...]
    mu: float = 1.0
    L: float = 1.0
    powers: tuple[int, ...] = (1, 2, 3)
    a: float = 0.0
    b: float = 1.0
    window: tuple[float, float, float, float] | None = None
    grid_shape: tuple[int, int] | None = None
    threshold: float | None = None

    def __post_init__(self) -> None:
        if not self.n_levels:
            raise ValueError("N list must be nonempty")
        if any(n2 <= n1 for n1, n2 in zip(self.n_levels, self.n_levels[1:])):
            raise ValueError("N list must be strictly increasing")
        if not self.mu > 0 or not self.L > 0:
            raise ValueError("mu and L must be positive")


@dataclass(frozen=True)
class SweepRow:
    N: int
    hbar: float
    metric: str
    value: float


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class SweepReport:
    experiment: str
    mu: float
    model: str
    observable: str
    rows: tuple[SweepRow, ...] = field(default_factory=tuple)
    verdicts: tuple[Verdict, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def values(self, metric: str) -> list[float]:
        return [r.value for r in self.rows if r.metric == metric]

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "mu": self.mu,
            "model": self.model,
            "observable": self.observable,
            "rows": [
                {"N": r.N, "hbar": r.hbar, "metric": r.metric, "value": r.value}
                for r in self.rows
            ],
            "verdicts": [
                {"name": v.name, "passed": v.passed, "detail": v.detail} for v in self.verdicts
            ],
        }

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True, indent=1)
            fh.write("\n")

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("N,hbar,metric,value\n")
            for r in self.rows:
                fh.write(f"{r.N},{r.hbar:.17g},{r.metric},{r.value:.17g}\n")


def _decrease_verdict(name: str, values: list[float]) -> Verdict:
    """Strict decrease across the last two steps; earlier wobble is reported
    in the detail string but not failed."""
    tail = values[-3:]
    ok = all(v2 < v1 for v1, v2 in zip(tail, tail[1:]))
    detail = " -> ".join(f"{v:.6g}" for v in values)
    return Verdict(name=name, passed=ok, detail=detail)


def _threshold_verdict(name: str, value: float, bound: float) -> Verdict:
    return Verdict(
        name=name, passed=value <= bound, detail=f"{value:.6g} vs bound {bound:.6g}"
    )


def _check_budget(config: SweepConfig, nx: int, npts: int) -> None:
    if max(config.n_levels) * nx * npts > _BUDGET:
        raise ValueError("resource guard exceeded (N * grid budget)")


def _chi_rectangle(mu: float, L: float):
    region = ClassicalRegion.rectangle(mu, L)
    return lambda x, p: np.asarray(indicator(region, x, p), dtype=float)


def _identity_matrix(N: int) -> OperatorMatrix:
    return OperatorMatrix(entries=np.eye(N, dtype=complex), basis=None)


def _sweep_box_projection_l2(config: SweepConfig) -> SweepReport:
    mu, L = config.mu, config.L
    window = config.window or (-1.5 * L, 1.5 * L, -3.0, 3.0)
    nx, npts = config.grid_shape or (800, 800)
    _check_budget(config, nx, npts)
    grid = PhaseGrid(window[0], window[1], window[2], window[3], nx, npts)
    target = _chi_rectangle(mu, L)
    rows = []
    for N in config.n_levels:
        hbar = mu / N
        fld = projection_symbol_field(N, hbar, L, grid)
        d2 = l2_distance_with_tail(fld, target, _identity_matrix(N), hbar)
        rows.append(SweepRow(N=N, hbar=hbar, metric="distance_sq", value=d2))
    vals = [r.value for r in rows]
    bound = config.threshold if config.threshold is not None else 0.35 * 2.0 * math.pi * mu
    verdicts = (
        _decrease_verdict("distance-decreasing", vals),
        _threshold_verdict("final-below-threshold", vals[-1], bound),
    )
    return SweepReport("box-projection-l2", mu, "box", "projection", tuple(rows), verdicts)


def _sweep_box_edge_x(config: SweepConfig) -> SweepReport:
    mu, L = config.mu, config.L
    us = np.linspace(0.0, 6.0, 121)
    p_list = (0.0, math.pi * mu / (4.0 * L))
    rows = []
    for N in config.n_levels:
        hbar = mu / N
        worst = 0.0
        for p0 in p_list:
            sym = symbol_projection_box(N, hbar, L, L - hbar * us, p0)
            prof = np.array([edge_profile_x(float(u), p0, mu, L) for u in us])
            worst = max(worst, float(np.max(np.abs(sym - prof))))
        rows.append(SweepRow(N=N, hbar=hbar, metric="max_abs_err", value=worst))
    vals = [r.value for r in rows]
    bound = config.threshold if config.threshold is not None else 0.05
    verdicts = (
        _decrease_verdict("error-decreasing", vals),
        _threshold_verdict("final-below-threshold", vals[-1], bound),
    )
    return SweepReport("box-edge-x", mu, "box", "projection", tuple(rows), verdicts)


def _sweep_box_edge_p(config: SweepConfig) -> SweepReport:
    mu, L = config.mu, config.L
    x_list = (0.0, 0.5 * L)
    v_list = (0.25, 0.5, 1.5)
    prof = {
        (x0, v): edge_profile_p(x0, v, mu, L, tol=1e-6) for x0 in x_list for v in v_list
    }
    rows = []
    for N in config.n_levels:
        hbar = mu / N
        worst = 0.0
        for x0 in x_list:
            for v in v_list:
                p0 = math.pi * mu / (2.0 * L) + hbar * math.pi * v / (2.0 * L)
                sym = symbol_projection_box(N, hbar, L, x0, p0)
                worst = max(worst, abs(sym - prof[(x0, v)]))
        rows.append(SweepRow(N=N, hbar=hbar, metric="max_abs_err", value=worst))
    vals = [r.value for r in rows]
    bound = config.threshold if config.threshold is not None else 0.05
    verdicts = (
        _decrease_verdict("error-decreasing", vals),
        _threshold_verdict("final-below-threshold", vals[-1], bound),
    )
    return SweepReport("box-edge-p", mu, "box", "projection", tuple(rows), verdicts)


def _sweep_box_bulk_sup(config: SweepConfig) -> SweepReport:
    mu, L = config.mu, config.L
    c_u, c_v = 0.5 * L, 4.0
    nx, ny = config.grid_shape or (101, 161)
    C = bulk_sup_constant(mu, L, c_u, c_v)
    hbar0 = (L - c_u) / c_v
    xs = np.linspace(-c_u, c_u, nx)[:, None]
    ys = np.linspace(-c_v, c_v, ny)[None, :]
    bulk = bulk_profile_box(mu, L, ys) * np.ones_like(xs)
    rows = []
    all_ok = True
    for N in config.n_levels:
        hbar = mu / N
        if not hbar < hbar0:
            raise ValueError(f"hbar = {hbar:g} is not below hbar_0 = {hbar0:g}; increase N")
        ke = KernelEval(
            basis=EigenBasis(Model.BOX, hbar=hbar, box_half_width=L),
            n_levels=N,
            mode=EvalMode.CLOSED_FORM,
        )
        resc = rescaled_kernel_f2(ke, hbar, xs, ys)
        sup = float(np.max(np.abs(resc - bulk)))
        rows.append(SweepRow(N=N, hbar=hbar, metric="sup_err", value=sup))
        rows.append(SweepRow(N=N, hbar=hbar, metric="bound", value=C * hbar))
        all_ok = all_ok and sup <= C * hbar
    verdicts = (
        Verdict(
            name="sup-within-explicit-bound",
            passed=all_ok,
            detail=f"C = {C:.6g}, hbar_0 = {hbar0:.6g}",
        ),
    )
    return SweepReport("box-bulk-sup", mu, "box", "projection", tuple(rows), verdicts)


def _sweep_box_tridiag_norm(config: SweepConfig) -> SweepReport:
    mu, L = config.mu, config.L
    limit = math.pi * mu / L
    rows = []
    id_ok = True
    gaps = []
    for N in config.n_levels:
        hbar = mu / N
        mat = box_multiplication_matrix(N, L)
        val = hs_norm_sq_symbol(mat, hbar)
        exact = math.pi * hbar * (N - 1) / L
        rel = abs(val - exact) / exact if exact else abs(val)
        id_ok = id_ok and rel <= 1e-12
        gaps.append(abs(val - limit))
        rows.append(SweepRow(N=N, hbar=hbar, metric="hs_norm_sq", value=val))
    verdicts = (
        Verdict("finite-N-identity", id_ok, f"pi hbar (N-1)/L, limit {limit:.6g}"),
        _decrease_verdict("gap-to-limit-decreasing", gaps),
    )
    return SweepReport("box-tridiag-norm", mu, "box", "tridiagonal", tuple(rows), verdicts)


def _sweep_box_momentum_norm(config: SweepConfig) -> SweepReport:
    mu, L = config.mu, config.L
    limit = math.pi**3 * mu**3 / (6.0 * L**2)
    rows = []
    rels = []
    bvals = []
    for N in config.n_levels:
        hbar = mu / N
        j = np.arange(1, N + 1, dtype=float)
        entries = box_momentum_entry(j[:, None], j[None, :], L, hbar)
        val = 2.0 * math.pi * hbar * float(np.sum(np.abs(entries) ** 2))
        B = box_momentum_tail_norm_sq(N, L, hbar)
        rels.append(abs(val - limit) / limit)
        bvals.append(B)
        rows.append(SweepRow(N=N, hbar=hbar, metric="hs_norm_sq", value=val))
        rows.append(SweepRow(N=N, hbar=hbar, metric="rel_err", value=rels[-1]))
        rows.append(SweepRow(N=N, hbar=hbar, metric="offdiag_norm_sq", value=B))
    bound = config.threshold if config.threshold is not None else 0.05
    ratios = [b2 / b1 for b1, b2 in zip(bvals, bvals[1:])]
    verdicts = (
        _decrease_verdict("rel-err-decreasing", rels),
        _threshold_verdict("final-rel-err", rels[-1], bound),
        Verdict(
            "offdiag-halving",
            all(r < 0.75 for r in ratios),
            "ratios " + ", ".join(f"{r:.4f}" for r in ratios),
        ),
    )
    return SweepReport("box-momentum-norm", mu, "box", "momentum", tuple(rows), verdicts)


def _sweep_osc_catalan(config: SweepConfig) -> SweepReport:
    mu, a, b = config.mu, config.a, config.b
    rows = []
    verdicts = []
    bound = config.threshold if config.threshold is not None else 0.05
    for n in config.powers:
        limit = catalan_limit_value(n, a, b, mu)
        rels = []
        for N in config.n_levels:
            scale = SemiclassicalScale.from_mu(N, mu)
            mat = matrix_linear_power(a, b, n, scale, N)
            val = hs_norm_sq_symbol(mat, scale.hbar)
            rel = abs(val - limit) / limit
            rels.append(rel)
            rows.append(SweepRow(N=N, hbar=scale.hbar, metric=f"rel_err_n{n}", value=rel))
        verdicts.append(_decrease_verdict(f"rel-err-decreasing-n{n}", rels))
        verdicts.append(_threshold_verdict(f"final-rel-err-n{n}", rels[-1], bound))
    return SweepReport("osc-catalan", mu, "oscillator", "linear-power", tuple(rows), tuple(verdicts))


def _sweep_osc_offdiag(config: SweepConfig) -> SweepReport:
    mu, a, b = config.mu, config.a, config.b
    rows = []
    verdicts = []
    for n in config.powers:
        vals = {}
        for N in sorted(set(config.n_levels) | {2 * N for N in config.n_levels}):
            # observable on N + n levels at the hbar of rank N, so the block
            # rows N+1..N+n are exact
            scale = SemiclassicalScale.from_mu(N, mu)
            padded = matrix_linear_power(a, b, n, scale, N + n)
            vals[N] = offdiag_block_norm_sq(padded, N, scale.hbar)
            rows.append(SweepRow(N=N, hbar=scale.hbar, metric=f"offdiag_n{n}", value=vals[N]))
        first = config.n_levels[0]
        c_n = vals[first] / ((a * a + b * b) ** n * (mu / first) ** (n + 1) * first**n)
        ratios = [vals[2 * N] / vals[N] for N in config.n_levels]
        in_band = all(0.4 <= r <= 0.6 for r in ratios)
        bound_ok = all(
            vals[N] <= 2.0 * c_n * (a * a + b * b) ** n * (mu / N) ** (n + 1) * N**n
            for N in config.n_levels
        )
        verdicts.append(
            Verdict(
                f"halving-n{n}", in_band, "ratios " + ", ".join(f"{r:.4f}" for r in ratios)
            )
        )
        verdicts.append(Verdict(f"calibrated-bound-n{n}", bound_ok, f"c_n = {c_n:.6g}"))
    return SweepReport("osc-offdiag", mu, "oscillator", "linear-power", tuple(rows), tuple(verdicts))


def _sweep_osc_origin_parity(config: SweepConfig) -> SweepReport:
    mu = config.mu
    rows = []
    bound = config.threshold if config.threshold is not None else 1e-4
    worst = 0.0
    for N in config.n_levels:
        hbar = mu / N
        val = symbol_oscillator_projection(N, hbar, 0.0, 0.0)
        dev = abs(val - (1.0 + (-1.0) ** (N + 1)))
        worst = max(worst, dev)
        rows.append(SweepRow(N=N, hbar=hbar, metric="origin_parity_dev", value=dev))
    verdicts = (_threshold_verdict("parity-within-tolerance", worst, bound),)
    return SweepReport("osc-origin-parity", mu, "oscillator", "projection", tuple(rows), verdicts)


def _sweep_moyal_idempotency(config: SweepConfig) -> SweepReport:
    """Distance of the direct star square of the projection symbol from the
    symbol itself, on a fixed window and evaluation lattice.

    The defect is entirely a property of the direct-quadrature scheme (the
    composition is exact), so the sampling grid must resolve the symbol's
    1/hbar oscillation at each N: the default grid scales with N while the
    window and the evaluation lattice stay fixed.
    """
    mu, L = config.mu, config.L
    window = config.window or (-1.5 * L, 1.5 * L, -6.0, 6.0)
    # fixed interior evaluation lattice, well inside the rectangle
    ex = np.linspace(-0.6 * L, 0.6 * L, 10)
    p_half = math.pi * mu / (2.0 * L)
    ep = np.linspace(-0.6 * p_half, 0.6 * p_half, 10)
    rows = []
    for N in config.n_levels:
        hbar = mu / N
        nx, npts = config.grid_shape or (24 * N, 24 * N)
        _check_budget(config, nx, npts)
        grid = PhaseGrid(window[0], window[1], window[2], window[3], nx, npts)
        fld = projection_symbol_field(N, hbar, L, grid)
        acc = 0.0
        for x0 in ex:
            for p0 in ep:
                diff = moyal_direct(fld, fld, hbar, float(x0), float(p0)) - symbol_projection_box(
                    N, hbar, L, float(x0), float(p0)
                )
                acc += diff * diff
        d = acc * (ex[1] - ex[0]) * (ep[1] - ep[0])
        rows.append(SweepRow(N=N, hbar=hbar, metric="idempotency_defect_sq", value=d))
    vals = [r.value for r in rows]
    verdicts = (_decrease_verdict("defect-decreasing", vals),)
    return SweepReport("moyal-idempotency", mu, "box", "projection", tuple(rows), verdicts)


EXPERIMENTS = {
    "box-projection-l2": _sweep_box_projection_l2,
    "box-edge-x": _sweep_box_edge_x,
    "box-edge-p": _sweep_box_edge_p,
    "box-bulk-sup": _sweep_box_bulk_sup,
    "box-tridiag-norm": _sweep_box_tridiag_norm,
    "box-momentum-norm": _sweep_box_momentum_norm,
    "osc-catalan": _sweep_osc_catalan,
    "osc-offdiag": _sweep_osc_offdiag,
    "osc-origin-parity": _sweep_osc_origin_parity,
    "moyal-idempotency": _sweep_moyal_idempotency,
}

_DEFAULT_N: dict[str, tuple[int, ...]] = {
    "box-projection-l2": (10, 20, 40, 80),
    "box-edge-x": (100, 400),
    "box-edge-p": (250, 1000),
    "box-bulk-sup": (50, 100, 200, 400),
    "box-tridiag-norm": (16, 64, 256, 1024),
    "box-momentum-norm": (128, 256, 512),
    "osc-catalan": (64, 128, 256, 512),
    "osc-offdiag": (64, 128, 256),
    "osc-origin-parity": (4, 5, 6, 7),
    "moyal-idempotency": (8, 16),
}


def default_n_levels(experiment: str) -> tuple[int, ...]:
    if experiment not in _DEFAULT_N:
        raise ValueError(f"unknown experiment {experiment!r}")
    return _DEFAULT_N[experiment]


def run_sweep(config: SweepConfig) -> SweepReport:
    """Run a registered experiment; deterministic given the config."""
    if config.experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {config.experiment!r}")
    return EXPERIMENTS[config.experiment](config)
