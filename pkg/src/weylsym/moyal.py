"""Moyal (star) products: exact finite-rank composition vs direct quadrature.

Composition is exact for finite-rank operators (matrix product of the
coefficient matrices, then one symbol evaluation) and serves as ground
truth.  The direct route discretizes the 4-fold star-product integral in its
y/p pairing form by two successive 2-fold midpoint sums with bilinear,
zero-extended interpolation of the sampled symbols; it exists to exercise
that integral formula and is validated against composition.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .basis import EigenBasis, Model
from .scale import SymbolField
from .truncate import MAX_DIMENSION
from .weyl import (
    CoverageWarning,
    oscillator_quadrature_spec,
    symbol_from_kernel_complex,
    symbol_rank_one_box_complex,
)

__all__ = [
    "FiniteRankOperator",
    "moyal_via_composition",
    "moyal_via_composition_complex",
    "moyal_direct",
    "operator_symbol_complex",
]


@dataclass(frozen=True)
class FiniteRankOperator:
    """Operator sum_{j,k} M_jk |u_j><u_k| over the first dim(M) levels."""

    basis: EigenBasis
    coeff: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.coeff, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("coeff must be a square matrix")
        if m.shape[0] > MAX_DIMENSION:
            raise ValueError(f"rank {m.shape[0]} exceeds the {MAX_DIMENSION} cap")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "coeff", m)

    @property
    def n(self) -> int:
        return self.coeff.shape[0]


def operator_symbol_complex(basis: EigenBasis, coeff: np.ndarray, hbar: float, x, p):
    """Symbol of sum M_jk |u_j><u_k|; complex for non-Hermitian M.

    Box route broadcasts over arrays of points; the oscillator route is
    quadrature per point and takes scalars.
    """
    N = coeff.shape[0]
    if basis.model is Model.BOX:
        scalar = np.ndim(x) == 0 and np.ndim(p) == 0
        total = np.zeros(np.broadcast(np.asarray(x), np.asarray(p)).shape, dtype=complex)
        for j in range(1, N + 1):
            for k in range(1, N + 1):
                c = coeff[j - 1, k - 1]
                if c != 0:
                    total = total + c * symbol_rank_one_box_complex(j, k, hbar, basis.L, x, p)
        return complex(total[()]) if scalar else total

    def kernel(xa, ya):
        ux = basis.wavefunctions(N, xa)
        uy = basis.wavefunctions(N, ya)
        return np.einsum("jq,jk,kq->q", ux, coeff, uy)

    spec = oscillator_quadrature_spec(hbar, N, p)
    return symbol_from_kernel_complex(kernel, hbar, spec, x, p)


def moyal_via_composition_complex(
    A: FiniteRankOperator, B: FiniteRankOperator, hbar: float, x: float, p: float
) -> complex:
    """Star product via the operator product: symbol of the operator with
    coefficient matrix M_A M_B.  Exact up to symbol-evaluation error."""
    if A.basis != B.basis:
        raise ValueError("operators live in different bases")
    if A.n != B.n:
        raise ValueError("operator dimensions differ")
    return operator_symbol_complex(A.basis, A.coeff @ B.coeff, hbar, x, p)


def moyal_via_composition(
    A: FiniteRankOperator, B: FiniteRankOperator, hbar: float, x: float, p: float
) -> float:
    """Real part of the composed symbol.

    Equals the full star product when A B is Hermitian (e.g. projections,
    A = B*); for non-commuting Hermitian factors the symbol of A B acquires
    an imaginary part, available from moyal_via_composition_complex.
    """
    return moyal_via_composition_complex(A, B, hbar, x, p).real


def _bilinear(field: SymbolField, X: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Bilinear interpolation on cell centers with zero extension outside."""
    g = field.grid
    vals = field.values
    X, P = np.broadcast_arrays(np.asarray(X, dtype=float), np.asarray(P, dtype=float))
    fx = (X - (g.x_min + 0.5 * g.dx)) / g.dx
    fp = (P - (g.p_min + 0.5 * g.dp)) / g.dp
    i0 = np.floor(fx).astype(np.int64)
    j0 = np.floor(fp).astype(np.int64)
    tx = fx - i0
    tp = fp - j0

    def corner(ii, jj):
        ok = (ii >= 0) & (ii < g.nx) & (jj >= 0) & (jj < g.np)
        out = np.zeros(ok.shape)
        out[ok] = vals[ii[ok], jj[ok]]
        return out

    return (
        (1 - tx) * (1 - tp) * corner(i0, j0)
        + tx * (1 - tp) * corner(i0 + 1, j0)
        + (1 - tx) * tp * corner(i0, j0 + 1)
        + tx * tp * corner(i0 + 1, j0 + 1)
    )


def moyal_direct(
    sigma1: SymbolField,
    sigma2: SymbolField,
    hbar: float,
    x: float,
    p: float,
    support: tuple[float, float, float, float] | None = None,
    pad: float = 0.0,
) -> float:
    """Star product at (x, p) by direct discretization of the 4-fold integral.

    The integral in its (y_i, p_i) form factorizes: the inner (y2, p1)
    pairing and the outer (y1, p2) pairing become two successive 2-fold
    midpoint sums.  Momentum shifts p - p_i are sampled on the grid's own
    p-centers; the conjugate y-lattice has spacing 2 pi / (np dp), so the
    discrete phase sums act as the correct resolution-limited deltas.
    Interpolated arguments outside the window contribute zero.

    If `support` = (x_lo, x_hi, p_lo, p_hi) is given, the window is checked
    to contain it padded by `pad` on each side, else a CoverageWarning is
    attached to the (still returned) value.
    """
    if sigma1.grid != sigma2.grid:
        raise ValueError("incompatible grids")
    g = sigma1.grid
    if not g.contains(x, p):
        raise ValueError("point outside window")
    if support is not None:
        x_lo, x_hi, p_lo, p_hi = support
        if (
            g.x_min > x_lo - pad
            or g.x_max < x_hi + pad
            or g.p_min > p_lo - pad
            or g.p_max < p_hi + pad
        ):
            warnings.warn(
                "grid window does not contain the padded symbol support", CoverageWarning
            )

    M = g.np
    q = g.p_centers()
    dy = 2.0 * math.pi / (M * g.dp)
    y = (np.arange(M) + 0.5 - M / 2.0) * dy

    shifted_x = x - hbar * y / 2.0
    S1 = _bilinear(sigma1, shifted_x[:, None], q[None, :])  # (My, M)
    S2 = _bilinear(sigma2, shifted_x[:, None], q[None, :])  # (My, M)
    E1 = np.exp(-1j * (p - q)[:, None] * y[None, :])        # (M, My)
    E2 = np.exp(1j * (p - q)[None, :] * y[:, None])         # (My, M)
    G = (S1 @ E1) @ S2                                      # (My, M)
    val = (dy * g.dp / (2.0 * math.pi)) ** 2 * np.sum(E2 * G)
    return float(val.real)
