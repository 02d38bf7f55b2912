"""Closed-form asymptotic targets: allowed regions, bulk and edge profiles.

The disk (oscillator) and rectangle (box) both enclose phase-space area
2 pi mu.  Near the rectangle boundary the finite-rank symbols approach two
distinct microscopic profiles: a sine-integral profile across the hard wall
(x edge) and a shifted-index sine series across the momentum edge (p edge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .kernel import sine_kernel
from .scale import pairwise_sum

__all__ = [
    "RegionKind",
    "ClassicalRegion",
    "indicator",
    "limit_symbol",
    "bulk_profile_box",
    "bulk_sup_constant",
    "si",
    "edge_profile_x",
    "edge_profile_p",
]


class RegionKind(Enum):
    DISK = "disk"
    RECTANGLE = "rectangle"


@dataclass(frozen=True)
class ClassicalRegion:
    """Closed classically allowed region: disk of radius sqrt(2 mu), or the
    box rectangle |x| <= L, |p| <= pi mu / 2L."""

    kind: RegionKind
    mu: float
    L: float | None = None

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.kind is RegionKind.RECTANGLE and (self.L is None or not self.L > 0):
            raise ValueError("rectangle region requires a positive L")

    @classmethod
    def disk(cls, mu: float) -> "ClassicalRegion":
        return cls(kind=RegionKind.DISK, mu=mu)

    @classmethod
    def rectangle(cls, mu: float, L: float) -> "ClassicalRegion":
        return cls(kind=RegionKind.RECTANGLE, mu=mu, L=L)

    @property
    def radius(self) -> float:
        if self.kind is not RegionKind.DISK:
            raise ValueError("radius only exists for the disk")
        return math.sqrt(2.0 * self.mu)

    @property
    def x_halfwidth(self) -> float:
        if self.kind is not RegionKind.RECTANGLE:
            raise ValueError("x_halfwidth only exists for the rectangle")
        assert self.L is not None
        return self.L

    @property
    def p_halfwidth(self) -> float:
        if self.kind is not RegionKind.RECTANGLE:
            raise ValueError("p_halfwidth only exists for the rectangle")
        assert self.L is not None
        return math.pi * self.mu / (2.0 * self.L)

    @property
    def area(self) -> float:
        # 2 pi mu for both kinds; the rectangle is 2L x (pi mu / L).
        return 2.0 * math.pi * self.mu


def indicator(region: ClassicalRegion, x, p) -> np.ndarray | int:
    """1 on the closed region, 0 outside; broadcasts."""
    x_arr = np.asarray(x, dtype=float)
    p_arr = np.asarray(p, dtype=float)
    if region.kind is RegionKind.DISK:
        # compare radii, not squared radii: keeps the float boundary point
        # (sqrt(2 mu), 0) inside the closed disk
        inside = np.hypot(x_arr, p_arr) <= region.radius
    else:
        inside = (np.abs(x_arr) <= region.x_halfwidth) & (np.abs(p_arr) <= region.p_halfwidth)
    out = np.where(inside, 1, 0)
    return int(out[()]) if out.ndim == 0 else out


def limit_symbol(f, region: ClassicalRegion, x, p) -> np.ndarray | float:
    """f(x, p) cut off on the region: the macroscopic limit of truncations of f."""
    chi = indicator(region, x, p)
    val = np.asarray(f(np.asarray(x, dtype=float), np.asarray(p, dtype=float)), dtype=float)
    out = val * chi
    return float(out[()]) if np.ndim(out) == 0 else out


def bulk_profile_box(mu: float, L: float, y) -> np.ndarray | float:
    """(pi mu / L) S(pi mu y / L): bulk limit of the rescaled box kernel."""
    c = math.pi * mu / L
    return c * sine_kernel(c * np.asarray(y) if np.ndim(y) else c * y)


def bulk_sup_constant(mu: float, L: float, c_u: float, c_v: float) -> float:
    """Explicit constant C with sup |rescaled kernel - bulk profile| <= C hbar
    on |x| <= C_U, |y| <= C_V, valid for hbar < (L - C_U) / C_V."""
    if not 0 <= c_u < L:
        raise ValueError("need 0 <= C_U < L")
    return math.pi / (2.0 * L) * (L / (L - c_u) + math.pi * mu / (2.0 * L) * c_v + 1.0)


# --- sine integral -----------------------------------------------------------

_SI_SWITCH = 6.0

# Gauss-Kronrod 15/7 on [-1, 1]: Kronrod nodes/weights plus embedded Gauss weights.
_GK_NODES = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691, 0.741531185599394,
    0.864864423359769, 0.949107912342759, 0.991455371120813,
])
_GK_WEIGHTS = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_G7_WEIGHTS = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870,
])


def _sinc_t(t: np.ndarray) -> np.ndarray:
    small = np.abs(t) < 1e-8
    safe = np.where(small, 1.0, t)
    return np.where(small, 1.0 - t * t / 6.0, np.sin(safe) / safe)


def _gk_panel(a: float, b: float, depth: int = 0) -> float:
    """Adaptive G7/K15 on one panel of sin(t)/t."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    t = mid + half * _GK_NODES
    f = _sinc_t(t)
    k15 = half * float(np.sum(_GK_WEIGHTS * f))
    g7 = half * float(np.sum(_G7_WEIGHTS * f[1::2]))
    if abs(k15 - g7) < 1e-14 * (1.0 + abs(k15)) or depth >= 20:
        return k15
    return _gk_panel(a, mid, depth + 1) + _gk_panel(mid, b, depth + 1)


def _si_series(x: float) -> float:
    # Si(x) = sum_k (-1)^k x^(2k+1) / ((2k+1) (2k+1)!), terms until < 1e-16
    term = x
    total = x
    k = 0
    while abs(term) >= 1e-16:
        # t_{k+1} = -t_k x^2 (2k+1) / ((2k+3)^2 (2k+2))
        term *= -x * x * (2 * k + 1) / ((2 * k + 3) ** 2 * (2 * k + 2))
        total += term
        k += 1
    return total


def si(x: float) -> float:
    """Sine integral Si(x) = int_0^x sin(t)/t dt; odd, series below |x| = 6,
    pi-width adaptive Gauss-Kronrod panels beyond."""
    if x < 0:
        return -si(-x)
    if x <= _SI_SWITCH:
        return _si_series(x)
    total = _si_series(_SI_SWITCH)
    a = _SI_SWITCH
    while a < x:
        b = min(a + math.pi, x)
        total += _gk_panel(a, b)
        a = b
    return total


# --- microscopic edge profiles ----------------------------------------------


def _sin2z_over_z(z: float) -> float:
    """sin(2z)/z with limit 2 at z = 0."""
    if abs(z) < 1e-4:
        z2 = z * z
        return 2.0 - (4.0 / 3.0) * z2 + (4.0 / 15.0) * z2 * z2
    return math.sin(2.0 * z) / z


def edge_profile_x(u: float, p: float, mu: float, L: float) -> float:
    """Hard-wall profile: limit of the symbol at x = L - hbar u, fixed p.

    (1/pi)[Si(2u(p + pi mu/2L)) - Si(2u(p - pi mu/2L))
           - (sin(2pu)/(pu)) sin(pi mu u / L)] for u >= 0, else 0.
    """
    if u < 0:
        return 0.0
    half = math.pi * mu / (2.0 * L)
    return (
        si(2.0 * u * (p + half))
        - si(2.0 * u * (p - half))
        - _sin2z_over_z(p * u) * math.sin(math.pi * mu * u / L)
    ) / math.pi


def edge_profile_p(x: float, v: float, mu: float, L: float, tol: float = 1e-6) -> float:
    """Momentum-edge profile: limit of the symbol at p = pi mu/2L + hbar pi v/2L.

    (1/2L) sum_{j>=0} sin(2 (L-|x|) (pi/2L)(j+v)) / ((pi/2L)(j+v)), summed in
    consecutive-j pairs and truncated once the alternating-sandwich tail
    bound drops below tol.  Valid for v > -1, v != 0: the j = 0 term is
    singular at v = 0, and below v = -1 a denominator crosses zero, so no
    extrapolation is attempted there.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if v <= -1 or v == 0:
        raise ValueError(f"v must satisfy v > -1 and v != 0, got {v}")
    if abs(x) >= L:
        return 0.0
    c = math.pi * (L - abs(x)) / L  # phase step per j, in (0, pi]
    d = math.pi / (2.0 * L)
    # Dirichlet-kernel bound on the oscillatory tail; for c = pi this is the
    # exact Leibniz alternating remainder.
    denom = math.sin(0.5 * c)
    total = 0.0
    j0 = 0
    block = 1 << 15
    while True:
        j = np.arange(j0, j0 + block, dtype=float)
        terms = np.sin(c * (j + v)) / (d * (j + v))
        pairs = terms[0::2] + terms[1::2]
        total += pairwise_sum(pairs)
        j0 += block
        tail_bound = 1.0 / (d * (j0 + v) * denom)
        if tail_bound < tol:
            break
        if j0 > 1 << 28:
            raise RuntimeError("series truncation did not reach the requested tol")
    return total / (2.0 * L)
