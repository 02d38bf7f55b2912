"""weylsym: phase-space symbols of truncated observables and their limits.

Truncate an observable onto the span of the first N eigenfunctions of an
exactly solvable model (harmonic oscillator or hard-wall box), evaluate its
Weyl symbol by closed form or quadrature, and measure convergence to the
classical symbol cut off on the allowed region in the joint limit
hbar -> 0, N -> infinity with hbar N = mu fixed.
"""

__version__ = "0.1.0"

from .basis import EigenBasis, Model, eigenvalue, eval_box_wavefunction, eval_hermite_wavefunction
from .diag import (
    SweepConfig,
    SweepReport,
    angular_integral,
    catalan_limit_value,
    hs_norm_sq_symbol,
    l2_distance_with_tail,
    offdiag_block_norm_sq,
    run_sweep,
)
from .kernel import EvalMode, KernelEval, dirichlet_kernel, projection_kernel, sine_kernel
from .limits import (
    ClassicalRegion,
    RegionKind,
    bulk_profile_box,
    edge_profile_p,
    edge_profile_x,
    indicator,
    limit_symbol,
    si,
)
from .moyal import FiniteRankOperator, moyal_direct, moyal_via_composition
from .scale import (
    PhaseGrid,
    SemiclassicalScale,
    SymbolField,
    l2_distance_sq_grid,
    l2_norm_sq_grid,
)
from .truncate import (
    LatticePath,
    OperatorMatrix,
    box_momentum_matrix,
    box_multiplication_matrix,
    enumerate_paths,
    generic_weyl_matrix,
    ladder_matrices,
    matrix_linear_power,
    path_weight,
)
from .weyl import (
    WeylQuadratureSpec,
    rescaled_kernel_f2,
    symbol_from_kernel,
    symbol_projection_box,
    symbol_rank_one_box,
    symbol_truncated_momentum_box,
)

__all__ = [
    "__version__",
    "SemiclassicalScale", "PhaseGrid", "SymbolField",
    "l2_norm_sq_grid", "l2_distance_sq_grid",
    "Model", "EigenBasis", "eval_hermite_wavefunction", "eval_box_wavefunction", "eigenvalue",
    "EvalMode", "KernelEval", "dirichlet_kernel", "sine_kernel", "projection_kernel",
    "WeylQuadratureSpec", "symbol_from_kernel", "symbol_rank_one_box",
    "symbol_projection_box", "symbol_truncated_momentum_box", "rescaled_kernel_f2",
    "FiniteRankOperator", "moyal_via_composition", "moyal_direct",
    "OperatorMatrix", "LatticePath", "enumerate_paths", "path_weight",
    "matrix_linear_power", "ladder_matrices", "box_multiplication_matrix",
    "box_momentum_matrix", "generic_weyl_matrix",
    "ClassicalRegion", "RegionKind", "indicator", "limit_symbol",
    "bulk_profile_box", "si", "edge_profile_x", "edge_profile_p",
    "hs_norm_sq_symbol", "offdiag_block_norm_sq", "l2_distance_with_tail",
    "catalan_limit_value", "angular_integral", "SweepConfig", "SweepReport", "run_sweep",
]
