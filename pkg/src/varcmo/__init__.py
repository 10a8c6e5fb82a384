"""Numerical models of variable-exponent Hardy and CMO spaces on the periodic grid."""

from .atomic import AtomicDecomposition, a_quantity, atom_check, atomic_decompose, level_sets, stopping_cubes
from .core import (Arc, CoeffField, ConfigError, DomainError, DyadicInterval, ExponentFunction, Grid, NumericError,
                   PreconditionError, RangeError, ResourceError, VarCMOError, build_dyadic_tree, min_moment_degree)
from .duality_czo import (apply, build_multiplier_czo, czo_cmo_experiment, duality_constant, pairing, partial_sum,
                          standard_kernel_report, weak_density_sweep)
from .littlewood_paley import (KernelFamily, almost_orthogonality_table, build_family, discrete_square_function,
                               hl_maximal, maximal_square_function, square_function, vector_maximal_report)
from .luxemburg import char_ratio_report, holder_report, luxemburg_norm, modular
from .phi_transform import analyze, operator_norm_report, pp_ratio, reconstruction_error, synthesize
from .signals import make_rng
from .space_norms import (campanato_norm, cmo_norm, hardy_norm, poly_project, seq_c_norm, seq_s_norm,
                          zygmund_norm)
from .suites import SUITES, SuiteConfig, run_suite

__version__ = "0.1.0"
