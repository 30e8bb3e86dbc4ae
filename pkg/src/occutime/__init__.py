"""Occupation times of finite killed and skip-free Markov chains.

Exact joint Laplace transforms and moments via determinant formulas, an
independent Monte Carlo oracle with change-of-measure estimators, a decision
procedure for the Markov property of the occupation-time sequence, and the
Gaussian squared-sum representation for birth-death chains.
"""

from . import errors
from .gaussian import (
    GaussianSpec,
    SplitMatrix,
    gaussian_spec,
    mass_identity_residual,
    mu_mass_quadrature,
    mu_total_mass,
    phi,
    sample_occupation_gaussian,
    sample_occupation_gaussian_batch,
    split_matrix,
)
from .generators import (
    ZERO_TOL,
    EmbeddedChain,
    GeneratorKind,
    GeneratorMatrix,
    SymmetrizedGenerator,
    embedded_chain,
    find_violation_index,
    generator_from_json,
    generator_to_json,
    is_tridiagonal,
    killing_reachable,
    load_generator,
    principal_submatrix,
    symmetrize,
    validate_generator,
)
from .kernels import BACKEND
from .markov import (
    MarginalPair,
    MarkovVerdict,
    ReducedTriple,
    conditional_lt,
    factorization_residual,
    markov_mismatch,
    markov_verdict,
    pair_reduction,
    reduce_to_triple,
    triple_lt,
    verdict_to_json,
    window_triple,
)
from .rng import Stream, derive_key
from .simulate import (
    McEstimate,
    Method,
    MomentEstimate,
    PathRecord,
    Terminal,
    empirical_moments,
    mc_transform,
    path_weight,
    sample_killed_path,
    sample_path,
    write_paths_csv,
)
from .transforms import (
    green,
    joint_lt_general,
    joint_lt_skipfree,
    marginal_rate,
    occupation_covariance,
    validate_killing,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "EmbeddedChain",
    "GaussianSpec",
    "GeneratorKind",
    "GeneratorMatrix",
    "MarginalPair",
    "MarkovVerdict",
    "McEstimate",
    "Method",
    "MomentEstimate",
    "PathRecord",
    "ReducedTriple",
    "SplitMatrix",
    "Stream",
    "SymmetrizedGenerator",
    "Terminal",
    "ZERO_TOL",
    "conditional_lt",
    "derive_key",
    "embedded_chain",
    "empirical_moments",
    "errors",
    "factorization_residual",
    "find_violation_index",
    "gaussian_spec",
    "generator_from_json",
    "generator_to_json",
    "green",
    "is_tridiagonal",
    "joint_lt_general",
    "joint_lt_skipfree",
    "killing_reachable",
    "load_generator",
    "marginal_rate",
    "markov_mismatch",
    "markov_verdict",
    "mass_identity_residual",
    "mc_transform",
    "mu_mass_quadrature",
    "mu_total_mass",
    "occupation_covariance",
    "pair_reduction",
    "path_weight",
    "phi",
    "principal_submatrix",
    "reduce_to_triple",
    "sample_killed_path",
    "sample_occupation_gaussian",
    "sample_occupation_gaussian_batch",
    "sample_path",
    "split_matrix",
    "symmetrize",
    "triple_lt",
    "validate_generator",
    "validate_killing",
    "verdict_to_json",
    "window_triple",
    "write_paths_csv",
]
