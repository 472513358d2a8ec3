"""
sparselab - sparse and maximal operators on dyadic spaces

A laboratory for sparse operators, maximal functions and their
maximal-of-N generalisation on finite dyadic grids, with exact oracles,
norm witnesses and reproducible experiments.

Main Components:
- space: dyadic spaces, cell sets and cell functions
- collections: laminar and sparse set families, generations, covers
- operators: Λ_𝒮, 𝓜_𝔅, Λ_𝔊, Λ^α and the level-set covering check
- norms: exact and witnessed operator norms
- directional: shear rectangle families and the directional maximal operator
- experiments: scripted studies producing reports
- suite / predicates / reducers: fluent verification of invariants

Usage:
    from sparselab import build_space, build_tower, apply_sparse, CellFunction

    space = build_space(1, 8)
    tower = build_tower(space, space.whole(), 8, "left")
    values = apply_sparse(tower, CellFunction.constant(space, 1.0))

    # Invariant checks over seeded fixtures
    report = standard_suite(space, seed=1).reduce_all(SuiteReportReducer(seed=1))
    write_report(report, CsvReportStorage("verify.csv"))
"""

from .errors import (SparseLabError, SpaceSizeError, DomainError, ConstructionError,
                     UnsupportedOperatorError, InvariantViolation)
from .config import DEFAULT_SEED, ENSEMBLES, RunConfig
from .space import (DyadicSpace, MeasSet, CellFunction, build_space, average, lp_norm,
                    distribution, level_set)
from .collections import (SetFamily, MartingaleCollection, SparseCollection, LaminarViolation,
                          verify_laminar, laminar_collection, max_sparsity, carleson_constant,
                          decay_ratio, generations, generation_union, generation_family,
                          build_tower, build_random_sparse, cover_shifted_grids,
                          dominate_by_martingale, stratify_by_average, log_plus)
from .operators import (OperatorFamily, AlphaSpec, apply_sparse, apply_maximal,
                        apply_max_sparse, apply_alpha_sparse, overlap_function, linearize,
                        verify_level_cover, SparseOperator, MaximalOperator,
                        MaxSparseOperator, AlphaSparseOperator)
from .norms import (NormEstimate, SearchConfig, strong_norm_exact, strong_norm_witness,
                    weak_norm_witness, power_method_norm)
from .directional import (ShearDirection, build_shear_family, directional_maximal,
                          verify_MV_domination)
from .experiments import (ExperimentReport, tail_experiment, scaling_experiment,
                          sharpness_construction, lemma_delta_experiment,
                          generation_alpha_experiment, domination_experiment,
                          directional_experiment)
from .predicates import OR, ALL
from .reducers import CountReducer, FailureCollector, SuiteReportReducer
from .suite import VerificationSuite, standard_suite
from .storage import CsvReportStorage, JsonReportStorage, write_report

__all__ = [
    # Errors
    'SparseLabError',
    'SpaceSizeError',
    'DomainError',
    'ConstructionError',
    'UnsupportedOperatorError',
    'InvariantViolation',

    # Configuration
    'DEFAULT_SEED',
    'ENSEMBLES',
    'RunConfig',

    # Space
    'DyadicSpace',
    'MeasSet',
    'CellFunction',
    'build_space',
    'average',
    'lp_norm',
    'distribution',
    'level_set',

    # Collections
    'SetFamily',
    'MartingaleCollection',
    'SparseCollection',
    'LaminarViolation',
    'verify_laminar',
    'laminar_collection',
    'max_sparsity',
    'carleson_constant',
    'decay_ratio',
    'generations',
    'generation_union',
    'generation_family',
    'build_tower',
    'build_random_sparse',
    'cover_shifted_grids',
    'dominate_by_martingale',
    'stratify_by_average',
    'log_plus',

    # Operators
    'OperatorFamily',
    'AlphaSpec',
    'apply_sparse',
    'apply_maximal',
    'apply_max_sparse',
    'apply_alpha_sparse',
    'overlap_function',
    'linearize',
    'verify_level_cover',
    'SparseOperator',
    'MaximalOperator',
    'MaxSparseOperator',
    'AlphaSparseOperator',

    # Norms
    'NormEstimate',
    'SearchConfig',
    'strong_norm_exact',
    'strong_norm_witness',
    'weak_norm_witness',
    'power_method_norm',

    # Directional
    'ShearDirection',
    'build_shear_family',
    'directional_maximal',
    'verify_MV_domination',

    # Experiments
    'ExperimentReport',
    'tail_experiment',
    'scaling_experiment',
    'sharpness_construction',
    'lemma_delta_experiment',
    'generation_alpha_experiment',
    'domination_experiment',
    'directional_experiment',

    # Verification
    'OR',
    'ALL',
    'VerificationSuite',
    'standard_suite',
    'CountReducer',
    'FailureCollector',
    'SuiteReportReducer',

    # Storage
    'CsvReportStorage',
    'JsonReportStorage',
    'write_report',
]
