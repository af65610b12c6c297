"""Invariant means in two and three variables.

A small numerical laboratory around two invariance notions for means:

* type 1: M(m(a,c), m(a,b), m(b,c)) = M(a,b,c) -- the three-variable mean M
  is built from a two-variable base mean m by an iterated triple recursion;
* type 2: M(a,b, m(a,b)) = m(a,b) -- the two-variable mean m is recovered
  from M by a scalar fixed point.

The package provides the classical mean catalog with numerically careful
evaluators, both constructions with convergence traces, diagonal Taylor
expansions in exact rational arithmetic, and seeded scanners that verify the
identities and probe the open inequalities at desk scale.
"""

from ._version import __version__
from .errors import (
    ContractionViolation,
    DegenerateLimit,
    DomainError,
    InvalidBaseMean,
    MeansError,
    NoBracket,
    NoConvergence,
    NonIsotoneM,
    NonPositiveInput,
    NumericOverflow,
    StepUnderflow,
    UnknownMean,
)
from .core import (
    CATALOG2_IDS,
    CATALOG3_IDS,
    DiagonalDerivatives2,
    Mean2Descriptor,
    Mean3Descriptor,
    catalog2,
    catalog3,
    conjugate2,
    conjugate3,
    eval2,
    eval3,
    fd_partial,
    fd_univariate,
    mean2,
    mean3,
)
from .type1 import (
    EnvelopeReport,
    NoninvarianceCertificate,
    ToleranceConfig,
    TripleTrace,
    check_type1,
    compose_pairwise,
    construct_invariant,
    envelope_test,
    iterate_composition,
    iterate_triple,
    noninvariance_certificate,
    step_triple,
    type1_candidate,
)
from .type2 import (
    FixedPointTrace,
    check_type2,
    extract_mean2,
    implicit_derivative,
    symmetric_extension,
)
from .taylor import (
    DiagonalPartials,
    TaylorPolynomial,
    both_types_mxxxy,
    homogeneous_rescale_eval,
    logmean_diagonal_data,
    partials_type1,
    taylor_eval,
    taylor_polynomial,
    type2_constraint_f2,
)
from .verify import (
    GENERATOR_ID,
    ScanConfig,
    ScanReport,
    both_invariance_demo,
    conjecture1_scan,
    conjecture2_scan,
    diagonal_identity_suite,
    lehmer_noncomparability,
    sample_pairs,
    sample_triples,
)

__all__ = [name for name in dir() if not name.startswith("_")]
