"""Informationally complete covariant POVMs from Weyl orbits of finite Abelian groups."""

from .groups import (
    Character,
    GroupElement,
    GroupSpec,
    HaarPair,
    char_eval,
    enumerate_characters,
    enumerate_elements,
    haar_pair,
    verify_pontryagin_inversion,
)
from .povm import (
    CovariantPovm,
    ICReport,
    MultiplierTable,
    ambiguity_function,
    basis_fiducial,
    build_povm,
    contraction_at,
    contractions,
    discrete_gaussian_fiducial,
    extract_multiplier,
    informational_completeness_report,
    random_fiducial,
)
from .tomography import (
    ProbabilityTable,
    TomographyResult,
    error_metrics,
    forward_probabilities,
    random_density_matrix,
    reconstruct,
    sample_outcomes,
)
from .weyl import (
    PhasePoint,
    check_projective_relation,
    commutant_dimension,
    phase_points,
    weyl_adjoint_point,
    weyl_inverse_transform,
    weyl_operator,
    weyl_transform,
)

__version__ = "0.1.0"
