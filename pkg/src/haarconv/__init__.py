"""Convolution of probability measures on groups and homogeneous spaces."""

from .divisibility import (
    DFTRootResult,
    EmbeddingCertificate,
    RootMap,
    cp_root,
    embed_compound_poisson,
    embed_homogeneous,
    invariance_of_embedded,
    nth_root_abelian_dft,
    verify_root,
)
from .energy import EnergyTestResult, energy_distance_test
from .exceptions import (
    DomainError,
    HaarconvError,
    InvarianceError,
    PreconditionError,
    StructureError,
    UnsupportedError,
)
from .groups import (
    Element,
    FiniteGroup,
    Subgroup,
    builtin_group,
    load_group_json,
    subgroups,
)
from .heat import HeatSemigroupSO3, heat_angle_cdf, heat_density, heat_sample, heat_truncation_bound
from .homogeneous import (
    SPHERE,
    FiniteHomogeneousSpace,
    FiniteSection,
    SphereSection,
    SphereSpace,
    action,
    homogeneous_space,
    project,
    section,
)
from .measures import (
    DenseMeasure,
    EmpiricalMeasure,
    average_k,
    convolve,
    convolve_group,
    convolve_homog,
    convolve_homog_kinv,
    convolve_power,
    density_convolve,
    density_of,
    haar_dense,
    haar_empirical,
    is_invariant,
    lift_measure,
    measure_from_density,
    project_measure,
    pushforward,
    tv_distance,
)
from .ops import conjugate, identity, inverse, multiply
from .semigroup import (
    CompoundPoissonSemigroup,
    TabulatedFamily,
    cp_measure_at,
    decompose_homogeneous,
    decompose_semigroup,
    find_idempotent,
    idempotent_subgroup,
    lift_semigroup,
    markov_skeleton,
    project_semigroup,
    semigroup_check,
)
from .so3 import SO3, Rotation, haar_sample_so3

__version__ = "0.1.0"
