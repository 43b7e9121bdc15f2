"""Exponential-basis frequency sets for zonotopes.

The package builds, for a zonotope given by generators, an explicit
frequency set whose exponentials form a basis of the square-integrable
functions on it, and bundles a numerical harness that measures every
finitely checkable property of the construction: separation, density
against volume, Gram finite sections, interpolation residuals, and the
branch structure of the recursion.
"""

from .certify import (
    CertificationReport,
    GramSection,
    certify,
    density,
    gram_section,
    interpolation_residual,
    riesz_estimates,
    separation,
)
from .config import Config
from .construction import (
    ConstructionTrace,
    FrequencySet,
    build_cylindric,
    choose_eta,
    construct,
    cylinder_basis,
    normalize_last,
    parallelepiped_basis,
    push_from_integers,
    reorder_generators,
    replay,
    top_branches,
    transform_frequencies,
)
from .decomposition import (
    Grid,
    GridFunction,
    decompose,
    freq_side_check,
    recompose,
    support_mask,
)
from .errors import (
    EtaSearchError,
    GridAlignmentError,
    InfeasibleFiberError,
    InputError,
    MathError,
    RankDeficientError,
    SupportViolationError,
)
from .geometry import (
    CylindricSet,
    Fiber,
    Zonotope,
    contains,
    fiber,
    indicator_ft,
    normalize_generators,
    project_base,
    volume,
)

__all__ = [
    "CertificationReport",
    "Config",
    "ConstructionTrace",
    "CylindricSet",
    "EtaSearchError",
    "Fiber",
    "FrequencySet",
    "GramSection",
    "Grid",
    "GridAlignmentError",
    "GridFunction",
    "InfeasibleFiberError",
    "InputError",
    "MathError",
    "RankDeficientError",
    "SupportViolationError",
    "Zonotope",
    "build_cylindric",
    "certify",
    "choose_eta",
    "construct",
    "contains",
    "cylinder_basis",
    "decompose",
    "density",
    "fiber",
    "freq_side_check",
    "gram_section",
    "indicator_ft",
    "interpolation_residual",
    "normalize_generators",
    "normalize_last",
    "parallelepiped_basis",
    "project_base",
    "push_from_integers",
    "recompose",
    "reorder_generators",
    "replay",
    "riesz_estimates",
    "separation",
    "support_mask",
    "top_branches",
    "transform_frequencies",
    "volume",
]

__version__ = "0.1.0"
