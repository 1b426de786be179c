"""Landau Hamiltonians with periodic potentials at rational flux.

Fiber operators in a Landau-level basis, magnetic band structure, the
Fourier-coefficient criterion ``C_{B,V}(Y)`` and the constructive
perturbation that makes the criterion diverge.
"""

from .bands import (
    BandSurface,
    FlatBand,
    TruncationCertificate,
    band_widths,
    bands_csv,
    flat_band_candidates,
    sweep,
    truncation_certificate,
)
from .criterion import (
    BadSetSpec,
    CriterionReport,
    GrowthVerdict,
    badset_check,
    growth_verdict,
    scan,
)
from .errors import (
    ConfigError,
    GeometryError,
    InadmissibleShellError,
    LandauBlochError,
    NumericalError,
    OffLatticeError,
    PotentialFormatError,
    QuadratureError,
    TruncationError,
    VerificationError,
)
from .fiber import FiberAssembler, FiberMatrix, assemble_fiber, complex_fiber, phase_matrix
from .genericity import (
    PerturbationRecord,
    admissible_m,
    stripping_diagnostic,
    perturb,
    select_direction,
    select_Ym,
    shell_constants,
)
from .ladder import (
    displacement_coeff,
    displacement_laguerre,
    displacement_matrix,
    graded_norm,
    ladder_matrices,
)
from .lattice import FluxSpec, Lattice2, build_lattice, make_flux, points_in_disk
from .lll import LLLBasis, build_lll_basis
from .potential import (
    FourierPotential,
    ShellSpec,
    c_criterion,
    cosine_potential,
    directed_shell_energy,
    dump_potential,
    evaluate,
    lacunary_potential,
    load_potential,
    random_potential,
    shell_energy,
    sobolev_norm,
    strip_disk,
)
from .quadrature import quad_inner

__all__ = [name for name in dir() if not name.startswith("_")]
