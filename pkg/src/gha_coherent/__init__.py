"""Generalized-Heisenberg-algebra coherent states for power-law potentials."""
from .algebra import (
    CharacteristicFn,
    FockVector,
    GhaRep,
    apply_annihilation,
    apply_creation,
    casimir_residual,
    commutator_residual,
    iterate_spectrum,
    ladder_coefficients,
)
from .coherent import (
    CoherentState,
    QCurve,
    build_state,
    eigen_residual,
    mandel_q,
    normalization,
    overlap,
    photon_moment,
    photon_statistics,
    q_curve,
    state_distance_sq,
)
from .powerlaw import (
    PowerLawSpec,
    SpacingClass,
    characteristic_fn,
    effective_frequency,
    energy,
    g_factor,
    rep_for_spec,
    spacing_class,
)
from .resolution import (
    MomentReport,
    WeightFunction,
    laplace_wbar_oracle,
    moment_sequence,
    verify_resolution,
    weight_harmonic,
    weight_square_well,
)

__version__ = "0.1.0"
