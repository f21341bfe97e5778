"""Representation varieties of Baumslag-Solitar groups: construction,
moment-map gradient flow to minimal vectors, finite-order certification,
and in-variety retraction onto unitary representations."""

from .bsrep import (
    BSGroup,
    Rep,
    conjugate,
    direct_sum,
    from_orbit_datum,
    random_rep,
    relation_residual,
    rep_from_json,
    rep_to_json,
)
from .census import (
    OrbitDatum,
    enumerate_orbits,
    mult_order,
    order_bound,
    verify_orbit,
)
from .compactify import (
    FiniteCyclicGroup,
    HermitianForm,
    averaged_form,
    conjugate_into_unitary,
    detect_finite_order,
    generated_group,
    karcher_form,
    normality_exponent,
)
from .errors import (
    BsretractError,
    DegenerateGroup,
    GroupMismatch,
    InvalidOrbit,
    NoConvergence,
    NotARootOfUnity,
    NotAUnit,
    NotFiniteOrder,
    NotNormalizing,
    NotPositiveDefinite,
    PipelineStageError,
    PolarObstruction,
    SingularMatrix,
)
from .kempfness import (
    FlowConfig,
    FlowTrace,
    flow,
    flow_step,
    kn_energy,
    moment_map,
    verify_minimal,
)
from .numerics import (
    RootOfUnity,
    eigvals,
    exp_herm,
    herm_power,
    hs_norm,
    polar,
    snap_root_of_unity,
)
from .retraction import (
    PipelineDiagnostics,
    RetractionPath,
    full_pipeline,
    retract_a,
    verify_unitary_rep,
)

__version__ = "0.1.0"
