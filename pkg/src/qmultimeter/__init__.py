"""Programmable quantum multimeters with classical post-processing.

Covariant observable constructions over finite groups, a divergence measure
for observables, and a verification harness for the programming bounds.
"""

from .divergence import (
    DivergenceEstimate,
    DivergenceOptions,
    bhattacharyya,
    divergence_ratio,
    observable_divergence,
)
from .groups import (
    CyclicSubgroup,
    FiniteGroup,
    ProjectiveRepresentation,
    coset_postprocessing,
    covariant_multimeter,
    covariant_observable,
    covariant_program_state,
    cyclic_subgroups,
    eigenvector_program_states,
    left_cosets,
    q8_representation,
    sharp_from_subgroup,
    weyl_heisenberg,
)
from .linalg import hermitian_eig, partial_trace, psd_sqrt, tensor
from .postprocessing import (
    PostProcessing,
    compose,
    post_process_distribution,
    post_process_observable,
    pp_fidelity,
)
from .quantum import (
    DensityState,
    MeasurementModel,
    Multimeter,
    Observable,
    QuantumChannel,
    apply_channel,
    dual_apply,
    fidelity,
    induced_observable,
    outcome_distribution,
    program,
    stinespring_dilation,
)
from .verify import (
    BoundCurve,
    VerificationReport,
    bound_curve,
    phase_space_demo,
    quaternion_demo,
    sharpmin_bound,
    verify_b_properties,
    verify_povm_bound,
    verify_prop1,
    verify_prop3,
)

__version__ = "0.1.0"
