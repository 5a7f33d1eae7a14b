"""Simulation of dephasing and amplitude-damping dynamics on slit-encoded
photonic qudit pairs: weighted Kraus channels, frame-schedule films,
quantum-trajectory unraveling, the Sagnac no-jump filter, conditional
interference patterns, and concurrence estimation from coincidence counts.
"""
from .channels import (
    WeightedKrausSet,
    apply_channel,
    dephasing_channel,
    dephasing_closed_form,
    dephasing_kraus,
    uniform_dephasing_channel,
)
from .dynamics import (
    AMPLITUDE,
    POPULATION,
    DampingModel,
    LindbladModel,
    TrajectoryConfig,
    annihilation,
    damping_lindblad,
    integrate_master,
    jump_step,
    lindblad_rhs,
    no_jump_conditional_state,
    no_jump_step,
    no_jump_survival,
    run_trajectories,
)
from .experiment import (
    CountsTable,
    SagnacSchedule,
    SlitStatePrep,
    anti_correlated_block,
    apply_sagnac,
    concurrence_uncertainty,
    populations,
    prepare_state,
    reconstruct_state,
    sagnac_schedule,
    simulate_counts,
)
from .film import FilmSchedule, NonRepresentableP, compile_film, effective_channel, mask_phases
from .optics import (
    DegenerateScanError,
    FitResult,
    OpticalGeometry,
    PatternScan,
    fit_p,
    fit_p_joint,
    fringe_period,
    pattern_intensity,
    synthesize_scan,
    x_pi,
)
from .qcore import (
    ComplexOperator,
    DensityMatrix,
    PureBipartiteState,
    i_concurrence,
    identity,
    partial_trace,
    purity,
    schmidt_coefficients,
    tensor,
    trace_distance,
)

__version__ = "0.1.0"
