"""Numerical laboratory for the focusing nonlinear Schrodinger equation with a
repulsive Dirac delta potential on the real line.

Layers:

* :mod:`deltanls.grid` -- uniform grid, discrete norms, delta-corrected operator
* :mod:`deltanls.groundstate` -- closed-form solitons and threshold values
* :mod:`deltanls.functionals` -- conserved/variational functionals and scalings
* :mod:`deltanls.classify` -- scattering / blow-up region classification
* :mod:`deltanls.evolution` -- split-step Crank-Nicolson time integration
* :mod:`deltanls.diagnostics` -- virial identities, exterior mass, conservation
* :mod:`deltanls.verify` -- the property-check batteries behind `deltanls verify`
* :mod:`deltanls.cli` -- command-line front end
"""
from .grid import (
    Grid,
    GridFunction,
    Params,
    apply_hamiltonian,
    gradient_norm_sq,
    inner_product,
    l2_norm_sq,
    lp_norm_pow,
    make_grid,
    reflect,
    translate,
)
from .groundstate import (
    GroundState,
    NoGroundStateError,
    Thresholds,
    delta_soliton_value,
    free_soliton_value,
    ground_state,
    threshold_l,
    threshold_n,
    threshold_r,
    thresholds,
)
from .functionals import (
    FunctionalReport,
    ScalingPair,
    evaluate,
    j_functional,
    k_functional,
    scale,
    scaling_derivative,
    sigma,
)
from .classify import (
    ABOVE_THRESHOLD,
    BLOWUP_MINUS,
    SCATTER_PLUS,
    ClassificationResult,
    classify_fixed_omega,
    classify_frequency_free,
    optimal_omega,
    p_gap_check,
    sign_equivalence_check,
)
from .diagnostics import (
    EXTERIOR_STEP,
    QUADRATIC_CUTOFF,
    VirialReport,
    VirialWeight,
    build_virial_weight,
    conservation_report,
    exterior_mass,
    exterior_mass_monitor,
    virial_report,
)
from .evolution import (
    BLEW_UP,
    DISPERSED,
    INCONCLUSIVE,
    NORM_GROWTH,
    EvolutionConfig,
    NumericalOverflowError,
    SimulationState,
    TrajectoryRecord,
    evolve,
    initial_state,
    linear_propagate,
    scattering_residual,
    step,
)

__version__ = "0.1.0"
