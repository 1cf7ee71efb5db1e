"""homoglab: a numerical laboratory for averaging of rapidly oscillating
first-order ODEs, with certified error budgets and theorem-grade bound
checks."""

from .effective import (
    EffectiveConstant,
    EffectiveFieldMap,
    effective_constant,
    effective_field,
    lambert_w,
    modulus_bound,
    oscillation,
    solve_effective,
    subadditivity_defect,
)
from .expr import Expression, check_periodicity, evaluate, parse
from .fields import (
    FieldKind,
    FieldSpec,
    QuasiPeriodicField,
    catalog,
    catalog_names,
    estimate_lipschitz,
    estimate_sup_norm,
    multi_scale,
    quasi_periodic,
    single_scale,
)
from .harness import RateFit, SweepTable, fit_rate, sweep, verify_multiscale
from .highdim import (
    BoundedMotionReport,
    conjugation_theta,
    estimate_c0,
    rotation_vector,
    shear_field,
)
from .integrate import Trajectory, solve, solve_fast
from .coupled import (
    CoupledSpec,
    coupled_bound_constant,
    coupled_spec,
    explicit_limit,
    solve_coupled,
)
from .quasiperiodic import (
    DiophantineReport,
    check_diophantine,
    effective_speed,
    hs_norm,
    mean_value,
    verify_qp_rate,
)
from .transport import (
    TransportProblem,
    homogenized_transport,
    solve_transport,
    transport_drift,
    transport_problem,
)

__version__ = "0.1.0"
