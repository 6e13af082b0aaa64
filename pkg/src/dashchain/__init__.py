"""Controllability and observability of dashpot-spring-mass chains.

Exact layer: :mod:`~dashchain.chain_model`, :mod:`~dashchain.polynomial`,
:mod:`~dashchain.poly_engine`, :mod:`~dashchain.analysis`.
Float layer: :mod:`~dashchain.dynamics`. Command line: :mod:`~dashchain.cli`.
"""

from .analysis import (
    CounterexampleN3,
    Verdict,
    decide,
    kalman_controllability_rank,
    kalman_observability_rank,
    make_controllable_nonproportional_n3,
    make_counterexample_n3,
    proportionality_check,
)
from .chain_model import (
    ChainSpec,
    StateSpaceModel,
    assemble_state_space,
    build_coupling_matrix,
    load_spec,
    validate_spec,
)
from .dynamics import (
    ControlPlan,
    QuarterCarSpec,
    Trajectory,
    matrix_exponential,
    min_energy_control,
    quarter_car_demo,
    reachability_gramian,
    reconstruct_initial_state,
    simulate,
)
from .poly_engine import (
    AdjointFactorization,
    adjoint_cofactor_oracle,
    adjoint_poly_closed_form,
    char_poly_det_oracle,
    char_poly_recursive,
    coefficient_expansion_check,
)
from .polynomial import RationalPoly, poly_eval, poly_gcd

__version__ = "0.1.0"
