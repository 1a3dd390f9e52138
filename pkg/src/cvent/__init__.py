"""Gaussian entanglement between two trapped oscillators coupled by a central potential."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    OMEGA,
    QuadraticHamiltonian,
    check_physicality,
    make_hamiltonian,
    squeezed_state,
    symplectic_eigenvalues,
)
from .dynamics import NoiseModel, evolve_closed, evolve_open, propagator, steady_state_numeric  # noqa: E402
from .entanglement import (  # noqa: E402
    log_negativity,
    ppt_invariants,
    steady_state_closed_form,
    steady_state_log_negativity,
    steady_state_nu_minus,
)
from .metrology import ErrorBudget, partials, precision_map, propagate_error  # noqa: E402
from .potentials import (  # noqa: E402
    PotentialSpec,
    check_stability,
    coupling_coulomb,
    coupling_generic,
    coupling_newtonian,
    taylor_expand,
)
