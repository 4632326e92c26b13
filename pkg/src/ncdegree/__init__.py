"""Distance-type nonclassical degree of one- and two-mode pure field states.

The degree of a pure state is one minus pi^k times the global maximum of its
Husimi Q-function (k = number of modes). The package also provides
entanglement entropy, the Mandel factor, Wigner functions and the Gaussian
convolution relating W to Q.
"""

from .errors import (
    ArityError, BoundsError, BudgetError, ConvergenceError, DomainError, NCDegreeError,
    NormalizationError, ParseError, QuadratureConfigError, TruncationError,
    UndefinedStatisticError,
)
from .kernels import BACKEND_NAME
from .measures import (
    MeasureReport, closed_form_degree, compose_product_degree, entanglement_entropy,
    mandel_q, measure, nonclassical_degree, nonclassical_degree2,
)
from .optimize import MaxResult, OptimizerConfig, brute_force_max, maximize_q, maximize_q2
from .phase_space import (
    GridSpec, coherent_overlap, distance_bu, distance_hs, fidelity, husimi_q, husimi_q2,
    q_from_w, wigner,
)
from .states import (
    BipartiteState, SingleModeState, load_state, make_coherent, make_fock, make_phi_family,
    make_product, make_psi_family, parse_state, render, save_state,
)

__version__ = "0.1.0"
