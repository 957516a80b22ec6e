"""splitbound: exponential operator splittings, their exact error
representations, and logarithmic-norm error bounds on dense complex pairs."""

from .backend import NUMBA_ENABLED
from .bounds import (BoundInputs, BoundReport, BoundValue, bound_lt,
                     bound_plt, bound_strang, check_bound)
from .error_forms import (ErrorForm, error_direct, evaluate_form,
                          lt_error_integral, lt_error_split,
                          plt_error_integral, plt_error_split,
                          strang_error_composed, strang_error_integral)
from .matcore import (add, adjoint, as_cmat, commutator, expm, lognorm, mul,
                      opnorm2, scale)
from .order_lab import (OrderFit, extract_leading, fit_local_order,
                        leading_term_coefficient)
from .problems import DEFAULT_CORPUS, ProblemSpec, SplitMix64, generate
from .quadrature import (QuadratureRule, integrate1, integrate2, integrate3,
                         legendre_rule, refine_until)
from .splittings import (Method, OperatorPair, make_pair, propagator, step_n,
                         symmetry_defect)

__version__ = "0.1.0"
