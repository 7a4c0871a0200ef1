"""Entropic entanglement tests for two-mode continuous-variable states.

Shannon-entropy separability inequalities for quadrature distributions,
together with the variance-product (MGVT) and Simon PPT baselines, evaluated
on truncated Fock-basis states, closed-form wavefunctions and mixtures.
"""

__version__ = "0.1.0"

from .errors import (CapacityError, ConvergenceError, EntropicCVError, GridCoverageError,
                     InvalidInputError, NumericalConsistencyError, UnsupportedAngleError,
                     UnsupportedStateError)
from .fock import (FockState2, HermiteTable, ModeCoefficients, coherent_coefficients,
                   conjugate_mode, hermite_basis, position_wavefunction, product_state,
                   random_haar_mode, random_haar_state, rotate_modes)
from .states import (AnalyticPureState, Ensemble, cat_ensemble, coherent_product, eta_state,
                     noon_state, phi_state, two_mode_squeezed, vacuum)
from .distributions import (GriddedDensity1D, GriddedDensity2D, JointSampler,
                            MeasurementSettings, combo_marginal, joint_density, mode_marginals)
from .entropy import EntropyEstimate, converged_entropy, differential_entropy, variance
from .criteria import (CriterionReport, ScanResult, covariance_matrix, mgvt_test, sandwich_check,
                       scan_settings, simon_ppt_test, strong_entropic_test, uncertainty_check,
                       weak_entropic_test)
