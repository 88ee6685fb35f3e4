"""Phase analysis of MIMO linear time-invariant systems.

Matrix phases, phase responses along an indented imaginary axis, phase-based
feedback stability tests, LMI sector certificates and time-domain checks of
the phase interpretation through complex power.
"""

from .exceptions import *  # noqa: F401,F403
from .feedback import (FeedbackReport, closed_loop_poles, feedback_report,  # noqa: F401
                       oracle_stable, sensitivity_sector_check, small_gain_check,
                       small_phase_check)
from .lti import (StateSpace, TransferMatrix, evaluate, evaluate_many,  # noqa: F401
                  minimal_realization, model_from_json, model_to_json, poles,
                  to_state_space, transmission_zeros)
from .matrix_phase import (PhaseSpectrum, SupportArc, classify, phases,  # noqa: F401
                           support_arc)
from .phase_response import (PhaseResponseCurve, SectorBound, build_contour,  # noqa: F401
                             phi_infty, sweep)
from .power import complex_power, hilbert, simulate, sinusoid_phase_shift_check  # noqa: F401
from .sectored_real import (LmiCertificate, assemble_kyp_lmi, check_sector,  # noqa: F401
                            phi_infty_lmi, realify)

__version__ = "0.1.0"
