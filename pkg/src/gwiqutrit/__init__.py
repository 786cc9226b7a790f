"""Bell inequalities for two qutrits: generalized Wigner inequalities and CGLMP,
with six-port beam splitter and spin-1 observables."""

__version__ = "0.1.0"

from .errors import EigenConvergenceError, InputError, NumericalError
from .inequalities import InequalitySpec, by_name, cglmp, enumerate_gwi, evaluate, gwi, gwi_headline, lhv_max, wu
from .measurements import ScenarioSettings, fast_joint_prob_table, joint_prob_table
from .optimizer import OptConfig, OptResult, global_max_violation, maximize_violation, nelder_mead
from .belloperator import BellMaximum, build, max_violation_state
from .robustness import ThresholdResult, threshold_at_global_max, threshold_visibility
from .reducibility import check_grouping, is_chsh_reducible
from .states import isotropic, mixed_family, noisy, projector, singlet
