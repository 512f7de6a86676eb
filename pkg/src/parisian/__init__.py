"""Parisian ruin probabilities for discrete-time lattice risk processes.

The surplus is ``R_t = u + t - S_t`` with i.i.d. integer claims. Parisian ruin
happens once the surplus has stayed at or below zero for more than ``zeta``
consecutive periods.
"""

__version__ = "0.1.0"

from .dist import (
    ConvTable,
    Pmf,
    RiskModel,
    binomial,
    conv_table,
    cramer_root,
    custom,
    geometric,
    make_pmf,
    negbinomial,
    parse_dist,
    phi,
    phi_inverse,
    poisson,
)
from .errors import (
    CramerConditionError,
    DivergenceError,
    DomainError,
    NoRootError,
    ParisianError,
    ResourceLimitError,
)
from .classical import (
    SeriesValue,
    deficit_joint,
    deficit_infinite,
    dp_survival,
    kendall_first_passage,
    ruin_infinite,
    seal_survival,
)
from .parisian import (
    brute_force_parisian,
    dp_parisian_survival,
    parisian_infinite_components,
    parisian_ruin,
    parisian_ruin_infinite,
    parisian_survival,
    parisian_survival_sweep,
)
from .asymptotics import (
    AsymptoticsReport,
    LadderLaw,
    cramer_C,
    cramer_parisian_limit,
    deficit_limit,
    heavy_limits,
    ladder_law,
)
from .montecarlo import McConfig, McEstimate, mc_parisian_survival, mc_schedule

__all__ = [name for name in dir() if not name.startswith("_")]
