"""Independent oracles and re-checkable certificates."""

from .certificates import (
    DECOMPOSITION,
    DOMINATING_POINT,
    ENVY_WITNESS,
    LP_INFEASIBILITY,
    SUPPORT_RESTRICTION,
    Certificate,
    check_certificate,
)
from .core import (
    FeasibilityVerdict,
    brute_force_search,
    check_feasible,
    choice_oracle_lex_lp,
    decompose,
    envy_witness,
    lottery_envy_lp,
)

__all__ = [
    "DECOMPOSITION", "DOMINATING_POINT", "ENVY_WITNESS", "LP_INFEASIBILITY", "SUPPORT_RESTRICTION",
    "Certificate", "FeasibilityVerdict", "brute_force_search", "check_certificate", "check_feasible",
    "choice_oracle_lex_lp", "decompose", "envy_witness", "lottery_envy_lp",
]
