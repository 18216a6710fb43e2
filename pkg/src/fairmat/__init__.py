"""Fair and efficient random assignment of indivisible items under per-agent constraints.

Items are bitmask-indexed, probabilities are exact ``Fraction`` values, and
every mechanism's output can be re-checked with the predicates in
:mod:`fairmat.sdrel` and the certificates in :mod:`fairmat.verify`.
"""

from .domain import ConstraintFamily, Instance, Lottery, Preference, induced_fractional, membership
from .instances import build_partition_reduction, gallery, random_instance, thm5_general
from .matroid import RankOracle, choice, eat_capacity, rank, reduced_rank
from .mechanisms import (
    MechanismResult,
    mech_anonymous,
    mech_eating,
    mech_naive_ps,
    mech_rotation,
    mech_two_agent,
)
from .sdrel import (
    ef_sufficient_matroid,
    is_sd_efficient,
    is_sd_envy_free,
    is_sd_envy_free_fractional,
    is_sd_proportional,
    sd_compare,
)
from .verify import Certificate, check_certificate, check_feasible, decompose

__version__ = "0.1.0"

__all__ = [
    "Certificate", "ConstraintFamily", "Instance", "Lottery", "MechanismResult", "Preference", "RankOracle",
    "build_partition_reduction", "check_certificate", "check_feasible", "choice", "decompose", "eat_capacity", "ef_sufficient_matroid", "gallery",
    "induced_fractional", "is_sd_efficient", "is_sd_envy_free", "is_sd_envy_free_fractional",
    "is_sd_proportional", "mech_anonymous", "mech_eating", "mech_naive_ps", "mech_rotation",
    "mech_two_agent", "membership", "random_instance", "rank", "reduced_rank", "sd_compare",
    "thm5_general",
]
