"""Exceptions and enumeration guards."""

from __future__ import annotations

import os

SUBSET_GUARD = 20
FAMILY_GUARD = 12
ASSIGNMENT_GUARD = 200_000


class FairmatError(Exception):
    pass


class GroundSetTooLarge(FairmatError):
    pass


class EnumerationTooLarge(FairmatError):
    pass


class NotAMatroid(FairmatError):
    pass


class ConstraintsNotIdentical(FairmatError):
    pass


class PreferencesNotIdentical(FairmatError):
    pass


class NotIdenticalAgents(FairmatError):
    pass


class WrongAgentCount(FairmatError):
    pass


class InfeasiblePoint(FairmatError):
    pass


class MaxIterations(FairmatError):
    pass


class UnknownId(FairmatError, KeyError):
    pass


class BadN(FairmatError, ValueError):
    pass


def _overrides() -> dict[str, int]:
    raw = os.environ.get("FAIRMAT_GUARD", "").strip()
    if not raw:
        return {}
    if raw.isdigit():
        return {"subset": int(raw)}
    out = {}
    for part in raw.split(","):
        key, _, value = part.partition("=")
        out[key.strip()] = int(value)
    return out


def subset_guard() -> int:
    return _overrides().get("subset", SUBSET_GUARD)


def family_guard() -> int:
    return _overrides().get("family", FAMILY_GUARD)


def assignment_guard() -> int:
    return _overrides().get("assignments", ASSIGNMENT_GUARD)


def check_subset_guard(size: int, what: str = "subset enumeration") -> None:
    if size > subset_guard():
        raise GroundSetTooLarge(
            f"{what} over {size} items exceeds the guard of {subset_guard()}"
        )


class LPInfeasible(FairmatError):
    """Raised when an LP that the caller expected to be feasible is not."""

    def __init__(self, message: str, lp=None, result=None):
        super().__init__(message)
        self.lp = lp
        self.result = result
