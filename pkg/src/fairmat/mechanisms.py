"""Assignment mechanisms.

* :func:`mech_two_agent` - welfare-maximising LP under proportionality rows (two matroid agents).
* :func:`mech_eating` - item-by-item simultaneous eating for identical preferences.
* :func:`mech_rotation` - cyclic shifts of a lexicographically best assignment (identical agents).
* :func:`mech_naive_ps` - constrained probabilistic serial, kept as a failure demonstrator.
* :func:`mech_anonymous` - strictly convex program over P, solved by Frank-Wolfe.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .domain import (
    Instance,
    Lottery,
    Matrix,
    induced_fractional,
    members,
    membership,
    popcount,
    submasks,
)
from .errors import (
    EnumerationTooLarge,
    NotAMatroid,
    NotIdenticalAgents,
    PreferencesNotIdentical,
    WrongAgentCount,
    assignment_guard,
)
from .exactlp.polytope import borda_weights, build_P, dominance_rows, optimize_over_P
from .exactlp.qp import frank_wolfe_qp
from .matroid import RankOracle, choice, eat_capacity

SD_EFFICIENT = "sd-efficient"
SD_ENVY_FREE = "sd-envy-free"
SD_PROPORTIONAL = "sd-proportional"
ANONYMOUS = "anonymous"


@dataclass
class MechanismResult:
    """``provenance`` holds the mechanism name and its parameters; guarantees are claims, not checks."""

    pi: Matrix
    provenance: dict
    guarantees: frozenset[str] = frozenset()
    lottery: Lottery | None = None

    @property
    def mechanism(self) -> str:
        return self.provenance["mechanism"]


def _oracles(inst: Instance) -> list[RankOracle]:
    if not inst.all_matroids():
        raise NotAMatroid("mechanism requires matroid constraints")
    return [RankOracle(f) for f in inst.constraints]


def mech_two_agent(inst: Instance, weights=None) -> MechanismResult:
    """Max-welfare point of P whose rows weakly sd-dominate each agent's choice from the half vector."""
    if inst.n != 2:
        raise WrongAgentCount(f"two-agent mechanism called with {inst.n} agents")
    oracles = _oracles(inst)
    half = [Fraction(1, 2)] * inst.m
    extra = []
    for i in range(2):
        extra += dominance_rows(inst, i, choice(oracles[i], inst.prefs[i], half))
    w = weights if weights is not None else borda_weights(inst)
    opt = optimize_over_P(inst, w, extra, P=build_P(inst, compact=True))
    return MechanismResult(opt.pi, {"mechanism": "two-agent", "weights": "borda" if weights is None else "custom"},
                           frozenset({SD_EFFICIENT, SD_ENVY_FREE, SD_PROPORTIONAL}))


def mech_eating(inst: Instance) -> MechanismResult:
    """Agents able to take more of the current item share it equally until it runs out."""
    if not inst.identical_preferences():
        raise PreferencesNotIdentical("eating mechanism needs identical preferences")
    oracles = _oracles(inst)
    n, m = inst.n, inst.m
    x = [[Fraction(0)] * m for _ in range(n)]
    for e in inst.prefs[0].order:
        while True:
            eps = [eat_capacity(oracles[i], x[i], e) for i in range(n)]
            hungry = [i for i in range(n) if eps[i] > 0]
            s = sum(x[i][e] for i in range(n))
            if not hungry or s == 1:
                break
            step = min(min(eps[i] for i in hungry), (1 - s) / len(hungry))
            for i in hungry:
                x[i][e] += step
    return MechanismResult(tuple(map(tuple, x)), {"mechanism": "eating"}, frozenset({SD_EFFICIENT, SD_ENVY_FREE}))


def partition_into(fam, n: int, S: int, limit: int | None = None) -> tuple[int, ...] | None:
    """Split the item set S into n bundles feasible under ``fam``, or None.

    Items are placed one by one; empty bundles are interchangeable, so an item
    only ever opens the first empty one.
    """
    items = members(S)
    bundles = [0] * n
    budget = [assignment_guard() if limit is None else limit]

    def rec(k: int) -> bool:
        if k == len(items):
            return True
        budget[0] -= 1
        if budget[0] < 0:
            raise EnumerationTooLarge("partitionability search exceeded the enumeration guard")
        bit = 1 << items[k]
        opened = False
        for i in range(n):
            if bundles[i] == 0:
                if opened:
                    continue
                opened = True
            if membership(fam, bundles[i] | bit):
                bundles[i] |= bit
                if rec(k + 1):
                    return True
                bundles[i] &= ~bit
        return False

    return tuple(bundles) if rec(0) else None


def matroid_partitionable(oracle: RankOracle, n: int, S: int) -> bool:
    """Matroid-union test: S splits into n independent sets iff |X| <= n r(X) for all X in S."""
    return all(popcount(X) <= n * oracle.rank(X) for X in submasks(S))


def lex_max_union(inst: Instance) -> tuple[int, tuple[int, ...]]:
    """Greedy lexicographically largest set of items that n agents can share, with a split."""
    fam, n = inst.constraints[0], inst.n
    oracle = RankOracle(fam) if fam.matroid else None
    kept = 0
    for e in inst.prefs[0].order:
        trial = kept | 1 << e
        ok = matroid_partitionable(oracle, n, trial) if oracle else partition_into(fam, n, trial) is not None
        if ok:
            kept = trial
    split = partition_into(fam, n, kept)
    assert split is not None
    return kept, split


def mech_rotation(inst: Instance) -> MechanismResult:
    """Uniform lottery over the n cyclic shifts of a lexicographically best assignment."""
    if not (inst.identical_preferences() and inst.identical_constraints()):
        raise NotIdenticalAgents("rotation mechanism needs identical preferences and constraints")
    n = inst.n
    kept, split = lex_max_union(inst)
    shifts = [tuple(split[(k + i) % n] for i in range(n)) for k in range(n)]
    lottery = Lottery.from_pairs((Fraction(1, n), b) for b in shifts)
    return MechanismResult(induced_fractional(lottery, inst.m), {"mechanism": "rotation", "assigned": kept},
                           frozenset({SD_EFFICIENT, SD_ENVY_FREE}), lottery=lottery)


def mech_naive_ps(inst: Instance) -> MechanismResult:
    """Simultaneous eating where each agent takes her best item that is left and still addable.

    Event driven: between events every agent eats one item at unit speed and
    both the item stocks and her own capacity for that item fall linearly.
    """
    oracles = _oracles(inst)
    n, m = inst.n, inst.m
    x = [[Fraction(0)] * m for _ in range(n)]
    left = [Fraction(1)] * m
    while True:
        target: list[int | None] = [None] * n
        cap = [Fraction(0)] * n
        for i in range(n):
            for e in inst.prefs[i].order:
                if left[e] > 0:
                    c = eat_capacity(oracles[i], x[i], e)
                    if c > 0:
                        target[i], cap[i] = e, c
                        break
        eaters = [i for i in range(n) if target[i] is not None]
        if not eaters:
            break
        rate = {}
        for i in eaters:
            rate[target[i]] = rate.get(target[i], 0) + 1
        dt = min(min(cap[i] for i in eaters), min(left[e] / k for e, k in rate.items()))
        for i in eaters:
            x[i][target[i]] += dt
        for e, k in rate.items():
            left[e] -= dt * k
    return MechanismResult(tuple(map(tuple, x)), {"mechanism": "naive-ps"})


def snap(x, max_denominator: int = 48) -> Matrix:
    return tuple(tuple(Fraction(float(v)).limit_denominator(max_denominator) for v in row) for row in x)


def mech_anonymous(inst: Instance, tol: float = 1e-9, max_iter: int = 10**6, snap_denominator: int = 48) -> MechanismResult:
    """Unique minimiser of the strictly convex prefix-shortfall objective over P.

    The float optimum is snapped to nearby small-denominator rationals; the
    snapped point is kept only when it is exactly feasible.
    """
    from .verify import check_feasible

    res = frank_wolfe_qp(inst, tol=tol, max_iter=max_iter)
    snapped = snap(res.x, snap_denominator)
    ok, _ = check_feasible(inst, snapped)
    params = {"mechanism": "anonymous", "tol": tol, "gap": res.gap, "objective": res.objective, "iterations": res.iterations,
              "snapped": ok, "approx": res.x}
    if ok:
        pi = snapped
    else:
        pi = tuple(tuple(Fraction(float(v)) for v in row) for row in res.x)
    return MechanismResult(pi, params, frozenset({SD_EFFICIENT, ANONYMOUS}))


MECHANISMS = {
    "two-agent": mech_two_agent,
    "eating": mech_eating,
    "rotation": mech_rotation,
    "naive-ps": mech_naive_ps,
    "anonymous": mech_anonymous,
}


def brute_lex_max_union(inst: Instance) -> int:
    """Reference: best assigned-item set by enumerating all assignments (small instances)."""
    from .domain import enumerate_assignments

    order = inst.prefs[0].order
    best_key, best = None, 0
    for bundles in enumerate_assignments(inst):
        used = 0
        for b in bundles:
            used |= b
        key = tuple(used >> e & 1 for e in order)
        if best_key is None or key > best_key:
            best_key, best = key, used
    return best

