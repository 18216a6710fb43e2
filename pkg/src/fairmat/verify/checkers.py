"""Pure certificate checkers.

These work on the JSON payloads alone and deliberately reimplement the few
definitions they need (family membership, induced marginals, prefix sums,
assignment enumeration) instead of importing them from the producers.
Every checker returns ``(ok, reason)``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def _q(v) -> Fraction:
    return Fraction(v) if not isinstance(v, float) else Fraction(str(v))


class _Inst:
    def __init__(self, obj: dict):
        self.labels = [str(x) for x in obj["items"]]
        self.m = len(self.labels)
        self.index = {lab: k for k, lab in enumerate(self.labels)}
        self.prefs = [[self.index[x] for x in p] for p in obj["prefs"]]
        self.fams = obj["constraints"]
        self.n = len(self.prefs)

    def feasible(self, i: int, items: frozenset) -> bool:
        fam = self.fams[i]
        kind = fam["kind"]
        names = {self.labels[e] for e in items}
        if kind == "free":
            return True
        if kind == "uniform":
            return len(items) <= int(fam["cap"])
        if kind == "partition":
            return all(len(names & set(b["items"])) <= int(b["cap"]) for b in fam["blocks"])
        if kind == "budget":
            w = fam["weights"]
            return sum((_q(w[x]) for x in names), Fraction(0)) <= _q(fam["budget"])
        if kind == "explicit":
            return any(names <= set(s) for s in fam["maximal"])
        raise ValueError(f"unknown family kind {kind!r}")

    def best_subset(self, i: int, items: frozenset) -> int:
        """Size of the largest feasible subset of ``items`` for agent i, by brute force."""
        items = sorted(items)
        for size in range(len(items), -1, -1):
            if any(self.feasible(i, frozenset(c)) for c in itertools.combinations(items, size)):
                return size
        return 0

    def assignments(self, limit: int = 2_000_000):
        """Every deterministic assignment as a tuple of frozensets (owner per item, -1 = nobody)."""
        count = 0
        for owners in itertools.product(range(-1, self.n), repeat=self.m):
            count += 1
            if count > limit:
                raise ValueError("too many assignments to check")
            bundles = tuple(frozenset(e for e in range(self.m) if owners[e] == i) for i in range(self.n))
            if all(self.feasible(i, bundles[i]) for i in range(self.n)):
                yield bundles

    def bundles(self, raw) -> tuple[frozenset, ...]:
        return tuple(frozenset(self.index[x] for x in b) for b in raw)


def _matrix(raw) -> list[list[Fraction]]:
    return [[_q(v) for v in row] for row in raw]


def _marginals(inst: _Inst, support) -> list[list[Fraction]]:
    pi = [[Fraction(0)] * inst.m for _ in range(inst.n)]
    for p, bundles in support:
        for i, b in enumerate(bundles):
            for e in b:
                pi[i][e] += p
    return pi


def _read_lottery(inst: _Inst, raw) -> tuple[list, str | None]:
    support = []
    for entry in raw["support"]:
        p = _q(entry["p"])
        bundles = inst.bundles(entry["bundles"])
        if len(bundles) != inst.n:
            return [], "bundle count differs from agent count"
        if p <= 0:
            return [], "non-positive probability"
        seen: set = set()
        for i, b in enumerate(bundles):
            if seen & b:
                return [], "an item is given to two agents"
            seen |= b
            if not inst.feasible(i, b):
                return [], f"bundle of agent {i} is infeasible"
        support.append((p, bundles))
    if sum(p for p, _ in support) != 1:
        return [], "probabilities do not sum to one"
    return support, None


def _prefix(inst: _Inst, i: int, row) -> list[Fraction]:
    out, acc = [], Fraction(0)
    for e in inst.prefs[i]:
        acc += row[e]
        out.append(acc)
    return out


def check_decomposition(payload: dict) -> tuple[bool, str]:
    inst = _Inst(payload["instance"])
    support, err = _read_lottery(inst, payload["lottery"])
    if err:
        return False, err
    if _marginals(inst, support) != _matrix(payload["pi"]):
        return False, "lottery does not induce the stated matrix"
    bound = payload.get("max_support")
    if bound is not None and len(support) > int(bound):
        return False, f"support {len(support)} exceeds {bound}"
    return True, "lottery is feasible and induces the matrix"


def check_dominating_point(payload: dict) -> tuple[bool, str]:
    inst = _Inst(payload["instance"])
    pi = _matrix(payload["pi"])
    dom = _matrix(payload["dominator"])
    support, err = _read_lottery(inst, payload["lottery"])
    if err:
        return False, "dominator lottery: " + err
    if _marginals(inst, support) != dom:
        return False, "lottery does not induce the dominator"
    for i in range(inst.n):
        if any(a < b for a, b in zip(_prefix(inst, i, dom[i]), _prefix(inst, i, pi[i]))):
            return False, f"agent {i} is worse off under the dominator"
    if dom == pi:
        return False, "dominator equals the point"
    return True, "feasible point sd-dominates the given matrix"


def check_envy_witness(payload: dict) -> tuple[bool, str]:
    inst = _Inst(payload["instance"])
    i, j = int(payload["envier"]), int(payload["envied"])
    e = inst.index[payload["item"]]
    k = inst.prefs[i].index(e)
    upper = frozenset(inst.prefs[i][: k + 1])
    if "lottery" in payload:
        support, err = _read_lottery(inst, payload["lottery"])
        if err:
            return False, err
        own = sum((p * len(b[i] & upper) for p, b in support), Fraction(0))
        other = sum((p * inst.best_subset(i, b[j] & upper) for p, b in support), Fraction(0))
    else:
        if any(f != inst.fams[0] for f in inst.fams):
            return False, "matrix-form envy needs identical families"
        pi = _matrix(payload["pi"])
        own = sum((pi[i][x] for x in upper), Fraction(0))
        other = sum((pi[j][x] for x in upper), Fraction(0))
    if own < other:
        return True, f"agent {i} gets {own} < {other} of her top {k + 1} items"
    return False, "no envy at the stated item"


def check_farkas(payload: dict) -> tuple[bool, str]:
    """Rows are {"coeffs": {var: q}, "rel": "<=" | ">=" | "=", "rhs": q}; variables are >= 0."""
    rows, y = payload["rows"], [_q(v) for v in payload["multipliers"]]
    if len(rows) != len(y):
        return False, "one multiplier per row required"
    combo: dict[str, Fraction] = {}
    rhs = Fraction(0)
    for row, yk in zip(rows, y):
        if row["rel"] == "<=" and yk < 0 or row["rel"] == ">=" and yk > 0:
            return False, "multiplier has the wrong sign"
        for var, a in row["coeffs"].items():
            combo[str(var)] = combo.get(str(var), Fraction(0)) + yk * _q(a)
        rhs += yk * _q(row["rhs"])
    if any(v < 0 for v in combo.values()):
        return False, "combined row has a negative coefficient"
    if rhs >= 0:
        return False, "combined right-hand side is not negative"
    return True, "0 <= combined row . x <= combined rhs < 0 is impossible"


def check_hyperplane(payload: dict) -> tuple[bool, str]:
    """z . v + z0 >= 0 on every deterministic assignment v, but z . pi + z0 < 0."""
    inst = _Inst(payload["instance"])
    z, z0, pi = _matrix(payload["z"]), _q(payload["z0"]), _matrix(payload["pi"])
    at_pi = z0 + sum((z[i][e] * pi[i][e] for i in range(inst.n) for e in range(inst.m)), Fraction(0))
    if at_pi >= 0:
        return False, "the matrix is not cut off"
    for bundles in inst.assignments():
        if z0 + sum((z[i][e] for i in range(inst.n) for e in bundles[i]), Fraction(0)) < 0:
            return False, "an assignment violates the hyperplane"
    return True, "hyperplane separates the matrix from every assignment"


def _envy_row(inst: _Inst, columns, i: int, j: int, k: int) -> dict[str, Fraction]:
    upper = frozenset(inst.prefs[i][: k + 1])
    out = {}
    for c, b in enumerate(columns):
        v = len(b[i] & upper) - inst.best_subset(i, b[j] & upper)
        if v:
            out[str(c)] = Fraction(v)
    return out


def _expected_row(inst: _Inst, columns, label: str):
    parts = label.split()
    if parts[0] == "sum":
        return {str(c): Fraction(1) for c in range(len(columns))}, "=", Fraction(1)
    if parts[0] == "envy":
        i, j, k = map(int, parts[1:])
        return _envy_row(inst, columns, i, j, k), ">=", Fraction(0)
    if parts[0] == "marginal":
        i, e, v = int(parts[1]), inst.index[parts[2]], _q(parts[3])
        return {str(c): Fraction(1) for c, b in enumerate(columns) if e in b[i]}, "=", v
    raise ValueError(f"unknown row label {label!r}")


def check_lottery_envy_lp(payload: dict) -> tuple[bool, str]:
    """Rebuild every labelled row over the listed support, then check the Farkas multipliers.

    Rows labelled ``marginal`` pin an agent's probability for an item; when
    ``"pure_envy"`` is requested they must carry a zero multiplier so the
    contradiction rests on the envy rows and the probability sum alone.
    """
    inst = _Inst(payload["instance"])
    columns = [inst.bundles(c) for c in payload["columns"]]
    for c, b in enumerate(columns):
        if not all(inst.feasible(i, b[i]) for i in range(inst.n)):
            return False, f"column {c} is not a feasible assignment"
    for row in payload["rows"]:
        coeffs, rel, rhs = _expected_row(inst, columns, row["label"])
        given = {str(k): _q(v) for k, v in row["coeffs"].items() if _q(v)}
        if given != coeffs or row["rel"] != rel or _q(row["rhs"]) != rhs:
            return False, f"row {row['label']!r} does not match its definition"
    if payload.get("pure_envy"):
        for row, y in zip(payload["rows"], payload["multipliers"]):
            if row["label"].startswith("marginal") and _q(y) != 0:
                return False, "certificate leans on a pinned marginal"
    return check_farkas(payload)


def check_support_restriction(payload: dict) -> tuple[bool, str]:
    """Every assignment that leaves an item unassigned is mapped to an assignment dominating it."""
    inst = _Inst(payload["instance"])
    table = {}
    for pair in payload["pairs"]:
        table[inst.bundles(pair["assignment"])] = inst.bundles(pair["dominator"])
    full = frozenset(range(inst.m))
    for bundles in inst.assignments():
        if frozenset().union(*bundles) == full:
            continue
        dom = table.get(bundles)
        if dom is None:
            return False, "an assignment with an unassigned item has no dominator"
        seen: set = set()
        for i, b in enumerate(dom):
            if seen & b or not inst.feasible(i, b):
                return False, "dominator is not a feasible assignment"
            seen |= b
        strict = False
        for i in range(inst.n):
            mine = [Fraction(int(e in bundles[i])) for e in range(inst.m)]
            theirs = [Fraction(int(e in dom[i])) for e in range(inst.m)]
            a, b = _prefix(inst, i, theirs), _prefix(inst, i, mine)
            if any(x < y for x, y in zip(a, b)):
                return False, "dominator makes an agent worse off"
            strict |= a != b
        if not strict:
            return False, "dominator is not a strict improvement"
    return True, "every assignment leaving an item unassigned is dominated"


def full_coverage_columns(payload_instance: dict) -> set:
    inst = _Inst(payload_instance)
    full = frozenset(range(inst.m))
    return {b for b in inst.assignments() if frozenset().union(*b) == full}


CHECKERS = {
    "Decomposition": check_decomposition,
    "DominatingPoint": check_dominating_point,
    "EnvyWitness": check_envy_witness,
    "SupportRestriction": check_support_restriction,
}


def check(kind: str, payload: dict) -> tuple[bool, str]:
    if kind == "LPInfeasibility":
        form = payload.get("form")
        if form == "hyperplane":
            return check_hyperplane(payload)
        if form == "lottery-envy":
            ok, why = check_lottery_envy_lp(payload)
            if ok and payload.get("complete_support"):
                inst = _Inst(payload["instance"])
                listed = {inst.bundles(c) for c in payload["columns"]}
                if listed != full_coverage_columns(payload["instance"]):
                    return False, "columns are not exactly the full-coverage assignments"
            return ok, why
        return check_farkas(payload)
    try:
        fn = CHECKERS[kind]
    except KeyError:
        return False, f"unknown certificate kind {kind!r}"
    return fn(payload)
