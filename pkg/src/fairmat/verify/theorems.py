"""Machine-checkable evidence for the two nonexistence results.

Two agents, identical preferences: every lottery that leaves an item
unassigned is dominated, and over the remaining assignments the envy rows
have no solution (a Farkas certificate).

Three agents, identical partition matroid: the envy-free points meeting the
forced efficiency rows form a small polytope Q; every vertex and a seeded
sample of interior points get an explicit dominating point. The dominated set
is not convex, so this is evidence rather than a proof.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from ..domain import Instance, Matrix, enumerate_assignments, full_mask, members
from ..exactlp.polytope import build_P
from ..exactlp.simplex import EQ, LE, LinearProgram, simplex
from ..exactlp.vertices import enumerate_vertices
from ..instances import thm4_instance, thm5_general, thm5_instance
from ..io import instance_to_json, rat_str
from ..sdrel import efficiency_polytope, is_sd_efficient, sd_compare
from .certificates import (
    LP_INFEASIBILITY,
    SUPPORT_RESTRICTION,
    Certificate,
    check_certificate,
    dominating_point_certificate,
    lp_rows_json,
)
from .core import decompose, lottery_envy_lp

DEFAULT_SEED = 20240917


@dataclass
class Thm4Certificates:
    support: Certificate
    infeasibility: Certificate
    infeasible_without_marginals: bool

    def verified(self) -> bool:
        return check_certificate(self.support)[0] and check_certificate(self.infeasibility)[0]


def _bundle_labels(inst: Instance, bundles) -> list[list[str]]:
    return [inst.label_set(b) for b in bundles]


def certify_thm4_nonexistence() -> Thm4Certificates:
    inst = thm4_instance()
    E = full_mask(inst.m)
    pairs = []
    for bundles in enumerate_assignments(inst):
        x1, x2 = bundles
        if x1 | x2 != E:
            pairs.append({"assignment": _bundle_labels(inst, bundles),
                          "dominator": _bundle_labels(inst, (x1, E & ~x1))})
    support = Certificate(SUPPORT_RESTRICTION, {"instance": instance_to_json(inst), "pairs": pairs})

    columns = [b for b in enumerate_assignments(inst) if b[0] | b[1] == E]
    lp = lottery_envy_lp(inst, columns)
    bare = simplex(lp)
    e1 = inst.labels[0]
    for i in range(2):
        lp.add({c: 1 for c, b in enumerate(columns) if b[i] & 1}, EQ, Fraction(1, 2),
               f"marginal {i} {e1} 1/2")
    if bare.status == "infeasible":
        # the marginal rows are implied; keep them with zero weight
        y = list(bare.certificate) + [Fraction(0), Fraction(0)]
    else:
        y = list(simplex(lp).certificate)
    payload = {
        "form": "lottery-envy",
        "instance": instance_to_json(inst),
        "columns": [_bundle_labels(inst, b) for b in columns],
        "complete_support": True,
        "pure_envy": bare.status == "infeasible",
        "num_vars": lp.num_vars,
        "rows": lp_rows_json(lp),
        "multipliers": [rat_str(v) for v in y],
    }
    cert = Certificate(LP_INFEASIBILITY, payload)
    return Thm4Certificates(support, cert, bare.status == "infeasible")


# ---------------------------------------------------------------------------
# the three-agent polytope Q


@dataclass
class QPolytope:
    """Q in x-space (x[i*m + e] = pi_ie) as rows a.x <= b plus equalities."""

    inst: Instance
    ineqs: list
    eqs: list

    @property
    def nvars(self) -> int:
        return self.inst.n * self.inst.m

    def lp(self, objective: dict, sense: str) -> LinearProgram:
        lp = LinearProgram(self.nvars, dict(objective), sense)
        for a, b in self.ineqs:
            lp.add({k: v for k, v in enumerate(a) if v}, LE, b)
        for a, b in self.eqs:
            lp.add({k: v for k, v in enumerate(a) if v}, EQ, b)
        return lp

    def contains(self, x) -> bool:
        dot = lambda a: sum((v * x[k] for k, v in enumerate(a) if v), Fraction(0))  # noqa: E731
        return all(dot(a) <= b for a, b in self.ineqs) and all(dot(a) == b for a, b in self.eqs)


def _row(nvars: int, cells: dict) -> tuple:
    a = [Fraction(0)] * nvars
    for k, v in cells.items():
        a[k] += Fraction(v)
    return tuple(a)


def q_polytope(inst: Instance, forced_agents: int = 3) -> QPolytope:
    """P cut down by the row-wise envy-freeness rows plus the forced rows for the first agents.

    Forced rows: each of the first ``forced_agents`` agents gets one unit of
    {a, b, c} and 2/3 of {d, e}.
    """
    n, m = inst.n, inst.m
    N = n * m
    var = lambda i, e: i * m + e  # noqa: E731
    ineqs, eqs = [], []
    for k in range(N):
        ineqs.append((_row(N, {k: -1}), Fraction(0)))
    for e in range(m):
        ineqs.append((_row(N, {var(i, e): 1 for i in range(n)}), Fraction(1)))
    for i, X, r in build_P(inst, compact=True).rank_rows:
        ineqs.append((_row(N, {var(i, e): 1 for e in members(X)}), Fraction(r)))
    for i in range(n):
        pref = inst.prefs[i]
        for j in range(n):
            if i != j:
                for k in range(1, m + 1):
                    U = members(pref.prefix(k))
                    cells = {var(j, e): 1 for e in U}
                    for e in U:
                        cells[var(i, e)] = cells.get(var(i, e), 0) - 1
                    ineqs.append((_row(N, cells), Fraction(0)))
    abc = inst.mask(["a", "b", "c"])
    de = inst.mask(["d", "e"])
    for i in range(forced_agents):
        eqs.append((_row(N, {var(i, e): 1 for e in members(abc)}), Fraction(1)))
        eqs.append((_row(N, {var(i, e): 1 for e in members(de)}), Fraction(2, 3)))
    return QPolytope(inst, ineqs, eqs)


def _as_matrix(inst: Instance, x) -> Matrix:
    m = inst.m
    return tuple(tuple(Fraction(x[i * m + e]) for e in range(m)) for i in range(inst.n))


def dominate(inst: Instance, pi: Matrix, P=None) -> Certificate | None:
    """DominatingPoint certificate from the efficiency LP, or None if ``pi`` is efficient."""
    verdict = is_sd_efficient(inst, pi, P=P)
    if verdict.efficient:
        return None
    return dominating_point_certificate(inst, pi, verdict.witness, decompose(inst, verdict.witness))


def proof_matrix(alpha, beta, gamma) -> Matrix:
    """The three-parameter form every point of Q takes (pi_1d, pi_3a, pi_2c)."""
    F = Fraction
    a, b, g = F(alpha), F(beta), F(gamma)
    return (
        (1 - 3 * a + b, -1 + 3 * a - b + 2 * g, 1 - 2 * g, a, F(2, 3) - a),
        (3 * a - 2 * b, 1 - 3 * a + 2 * b - g, g, a, F(2, 3) - a),
        (b, 1 - b - g, g, 1 - 2 * a, F(-1, 3) + 2 * a),
    )


def _direction(kind: str) -> Matrix:
    z = [[0] * 5 for _ in range(3)]
    if kind == "prime":
        z[0][0], z[0][1], z[1][0], z[1][1] = 1, -1, -1, 1
    else:
        z[0][0], z[0][2], z[0][3], z[0][4] = -1, 1, 1, -1
        z[2][0], z[2][2], z[2][3], z[2][4] = 1, -1, -1, 1
    return tuple(tuple(Fraction(v) for v in row) for row in z)


def improvement_step(inst: Instance, pi: Matrix, kind: str) -> Matrix | None:
    """pi + eps * D for the fixed improvement direction D, with eps half the largest feasible step."""
    D = _direction(kind)
    P = build_P(inst, compact=True)
    n, m = inst.n, inst.m
    rows = [({(i, e): 1}, LE, 1) for i in range(n) for e in range(m)]
    rows += [({(i, e): 1 for i in range(n)}, LE, 1) for e in range(m)]
    rows += [({(i, e): 1 for e in members(X)}, LE, r) for i, X, r in P.rank_rows]
    rows += [({(i, e): -1}, LE, 0) for i in range(n) for e in range(m)]
    best = None
    for cells, _, rhs in rows:
        slope = sum(c * D[i][e] for (i, e), c in cells.items())
        if slope > 0:
            slack = rhs - sum(c * pi[i][e] for (i, e), c in cells.items())
            step = slack / slope
            best = step if best is None else min(best, step)
    if best is None or best <= 0:
        return None
    eps = best / 2
    return tuple(tuple(pi[i][e] + eps * D[i][e] for e in range(m)) for i in range(n))


@dataclass
class Thm5Report:
    n: int
    seed: int
    samples: int
    dimension: int
    vertices: list[Matrix]
    certificates: list[Certificate]
    undominated: list[Matrix]
    bounds: dict[str, Fraction]
    parametrisation_holds: bool | None
    directions: dict[str, int] = field(default_factory=dict)
    status: str = ("evidence: every vertex of Q and every sampled point is sd-dominated; "
                   "the dominated set is not convex, so this does not prove the claim for all of Q")

    @property
    def all_dominated(self) -> bool:
        return not self.undominated


def _affine_dimension(vertices) -> int:
    from ..exactlp.vertices import rref

    if len(vertices) <= 1:
        return 0
    base = vertices[0]
    diffs = [[a - b for a, b in zip(v, base)] for v in vertices[1:]]
    return len(rref(diffs, len(base))[1])


def certify_thm5_sampling(samples: int = 1000, seed: int = DEFAULT_SEED, n: int = 3) -> Thm5Report:
    """Dominating points for all vertices of Q and ``samples`` seeded interior points.

    For n = 3 the report also holds the exact extreme values of the three
    parameters over Q, a check that every vertex has the three-parameter
    matrix form, and counts of which improvement direction (pi' or pi'') applied.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    inst = thm5_instance() if n == 3 else thm5_general(n)
    Q = q_polytope(inst)
    verts = [_as_matrix(inst, v) for v in enumerate_vertices(Q.nvars, Q.ineqs, Q.eqs)]
    P = efficiency_polytope(inst)
    rng = random.Random(seed)
    points = list(verts)
    for _ in range(samples):
        w = [Fraction(rng.randint(1, 1000)) for _ in verts]
        total = sum(w)
        points.append(tuple(
            tuple(sum((wk * v[i][e] for wk, v in zip(w, verts)), Fraction(0)) / total for e in range(inst.m))
            for i in range(inst.n)))
    certs, bad = [], []
    for pi in points:
        cert = dominate(inst, pi, P)
        if cert is None:
            bad.append(pi)
        else:
            certs.append(cert)
    report = Thm5Report(n, seed, samples, _affine_dimension([sum(v, ()) for v in verts]), verts, certs, bad,
                        {}, None)
    if n == 3:
        m = inst.m
        a, b, c, d = (inst.labels.index(x) for x in "abcd")
        targets = {"gamma_min": ({1 * m + c: 1}, "min"), "alpha_max": ({0 * m + d: 1}, "max"),
                   "beta_max": ({2 * m + a: 1}, "max")}
        for name, (obj, sense) in targets.items():
            report.bounds[name] = simplex(Q.lp(obj, sense)).value
        report.parametrisation_holds = all(
            v == proof_matrix(v[0][d], v[2][a], v[1][c]) for v in verts)
        counts = {"prime": 0, "double_prime": 0, "neither": 0}
        for pi in points:
            applied = False
            for kind, key in (("prime", "prime"), ("double", "double_prime")):
                nxt = improvement_step(inst, pi, kind)
                if nxt is not None and all(
                        sd_compare(inst.prefs[i], nxt[i], pi[i]).weakly_dominates for i in range(inst.n)):
                    counts[key] += 1
                    applied = True
            if not applied:
                counts["neither"] += 1
        report.directions = counts
    return report

