"""Floating-point pairwise Frank-Wolfe for the anonymous quadratic objective.

minimise sum_i sum_e (sum_{e' >=_i e} (1 - x_ie'))^2 over P.

The objective is strictly decreasing in every coordinate that can still grow,
so the optimum lies in the hull of the inclusion-maximal assignments; those
are the atoms. Pairwise steps with exact line search converge linearly on a
polytope for a strongly convex quadratic, which is what makes a 1e-9 gap
reachable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..domain import Bundles, Instance
from ..errors import MaxIterations
from .polytope import VREP, PolytopeP, build_P


@dataclass
class QPResult:
    x: np.ndarray
    objective: float
    gap: float
    iterations: int
    atoms: list[tuple[float, Bundles]]


def _prefix_operators(inst: Instance) -> np.ndarray:
    """L[i, k, e] = 1 when item e is among agent i's k+1 favourites."""
    n, m = inst.n, inst.m
    L = np.zeros((n, m, m))
    for i, p in enumerate(inst.prefs):
        for e in range(m):
            L[i, p.rank[e]:, e] = 1.0
    return L


def anonymous_objective(inst: Instance, x: np.ndarray) -> float:
    L = _prefix_operators(inst)
    k = np.arange(1, inst.m + 1, dtype=float)
    r = k[None, :] - np.einsum("ike,ie->ik", L, np.asarray(x, dtype=float))
    return float(np.sum(r * r))


def frank_wolfe_qp(
    inst: Instance,
    tol: float = 1e-9,
    max_iter: int = 10**6,
    P: PolytopeP | None = None,
) -> QPResult:
    if tol <= 0:
        raise ValueError("tol must be positive")
    if P is None or P.representation != VREP:
        P = build_P(inst, VREP, maximal_only=True)
    n, m = inst.n, inst.m
    verts = P.vertices
    V = np.zeros((len(verts), n * m))
    for k, bundles in enumerate(verts):
        for i, b in enumerate(bundles):
            for e in range(m):
                if b >> e & 1:
                    V[k, i * m + e] = 1.0
    L = _prefix_operators(inst)
    kvec = np.arange(1, m + 1, dtype=float)

    def residual(x):
        return kvec[None, :] - np.einsum("ike,ie->ik", L, x.reshape(n, m))

    def grad(x):
        return (-2.0 * np.einsum("ike,ik->ie", L, residual(x))).ravel()

    def curvature(d):
        Ld = np.einsum("ike,ie->ik", L, d.reshape(n, m))
        return 2.0 * float(np.sum(Ld * Ld))

    alpha = np.zeros(len(verts))
    g = grad(np.zeros(n * m))
    s = int(np.argmin(V @ g))
    alpha[s] = 1.0
    x = V[s].copy()
    gap = np.inf
    it = 0
    while it < max_iter:
        g = grad(x)
        scores = V @ g
        s = int(np.argmin(scores))
        gap = float(g @ x - scores[s])
        if gap <= tol:
            break
        active = np.flatnonzero(alpha > 0)
        a = int(active[np.argmax(scores[active])])
        d = V[s] - V[a]
        gmax = alpha[a]
        slope = float(g @ d)
        curv = curvature(d)
        gamma = gmax if curv <= 0 else min(gmax, -slope / curv)
        x += gamma * d
        alpha[s] += gamma
        alpha[a] -= gamma
        if gamma == gmax:
            alpha[a] = 0.0
        it += 1
    else:
        raise MaxIterations(f"duality gap {gap:.3e} above {tol:.1e} after {max_iter} iterations")
    r = residual(x)
    atoms = [(float(alpha[k]), verts[k]) for k in np.flatnonzero(alpha > 0)]
    return QPResult(x.reshape(n, m), float(np.sum(r * r)), gap, it, atoms)
