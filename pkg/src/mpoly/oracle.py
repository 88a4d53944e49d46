"""Ground-truth graph machinery.

Exact maximum independent set by budgeted branch and bound, and a
multi-start projected-gradient minimizer for the quadratic form
y' (I + C) y over the probability simplex, whose global minimum equals
1/alpha(G). Restart start points depend only on the seed and restart
index, so results are reproducible and independent of execution order;
ties between restarts resolve to the lowest restart index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, DomainError
from .reduction import Graph
from .simplex import SimplexPoint, project_rows_to_simplex, sample_simplex_rows

MAX_EXACT_VERTICES = 30
DEFAULT_NODE_BUDGET = 100_000_000
STATIONARITY_TOL = 1e-10


@dataclass(frozen=True)
class IndependentSetResult:
    alpha: int
    witness: frozenset
    node_count: int


def _greedy_seed(masks: list[int], n: int) -> int:
    """Min-degree greedy independent set, as a pruning seed (returns a mask)."""
    avail = (1 << n) - 1
    chosen = 0
    while avail:
        verts = [v for v in range(n) if avail >> v & 1]
        v = min(verts, key=lambda u: (bin(masks[u] & avail).count("1"), u))
        chosen |= 1 << v
        avail &= ~(masks[v] | 1 << v)
    return chosen


def max_independent_set(
    g: Graph, node_budget: int = DEFAULT_NODE_BUDGET
) -> IndependentSetResult:
    """Exact maximum independent set for graphs on at most 30 vertices.

    Branch and bound over vertex inclusion: branch on the highest-degree
    available vertex, prune with the remaining-vertices bound, keep the
    first optimum found. Deterministic for a given graph.
    """
    n = g.n
    if n > MAX_EXACT_VERTICES:
        raise DomainError(f"exact search supports n <= {MAX_EXACT_VERTICES}, got {n}")
    masks = g.neighbor_masks()
    best_mask = _greedy_seed(masks, n)
    best = bin(best_mask).count("1")
    nodes = 0

    def walk(avail: int, size: int, chosen: int) -> None:
        nonlocal nodes, best, best_mask
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded(f"exceeded node budget {node_budget}")
        if size + bin(avail).count("1") <= best:
            return
        if avail == 0:
            best = size
            best_mask = chosen
            return
        verts = [v for v in range(n) if avail >> v & 1]
        v = max(verts, key=lambda u: (bin(masks[u] & avail).count("1"), -u))
        walk(avail & ~(masks[v] | 1 << v), size + 1, chosen | 1 << v)
        walk(avail & ~(1 << v), size, chosen)

    full = (1 << n) - 1
    if best < n:
        walk(full, 0, 0)
    witness = frozenset(v for v in range(n) if best_mask >> v & 1)
    return IndependentSetResult(alpha=best, witness=witness, node_count=nodes)


@dataclass(frozen=True)
class MSolveResult:
    value: float
    minimizer: SimplexPoint
    restarts_used: int


def motzkin_straus_min(
    g: Graph,
    restarts: int | None = None,
    iters: int = 1000,
    seed: int = 0,
) -> MSolveResult:
    """Minimize y' (I + C) y over the simplex by multi-start projected gradient.

    Starts are the uniform point plus ``restarts - 1`` seeded Dirichlet(1)
    samples; ``restarts`` defaults to 20 n. Each run takes fixed steps of
    length 1/L with L twice the largest eigenvalue of I + C (so the
    objective decreases monotonically) and stops once the iterate moves
    less than 1e-10. The reported value is re-evaluated at the minimizer.
    """
    n = g.n
    if restarts is None:
        restarts = 20 * n
    if restarts < 1:
        raise DomainError("restarts must be at least 1")
    if iters < 1:
        raise DomainError("iters must be at least 1")

    a = np.asarray(g.adjacency_rows(exact=False), dtype=np.float64) + np.eye(n)
    lip = 2.0 * float(np.linalg.eigvalsh(a).max())
    step = 1.0 / max(lip, 2.0)

    rng = np.random.default_rng(seed)
    pts = np.empty((restarts, n), dtype=np.float64)
    pts[0] = 1.0 / n
    if restarts > 1:
        pts[1:] = sample_simplex_rows(rng, restarts - 1, n)

    for _ in range(iters):
        grad = 2.0 * (pts @ a)
        nxt = project_rows_to_simplex(pts - step * grad)
        moved = np.abs(nxt - pts).max()
        pts = nxt
        if moved < STATIONARITY_TOL:
            break

    values = np.einsum("ri,ij,rj->r", pts, a, pts)
    best = int(np.argmin(values))  # ties resolve to the lowest restart index
    minimizer = SimplexPoint.from_floats(pts[best])
    w = minimizer.to_floats()
    value = float(w @ a @ w)
    return MSolveResult(value=value, minimizer=minimizer, restarts_used=restarts)


def extract_independent_set(g: Graph, pi: SimplexPoint) -> frozenset:
    """Round a simplex point to an independent set.

    Scans the support by descending weight (ties to the lower vertex) and
    keeps every vertex not adjacent to one already kept. Always independent;
    recovers S exactly when pi is uniform on an independent set S.
    """
    if len(pi) != g.n:
        raise DimensionMismatch(f"{len(pi)} weights for {g.n} vertices")
    w = [float(x) for x in pi.weights]
    order = sorted((v for v in range(g.n) if w[v] > 0.0), key=lambda v: (-w[v], v))
    chosen: list[int] = []
    for v in order:
        if all(not g.has_edge(v, u) for u in chosen):
            chosen.append(v)
    return frozenset(chosen)


def alpha_lower_bound(value: float) -> int:
    """Independent-set size implied by an achieved quadratic-form value.

    Any feasible point with form value v certifies alpha >= 1/v; the small
    shift guards against the value sitting a rounding error above 1/alpha.
    """
    value = float(value)
    if not value > 0.0:
        raise DomainError("achieved value must be positive")
    return math.ceil(1.0 / value - 1e-9)
