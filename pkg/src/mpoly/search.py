"""Feasibility search over matrix polytopes.

Four entry points:

* :func:`search_general` hunts for a convex combination that is a
  nonsingular M-matrix by multi-start projected ascent on the smallest
  leading principal minor (an exact M-matrix margin that needs no
  eigensolves), plus a coarse simplex grid for small families. It returns
  FEASIBLE only with a re-certified witness and otherwise UNKNOWN, never
  INFEASIBLE: absence of a found point proves nothing for this problem.
* :func:`search_symmetric` solves the symmetric case, which is concave:
  maximize the smallest eigenvalue over the simplex cut by the linear
  Z-sign constraints, using a cutting-plane scheme whose LP value is a
  certified upper bound on the optimum. It may return INFEASIBLE.
* :func:`minimize_spectral_radius` descends on the spectral radius of a
  combination of nonnegative matrices (Perron left/right eigenvector
  gradient when the radius is simple, finite differences otherwise).
* :func:`hurwitz_search` descends on the spectral abscissa and certifies
  Hurwitz witnesses by re-computing eigenvalues.

All searches are deterministic for a fixed seed; restarts merge by best
merit with ties to the earliest start.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from . import config
from .errors import DimensionMismatch, DomainError, NotSymmetric
from .linalg import Matrix, Z_SLACK
from .mmatrix import CONSENSUS_YES, certify
from .reduction import convex_combination
from .simplex import (
    SimplexPoint,
    project_to_simplex,
    rationalize,
    sample_simplex_rows,
)

GRID_DENOM = 8
GRID_MAX_K = 4
MAX_STARTS = 24
ITERS_PER_START = 60
MERIT_FD_STEP = 1e-6
SPECTRAL_FD_STEP = 1e-7
EIG_GAP = 1e-8


class SearchStatus(enum.Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SearchOutcome:
    """Search result with the best-so-far merit trace and evaluation count."""

    status: SearchStatus
    certificate: SimplexPoint | None
    objective_trace: tuple
    budget_spent: int
    margins: dict | None = None

    def to_json_dict(self) -> dict:
        cert = None if self.certificate is None else self.certificate.to_json_list()
        margins = None
        if self.margins is not None:
            margins = {
                k: (v if isinstance(v, str) or math.isfinite(v) else repr(v))
                for k, v in self.margins.items()
            }
        return {
            "status": self.status.value,
            "certificate": cert,
            "margins": margins,
            "budget_spent": self.budget_spent,
        }


def _validate_family(mats: Sequence[Matrix]) -> int:
    if not mats:
        raise DimensionMismatch("need at least one matrix")
    n = mats[0].n
    if any(m.n != n for m in mats):
        raise DimensionMismatch("matrices must share one dimension")
    return n


def _compositions(total: int, parts: int):
    """All length-`parts` tuples of nonnegative ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


class _Tracker:
    """Evaluation counter plus monotone best-so-far trace."""

    __slots__ = ("spent", "best", "trace", "budget")

    def __init__(self, budget: int):
        self.spent = 0
        self.best = -math.inf
        self.trace: list[tuple[int, float]] = []
        self.budget = budget

    def record(self, count: int, merit: float) -> None:
        self.spent += count
        if merit > self.best:
            self.best = merit
            self.trace.append((self.spent, float(merit)))

    def room(self, cost: int = 1) -> bool:
        return self.spent + cost <= self.budget


# -- general (nonsymmetric) M-matrix search ----------------------------------


def search_general(
    matrices: Sequence[Matrix], budget: int = 50_000, seed: int = 0
) -> SearchOutcome:
    """Heuristic feasibility search for an M-matrix convex combination.

    Merit is the smallest leading principal minor of the combination; every
    candidate with positive merit is independently re-certified (in exact
    arithmetic when the inputs are rational) before FEASIBLE is reported.
    """
    mats = list(matrices)
    dim = _validate_family(mats)
    k = len(mats)
    exact_inputs = all(m.is_exact for m in mats)
    stack = np.stack([m.as_array() for m in mats])
    tol = config.tolerance()
    tracker = _Tracker(budget)

    def merit_batch(points: np.ndarray) -> np.ndarray:
        combos = np.tensordot(points, stack, axes=(1, 0))
        vals = np.full(points.shape[0], np.inf)
        for i in range(1, dim + 1):
            vals = np.minimum(vals, np.linalg.det(combos[:, :i, :i]))
        tracker.record(points.shape[0], float(vals.max()))
        return vals

    def merit(w: np.ndarray) -> float:
        return float(merit_batch(w[None, :])[0])

    def finish(status, cert=None, margins=None) -> SearchOutcome:
        return SearchOutcome(
            status, cert, tuple(tracker.trace), tracker.spent, margins
        )

    def verified(point: SimplexPoint) -> SearchOutcome | None:
        combo = convex_combination(mats, point)
        report = certify(combo)
        if report.is_z and report.consensus == CONSENSUS_YES:
            return finish(SearchStatus.FEASIBLE, point, dict(report.margins))
        return None

    def attempt(w: np.ndarray) -> SearchOutcome | None:
        point = rationalize(w) if exact_inputs else SimplexPoint.from_floats(w)
        return verified(point)

    # vertex pass: each input matrix alone
    for i in range(k):
        if not tracker.room():
            return finish(SearchStatus.UNKNOWN)
        w = np.zeros(k)
        w[i] = 1.0
        if merit(w) > tol:
            point = SimplexPoint.vertex(k, i) if exact_inputs else SimplexPoint.from_floats(w)
            res = verified(point)
            if res is not None:
                return res

    # coarse grid pass, resolution 1/8, only affordable for small families
    if k <= GRID_MAX_K:
        for comp in _compositions(GRID_DENOM, k):
            if not tracker.room():
                return finish(SearchStatus.UNKNOWN)
            w = np.array(comp, dtype=np.float64) / GRID_DENOM
            if merit(w) > tol:
                if exact_inputs:
                    point = SimplexPoint(
                        tuple(Fraction(c, GRID_DENOM) for c in comp)
                    )
                else:
                    point = SimplexPoint.from_floats(w)
                res = verified(point)
                if res is not None:
                    return res

    # multi-start projected first-order ascent
    rng = np.random.default_rng(seed)
    eye = np.eye(k)
    for start in range(MAX_STARTS):
        if not tracker.room(k + 2):
            break
        if start == 0:
            w = np.full(k, 1.0 / k)
        else:
            w = sample_simplex_rows(rng, 1, k)[0]
        fv = merit(w)
        step = 0.25
        while True:
            if fv > tol or not tracker.room(k + 4):
                break
            grads = (merit_batch(w[None, :] + MERIT_FD_STEP * eye) - fv) / MERIT_FD_STEP
            improved = False
            for _ in range(4):
                cand = project_to_simplex(w + step * grads)
                if np.abs(cand - w).max() < 1e-14:
                    break
                fc = merit(cand)
                if fc > fv + 1e-15:
                    w, fv = cand, fc
                    step = min(step * 1.6, 1.0)
                    improved = True
                    break
                step *= 0.25
            if not improved:
                break
        if fv > tol:
            res = attempt(w)
            if res is not None:
                return res
    return finish(SearchStatus.UNKNOWN)


# -- symmetric convex path ----------------------------------------------------


def _check_symmetric(mats: Sequence[Matrix]) -> None:
    for idx, m in enumerate(mats):
        arr = m.as_array()
        if float(np.abs(arr - arr.T).max()) > 1e-12:
            raise NotSymmetric(f"matrix {idx} is not symmetric")


def search_symmetric(
    matrices: Sequence[Matrix], tolerance: float = 1e-6
) -> SearchOutcome:
    """Certified search over symmetric families.

    Maximizes the smallest eigenvalue of the combination over the simplex
    intersected with the Z-sign constraints (each off-diagonal entry of the
    combination <= 0, affine in the weights). The objective is concave, so a
    cutting-plane relaxation gives certified upper bounds: FEASIBLE when a
    verified point exceeds `tolerance`, INFEASIBLE when the certified upper
    bound drops below `-tolerance`, UNKNOWN in the marginal band.
    """
    mats = list(matrices)
    dim = _validate_family(mats)
    _check_symmetric(mats)
    if not tolerance > 0:
        raise DomainError("tolerance must be positive")
    k = len(mats)
    stack = np.stack([m.as_array() for m in mats])
    tracker = _Tracker(10_000)

    # lower: best smallest-eigenvalue among points inside the polytope (up to
    # LP-scale constraint slack); only these drive the optimality gap
    best_lower = -math.inf
    best_z_lam = -math.inf  # best among strictly Z-satisfying candidates
    best_z_point: SimplexPoint | None = None
    LP_SLACK = 1e-7

    def lam_min(w: np.ndarray):
        nonlocal best_lower, best_z_lam, best_z_point
        b = np.tensordot(w, stack, axes=(0, 0))
        vals, vecs = np.linalg.eigh(b)
        lam = float(vals[0])
        tracker.record(1, lam)
        off = b.copy()
        np.fill_diagonal(off, -np.inf)
        violation = float(off.max())
        if violation <= LP_SLACK:
            best_lower = max(best_lower, lam)
        if violation <= Z_SLACK and lam > best_z_lam:
            best_z_lam = lam
            best_z_point = SimplexPoint.from_floats(w)
        return lam, vecs[:, 0]

    cuts: list[np.ndarray] = [np.eye(dim)[i] for i in range(dim)]

    # vertex seeding; lam_min only counts vertices whose matrix satisfies the
    # Z constraints, since other vertices sit outside the feasible polytope
    for i in range(k):
        w = np.zeros(k)
        w[i] = 1.0
        lam_min(w)

    c = np.zeros(k + 1)
    c[-1] = -1.0  # maximize t
    a_eq = np.zeros((1, k + 1))
    a_eq[0, :k] = 1.0
    b_eq = np.array([1.0])
    bounds = [(0.0, 1.0)] * k + [(None, None)]

    offdiag_rows = []
    for i in range(dim):
        for jdx in range(i + 1, dim):
            offdiag_rows.append(list(stack[:, i, jdx]) + [0.0])

    upper = math.inf
    for _ in range(100):
        a_ub = list(offdiag_rows)
        b_ub = [0.0] * len(offdiag_rows)
        for v in cuts:
            quad = stack @ v @ v  # (k,) of v' A_m v
            a_ub.append(list(-quad) + [1.0])
            b_ub.append(0.0)
        res = linprog(
            c,
            A_ub=np.array(a_ub),
            b_ub=np.array(b_ub),
            A_eq=a_eq,
            b_eq=b_eq,
            bounds=bounds,
            method="highs",
        )
        if res.status == 2:
            # simplex and Z constraints are jointly infeasible: no combination
            # is even a Z-matrix, so none is an M-matrix
            return SearchOutcome(
                SearchStatus.INFEASIBLE,
                None,
                tuple(tracker.trace),
                tracker.spent,
                {"optimum_upper_bound": -math.inf},
            )
        if res.status != 0:
            break
        upper = float(res.x[-1])
        w = np.maximum(res.x[:k], 0.0)
        w = w / w.sum()
        _, vec = lam_min(w)
        cuts.append(vec)
        snapped = np.where(w < 1e-9, 0.0, w)
        if snapped.sum() > 0 and not np.array_equal(snapped, w):
            lam_min(snapped / snapped.sum())
        if upper < -tolerance:
            break
        if upper - best_lower <= tolerance:
            break

    margins = {"optimum_upper_bound": upper, "best_lambda_min": best_z_lam}
    if upper < -tolerance:
        return SearchOutcome(
            SearchStatus.INFEASIBLE, None, tuple(tracker.trace), tracker.spent, margins
        )
    if best_z_lam > tolerance and best_z_point is not None:
        combo = convex_combination(mats, best_z_point)
        report = certify(combo)
        if report.is_z and report.consensus == CONSENSUS_YES:
            margins.update(report.margins)
            return SearchOutcome(
                SearchStatus.FEASIBLE,
                best_z_point,
                tuple(tracker.trace),
                tracker.spent,
                margins,
            )
    return SearchOutcome(
        SearchStatus.UNKNOWN, None, tuple(tracker.trace), tracker.spent, margins
    )


# -- spectral-objective descent (shared by radius and abscissa searches) ------


def _eig_info(b: np.ndarray):
    vals, vecs = np.linalg.eig(b)
    return vals, vecs


def _left_right_derivative(
    stack: np.ndarray, b: np.ndarray, lam: complex, v: np.ndarray
) -> np.ndarray | None:
    """d(lambda)/d(weights) via left/right eigenvectors; None when ill-posed."""
    vals_t, vecs_t = np.linalg.eig(b.T)
    kt = int(np.argmin(np.abs(vals_t - lam)))
    if abs(vals_t[kt] - lam) > 1e-6:
        return None
    u = vecs_t[:, kt]
    denom = u @ v
    if abs(denom) < 1e-10:
        return None
    return np.array([(u @ (a @ v)) / denom for a in stack])


def _radius_gradient(stack: np.ndarray, b: np.ndarray):
    """(rho, gradient or None); gradient only when the radius is attained by
    a single, real, well-separated eigenvalue (the Perron case)."""
    vals, vecs = _eig_info(b)
    idx = int(np.argmax(np.abs(vals)))
    lam = vals[idx]
    rho = float(abs(lam))
    near = np.sum(np.abs(vals) >= rho - EIG_GAP)
    if near != 1 or abs(lam.imag) > EIG_GAP or rho <= EIG_GAP:
        return rho, None
    deriv = _left_right_derivative(stack, b, lam, vecs[:, idx])
    if deriv is None:
        return rho, None
    return rho, np.real(deriv)


def _abscissa_gradient(stack: np.ndarray, b: np.ndarray):
    """(abscissa, gradient or None); a conjugate pair at the top is fine."""
    vals, vecs = _eig_info(b)
    idx = int(np.argmax(vals.real))
    lam = vals[idx]
    absc = float(lam.real)
    for j, other in enumerate(vals):
        if j == idx or other.real < absc - EIG_GAP:
            continue
        if abs(other - np.conjugate(lam)) > EIG_GAP:
            return absc, None
    deriv = _left_right_derivative(stack, b, lam, vecs[:, idx])
    if deriv is None:
        return absc, None
    return absc, np.real(deriv)


def _descend_spectral(
    stack: np.ndarray,
    k: int,
    budget: int,
    seed: int,
    objective,
    gradient,
    stop_below: float | None,
):
    """Multi-start projected descent on a spectral objective.

    `objective(w)` returns the value; `gradient(w)` returns (value, grad or
    None), falling back to forward differences with the fixed spectral step
    when the eigenvalue structure makes the derivative unreliable. Returns
    (best weights, best value, evaluations, trace of (eval, -value)).
    """
    tracker = _Tracker(budget)
    best_val = math.inf
    best_w: np.ndarray | None = None

    def evaluate(w: np.ndarray) -> float:
        nonlocal best_val, best_w
        val = objective(w)
        tracker.record(1, -val)
        if val < best_val:
            best_val = val
            best_w = w.copy()
        return val

    def fd_grad(w: np.ndarray, base: float) -> np.ndarray:
        grads = np.empty(k)
        for i in range(k):
            probe = w.copy()
            probe[i] += SPECTRAL_FD_STEP
            grads[i] = (evaluate(probe) - base) / SPECTRAL_FD_STEP
        return grads

    # the uniform point is always evaluated so a best exists at any budget
    evaluate(np.full(k, 1.0 / k))
    if stop_below is not None and best_val < stop_below:
        return best_w, best_val, tracker

    # vertices, then grid for small families, then random restarts
    starts: list[np.ndarray] = [np.eye(k)[i] for i in range(k)]
    grid_pts: list[np.ndarray] = []
    if k <= GRID_MAX_K:
        for comp in _compositions(GRID_DENOM, k):
            grid_pts.append(np.array(comp, dtype=np.float64) / GRID_DENOM)
    for w in starts + grid_pts:
        if not tracker.room():
            break
        evaluate(w)
        if stop_below is not None and best_val < stop_below:
            return best_w, best_val, tracker
    rng = np.random.default_rng(seed)
    for start in range(16):
        if not tracker.room(k + 2):
            break
        w = np.full(k, 1.0 / k) if start == 0 else sample_simplex_rows(rng, 1, k)[0]
        fv = evaluate(w)
        step = 0.25
        for _ in range(ITERS_PER_START):
            if stop_below is not None and fv < stop_below:
                break
            if not tracker.room(k + 4):
                break
            val, grad = gradient(w)
            tracker.record(1, -val)
            if grad is None:
                grad = fd_grad(w, fv)
            improved = False
            for _ in range(4):
                cand = project_to_simplex(w - step * grad)
                if np.abs(cand - w).max() < 1e-14:
                    break
                fc = evaluate(cand)
                if fc < fv - 1e-15:
                    w, fv = cand, fc
                    step = min(step * 1.6, 1.0)
                    improved = True
                    break
                step *= 0.25
            if not improved:
                break
        if stop_below is not None and best_val < stop_below:
            break
    return best_w, best_val, tracker


def minimize_spectral_radius(
    matrices: Sequence[Matrix], budget: int = 50_000, seed: int = 0
) -> tuple[SimplexPoint, float]:
    """Best (weights, spectral radius) found over combinations of nonnegative
    matrices. The "radius below one" reading of the result is advisory and
    should be cross-checked by certifying I minus the combination."""
    mats = list(matrices)
    _validate_family(mats)
    for idx, m in enumerate(mats):
        if m.is_exact:
            if any(x < 0 for row in m.rows() for x in row):
                raise DomainError(f"matrix {idx} has a negative entry")
        elif float(m.as_array().min()) < 0.0:
            raise DomainError(f"matrix {idx} has a negative entry")
    stack = np.stack([m.as_array() for m in mats])
    k = len(mats)

    def objective(w: np.ndarray) -> float:
        b = np.tensordot(w, stack, axes=(0, 0))
        return float(np.max(np.abs(np.linalg.eigvals(b))))

    def gradient(w: np.ndarray):
        b = np.tensordot(w, stack, axes=(0, 0))
        return _radius_gradient(stack, b)

    best_w, _, _ = _descend_spectral(
        stack, k, budget, seed, objective, gradient, stop_below=None
    )
    point = SimplexPoint.from_floats(best_w)
    return point, objective(point.to_floats())


def hurwitz_search(
    matrices: Sequence[Matrix], budget: int = 50_000, seed: int = 0
) -> SearchOutcome:
    """Search for a Hurwitz-stable convex combination.

    Descends on the spectral abscissa; FEASIBLE requires the certificate's
    eigenvalues, recomputed from scratch, to all sit below -tolerance.
    Never INFEASIBLE.
    """
    mats = list(matrices)
    _validate_family(mats)
    stack = np.stack([m.as_array() for m in mats])
    k = len(mats)
    tol = config.tolerance()

    def objective(w: np.ndarray) -> float:
        b = np.tensordot(w, stack, axes=(0, 0))
        return float(np.max(np.linalg.eigvals(b).real))

    def gradient(w: np.ndarray):
        b = np.tensordot(w, stack, axes=(0, 0))
        return _abscissa_gradient(stack, b)

    best_w, best_val, tracker = _descend_spectral(
        stack, k, budget, seed, objective, gradient, stop_below=-tol
    )
    if best_w is not None and best_val < -tol:
        point = SimplexPoint.from_floats(best_w)
        combo = convex_combination(mats, point)
        abscissa = max(z.real for z in np.linalg.eigvals(combo.as_array()))
        if abscissa < -tol:
            return SearchOutcome(
                SearchStatus.FEASIBLE,
                point,
                tuple(tracker.trace),
                tracker.spent,
                {"spectral_abscissa": float(abscissa)},
            )
    return SearchOutcome(
        SearchStatus.UNKNOWN,
        None,
        tuple(tracker.trace),
        tracker.spent,
        {"best_abscissa": float(best_val) if best_w is not None else math.inf},
    )
