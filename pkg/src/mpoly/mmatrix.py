"""Nonsingular M-matrix certification via five equivalent characterizations.

The five conditions cross-validate each other on Z-matrices:

* E17: all leading principal minors positive (exact when the input is
  rational, float-banded otherwise),
* D16: all (near-)real eigenvalues positive,
* N38: the inverse is entrywise nonnegative,
* POS_STABLE: every eigenvalue has positive real part,
* RHO_SPLIT: with s = max diagonal entry and N = s I - M (nonnegative by
  Z-structure), the spectral radius of N stays below s.

Eigenvalue-based conditions always run on the float copy and may report
MARGINAL near a boundary; E17 and N38 decide exactly on rational inputs.
Non-Z inputs still get raw verdicts, but the report's ``is_z`` flag marks
that the equivalences do not apply there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import DomainError, NoConvergence
from .linalg import (
    Matrix,
    Status,
    Verdict,
    banded_verdict,
    _encode_scalar,
    _inverse_exact,
    det,
    eigenvalues,
    is_z_matrix,
    leading_principal_minors,
    spectral_radius,
)

CONDITIONS = ("E17", "D16", "N38", "POS_STABLE", "RHO_SPLIT")

CONSENSUS_YES = "YES"
CONSENSUS_NO = "NO"
CONSENSUS_MARGINAL = "MARGINAL"
CONSENSUS_DISAGREE = "DISAGREE"


def check_e17(m: Matrix) -> Verdict:
    """All leading principal minors positive; margin is the smallest minor."""
    minors = leading_principal_minors(m)
    smallest = min(minors)
    if m.is_exact:
        return Verdict(Status.YES if smallest > 0 else Status.NO, float(smallest))
    return banded_verdict(smallest, exact=False)


def check_d16(m: Matrix) -> Verdict:
    """Every eigenvalue that is (near-)real must be positive.

    Decided on the float copy. A matrix without near-real eigenvalues
    passes vacuously with an infinite margin; that cannot happen for a
    Z-matrix, whose minimal eigenvalue is real.
    """
    tol = config.tolerance()
    eigs = eigenvalues(m.to_float())
    real_parts = [z.real for z in eigs if abs(z.imag) < tol]
    if not real_parts:
        return Verdict(Status.YES, math.inf)
    return banded_verdict(min(real_parts), exact=False)


def check_n38(m: Matrix) -> Verdict:
    """The inverse must be entrywise nonnegative; margin is its smallest entry.

    Singular input is a NO with margin -|det|. The YES band extends down to
    -tolerance because well-conditioned inverses routinely contain exact
    zeros (the identity is the canonical YES).
    """
    if m.is_exact:
        d = det(m)
        if d == 0:
            return Verdict(Status.NO, -abs(float(d)))
        inverse = _inverse_exact(m.rows())
        smallest = min(x for row in inverse for x in row)
        return Verdict(Status.YES if smallest >= 0 else Status.NO, float(smallest))
    arr = m.as_array()
    d = float(np.linalg.det(arr))
    if d == 0.0:
        return Verdict(Status.NO, -abs(d))
    try:
        inverse = np.linalg.inv(arr)
    except np.linalg.LinAlgError:
        return Verdict(Status.NO, -abs(d))
    smallest = float(inverse.min())
    tol = config.tolerance()
    return Verdict(Status.YES if smallest >= -tol else Status.NO, smallest)


def check_positive_stable(m: Matrix) -> Verdict:
    """Every eigenvalue must have positive real part (float copy)."""
    eigs = eigenvalues(m.to_float())
    return banded_verdict(min(z.real for z in eigs), exact=False)


def check_rho_split(m: Matrix) -> Verdict:
    """Regular-splitting test: rho(s I - M) < s for s = max diagonal entry.

    Requires Z-structure so that N = s I - M is entrywise nonnegative. The
    smallest valid s gives the tightest margin s - rho(N). Nonpositive s is
    an outright NO (a Z-matrix with no positive diagonal entry has
    nonpositive trace and cannot be positive stable).
    """
    if not is_z_matrix(m):
        raise DomainError("rho-split test requires a Z-matrix")
    arr = m.to_float().as_array()
    s = float(arr.diagonal().max())
    n_part = s * np.eye(m.n) - arr
    rho = spectral_radius(Matrix.float64(n_part))
    margin = s - rho
    if s <= 0.0:
        return Verdict(Status.NO, margin)
    return banded_verdict(margin, exact=False)


_CHECKS = (
    ("E17", check_e17),
    ("D16", check_d16),
    ("N38", check_n38),
    ("POS_STABLE", check_positive_stable),
    ("RHO_SPLIT", check_rho_split),
)


def _consensus(verdicts) -> str:
    statuses = [v.status for v in verdicts]
    decided = {s for s in statuses if s is not Status.MARGINAL}
    if len(decided) > 1:
        return CONSENSUS_DISAGREE
    if any(s is Status.MARGINAL for s in statuses) or not decided:
        return CONSENSUS_MARGINAL
    return CONSENSUS_YES if decided == {Status.YES} else CONSENSUS_NO


@dataclass(frozen=True)
class CertificationReport:
    """Per-condition verdicts plus consensus over the applicable ones.

    ``consensus`` follows the verdicts that ran: YES/NO when they all agree,
    MARGINAL when tolerance bands prevent a call, DISAGREE otherwise. When
    ``is_z`` is false the M-matrix characterizations do not apply and the
    consensus is only a raw summary; conditions that cannot run on the input
    (RHO_SPLIT on non-Z matrices) land in ``errors``.
    """

    input_dim: int
    is_z: bool
    verdicts: dict[str, Verdict]
    consensus: str
    margins: dict[str, float]
    errors: dict[str, str] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "is_z": self.is_z,
            "consensus": self.consensus,
            "verdicts": {k: v.to_json_dict() for k, v in self.verdicts.items()},
            "margins": {k: _encode_scalar(v) for k, v in self.margins.items()},
            "errors": dict(self.errors),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "CertificationReport":
        return cls(
            input_dim=int(obj["input_dim"]),
            is_z=bool(obj["is_z"]),
            verdicts={
                k: Verdict.from_json_dict(v) for k, v in obj["verdicts"].items()
            },
            consensus=str(obj["consensus"]),
            margins={k: float(v) for k, v in obj["margins"].items()},
            errors=dict(obj.get("errors", {})),
        )


def certify(m: Matrix) -> CertificationReport:
    """Run the Z check plus all five conditions and report consensus.

    Per-condition failures (for example RHO_SPLIT on a non-Z input) are
    collected into the report instead of raising.
    """
    verdicts: dict[str, Verdict] = {}
    errors: dict[str, str] = {}
    for name, fn in _CHECKS:
        try:
            verdicts[name] = fn(m)
        except (DomainError, NoConvergence) as exc:
            errors[name] = str(exc)
    return CertificationReport(
        input_dim=m.n,
        is_z=is_z_matrix(m),
        verdicts=verdicts,
        consensus=_consensus(verdicts.values()),
        margins={name: v.margin for name, v in verdicts.items()},
        errors=errors,
    )
