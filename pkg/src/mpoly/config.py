"""Global tolerance knob for float-backed boundary decisions.

Every float comparison against a decision boundary (minor > 0, eigenvalue
real part > 0, spectral radius < 1, ...) uses one absolute tolerance. Exact
rational decisions never consult it.
"""

from __future__ import annotations

DEFAULT_TOLERANCE = 1e-9

_current = DEFAULT_TOLERANCE


def tolerance() -> float:
    """Return the absolute tolerance for float boundary comparisons."""
    return _current


def set_tolerance(value: float) -> None:
    """Set the global tolerance; must be positive."""
    global _current
    value = float(value)
    if not value > 0.0:
        raise ValueError("tolerance must be positive")
    _current = value


def reset_tolerance() -> None:
    """Restore the default tolerance."""
    global _current
    _current = DEFAULT_TOLERANCE
