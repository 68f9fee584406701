"""Series representations: raw, differentiated and cumulative.

Each mode comes with an exact inverse so a series predicted in transformed
space can be mapped back to growth values.  The differentiated mode keeps
the first element (D1 = X1) so the series length never changes.
"""

import numpy as np

from .errors import EmptySeries

MODES = ("raw", "diff", "cumul")


def _check(x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise EmptySeries("expected a non-empty 1-D series")
    return x


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"unknown transform mode {mode!r}, expected one of {MODES}")


def forward(mode, x):
    """Map a growth series into transformed space.

    raw keeps the series, diff takes consecutive differences (first value
    kept), cumul takes the running sum.
    """
    _check_mode(mode)
    x = _check(x)
    if mode == "raw":
        return x.copy()
    if mode == "diff":
        return np.diff(x, prepend=0.0)
    return np.cumsum(x)


def inverse(mode, z):
    """Map a transformed series back to growth values (exact inverse of forward)."""
    _check_mode(mode)
    z = _check(z)
    if mode == "raw":
        return z.copy()
    if mode == "diff":
        return np.cumsum(z)
    return np.diff(z, prepend=0.0)


def inverse_diff_with_total(z, total):
    """Integrate a differentiated series with the integration constant left free,
    then pick the constant so the result sums exactly to ``total``.

    The free constant is realized as the same shift at every index, so the
    output differs from plain ``inverse("diff", z)`` by a uniform offset.
    """
    z = _check(z)
    x = np.cumsum(z)
    shift = (total - x.sum()) / x.size
    return x + shift
