# Modified Bessel function of the second kind, order zero.
#
# Small arguments: ascending series with the log term,
#   K0(w) = -(log(w/2) + gamma) * I0(w) + sum_{k>=1} (w^2/4)^k / (k!)^2 * H_k
# with I0(w) = sum_k (w^2/4)^k / (k!)^2 and H_k the k-th harmonic number.
#
# Large arguments: the asymptotic expansion
#   K0(w) ~ sqrt(pi/(2w)) e^{-w} * sum_k (-1)^k mu_k / (k! (8w)^k),
#   mu_k = (1*3*...*(2k-1))^2,
# truncated at the smallest term.
#
# The switch point 9.0 balances series round-off (which grows like e^x eps)
# against the asymptotic truncation floor (which shrinks like e^{-2x});
# both branches stay below 1e-10 absolute error there.  Relative error is
# ~1e-13 except within a factor of two of the switch point, where the
# asymptotic truncation floor allows up to ~1e-7 relative (still under
# 1e-10 absolute because K0(9) ~ 5e-5).
#
# Both branches accept complex arguments with positive real part; the
# public entry point is restricted to positive real x.

import math

import numpy as np

from .errors import NonpositiveArgument

_SPLIT = 9.0
_EULER_GAMMA = float(np.euler_gamma)


def _k0_series(w: complex) -> complex:
    # ascending series; converges for any w, used for |w| <= _SPLIT
    q = w * w / 4.0
    term = 1.0 + 0.0j
    i0 = term
    s = 0.0 + 0.0j
    h = 0.0
    for k in range(1, 80):
        term *= q / (k * k)
        h += 1.0 / k
        i0 += term
        s += term * h
        if abs(term) * (h + 1.0) < 1e-18 * (abs(i0) + abs(s) + 1.0):
            break
    return -(np.log(w / 2.0) + _EULER_GAMMA) * i0 + s


def _k0_asymptotic(w: complex) -> complex:
    # truncate at the smallest term; valid for Re w > 0, |w| >= _SPLIT
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    prev = 1.0
    for k in range(1, 40):
        term *= -((2 * k - 1) ** 2) / (8.0 * w * k)
        if abs(term) >= prev:
            break
        total += term
        prev = abs(term)
        if prev < 1e-17:
            break
    return np.sqrt(np.pi / (2.0 * w)) * np.exp(-w) * total


def k0_right_half_plane(w: complex) -> complex:
    """K0 for complex w with Re w > 0 (internal helper for kernels)."""
    w = complex(w)
    if w.real <= 0.0:
        raise NonpositiveArgument(f"K0 evaluated at Re w <= 0: {w!r}")
    if abs(w) <= _SPLIT:
        return complex(_k0_series(w))
    return complex(_k0_asymptotic(w))


def k0_bessel(x: float) -> float:
    """K0(x) for x > 0, absolute error <= 1e-10.

    Raises NonpositiveArgument for x <= 0.
    """
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise NonpositiveArgument(f"K0 requires x > 0, got {x!r}")
    return k0_right_half_plane(x).real
