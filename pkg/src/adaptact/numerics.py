"""Scalar special functions used by the activation catalog.

Everything here accepts Python floats or float64 arrays and works
elementwise. ``erf_oracle`` is the exception: it is a deliberately slow,
scalar-only quadrature used to validate ``erf``.
"""

from __future__ import annotations

import math

import numpy as np

TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
EXP_CLAMP = 700.0

# |x| below this uses the Taylor-type series, above it the erfc continued fraction.
_SERIES_CUTOFF = 2.5
_SERIES_TERMS = 40
_CF_DEPTH = 40
_SERIES_COEFFS = [1.0]
for _n in range(1, _SERIES_TERMS):
    _SERIES_COEFFS.append(_SERIES_COEFFS[-1] / (2 * _n + 1))


def clamped_exp(x):
    """``exp`` with its argument clipped to [-700, 700] so it never overflows."""
    return np.exp(np.clip(x, -EXP_CLAMP, EXP_CLAMP))


def _erf_series(x):
    # erf(x) = 2/sqrt(pi) * exp(-x^2) * x * sum_n (2x^2)^n / (2n+1)!!
    # All terms share a sign, so there is no cancellation; Horner sums the
    # smallest terms first.
    y = 2.0 * x * x
    total = np.full_like(x, _SERIES_COEFFS[-1])
    for c in _SERIES_COEFFS[-2::-1]:
        total = total * y + c
    return TWO_OVER_SQRT_PI * np.exp(-x * x) * (x * total)


def _erfc_cf(a):
    # erfc(a) = exp(-a^2)/sqrt(pi) / (a + (1/2)/(a + 1/(a + (3/2)/(a + ...)))), a > 0
    t = a.copy()
    for k in range(_CF_DEPTH, 0, -1):
        t = a + (0.5 * k) / t
    return np.exp(-a * a) / (math.sqrt(math.pi) * t)


def erf(x):
    """Gauss error function, float64 accurate to a few ulp on the real line."""
    arr = np.asarray(x, dtype=np.float64)
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    a = np.abs(flat)
    small = a <= _SERIES_CUTOFF
    if small.any():
        out[small] = _erf_series(a[small])
    big = ~small
    if big.any():
        # erfc underflows to 0 long before 30; clipping keeps a*a finite
        out[big] = 1.0 - _erfc_cf(np.minimum(a[big], 30.0))
    out = np.copysign(out, flat).reshape(arr.shape)
    if out.ndim == 0:
        return out[()]
    return out


def erf_derivative(x):
    return TWO_OVER_SQRT_PI * np.exp(-np.square(np.clip(x, -30.0, 30.0)))


def erf_oracle(x: float, tol: float = 1e-13) -> float:
    """Reference erf by adaptive Simpson quadrature of exp(-t^2) on [0, x].

    Independent of :func:`erf`; only used to validate it. The absolute
    tolerance applies to the integral before scaling by 2/sqrt(pi).
    """
    x = float(x)
    if x == 0.0:
        return 0.0
    value = TWO_OVER_SQRT_PI * math.fsum(_simpson_pieces(0.0, abs(x), tol))
    return math.copysign(value, x)


def erf_oracle_grid(xs, tol: float = 1e-13) -> np.ndarray:
    """Quadrature erf at many points sharing one partition of the axis.

    The half-line is cut at every sorted ``|x|``; each gap is integrated by
    adaptive Simpson with tolerance ``tol / len(xs)`` and the gaps are
    accumulated with ``math.fsum``. Same integrand and rule as
    :func:`erf_oracle`, orders of magnitude cheaper on dense grids.
    """
    xs = np.asarray(xs, dtype=np.float64)
    flat = xs.reshape(-1)
    mags = np.unique(np.abs(flat))
    piece_tol = tol / max(len(mags), 1)
    partials: list[float] = []  # Shewchuk non-overlapping partial sums
    integral = {0.0: 0.0}
    lo = 0.0
    for m in mags:
        m = float(m)
        if m > lo:
            for piece in _simpson_pieces(lo, m, piece_tol):
                _exact_add(partials, piece)
            lo = m
        integral[m] = math.fsum(partials)
    out = np.array(
        [math.copysign(TWO_OVER_SQRT_PI * integral[abs(float(v))], v) for v in flat]
    )
    return out.reshape(xs.shape)


def _exact_add(partials: list[float], x: float) -> None:
    i = 0
    for y in partials:
        if abs(x) < abs(y):
            x, y = y, x
        hi = x + y
        lo = y - (hi - x)
        if lo:
            partials[i] = lo
            i += 1
        x = hi
    partials[i:] = [x]


def _simpson_pieces(a: float, b: float, tol: float) -> list[float]:
    def f(t):
        return math.exp(-t * t)

    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    pieces = []
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - s
        if depth >= 50 or abs(delta) <= 15.0 * eps:
            pieces.append(left + right + delta / 15.0)
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    return pieces


def softplus(x):
    """ln(1 + e^x) without overflow: max(x, 0) + log1p(e^-|x|)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
    return out[()] if out.ndim == 0 else out


def stable_sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    z = np.exp(-np.abs(x))
    out = np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))
    return out[()] if out.ndim == 0 else out


def sech2(x):
    """sech(x)^2 computed from exp(-2|x|); underflows cleanly to 0."""
    z = np.exp(-2.0 * np.abs(x))
    return 4.0 * z / np.square(1.0 + z)
