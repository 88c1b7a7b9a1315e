"""Adaptive Gauss-Kronrod quadrature for complex integrands (QUADPACK via scipy)."""

import math
import os
import warnings

from scipy import integrate

from .exceptions import IntegrationAccuracyError

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-14
_LIMIT = 1000


def default_rtol():
    """Relative tolerance, overridable through ``ZENO_QUAD_TOL``."""
    raw = os.environ.get("ZENO_QUAD_TOL")
    if not raw:
        return DEFAULT_RTOL
    value = float(raw)
    if not (0 < value < 1):
        raise ValueError(f"ZENO_QUAD_TOL must lie in (0, 1), got {raw!r}")
    return value


def _real_part(func, a, b, rtol, atol):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(func, a, b, epsabs=atol, epsrel=rtol, limit=_LIMIT, full_output=1)
    value, err = out[0], out[1]
    failed = len(out) > 3
    return value, err, failed


def quad_complex(func, a, b, rtol=None, atol=DEFAULT_ATOL, breakpoints=()):
    """Integrate a complex-valued scalar function over ``[a, b]``.

    ``breakpoints`` inside ``(a, b)`` split the domain; each piece is
    integrated separately.  Raises :class:`IntegrationAccuracyError` when the
    combined error estimate exceeds the tolerance.
    """
    rtol = default_rtol() if rtol is None else rtol
    if b == a:
        return 0j
    edges = [a] + sorted(p for p in breakpoints if a < p < b) + [b]
    total, error, failed = 0j, 0.0, False
    for lo, hi in zip(edges[:-1], edges[1:]):
        re, re_err, re_fail = _real_part(lambda s: func(s).real, lo, hi, rtol, atol)
        im, im_err, im_fail = _real_part(lambda s: func(s).imag, lo, hi, rtol, atol)
        total += complex(re, im)
        error += math.hypot(re_err, im_err)
        failed = failed or re_fail or im_fail
    allowed = max(atol * (len(edges) - 1), rtol * abs(total))
    if failed and error > 10 * allowed:
        raise IntegrationAccuracyError(
            f"quadrature on [{a}, {b}] reached error {error:.3e} (allowed {allowed:.3e})",
            estimate=total,
            error=error,
        )
    return total
