"""Adaptive quadrature wrappers for integrals of SINR functionals.

All achieved-rate expressions reduce to integrals of smooth integrands over
(lo, hi) where hi is either a finite support endpoint or infinite. The
support endpoint is an integrable singularity magnet (the density blows up
or vanishes extremely fast near it), so finite upper limits get the
substitution t = hi - (hi - lo) e^{-v}, which maps (lo, hi) to (0, inf)
and lets QUADPACK's infinite-interval transform handle the endpoint.
"""

from __future__ import annotations

import math
from typing import Callable

from scipy import integrate

DEFAULT_RTOL = 1e-9
#: the iterated (double) integrals use a looser outer tolerance
OUTER_RTOL = 1e-8
#: a roundoff warning with the absolute error bound below this is still a
#: success: deep-outage tails sit near the double-precision underflow
#: boundary where the relative target is unattainable, yet every
#: comparison made with these values is absolute and far looser
_ABS_TOL = 1e-15
_LIMIT = 200


class QuadratureError(RuntimeError):
    """An integral failed to converge to the requested tolerance."""


def _check(result, rtol: float, message: str) -> float:
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > max(rtol * abs(value), _ABS_TOL):
        raise QuadratureError(f"{message}: {result[3]}")
    if not math.isfinite(value):
        raise QuadratureError(f"{message}: non-finite value {value}")
    return value


def integrate_interval(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    rtol: float = DEFAULT_RTOL,
    open_upper: bool = False,
) -> float:
    """Integrate fn over (lo, hi); hi may be math.inf.

    With ``open_upper`` a finite hi is treated as an open support bound
    hiding structure at scales far below the interval width (a density
    spike hugging it): the substitution t = hi - (hi - lo) e^{-v} walks
    into the bound exponentially, resolving features of any relative
    magnitude. Without it the interval is integrated directly, which is
    the right call for integrands already in exponential-decay form.
    """
    if hi <= lo:
        return 0.0
    if math.isinf(hi):
        res = integrate.quad(fn, lo, math.inf, epsabs=0.0, epsrel=rtol, limit=_LIMIT, full_output=1)
        return _check(res, rtol, "infinite-interval quadrature failed")
    if not open_upper:
        res = integrate.quad(
            fn, lo, hi, epsabs=0.0, epsrel=rtol, limit=_LIMIT, full_output=1
        )
        return _check(res, rtol, "finite-interval quadrature failed")
    span = hi - lo

    def with_endpoint_pulled_out(v: float) -> float:
        w = span * math.exp(-v)
        return fn(hi - w) * w

    res = integrate.quad(
        with_endpoint_pulled_out, 0.0, math.inf, epsabs=0.0, epsrel=rtol, limit=_LIMIT, full_output=1
    )
    return _check(res, rtol, "open-bound quadrature failed")


def integrate_log_scaled(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    rtol: float = DEFAULT_RTOL,
) -> float:
    """Integrate fn over (lo, hi), 0 < lo, in logarithmic coordinates.

    The right tool when fn mixes power-law stretches with an exponential
    cutoff across many decades (scale-coordinate SINR measures do): the
    decades become a linear axis and the quadrature sees a tame shape.
    """
    if hi <= lo:
        return 0.0
    if lo <= 0.0:
        raise ValueError("log-scaled integration needs a positive lower limit")

    log_lo = math.log(lo)

    def scaled(v: float) -> float:
        log_s = log_lo + v
        if log_s > 709.0:
            return 0.0
        s = math.exp(log_s)
        val = fn(s)
        if val == 0.0:
            return 0.0
        return val * s

    span = math.inf if math.isinf(hi) else math.log(hi / lo)
    res = integrate.quad(
        scaled, 0.0, span, epsabs=0.0, epsrel=rtol, limit=_LIMIT, full_output=1
    )
    return _check(res, rtol, "log-scaled quadrature failed")
