"""Closed-form achieved rates for the two-receiver rate-splitting downlink.

Everything here conditions on the receiver being served at all: a receiver
counts as served when it decodes the common stream, or, failing that, when
its private stream survives with the common signal treated as interference.
Per receiver the served rate is assembled from

  * the common-stream term, time-shared when both receivers decode it
    (the slower of the two conditional SINRs sets the rate) and enjoyed
    alone otherwise,
  * the private-stream term after common-stream removal,
  * the fallback private-stream term with the common stream buried in
    the interference.

Which mixture applies depends on how the decode thresholds order against
the SINR support bounds; the dispatch below enumerates the four live
regimes (B1..B4) plus the dead zone (Z). A receiver whose cache holds the
other class's content ahead of time cancels that stream instead of
treating it as noise, which swaps every distribution on its side for the
cancellation variant and raises its support bound.

All expectations are integrals of log2(1 + t) against the conditional SINR
densities; quadrature does the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .caching import Subcase
from .distributions import SinrDist, coverage, dist_spec, level_of_s, pdf_s_measure
from .model import (
    PowerSplit,
    ReceiverClass,
    SinrKind,
    SystemParams,
    prelog_factors,
    private_sinr_threshold,
    sinr_bounds,
    stream_powers,
)
from .quadrature import DEFAULT_RTOL, integrate_log_scaled


def lograte(omega: float, t: float) -> float:
    """Spectral efficiency of a stream with pre-log omega at SINR t."""
    if t <= 0.0:
        return 0.0
    return omega * math.log2(1.0 + t)


def _inv(x: float) -> float:
    """Reciprocal on [0, inf] with the conventions 1/0 = inf, 1/inf = 0."""
    if x == 0.0:
        return math.inf
    if math.isinf(x):
        return 0.0
    return 1.0 / x


def _mul(a: float, b: float) -> float:
    """Product with 0 * inf = 0 (vanishing factors win)."""
    if a == 0.0 or b == 0.0:
        return 0.0
    return a * b


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def _omega_value(params: SystemParams, index: int) -> float:
    """Pre-log by index; index 1 never needs a valid coded-cache geometry."""
    if index == 1:
        return 1.0
    return prelog_factors(params.K, params.M, params.N).by_index(index)


def _common_kind(iic: bool) -> SinrKind:
    return SinrKind.COMMON_IIC if iic else SinrKind.COMMON


def _expect_lograte(
    spec: SinrDist,
    omega: float,
    lo: float,
    hi: float,
    params: SystemParams,
    rtol: float,
) -> float:
    """Integral of omega*log2(1+t) g(t) dt over (lo, min(hi, theta)).

    Evaluated in scale coordinates, where the integrand is a plain
    exponential-decay shape at any transmit power (in SINR coordinates the
    mass hugs the support bound ever harder as power grows).
    """
    theta = spec.theta
    hi = min(hi, theta)
    if not hi > lo:
        return 0.0
    s_lo = spec._s(lo)
    if not math.isfinite(s_lo):
        return 0.0
    s_hi = math.inf if hi >= theta else spec._s(hi)
    return integrate_log_scaled(
        lambda s: lograte(omega, level_of_s(spec, s)) * pdf_s_measure(spec, s, params),
        s_lo,
        s_hi,
        rtol=rtol,
    )


def _mean_lograte(
    spec: SinrDist,
    omega: float,
    lo: float,
    hi: float,
    norm: float,
    params: SystemParams,
    rtol: float,
) -> float:
    """(1/norm) * integral of omega*log2(1+t) g(t) dt over (lo, hi)."""
    if norm <= 0.0:
        return 0.0
    return _expect_lograte(spec, omega, lo, hi, params, rtol) / norm


def gap_thresholds(params: SystemParams, split: PowerSplit, cls: ReceiverClass) -> tuple[float, float]:
    """Thresholds comparing the private decode event to the common one.

    Returns (after_common, with_interference): the private target at which
    the channel-gain threshold of the private event equals that of the
    common event at target zeta. Identical algebra covers the plain and
    cancellation variants because the bound ratio collapses either way.
    Only meaningful while zeta sits below the relevant common bound.
    """
    b = sinr_bounds(cls, stream_powers(params.P, split))
    r = _mul(b.common_iic, _inv(params.zeta))
    after = _inv(r - 1.0) if r > 1.0 else math.inf
    with_i = _inv(r + b.common_iic - 1.0) if r + b.common_iic > 1.0 else math.inf
    return after, with_i


@lru_cache(maxsize=4096)
def common_rate_single(
    params: SystemParams,
    split: PowerSplit,
    cls: ReceiverClass,
    iic: bool,
    rtol: float,
) -> float:
    """E[log2(1 + common SINR) | it clears zeta] for one receiver, pre-log free."""
    powers = stream_powers(params.P, split)
    spec = dist_spec(_common_kind(iic), cls, powers, params)
    pi = coverage(spec, params.zeta, params)
    return _mean_lograte(spec, 1.0, params.zeta, spec.theta, pi, params, rtol)


@lru_cache(maxsize=4096)
def common_rate_both(
    params: SystemParams,
    split: PowerSplit,
    iic_at: ReceiverClass | None,
    rtol: float,
) -> float:
    """E[log2(1 + min of the two common SINRs) | both clear zeta], pre-log free.

    The gains are independent, so splitting on which receiver holds the
    smaller SINR turns the two-axis integral into two one-axis integrals:
    the other receiver only enters through its closed-form tail probability
    at the same level.
    """
    powers = stream_powers(params.P, split)
    z = params.zeta
    spec_c = dist_spec(
        _common_kind(iic_at is ReceiverClass.CENTER), ReceiverClass.CENTER, powers, params
    )
    spec_e = dist_spec(
        _common_kind(iic_at is ReceiverClass.EDGE), ReceiverClass.EDGE, powers, params
    )
    pi_c = coverage(spec_c, z, params)
    pi_e = coverage(spec_e, z, params)
    if pi_c <= 0.0 or pi_e <= 0.0:
        return 0.0

    def half(outer: SinrDist, inner: SinrDist) -> float:
        def integrand(y: float) -> float:
            t = level_of_s(inner, y)
            tail = coverage(outer, t, params)
            if tail == 0.0:
                return 0.0
            return math.log2(1.0 + t) * tail * pdf_s_measure(inner, y, params)

        return integrate_log_scaled(integrand, inner._s(z), math.inf, rtol=rtol)

    return (half(spec_e, spec_c) + half(spec_c, spec_e)) / (pi_c * pi_e)


def _nested_common_rate_both(
    params: SystemParams,
    split: PowerSplit,
    iic_at: ReceiverClass | None,
    rtol: float,
) -> float:
    """Direct two-axis evaluation of common_rate_both, for cross-validation.

    Iterated adaptive quadrature over the joint scale density; the inner
    integral runs at a tenth of the outer tolerance. Orders of magnitude
    slower than the production path, so tests sample it sparingly.
    """
    powers = stream_powers(params.P, split)
    z = params.zeta
    spec_c = dist_spec(
        _common_kind(iic_at is ReceiverClass.CENTER), ReceiverClass.CENTER, powers, params
    )
    spec_e = dist_spec(
        _common_kind(iic_at is ReceiverClass.EDGE), ReceiverClass.EDGE, powers, params
    )
    pi_c = coverage(spec_c, z, params)
    pi_e = coverage(spec_e, z, params)
    if pi_c <= 0.0 or pi_e <= 0.0:
        return 0.0
    inner_rtol = rtol * 0.1
    sig2 = params.sigma2

    def half(outer: SinrDist, inner: SinrDist) -> float:
        # both axes in scale coordinates; the inner cap min(y, theta_in)
        # maps to a rational function of the outer scale whose denominator
        # crosses zero exactly where y reaches the inner bound
        s0_out = outer._s(z)
        s0_in = inner._s(z)
        cross = inner.d1 * outer.d2 - inner.d2 * outer.d1

        def integrand(s_out: float) -> float:
            m_out = pdf_s_measure(outer, s_out, params)
            if m_out == 0.0:
                return 0.0
            den = inner.d1 * sig2 + cross * s_out
            s_cap = math.inf if den <= 0.0 else sig2 * outer.d1 * s_out / den
            if s_cap <= s0_in:
                return 0.0
            return m_out * integrate_log_scaled(
                lambda s: math.log2(1.0 + level_of_s(inner, s))
                * pdf_s_measure(inner, s, params),
                s0_in,
                s_cap,
                rtol=inner_rtol,
            )

        return integrate_log_scaled(integrand, s0_out, math.inf, rtol=rtol)

    return (half(spec_e, spec_c) + half(spec_c, spec_e)) / (pi_c * pi_e)


@lru_cache(maxsize=4096)
def common_stream_rate(
    params: SystemParams,
    split: PowerSplit,
    cls: ReceiverClass,
    omega: float,
    iic_at: ReceiverClass | None,
    rtol: float,
) -> float:
    """Common-stream contribution for one receiver, given it decodes.

    With probability that the other receiver also decodes, the stream is
    time-shared (fraction u to the center class) at the min SINR;
    otherwise this receiver gets the full slot at its own SINR.
    """
    powers = stream_powers(params.P, split)
    other = cls.other
    other_spec = dist_spec(_common_kind(iic_at is other), other, powers, params)
    pi_other = coverage(other_spec, params.zeta, params)
    share = params.u if cls is ReceiverClass.CENTER else 1.0 - params.u
    both = common_rate_both(params, split, iic_at, rtol)
    alone = common_rate_single(params, split, cls, iic_at is cls, rtol)
    return omega * (pi_other * share * both + (1.0 - pi_other) * alone)


@lru_cache(maxsize=8192)
def private_rate_after_common(
    params: SystemParams,
    split: PowerSplit,
    cls: ReceiverClass,
    omega: float,
    iic: bool,
    rtol: float,
) -> float:
    """Private-stream rate when the common stream was decoded and removed.

    Conditioning depends on whether the private decode event is implied by
    the common one: if the private threshold sits at or above the
    equal-gain point, condition on the private event itself; below it,
    the common event is the binding one and the integral starts there.
    """
    powers = stream_powers(params.P, split)
    if powers.own(cls) == 0.0:
        return 0.0
    b = sinr_bounds(cls, powers)
    z = params.zeta
    common_bound = b.common_iic if iic else b.common
    if not z < common_bound:
        return 0.0
    xi_t = private_sinr_threshold(omega, params.xi)
    kind = SinrKind.PRIVATE_IIC if iic else SinrKind.PRIVATE
    spec = dist_spec(kind, cls, powers, params)
    bound = spec.theta if iic else b.private
    if xi_t >= bound:
        return 0.0
    after, _ = gap_thresholds(params, split, cls)
    if xi_t >= after:
        norm = coverage(spec, xi_t, params)
        return _mean_lograte(spec, omega, xi_t, bound, norm, params, rtol)
    spec0 = dist_spec(_common_kind(iic), cls, powers, params)
    norm = coverage(spec0, z, params)
    return _mean_lograte(spec, omega, after, bound, norm, params, rtol)


@lru_cache(maxsize=8192)
def private_rate_with_interference(
    params: SystemParams,
    split: PowerSplit,
    cls: ReceiverClass,
    omega: float,
    iic: bool,
    rtol: float,
) -> float:
    """Private-stream rate with the common stream left in the interference.

    Above the common bound this is the only way the receiver is ever
    served. Below it the conditioning carves out the gap where the private
    stream survives but the common decode failed.
    """
    powers = stream_powers(params.P, split)
    if powers.own(cls) == 0.0:
        return 0.0
    b = sinr_bounds(cls, powers)
    z = params.zeta
    common_bound = b.common_iic if iic else b.common
    xi_t = private_sinr_threshold(omega, params.xi)
    kind = SinrKind.PRIVATE_INTERF_IIC if iic else SinrKind.PRIVATE_INTERF
    spec = dist_spec(kind, cls, powers, params)
    bound = b.private_interf_iic if iic else b.private_interf
    if z >= common_bound:
        # at or above the ceiling the common decode never happens, so the
        # interference route carries the whole conditioning
        if xi_t >= bound:
            return 0.0
        norm = coverage(spec, xi_t, params)
        return _mean_lograte(spec, omega, xi_t, bound, norm, params, rtol)
    _, with_i = gap_thresholds(params, split, cls)
    if not xi_t < with_i:
        return 0.0
    spec0 = dist_spec(_common_kind(iic), cls, powers, params)
    norm = coverage(spec, xi_t, params) - coverage(spec0, z, params)
    if norm <= 0.0:
        return 0.0
    return _mean_lograte(spec, omega, xi_t, with_i, norm, params, rtol)


@dataclass(frozen=True)
class ReceiverRate:
    """Served rate of one receiver, its regime tag and serving probability."""

    rate: float
    q: float
    branch: str


def achieved_rate(
    params: SystemParams,
    split: PowerSplit,
    cls: ReceiverClass,
    omega: float,
    iic_at: ReceiverClass | None = None,
    rtol: float = DEFAULT_RTOL,
) -> ReceiverRate:
    """Served rate of one receiver under the regime dispatch.

    ``iic_at`` marks which receiver (if any) cancels the other class's
    stream from cache. When it is this receiver, every distribution on its
    side switches to the cancellation variant; when it is the other one,
    only the time-sharing term feels it (through the partner's decode
    probability and min-SINR law).
    """
    powers = stream_powers(params.P, split)
    b = sinr_bounds(cls, powers)
    z = params.zeta
    xi_t = private_sinr_threshold(omega, params.xi)
    self_iic = iic_at is cls
    common_bound = b.common_iic if self_iic else b.common
    pif_bound = b.private_interf_iic if self_iic else b.private_interf
    kind_0 = _common_kind(self_iic)
    kind_pi = SinrKind.PRIVATE_INTERF_IIC if self_iic else SinrKind.PRIVATE_INTERF
    kind_p = SinrKind.PRIVATE_IIC if self_iic else SinrKind.PRIVATE
    spec_0 = dist_spec(kind_0, cls, powers, params)
    spec_pi = dist_spec(kind_pi, cls, powers, params)

    if z < common_bound:
        after, with_i = gap_thresholds(params, split, cls)
        pi_0 = coverage(spec_0, z, params)
        rs0 = common_stream_rate(params, split, cls, omega, iic_at, rtol)
        rp = private_rate_after_common(params, split, cls, omega, self_iic, rtol)
        if xi_t <= with_i:
            pi_pif = coverage(spec_pi, xi_t, params)
            rpi = private_rate_with_interference(
                params, split, cls, omega, self_iic, rtol
            )
            ratio = _clamp01(pi_0 / pi_pif) if pi_pif > 0.0 else 0.0
            return ReceiverRate(
                rate=ratio * (rs0 + rp) + (1.0 - ratio) * rpi,
                q=pi_pif,
                branch="B3",
            )
        if xi_t < after:
            return ReceiverRate(rate=rs0 + rp, q=pi_0, branch="B2")
        spec_p = dist_spec(kind_p, cls, powers, params)
        pi_p = coverage(spec_p, xi_t, params)
        ratio = _clamp01(pi_p / pi_0) if pi_0 > 0.0 else 0.0
        return ReceiverRate(rate=rs0 + ratio * rp, q=pi_0, branch="B1")

    if xi_t < pif_bound:
        rpi = private_rate_with_interference(params, split, cls, omega, self_iic, rtol)
        pi_pif = coverage(spec_pi, xi_t, params)
        return ReceiverRate(rate=rpi, q=pi_pif, branch="B4")
    return ReceiverRate(rate=0.0, q=0.0, branch="Z")


def sum_rate(center: ReceiverRate, edge: ReceiverRate) -> float:
    """Long-run throughput over slots where at least one receiver is served."""
    denom = center.q + edge.q - center.q * edge.q
    if denom <= 0.0:
        return 0.0
    return (center.q * center.rate + edge.q * edge.rate) / denom


@dataclass(frozen=True)
class RateComponents:
    """Conditional building blocks behind the served rates.

    r0_both is the min-SINR common rate given both receivers decode;
    r0_*_only the single-receiver common rates given only that receiver
    decodes; rs0_* the pre-log-weighted common-stream contributions; rp_*
    and rpi_* the private rates with the common stream decoded and not.
    """

    r0_both: float = 0.0
    r0_center_only: float = 0.0
    r0_edge_only: float = 0.0
    rs0_center: float = 0.0
    rs0_edge: float = 0.0
    rp_center: float = 0.0
    rp_edge: float = 0.0
    rpi_center: float = 0.0
    rpi_edge: float = 0.0


@dataclass(frozen=True)
class RateReport:
    """Evaluation of one subcase: per-receiver served rates and the sum.

    ``component_stderr`` mirrors ``components`` field by field; both are
    all zero unless the method estimated them.
    """

    r_center: float
    r_edge: float
    r_sum: float
    q_center: float
    q_edge: float
    method: str
    branch_center: str = ""
    branch_edge: str = ""
    stderr_center: float = 0.0
    stderr_edge: float = 0.0
    stderr_sum: float = 0.0
    components: RateComponents = RateComponents()
    component_stderr: RateComponents = RateComponents()


def evaluate_subcase(
    subcase: Subcase,
    params: SystemParams,
    split: PowerSplit,
    rtol: float = DEFAULT_RTOL,
) -> RateReport:
    """Closed-form evaluation of one served configuration."""
    w_c = _omega_value(params, subcase.prelog_index(ReceiverClass.CENTER))
    w_e = _omega_value(params, subcase.prelog_index(ReceiverClass.EDGE))
    iic_at = subcase.iic_at
    center = achieved_rate(params, split, ReceiverClass.CENTER, w_c, iic_at, rtol)
    edge = achieved_rate(params, split, ReceiverClass.EDGE, w_e, iic_at, rtol)
    parts = RateComponents(
        r0_both=common_rate_both(params, split, iic_at, rtol),
        r0_center_only=common_rate_single(
            params, split, ReceiverClass.CENTER, iic_at is ReceiverClass.CENTER, rtol
        ),
        r0_edge_only=common_rate_single(
            params, split, ReceiverClass.EDGE, iic_at is ReceiverClass.EDGE, rtol
        ),
        rs0_center=common_stream_rate(
            params, split, ReceiverClass.CENTER, w_c, iic_at, rtol
        ),
        rs0_edge=common_stream_rate(params, split, ReceiverClass.EDGE, w_e, iic_at, rtol),
        rp_center=private_rate_after_common(
            params, split, ReceiverClass.CENTER, w_c, iic_at is ReceiverClass.CENTER, rtol
        ),
        rp_edge=private_rate_after_common(
            params, split, ReceiverClass.EDGE, w_e, iic_at is ReceiverClass.EDGE, rtol
        ),
        rpi_center=private_rate_with_interference(
            params, split, ReceiverClass.CENTER, w_c, iic_at is ReceiverClass.CENTER, rtol
        ),
        rpi_edge=private_rate_with_interference(
            params, split, ReceiverClass.EDGE, w_e, iic_at is ReceiverClass.EDGE, rtol
        ),
    )
    return RateReport(
        r_center=center.rate,
        r_edge=edge.rate,
        r_sum=sum_rate(center, edge),
        q_center=center.q,
        q_edge=edge.q,
        method="analytic",
        branch_center=center.branch,
        branch_edge=edge.branch,
        components=parts,
    )


def asymptotic_rate(
    params: SystemParams,
    split: PowerSplit,
    cls: ReceiverClass,
    omega: float,
    iic_at: ReceiverClass | None = None,
) -> float:
    """High-power limit of the served rate (noise-free SINR bounds).

    With cancellation at this receiver the private stream sees no
    interference at all, so its rate grows without bound whenever the
    common stream stays decodable; everything else saturates.
    """
    powers = stream_powers(params.P, split)
    b = sinr_bounds(cls, powers)
    z = params.zeta
    xi_t = private_sinr_threshold(omega, params.xi)
    if iic_at is cls:
        if z < b.common_iic:
            return math.inf
        if xi_t < b.private_interf_iic:
            return lograte(omega, b.private_interf_iic)
        return 0.0
    share = params.u if cls is ReceiverClass.CENTER else 1.0 - params.u
    if z < b.common:
        rate = share * lograte(omega, b.common)
        if xi_t < b.private:
            rate += lograte(omega, b.private)
        return rate
    if xi_t < b.private_interf:
        return lograte(omega, b.private_interf)
    return 0.0


def asymptotic_report(
    subcase: Subcase, params: SystemParams, split: PowerSplit
) -> RateReport:
    """High-power limits for one subcase; infinities pass through the sum."""
    w_c = _omega_value(params, subcase.prelog_index(ReceiverClass.CENTER))
    w_e = _omega_value(params, subcase.prelog_index(ReceiverClass.EDGE))
    r_c = asymptotic_rate(params, split, ReceiverClass.CENTER, w_c, subcase.iic_at)
    r_e = asymptotic_rate(params, split, ReceiverClass.EDGE, w_e, subcase.iic_at)
    return RateReport(
        r_center=r_c,
        r_edge=r_e,
        r_sum=r_c + r_e,
        q_center=math.nan,
        q_edge=math.nan,
        method="asymptotic",
    )
