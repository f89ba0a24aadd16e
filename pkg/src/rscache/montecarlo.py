"""Stochastic-geometry simulator used to cross-check every closed form.

One draw realizes one center and one edge receiver: a position uniform
over the disk or the annulus, unit-mean exponential fading, and each
stream SINR computed from the literal power ratios. Realized rates follow
the decoding order: the common stream against zeta first, then the
private stream against its own threshold, with the cancellation variants
substituted per subcase.

Determinism contract: draws come from counter-based Philox streams keyed
per fixed-size chunk, and chunk partials are reduced in chunk order, so a
given (seed, samples, chunk) produces a bit-identical report at any
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .caching import Subcase
from .model import (
    PowerSplit,
    ReceiverClass,
    SinrKind,
    StreamPowers,
    SystemParams,
    private_sinr_threshold,
    stream_powers,
)
from .rates import RateComponents, RateReport, _omega_value


@dataclass(frozen=True)
class SimConfig:
    """Sample count, stream seed, and the chunking that fixes the streams.

    chunk is part of the reproducibility key: changing it changes which
    Philox stream produces which draw. workers only changes scheduling.
    spawn prefixes the per-chunk stream keys so that sweeps can give every
    grid point an independent deterministic stream family.
    """

    samples: int = 100_000
    seed: int = 42
    chunk: int = 131_072
    workers: int = 1
    spawn: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if self.chunk < 1:
            raise ValueError("chunk size must be positive")
        if self.workers < 1:
            raise ValueError("worker count must be positive")

    def chunk_sizes(self) -> list[int]:
        full, rest = divmod(self.samples, self.chunk)
        sizes = [self.chunk] * full
        if rest:
            sizes.append(rest)
        return sizes

    def rng(self, index: int) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=self.seed, spawn_key=self.spawn + (index,)
        )
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class ChannelDraw:
    """Vectorized batch of joint center/edge channel realizations."""

    d_c: np.ndarray
    d_e: np.ndarray
    h_c: np.ndarray
    h_e: np.ndarray

    def link_gain(self, cls: ReceiverClass, alpha: float) -> np.ndarray:
        if cls is ReceiverClass.CENTER:
            return self.h_c / (1.0 + self.d_c**alpha)
        return self.h_e / (1.0 + self.d_e**alpha)


def sample_channels(params: SystemParams, rng: np.random.Generator, n: int) -> ChannelDraw:
    """Draw n joint realizations; the draw order is part of the contract."""
    u_c = rng.random(n)
    u_e = rng.random(n)
    h_c = rng.standard_exponential(n)
    h_e = rng.standard_exponential(n)
    d_c = params.r_c * np.sqrt(u_c)
    d_e = np.sqrt(params.r_e**2 + u_e * (params.r_0**2 - params.r_e**2))
    return ChannelDraw(d_c=d_c, d_e=d_e, h_c=h_c, h_e=h_e)


def _sinr_vec(
    kind: SinrKind,
    cls: ReceiverClass,
    powers: StreamPowers,
    gain: np.ndarray,
    sigma2: float,
) -> np.ndarray:
    # mirrors the scalar instantaneous_sinr ratio by ratio; kept literal so
    # the simulator never shares coefficients with the distribution module
    with np.errstate(divide="ignore"):
        noise = sigma2 / gain
    pn = powers.own(cls)
    pk = powers.other(cls)
    if kind is SinrKind.COMMON:
        den = pn + pk + noise
    elif kind is SinrKind.PRIVATE:
        den = pk + noise
    elif kind is SinrKind.PRIVATE_INTERF:
        den = powers.p0 + pk + noise
    elif kind is SinrKind.COMMON_IIC:
        den = pn + noise
    elif kind is SinrKind.PRIVATE_IIC:
        den = noise
    else:
        den = powers.p0 + noise
    num = powers.p0 if kind in (SinrKind.COMMON, SinrKind.COMMON_IIC) else pn
    with np.errstate(invalid="ignore"):
        out = num / den
    return np.where(np.isfinite(den), out, 0.0)


def estimate_coverage(
    kind: SinrKind,
    cls: ReceiverClass,
    t: float,
    params: SystemParams,
    split: PowerSplit,
    sim: SimConfig,
) -> tuple[float, float]:
    """Empirical tail probability of one SINR law with its binomial stderr."""
    powers = stream_powers(params.P, split)

    def kernel(index: int, n: int) -> int:
        draw = sample_channels(params, sim.rng(index), n)
        eta = _sinr_vec(kind, cls, powers, draw.link_gain(cls, params.alpha), params.sigma2)
        return int(np.count_nonzero(eta > t))

    sizes = sim.chunk_sizes()
    with ThreadPoolExecutor(max_workers=sim.workers) as pool:
        hits = sum(pool.map(kernel, range(len(sizes)), sizes))
    p = hits / sim.samples
    return p, math.sqrt(p * (1.0 - p) / sim.samples)


_STAT_NAMES = (
    "r0_both",
    "r0_center_only",
    "r0_edge_only",
    "rs0_center",
    "rs0_edge",
    "rp_center",
    "rp_edge",
    "rpi_center",
    "rpi_edge",
    "r_center",
    "r_edge",
    "r_sum",
)

_TRACE_HEADER = (
    "draw,d_c,d_e,h_c,h_e,sinr_c0,sinr_e0,sinr_cp,sinr_ep,sinr_cpI,sinr_epI,"
    "branch_c,branch_e"
)


def _accumulate(values: np.ndarray, mask: np.ndarray) -> tuple[float, float, float]:
    hit = values[mask]
    return float(hit.sum()), float((hit * hit).sum()), float(hit.size)


def _conditional(total: np.ndarray) -> tuple[float, float]:
    s, ss, c = total
    if c <= 0.0:
        return 0.0, 0.0
    mean = s / c
    var = max(ss / c - mean * mean, 0.0)
    return mean, math.sqrt(var / c)


@dataclass(frozen=True)
class _SubcaseStreams:
    """Per-receiver SINR kinds and thresholds realized by one subcase."""

    common_c: SinrKind
    common_e: SinrKind
    private_c: SinrKind
    private_e: SinrKind
    interf_c: SinrKind
    interf_e: SinrKind
    w_c: float
    w_e: float
    xi_c: float
    xi_e: float


def _streams(subcase: Subcase, params: SystemParams) -> _SubcaseStreams:
    w_c = _omega_value(params, subcase.prelog_index(ReceiverClass.CENTER))
    w_e = _omega_value(params, subcase.prelog_index(ReceiverClass.EDGE))
    iic_c = subcase.iic_at is ReceiverClass.CENTER
    iic_e = subcase.iic_at is ReceiverClass.EDGE
    return _SubcaseStreams(
        common_c=SinrKind.COMMON_IIC if iic_c else SinrKind.COMMON,
        common_e=SinrKind.COMMON_IIC if iic_e else SinrKind.COMMON,
        private_c=SinrKind.PRIVATE_IIC if iic_c else SinrKind.PRIVATE,
        private_e=SinrKind.PRIVATE_IIC if iic_e else SinrKind.PRIVATE,
        interf_c=SinrKind.PRIVATE_INTERF_IIC if iic_c else SinrKind.PRIVATE_INTERF,
        interf_e=SinrKind.PRIVATE_INTERF_IIC if iic_e else SinrKind.PRIVATE_INTERF,
        w_c=w_c,
        w_e=w_e,
        xi_c=private_sinr_threshold(w_c, params.xi),
        xi_e=private_sinr_threshold(w_e, params.xi),
    )


def _branch_labels(dec, dec_other, priv, interf) -> np.ndarray:
    common = np.where(dec, np.where(dec_other, "b", "o"), "-")
    extra = np.where(priv, "p", np.where(interf, "i", ""))
    return np.char.add(common.astype("U1"), extra.astype("U1"))


def _rate_kernel(
    subcase: Subcase,
    params: SystemParams,
    split: PowerSplit,
    streams: _SubcaseStreams,
    draw: ChannelDraw,
    base: int,
    trace: list[str] | None,
) -> np.ndarray:
    powers = stream_powers(params.P, split)
    gain_c = draw.link_gain(ReceiverClass.CENTER, params.alpha)
    gain_e = draw.link_gain(ReceiverClass.EDGE, params.alpha)
    sig2 = params.sigma2
    eta0_c = _sinr_vec(streams.common_c, ReceiverClass.CENTER, powers, gain_c, sig2)
    eta0_e = _sinr_vec(streams.common_e, ReceiverClass.EDGE, powers, gain_e, sig2)
    etap_c = _sinr_vec(streams.private_c, ReceiverClass.CENTER, powers, gain_c, sig2)
    etap_e = _sinr_vec(streams.private_e, ReceiverClass.EDGE, powers, gain_e, sig2)
    etai_c = _sinr_vec(streams.interf_c, ReceiverClass.CENTER, powers, gain_c, sig2)
    etai_e = _sinr_vec(streams.interf_e, ReceiverClass.EDGE, powers, gain_e, sig2)

    dec_c = eta0_c > params.zeta
    dec_e = eta0_e > params.zeta
    both = dec_c & dec_e
    only_c = dec_c & ~dec_e
    only_e = dec_e & ~dec_c
    log0_c = np.log2(1.0 + eta0_c)
    log0_e = np.log2(1.0 + eta0_e)
    min0 = np.minimum(log0_c, log0_e)

    # common-stream contribution given own decode: time-shared min rate if
    # the partner decoded too, otherwise the full slot at the own SINR
    rs0_c = streams.w_c * np.where(both, params.u * min0, log0_c)
    rs0_e = streams.w_e * np.where(both, (1.0 - params.u) * min0, log0_e)

    priv_c = dec_c & (etap_c > streams.xi_c)
    priv_e = dec_e & (etap_e > streams.xi_e)
    intf_c = ~dec_c & (etai_c > streams.xi_c)
    intf_e = ~dec_e & (etai_e > streams.xi_e)
    rp_c = streams.w_c * np.log2(1.0 + etap_c)
    rp_e = streams.w_e * np.log2(1.0 + etap_e)
    ri_c = streams.w_c * np.log2(1.0 + etai_c)
    ri_e = streams.w_e * np.log2(1.0 + etai_e)

    served_c = np.where(dec_c, rs0_c, 0.0) + np.where(priv_c, rp_c, 0.0)
    served_c = served_c + np.where(intf_c, ri_c, 0.0)
    served_e = np.where(dec_e, rs0_e, 0.0) + np.where(priv_e, rp_e, 0.0)
    served_e = served_e + np.where(intf_e, ri_e, 0.0)
    eps_c = dec_c | intf_c
    eps_e = dec_e | intf_e
    any_served = eps_c | eps_e

    stats = np.concatenate(
        [
            _accumulate(min0, both),
            _accumulate(log0_c, only_c),
            _accumulate(log0_e, only_e),
            _accumulate(rs0_c, dec_c),
            _accumulate(rs0_e, dec_e),
            _accumulate(rp_c, priv_c),
            _accumulate(rp_e, priv_e),
            _accumulate(ri_c, intf_c),
            _accumulate(ri_e, intf_e),
            _accumulate(served_c, eps_c),
            _accumulate(served_e, eps_e),
            _accumulate(served_c + served_e, any_served),
        ]
    )

    if trace is not None:
        label_c = _branch_labels(dec_c, dec_e, priv_c, intf_c)
        label_e = _branch_labels(dec_e, dec_c, priv_e, intf_e)
        cols = (draw.d_c, draw.d_e, draw.h_c, draw.h_e,
                eta0_c, eta0_e, etap_c, etap_e, etai_c, etai_e)
        for i in range(draw.d_c.size):
            row = ",".join("%.9g" % col[i] for col in cols)
            trace.append(f"{base + i},{row},{label_c[i]},{label_e[i]}")
    return stats


def estimate_rates(
    subcase: Subcase,
    params: SystemParams,
    split: PowerSplit,
    sim: SimConfig,
    trace_path: str | None = None,
) -> RateReport:
    """Event-counting estimate of every rate quantity for one subcase.

    Per-receiver rates and the decomposition fields are conditional means
    over their defining events; empty events report 0. The sum rate is the
    mean of the total served rate given at least one receiver is served.
    """
    streams = _streams(subcase, params)
    sizes = sim.chunk_sizes()
    offsets = [0] * len(sizes)
    for i in range(1, len(sizes)):
        offsets[i] = offsets[i - 1] + sizes[i - 1]
    traces: list[list[str] | None] = [
        [] if trace_path is not None else None for _ in sizes
    ]

    def kernel(index: int) -> np.ndarray:
        draw = sample_channels(params, sim.rng(index), sizes[index])
        return _rate_kernel(
            subcase, params, split, streams, draw, offsets[index], traces[index]
        )

    with ThreadPoolExecutor(max_workers=sim.workers) as pool:
        partials = list(pool.map(kernel, range(len(sizes))))

    # chunk-order exact reduction: identical totals at any worker count
    totals = np.array(
        [math.fsum(p[j] for p in partials) for j in range(len(_STAT_NAMES) * 3)]
    ).reshape(len(_STAT_NAMES), 3)

    if trace_path is not None:
        with open(trace_path, "w", encoding="ascii", newline="") as fh:
            fh.write(_TRACE_HEADER + "\n")
            for rows in traces:
                assert rows is not None
                fh.write("\n".join(rows))
                if rows:
                    fh.write("\n")

    by_name = dict(zip(_STAT_NAMES, totals))
    means = {name: _conditional(by_name[name]) for name in _STAT_NAMES}
    q_c = by_name["r_center"][2] / sim.samples
    q_e = by_name["r_edge"][2] / sim.samples
    return RateReport(
        r_center=means["r_center"][0],
        r_edge=means["r_edge"][0],
        r_sum=means["r_sum"][0],
        q_center=q_c,
        q_edge=q_e,
        method="monte-carlo",
        stderr_center=means["r_center"][1],
        stderr_edge=means["r_edge"][1],
        stderr_sum=means["r_sum"][1],
        components=RateComponents(
            **{name: means[name][0] for name in _STAT_NAMES[:9]}
        ),
        component_stderr=RateComponents(
            **{name: means[name][1] for name in _STAT_NAMES[:9]}
        ),
    )
