"""Scalar system model for a two-class rate-splitting downlink.

One transmitter serves two receiver classes in a single cell. A center
receiver is dropped uniformly inside the disk of radius ``r_c`` around the
transmitter, an edge receiver uniformly in the annulus between ``r_e`` and
``r_0``. The transmitter superimposes three streams: a common stream that
both receivers must decode first, plus one private stream per class. With
total power ``P``, the common stream gets ``beta * P`` and the remainder is
split between the center and edge private streams in proportion ``rho`` to
``1 - rho``.

Decoding at a receiver is sequential: the common stream is decoded while
both private streams interfere, then the receiver's own private stream is
decoded with the common part removed. A receiver that has the other class's
scheduled content cached can additionally cancel the other private stream
before decoding anything (individual interference cancellation, "IIC"),
which changes every SINR it sees.

This module holds the plain scalar bookkeeping shared by the closed-form
distributions, the rate integrals and the simulator: parameter containers,
stream powers, per-stream SINR expressions, their almost-sure upper bounds,
and the pre-log factors of the three delivery techniques (EFR, unicast of a
whole file; PFR, unicast of the uncached fraction; XOR, one coded multicast
serving all cached requests at once).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction


class ReceiverClass(enum.Enum):
    CENTER = "center"
    EDGE = "edge"

    @property
    def other(self) -> "ReceiverClass":
        return ReceiverClass.EDGE if self is ReceiverClass.CENTER else ReceiverClass.CENTER


class SinrKind(enum.Enum):
    """The six per-receiver SINR expressions.

    COMMON            common stream, both private streams interfere
    PRIVATE           own private stream after the common part is removed
    PRIVATE_INTERF    own private stream with the common part still present
                      (receiver skipped or failed the common stage)
    COMMON_IIC        common stream when the other private stream has been
                      cancelled from cache
    PRIVATE_IIC       own private stream, cache-cancelled case: noise only
    PRIVATE_INTERF_IIC  own private stream with only the common stream left
    """

    COMMON = "common"
    PRIVATE = "private"
    PRIVATE_INTERF = "private-interf"
    COMMON_IIC = "common-iic"
    PRIVATE_IIC = "private-iic"
    PRIVATE_INTERF_IIC = "private-interf-iic"


@dataclass(frozen=True)
class SystemParams:
    """Cell geometry, channel and caching parameters with bundled defaults."""

    P: float = 10.0          # transmit power budget [W]
    sigma2: float = 1e-5     # receiver noise power
    alpha: float = 4.0       # path-loss exponent (> 2)
    r_c: float = 50.0        # center disk radius [m]
    r_e: float = 60.0        # annulus inner radius [m]
    r_0: float = 70.0        # annulus outer radius [m]
    K: int = 5               # receivers per class
    M: int = 30              # per-receiver cache size [files]
    N: int = 50              # cacheable catalog size [files]
    F: int = 100             # full library size [files], F >= N
    zeta: float = 0.5        # common-stream SINR threshold
    xi: float = 1.0          # private-stream rate threshold parameter
    u: float = 0.5           # common-rate share granted to the center class

    def __post_init__(self) -> None:
        if self.P < 0 or self.sigma2 <= 0:
            raise ValueError("need P >= 0 and sigma2 > 0")
        if self.alpha <= 2:
            raise ValueError("path-loss exponent must exceed 2")
        if not (0 < self.r_c <= self.r_e < self.r_0):
            raise ValueError("radii must satisfy 0 < r_c <= r_e < r_0")
        if self.K < 1 or self.M < 0 or self.N <= 0 or self.F < self.N:
            raise ValueError("need K >= 1, M >= 0, 0 < N <= F")
        if self.M >= self.N:
            raise ValueError("cache must be smaller than the cacheable catalog (M < N)")
        if self.zeta <= 0 or self.xi <= 0:
            raise ValueError("thresholds zeta and xi must be positive")
        if not 0.0 <= self.u <= 1.0:
            raise ValueError("common-rate share u must lie in [0, 1]")


@dataclass(frozen=True)
class PowerSplit:
    """Fractions carving the power budget: beta to common, rho of the rest to center."""

    beta: float
    rho: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.beta <= 1.0 and 0.0 <= self.rho <= 1.0):
            raise ValueError("beta and rho must lie in [0, 1]")


@dataclass(frozen=True)
class StreamPowers:
    """Absolute per-stream powers (common, center private, edge private)."""

    p0: float
    pc: float
    pe: float

    def __post_init__(self) -> None:
        if self.p0 < 0 or self.pc < 0 or self.pe < 0:
            raise ValueError("stream powers must be nonnegative")

    def own(self, cls: ReceiverClass) -> float:
        return self.pc if cls is ReceiverClass.CENTER else self.pe

    def other(self, cls: ReceiverClass) -> float:
        return self.pe if cls is ReceiverClass.CENTER else self.pc


def stream_powers(P: float, split: PowerSplit) -> StreamPowers:
    """Allocate the power budget to the three streams.

    The three parts add back to P exactly up to float rounding.
    """
    p0 = split.beta * P
    rest = (1.0 - split.beta) * P
    return StreamPowers(p0=p0, pc=split.rho * rest, pe=(1.0 - split.rho) * rest)


def _ratio(num: float, den: float) -> float:
    # Almost-sure SINR bounds are power ratios; a vanishing denominator means
    # the interferer is off and the bound is infinite. The fully degenerate
    # 0/0 keeps the same convention but deserves a note, since the SINR
    # itself is then identically zero.
    if den == 0.0:
        if num == 0.0:
            warnings.warn(
                "0/0 SINR bound: stream and interferer powers both vanish; "
                "treating the bound as infinite by convention",
                RuntimeWarning,
                stacklevel=3,
            )
        return math.inf
    return num / den


@dataclass(frozen=True)
class SinrBounds:
    """Almost-sure upper bounds of the SINR kinds for one receiver class.

    ``common`` bounds COMMON, ``private`` bounds PRIVATE, ``private_interf``
    bounds PRIVATE_INTERF and ``common_iic`` bounds COMMON_IIC. The
    cache-cancelled private stream is noise limited (no finite bound) and
    PRIVATE_INTERF_IIC is bounded by the inverse of ``common_iic``.
    """

    common: float
    private: float
    private_interf: float
    common_iic: float

    def __post_init__(self) -> None:
        if self.common > self.common_iic:
            raise ValueError("common bound cannot exceed its cancellation variant")

    @property
    def private_interf_iic(self) -> float:
        if self.common_iic == 0.0:
            return math.inf
        if math.isinf(self.common_iic):
            return 0.0
        return 1.0 / self.common_iic

    def bound(self, kind: SinrKind) -> float:
        if kind is SinrKind.COMMON:
            return self.common
        if kind is SinrKind.PRIVATE:
            return self.private
        if kind is SinrKind.PRIVATE_INTERF:
            return self.private_interf
        if kind is SinrKind.COMMON_IIC:
            return self.common_iic
        if kind is SinrKind.PRIVATE_IIC:
            return math.inf
        return self.private_interf_iic


def sinr_bounds(cls: ReceiverClass, powers: StreamPowers) -> SinrBounds:
    """Noise-free SINR limits seen by one class under the given powers."""
    pn = powers.own(cls)
    pk = powers.other(cls)
    return SinrBounds(
        common=_ratio(powers.p0, pn + pk),
        private=_ratio(pn, pk),
        private_interf=_ratio(pn, powers.p0 + pk),
        common_iic=_ratio(powers.p0, pn),
    )


def instantaneous_sinr(
    kind: SinrKind,
    cls: ReceiverClass,
    powers: StreamPowers,
    link_gain: float,
    sigma2: float,
) -> float:
    """SINR of one stream at one receiver for a realized channel gain.

    ``link_gain`` is the fading-scaled path gain L = h / (1 + d^alpha);
    noise enters every denominator as sigma2 / L. Accepts L = inf as the
    noise-free limit and then returns the corresponding bound.
    """
    if link_gain < 0:
        raise ValueError("link gain must be nonnegative")
    noise = math.inf if link_gain == 0.0 else sigma2 / link_gain
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
    else:  # PRIVATE_INTERF_IIC
        den = powers.p0 + noise
    num = powers.p0 if kind in (SinrKind.COMMON, SinrKind.COMMON_IIC) else pn
    if den == 0.0:
        return math.inf
    if math.isinf(den):
        return 0.0
    return num / den


@dataclass(frozen=True)
class PrelogFactors:
    """Spectral-efficiency pre-log of each delivery technique.

    EFR sends a whole file to one receiver (factor 1). PFR sends only the
    uncached fraction 1 - M/N of one file. XOR sends one coded multicast
    that serves all K cached requests of a class simultaneously, so the
    per-receiver factor gains another 1 + KM/N.
    """

    efr: float
    pfr: float
    xor: float

    def by_index(self, index: int) -> float:
        """Technique lookup by position: 1 = EFR, 2 = PFR, 3 = XOR."""
        try:
            return (self.efr, self.pfr, self.xor)[index - 1]
        except IndexError:
            raise ValueError("pre-log index must be 1, 2 or 3") from None


def prelog_factors(K: int, M: int, N: int) -> PrelogFactors:
    """Pre-log factors for a coded-caching configuration.

    Requires 0 < M < N and an integral replication degree t = M K / N with
    1 <= t <= K - 1, the regime where subfile placement is well defined.
    """
    if not 0 < M < N:
        raise ValueError("need 0 < M < N")
    t = Fraction(M * K, N)
    if t.denominator != 1 or not 1 <= t <= K - 1:
        raise ValueError(
            f"replication degree M*K/N = {t} must be an integer in [1, K-1]"
        )
    frac = 1.0 - M / N
    return PrelogFactors(efr=1.0, pfr=1.0 / frac, xor=(1.0 + M * K / N) / frac)


def private_sinr_threshold(omega: float, xi: float) -> float:
    """Minimum private-stream SINR that sustains the target rate.

    A private stream transmitted with pre-log omega meets the rate target
    log2(1 + xi) iff its SINR exceeds (1 + xi)^(1/omega) - 1. Larger omega
    therefore relaxes the SINR requirement.
    """
    if omega <= 0:
        raise ValueError("pre-log factor must be positive")
    if xi <= 0:
        raise ValueError("threshold parameter must be positive")
    return (1.0 + xi) ** (1.0 / omega) - 1.0
