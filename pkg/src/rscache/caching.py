"""Cache placement, coded delivery and request-pattern classification.

Two placement policies coexist in the cell. A class under "most popular
content" (MPC) placement stores the top M files whole, so only requests of
rank > M ever reach the transmitter, and one such request is scheduled per
slot (worst case: at least one request is assumed not locally served). A
class under coded caching (CC) splits each of the top N files into
C(K, t) subfiles with t = M K / N and stores at receiver i every subfile
indexed by a t-subset containing i; all K requests of rank <= N can then be
served together by XOR multicasts, one per (t+1)-subset of receivers.

Delivery technique per served class:
  EFR  whole file unicast (rank beyond anything cached),
  PFR  unicast of the uncached 1 - M/N fraction (rank <= N, single receiver),
  XOR  the coded multicast round (all K ranks <= N).

A receiver whose class uses MPC placement can cancel the other class's
stream from cache ("IIC") exactly when everything the other class is being
served has rank <= M, since those files sit in its cache in full.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .model import ReceiverClass, SystemParams


class Mode(enum.Enum):
    """Placement policy assignment (center class / edge class)."""

    ALL_MPC = "all-mpc"
    CC_MPC = "cc-mpc"
    MPC_CC = "mpc-cc"
    ALL_CC = "all-cc"

    def is_cc(self, cls: ReceiverClass) -> bool:
        if cls is ReceiverClass.CENTER:
            return self in (Mode.CC_MPC, Mode.ALL_CC)
        return self in (Mode.MPC_CC, Mode.ALL_CC)


class Technique(enum.Enum):
    """Delivery technique; the value doubles as the pre-log index."""

    EFR = 1
    PFR = 2
    XOR = 3


@dataclass(frozen=True)
class CodedCacheConfig:
    """K receivers, cache size M files, cacheable catalog of N files."""

    K: int
    M: int
    N: int

    def __post_init__(self) -> None:
        if self.K < 2:
            raise ValueError("coded caching needs at least two receivers")
        if not 0 < self.M < self.N:
            raise ValueError("need 0 < M < N")
        t = Fraction(self.M * self.K, self.N)
        if t.denominator != 1 or not 1 <= t <= self.K - 1:
            raise ValueError(
                f"replication degree M*K/N = {t} must be an integer in [1, K-1]"
            )

    @property
    def t(self) -> int:
        """Replication degree: how many receivers share each subfile."""
        return self.M * self.K // self.N

    @property
    def subfiles_per_file(self) -> int:
        return math.comb(self.K, self.t)


@dataclass(frozen=True, order=True)
class Subfile:
    """Piece of file ``f`` cached by exactly the receivers in ``group``."""

    f: int
    group: tuple[int, ...]


@dataclass(frozen=True)
class Request:
    """A receiver (1-based within its class) asking for a popularity rank."""

    receiver: int
    rank: int


@dataclass(frozen=True)
class PlacementMap:
    """Subfile layout of a coded-caching class."""

    cfg: CodedCacheConfig
    _by_file: Mapping[int, tuple[Subfile, ...]] = field(repr=False)

    def subfiles(self, f: int) -> tuple[Subfile, ...]:
        """All subfiles of file f, t-subsets in lexicographic order."""
        return self._by_file[f]

    def cached(self, f: int, receiver: int) -> tuple[Subfile, ...]:
        """Subfiles of file f held by one receiver."""
        if not 1 <= receiver <= self.cfg.K:
            raise ValueError("receiver index out of range")
        return tuple(s for s in self._by_file[f] if receiver in s.group)

    def cache_contents(self, receiver: int) -> tuple[Subfile, ...]:
        return tuple(
            s for f in sorted(self._by_file) for s in self.cached(f, receiver)
        )

    def storage_files(self, receiver: int) -> Fraction:
        """Occupied cache space in units of whole files (must equal M)."""
        per_file = Fraction(len(self.cached(1, receiver)), self.cfg.subfiles_per_file)
        return per_file * self.cfg.N

    def serialize(self) -> str:
        """One line per subfile: ``f W_sorted -> receivers``."""
        lines = []
        for f in sorted(self._by_file):
            for s in self._by_file[f]:
                w = ",".join(str(i) for i in s.group)
                lines.append(f"{s.f} {w} -> {w}")
        return "\n".join(lines) + "\n"


def cc_place(cfg: CodedCacheConfig) -> PlacementMap:
    """Uncoded symmetric placement: file f is split along t-subsets of receivers."""
    groups = [tuple(g) for g in combinations(range(1, cfg.K + 1), cfg.t)]
    by_file = {
        f: tuple(Subfile(f=f, group=g) for g in groups) for f in range(1, cfg.N + 1)
    }
    return PlacementMap(cfg=cfg, _by_file=by_file)


@dataclass(frozen=True)
class XorTransmission:
    """One multicast: the XOR of ``parts``, useful to everyone in ``group``.

    parts[i] is the subfile wanted by group[i] and cached by everyone else
    in the group.
    """

    group: tuple[int, ...]
    parts: tuple[Subfile, ...]


@dataclass(frozen=True)
class DeliverySchedule:
    cfg: CodedCacheConfig
    demands: tuple[int, ...]
    transmissions: tuple[XorTransmission, ...]
    subfile_size: Fraction
    per_receiver_load: Fraction


def cc_delivery_schedule(
    cfg: CodedCacheConfig, demands: Sequence[int]
) -> DeliverySchedule:
    """XOR schedule serving all K demands (ranks within the cacheable catalog).

    For every (t+1)-subset S of receivers, one transmission XORs the
    subfiles S_{d_k, S \\ {k}} over k in S; each member then cancels every
    other part from cache. The per-receiver load comes out to
    (1 - M/N) / (1 + K M / N) of a file regardless of the demand vector.
    """
    if len(demands) != cfg.K:
        raise ValueError(f"need exactly K={cfg.K} demands")
    if any(not 1 <= d <= cfg.N for d in demands):
        raise ValueError("coded delivery serves only ranks within the catalog (<= N)")
    d = dict(zip(range(1, cfg.K + 1), demands))
    txs = []
    for group in combinations(range(1, cfg.K + 1), cfg.t + 1):
        parts = tuple(
            Subfile(f=d[k], group=tuple(i for i in group if i != k)) for k in group
        )
        txs.append(XorTransmission(group=group, parts=parts))
    size = Fraction(1, cfg.subfiles_per_file)
    load = Fraction(cfg.K - cfg.t, cfg.K * (cfg.t + 1))
    assert load == Fraction(cfg.N - cfg.M, cfg.N) / (1 + Fraction(cfg.K * cfg.M, cfg.N))
    return DeliverySchedule(
        cfg=cfg,
        demands=tuple(demands),
        transmissions=tuple(txs),
        subfile_size=size,
        per_receiver_load=load,
    )


@dataclass(frozen=True)
class Subcase:
    """One served configuration: technique per class plus the IIC flag."""

    mode: Mode
    center: Technique
    edge: Technique
    iic_at: ReceiverClass | None
    scheduled_center: int
    scheduled_edge: int

    def __post_init__(self) -> None:
        for cls, tech, count in (
            (ReceiverClass.CENTER, self.center, self.scheduled_center),
            (ReceiverClass.EDGE, self.edge, self.scheduled_edge),
        ):
            if not self.mode.is_cc(cls):
                if tech is not Technique.EFR or count != 1:
                    raise ValueError("an MPC class always unicasts one whole file")
            else:
                if (tech is Technique.XOR) != (count > 1):
                    raise ValueError("XOR serves the whole class, unicast serves one")
        if self.iic_at is not None:
            if self.mode.is_cc(self.iic_at):
                raise ValueError("only an MPC-placement receiver can cache-cancel")
            other_tech = self.edge if self.iic_at is ReceiverClass.CENTER else self.center
            if other_tech is Technique.EFR:
                raise ValueError("cancellation needs the other stream cached (rank <= M)")

    @property
    def token(self) -> str:
        base = f"{self.center.name.lower()}/{self.edge.name.lower()}"
        if self.iic_at is ReceiverClass.CENTER:
            return base + "+iic-c"
        if self.iic_at is ReceiverClass.EDGE:
            return base + "+iic-e"
        return base

    def prelog_index(self, cls: ReceiverClass) -> int:
        return (self.center if cls is ReceiverClass.CENTER else self.edge).value


def make_subcase(
    mode: Mode, center: str, edge: str, iic: str | None = None, K: int = 1
) -> Subcase:
    """Convenience constructor from technique names ('efr', 'pfr', 'xor')."""
    c = Technique[center.upper()]
    e = Technique[edge.upper()]
    iic_at = None
    if iic in ("center", "c", "iic-c"):
        iic_at = ReceiverClass.CENTER
    elif iic in ("edge", "e", "iic-e"):
        iic_at = ReceiverClass.EDGE
    elif iic not in (None, "", "none"):
        raise ValueError(f"unknown IIC tag {iic!r}")
    return Subcase(
        mode=mode,
        center=c,
        edge=e,
        iic_at=iic_at,
        scheduled_center=K if c is Technique.XOR else 1,
        scheduled_edge=K if e is Technique.XOR else 1,
    )


def parse_subcase_token(mode: Mode, token: str, K: int) -> Subcase:
    """Invert ``Subcase.token``: e.g. 'xor/efr+iic-e'."""
    body, _, tag = token.partition("+")
    try:
        c, e = body.split("/")
    except ValueError:
        raise ValueError(f"malformed subcase token {token!r}") from None
    return make_subcase(mode, c, e, tag or None, K=K)


def _classify_side(
    mode: Mode,
    cls: ReceiverClass,
    ranks: Sequence[int],
    params: SystemParams,
    rng,
) -> tuple[Technique, int, int]:
    """Technique, scheduled-receiver count and served rank for one class."""
    if len(ranks) != params.K:
        raise ValueError(f"need one request per receiver (K={params.K})")
    if any(not 1 <= r <= params.F for r in ranks):
        raise ValueError("ranks must lie in [1, F]")
    if not mode.is_cc(cls):
        # MPC side: the top-M files are served from cache; by the worst-case
        # model assumption somebody wants a file beyond them.
        pending = [i for i, r in enumerate(ranks) if r > params.M]
        if not pending:
            raise ValueError(
                "every request is cached locally; the model assumes at least "
                "one MPC-side request beyond the top M files"
            )
        pick = pending[int(rng.integers(len(pending)))]
        return Technique.EFR, 1, ranks[pick]
    if all(r <= params.N for r in ranks):
        # feasible coded round; the cancellation question looks at all K ranks
        worst = max(ranks)
        return Technique.XOR, params.K, worst
    pick = int(rng.integers(params.K))
    rank = ranks[pick]
    return (Technique.PFR if rank <= params.N else Technique.EFR), 1, rank


def classify_subcase(
    mode: Mode,
    center_requests: Sequence[int],
    edge_requests: Sequence[int],
    params: SystemParams,
    rng,
) -> Subcase:
    """Map a request pattern to the served subcase.

    ``rng`` (a numpy Generator) breaks ties when a unicast receiver must be
    picked. For a CC class the coded round runs iff all K ranks fit the
    catalog; otherwise one receiver is scheduled uniformly at random. The
    MPC-side receiver gets the cancellation flag iff everything served to
    the CC side has rank <= M (whole files in the MPC cache).
    """
    c_tech, c_count, c_rank = _classify_side(
        mode, ReceiverClass.CENTER, center_requests, params, rng
    )
    e_tech, e_count, e_rank = _classify_side(
        mode, ReceiverClass.EDGE, edge_requests, params, rng
    )
    iic_at = None
    if mode is Mode.CC_MPC and c_tech is not Technique.EFR and c_rank <= params.M:
        iic_at = ReceiverClass.EDGE
    elif mode is Mode.MPC_CC and e_tech is not Technique.EFR and e_rank <= params.M:
        iic_at = ReceiverClass.CENTER
    return Subcase(
        mode=mode,
        center=c_tech,
        edge=e_tech,
        iic_at=iic_at,
        scheduled_center=c_count,
        scheduled_edge=e_count,
    )


def sample_requests(params: SystemParams, count: int, rng, gamma: float = 0.0):
    """Draw popularity ranks from a truncated Zipf law over [1, F].

    gamma = 0 gives the uniform default; larger gamma skews toward low
    ranks. Returns an integer numpy array of shape (count,).
    """
    import numpy as np

    if gamma < 0:
        raise ValueError("Zipf exponent must be nonnegative")
    ranks = np.arange(1, params.F + 1, dtype=float)
    w = ranks**-gamma if gamma > 0 else np.ones_like(ranks)
    w /= w.sum()
    return rng.choice(np.arange(1, params.F + 1), size=count, p=w)
