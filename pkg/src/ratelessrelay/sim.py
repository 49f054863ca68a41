"""Time-slot simulation of the separated two-hop erasure relay.

One coded symbol per hop per slot.  Within a slot the source-to-relay hop is
processed before the relay-to-destination hop, so a relay symbol sent in
slot ``t`` may use anything the relay recovered earlier in slot ``t``.
ACKs are instantaneous, error free and cost no slots.

Random streams are derived per run from ``SimConfig.seed`` and a stream
name (``source``, ``relay``, ``channel-sr``, ``channel-rd``, ``payload``),
so changing one component never shifts another component's draws.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from ratelessrelay.channel import ErasureChannel
from ratelessrelay.codec import SECOND_PICK_POLICIES, Encoder, SourceBlock
from ratelessrelay.decoder import PeelingDecoder
from ratelessrelay.degree import DegreeDistribution, robust_soliton

STRATEGIES = ("single", "df", "pdf")
SOURCE_ENCODERS = ("plain", "mblte", "amicable")
RELAY_ENCODERS = ("plain", "mblte", "amicable")


@dataclass(frozen=True)
class SimConfig:
    k: int = 256
    symbol_size: int = 1
    c: float = 0.03
    delta: float = 0.5
    eps_sr: float = 0.0
    eps_rd: float = 0.0
    source_encoder: str = "amicable"
    relay_encoder: str = "mblte"
    strategy: str = "pdf"
    max_slots: int | None = None
    seed: int = 0
    second_pick: str = "separate"

    def __post_init__(self):
        if self.k < 1 or self.symbol_size < 1:
            raise ValueError("k and symbol_size must be positive")
        for name in ("eps_sr", "eps_rd"):
            eps = getattr(self, name)
            if not 0.0 <= eps <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {eps}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if self.source_encoder not in SOURCE_ENCODERS:
            raise ValueError(f"unknown source encoder {self.source_encoder!r}")
        if self.relay_encoder not in RELAY_ENCODERS:
            raise ValueError(f"unknown relay encoder {self.relay_encoder!r}")
        if self.strategy == "pdf" and self.relay_encoder == "amicable":
            raise ValueError("the pdf relay encodes dynamically; use relay_encoder 'mblte' or 'plain'")
        if self.second_pick not in SECOND_PICK_POLICIES:
            raise ValueError(f"unknown second-pick policy {self.second_pick!r}")
        if self.max_slots is not None and self.max_slots < self.k:
            raise ValueError(f"max_slots ({self.max_slots}) must be at least k ({self.k})")
        # validates (c, delta) up front
        distribution(self.k, self.c, self.delta)

    @property
    def slot_cap(self) -> int:
        return self.max_slots if self.max_slots is not None else 50 * self.k


@dataclass
class SimTrace:
    """Recovered counts ``|R(t)|`` and ``|D(t)|`` at the end of each slot ``t = 1, 2, ...``.

    Single-hop runs have no relay; their decoder is the destination and
    ``relay_recovered`` stays zero.
    """

    k: int
    strategy: str
    relay_recovered: list[int] = field(default_factory=list)
    dest_recovered: list[int] = field(default_factory=list)
    completion_slot: int | None = None
    relay_completion_slot: int | None = None
    relay_first_emission_slot: int | None = None

    @property
    def slots(self) -> int:
        return len(self.dest_recovered)

    @property
    def incomplete(self) -> bool:
        return self.completion_slot is None

    def first_slot(self, hop: str, count: int = 1) -> int | None:
        series = self.relay_recovered if hop == "relay" else self.dest_recovered
        for t, n in enumerate(series, start=1):
            if n >= count:
                return t
        return None

    def record(self, relay: int, dest: int) -> None:
        self.relay_recovered.append(relay)
        self.dest_recovered.append(dest)


@lru_cache(maxsize=64)
def distribution(k: int, c: float, delta: float) -> DegreeDistribution:
    if k == 1:
        return DegreeDistribution.from_pmf([1.0])
    return robust_soliton(k, c, delta)


def stream(seed: int, name: str) -> random.Random:
    """Independent named stream; string seeds are hashed with SHA-512 by ``random``."""
    return random.Random(f"{seed}:{name}")


def source_block(cfg: SimConfig) -> SourceBlock:
    return SourceBlock.random(cfg.k, cfg.symbol_size, stream(cfg.seed, "payload"))


def _source_encoder(cfg: SimConfig, block: SourceBlock) -> Encoder:
    return Encoder(
        cfg.source_encoder,
        distribution(cfg.k, cfg.c, cfg.delta),
        block,
        stream(cfg.seed, "source"),
        second_pick=cfg.second_pick,
    )


def _channels(cfg: SimConfig) -> tuple[ErasureChannel, ErasureChannel]:
    return (
        ErasureChannel(cfg.eps_sr, stream(cfg.seed, "channel-sr")),
        ErasureChannel(cfg.eps_rd, stream(cfg.seed, "channel-rd")),
    )


def run_single_hop(cfg: SimConfig, *, source=None, channel=None, block=None) -> SimTrace:
    """Source -> destination over ``eps_sr``; the relay columns stay zero.

    ``source`` (anything with ``next_symbol()``) and ``channel`` replace the
    configured components, for scripted scenarios.
    """
    block = block or source_block(cfg)
    source = source or _source_encoder(cfg, block)
    channel = channel or _channels(cfg)[0]
    dest = PeelingDecoder(cfg.k, cfg.symbol_size)
    trace = SimTrace(cfg.k, "single")

    for t in range(1, cfg.slot_cap + 1):
        sym = channel.transmit(source.next_symbol())
        if sym is not None:
            dest.ingest(sym)
        trace.record(0, dest.recovered_count)
        if dest.is_complete:
            trace.completion_slot = t
            break
    return trace


def run_df(cfg: SimConfig, *, source=None, channels=None, block=None) -> SimTrace:
    """Decode-and-forward: the relay re-encodes only after it has decoded everything."""
    block = block or source_block(cfg)
    source = source or _source_encoder(cfg, block)
    ch_sr, ch_rd = channels or _channels(cfg)
    relay = PeelingDecoder(cfg.k, cfg.symbol_size)
    dest = PeelingDecoder(cfg.k, cfg.symbol_size)
    trace = SimTrace(cfg.k, "df")
    relay_encoder = None

    for t in range(1, cfg.slot_cap + 1):
        if not relay.is_complete:
            sym = ch_sr.transmit(source.next_symbol())
            if sym is not None:
                relay.ingest(sym)
            if relay.is_complete:
                trace.relay_completion_slot = t
        else:
            if relay_encoder is None:
                decoded = relay.recovered_payloads()
                relay_block = SourceBlock(tuple(decoded[i] for i in range(cfg.k)))
                relay_encoder = Encoder(
                    cfg.relay_encoder,
                    distribution(cfg.k, cfg.c, cfg.delta),
                    relay_block,
                    stream(cfg.seed, "relay"),
                    second_pick=cfg.second_pick,
                )
                trace.relay_first_emission_slot = t
            sym = ch_rd.transmit(relay_encoder.next_symbol())
            if sym is not None:
                dest.ingest(sym)
        trace.record(relay.recovered_count, dest.recovered_count)
        if dest.is_complete:
            trace.completion_slot = t
            break
    return trace


def run_pdf(cfg: SimConfig, *, source=None, channels=None, block=None, events=None) -> SimTrace:
    """Partial decode-and-forward.

    Per slot: (1) source symbol to the relay decoder, (2) the relay's
    eligible set grows to its recovered set, (3) if non-empty the relay
    emits one symbol over it towards the destination, (4) counts are
    recorded.  The source stops once the relay has decoded everything.

    If ``events`` is a list, every relay emission is appended to it as
    ``(slot, symbol, delivered)``.
    """
    block = block or source_block(cfg)
    source = source or _source_encoder(cfg, block)
    ch_sr, ch_rd = channels or _channels(cfg)
    relay = PeelingDecoder(cfg.k, cfg.symbol_size)
    dest = PeelingDecoder(cfg.k, cfg.symbol_size)
    trace = SimTrace(cfg.k, "pdf")
    # the dynamic encoder only ever reads payloads of eligible (relay-recovered) indices
    relay_encoder = Encoder(
        "dynamic",
        distribution(cfg.k, cfg.c, cfg.delta),
        block,
        stream(cfg.seed, "relay"),
        dynamic_rules=cfg.relay_encoder,
        second_pick=cfg.second_pick,
    )

    for t in range(1, cfg.slot_cap + 1):
        newly = ()
        if not relay.is_complete:
            sym = ch_sr.transmit(source.next_symbol())
            if sym is not None:
                newly = relay.ingest(sym)
            if relay.is_complete:
                trace.relay_completion_slot = t
        if newly:
            relay_encoder.grow_eligible(i for i, _ in newly)
        out = relay_encoder.next_symbol()
        if out is not None:
            if trace.relay_first_emission_slot is None:
                trace.relay_first_emission_slot = t
            delivered = ch_rd.transmit(out)
            if delivered is not None:
                dest.ingest(delivered)
            if events is not None:
                events.append((t, out, delivered is not None))
        trace.record(relay.recovered_count, dest.recovered_count)
        if dest.is_complete:
            trace.completion_slot = t
            break
    return trace


def run_simulation(cfg: SimConfig) -> SimTrace:
    if cfg.strategy == "single":
        return run_single_hop(cfg)
    if cfg.strategy == "df":
        return run_df(cfg)
    return run_pdf(cfg)
