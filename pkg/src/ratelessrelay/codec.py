"""LT-family encoders.

Four variants share one neighbor-selection engine:

``plain``
    degree from the distribution, neighbors uniform without replacement.
``mblte``
    second-order memory-based LT: degree-1 and degree-2 symbols favor the
    input symbols with the highest instantaneous degree and remember the
    degree-1 picks in ``s1``.
``amicable``
    ``mblte`` whose first ``N = first_stage_length(dist)`` degrees are
    pre-sampled and emitted in ascending order.
``dynamic``
    relay encoder whose neighbor universe is a growing ``eligible`` set;
    sampled degrees are clamped to its size.

The instantaneous degree of an input symbol is the number of symbols emitted
so far by *this* encoder that include it.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from ratelessrelay.degree import DegreeDistribution, first_stage_length, sample_degree

VARIANTS = ("plain", "mblte", "amicable", "dynamic")
SECOND_PICK_POLICIES = ("s1", "separate")


@dataclass(frozen=True)
class SourceBlock:
    payloads: tuple[bytes, ...]

    def __post_init__(self):
        if not self.payloads:
            raise ValueError("a source block needs at least one symbol")
        size = len(self.payloads[0])
        if size < 1 or any(len(p) != size for p in self.payloads):
            raise ValueError("all payloads must share one non-zero length")

    @property
    def k(self) -> int:
        return len(self.payloads)

    @property
    def symbol_size(self) -> int:
        return len(self.payloads[0])

    @classmethod
    def random(cls, k: int, symbol_size: int, rng: random.Random) -> "SourceBlock":
        return cls(tuple(rng.randbytes(symbol_size) for _ in range(k)))


@dataclass(frozen=True)
class CodedSymbol:
    """One generator-matrix column: sorted neighbor indices plus the XOR payload."""

    neighbors: tuple[int, ...]
    payload: bytes
    seq: int = 0

    @property
    def degree(self) -> int:
        return len(self.neighbors)


def xor_payload(block: SourceBlock, neighbors: Iterable[int]) -> bytes:
    acc = 0
    for i in neighbors:
        acc ^= int.from_bytes(block.payloads[i], "big")
    return acc.to_bytes(block.symbol_size, "big")


def dump_symbols(symbols: Iterable[CodedSymbol]) -> str:
    """Debug/golden-trace format: ``seq neighbors,comma,sorted hexpayload`` per line."""
    lines = [
        f"{s.seq} {','.join(str(i) for i in sorted(s.neighbors))} {s.payload.hex()}"
        for s in symbols
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_symbols(text: str) -> list[CodedSymbol]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        seq, nbrs, payload = line.split()
        out.append(CodedSymbol(tuple(int(i) for i in nbrs.split(",")), bytes.fromhex(payload), int(seq)))
    return out


class Encoder:
    """Stateful rateless encoder over one source block.

    The encoder owns ``rng``; every random decision (degree, tie-breaks,
    uniform picks) is drawn from it, so ``(variant, dist, block, seed)``
    fixes the emitted stream.

    ``second_pick`` controls where the degree-2 second pick is remembered:
    ``"separate"`` (default) keeps it in its own exclusion set ``s2``,
    consulted only by later second picks, so degree-2 symbols hang off the
    degree-1 picks like a star; ``"s1"`` adds it to ``s1`` instead, making
    it excluded from later degree-1 picks and a candidate first pick, which
    chains degree-2 symbols into a tree.
    ``dynamic_rules`` selects ``"mblte"`` or ``"plain"`` neighbor selection
    for the dynamic variant.
    """

    def __init__(
        self,
        variant: str,
        dist: DegreeDistribution,
        block: SourceBlock,
        rng: random.Random,
        *,
        eligible: Iterable[int] = (),
        second_pick: str = "separate",
        dynamic_rules: str = "mblte",
    ):
        if variant not in VARIANTS:
            raise ValueError(f"unknown encoder variant {variant!r}; expected one of {VARIANTS}")
        if second_pick not in SECOND_PICK_POLICIES:
            raise ValueError(f"unknown second-pick policy {second_pick!r}; expected one of {SECOND_PICK_POLICIES}")
        if dynamic_rules not in ("mblte", "plain"):
            raise ValueError(f"unknown dynamic rules {dynamic_rules!r}")
        if dist.k > block.k:
            raise ValueError(f"distribution over {dist.k} degrees but block has {block.k} symbols")
        self.variant = variant
        self.dist = dist
        self.block = block
        self.rng = rng
        self.second_pick = second_pick
        self.memory = variant in ("mblte", "amicable") or (variant == "dynamic" and dynamic_rules == "mblte")

        k = block.k
        self._values = [int.from_bytes(p, "big") for p in block.payloads]
        self.inst_degree = [0] * k
        self.s1: set[int] = set()
        self._s1_order: list[int] = []
        self.s2: set[int] = set()
        self.emitted = 0
        self.pending_degrees: deque[int] = deque()
        self.first_stage = 0

        if variant == "dynamic":
            self.eligible: set[int] = set()
            self._universe: list[int] = []
            self.grow_eligible(eligible)
        else:
            self.eligible = set(range(k))
            self._universe = list(range(k))

        if variant == "amicable":
            self.first_stage = first_stage_length(dist)
            self.pending_degrees = deque(sorted(sample_degree(dist, rng) for _ in range(self.first_stage)))

    def grow_eligible(self, newly: Iterable[int]) -> None:
        if self.variant != "dynamic":
            raise ValueError("only the dynamic encoder has a growing eligible set")
        newly = sorted(set(newly))
        for i in newly:
            if not 0 <= i < self.block.k:
                raise ValueError(f"index {i} outside 0..{self.block.k - 1}")
            if i in self.eligible:
                raise ValueError(f"index {i} is already eligible")
        self.eligible.update(newly)
        self._universe.extend(newly)

    def next_degree(self) -> int:
        if self.pending_degrees:
            return self.pending_degrees.popleft()
        return sample_degree(self.dist, self.rng)

    def next_symbol(self) -> CodedSymbol | None:
        """Emit the next coded symbol, or ``None`` if the eligible set is empty."""
        if not self._universe:
            return None
        d = min(self.next_degree(), len(self._universe))
        return self.emit(self.select(d))

    def emit(self, neighbors: Sequence[int]) -> CodedSymbol:
        acc = 0
        for i in neighbors:
            acc ^= self._values[i]
            self.inst_degree[i] += 1
        sym = CodedSymbol(tuple(sorted(neighbors)), acc.to_bytes(self.block.symbol_size, "big"), self.emitted)
        self.emitted += 1
        return sym

    def select(self, d: int) -> list[int]:
        universe = self._universe
        rng = self.rng
        if not self.memory or d >= 3:
            return rng.sample(universe, d)
        if d == 1:
            pick = self._pick_highest([i for i in universe if i not in self.s1])
            if pick is None:
                return [universe[rng.randrange(len(universe))]]
            self._add_s1(pick)
            return [pick]
        # d == 2
        if not self._s1_order:
            return rng.sample(universe, 2)
        first = self._s1_order[rng.randrange(len(self._s1_order))]
        s1, s2 = self.s1, self.s2
        second = self._pick_highest([i for i in universe if i not in s1 and i not in s2 and i != first])
        if second is None:
            rest = [i for i in universe if i != first]
            second = rest[rng.randrange(len(rest))]
        elif self.second_pick == "s1":
            self._add_s1(second)
        else:
            s2.add(second)
        return [first, second]

    def _pick_highest(self, candidates: list[int]) -> int | None:
        if not candidates:
            return None
        inst = self.inst_degree
        top = max(inst[i] for i in candidates)
        best = [i for i in candidates if inst[i] == top]
        return best[self.rng.randrange(len(best))]

    def _add_s1(self, i: int) -> None:
        if i not in self.s1:
            self.s1.add(i)
            self._s1_order.append(i)


def make_encoder(variant: str, dist: DegreeDistribution, block: SourceBlock, rng: random.Random, **kwargs) -> Encoder:
    return Encoder(variant, dist, block, rng, **kwargs)
