"""Incremental peeling decoder and a GF(2) elimination oracle."""

from __future__ import annotations

from collections import deque
from typing import Iterable

from ratelessrelay.codec import CodedSymbol


class MalformedSymbol(ValueError):
    """Raised for symbols with out-of-range neighbors or a wrong payload length."""


class PeelingDecoder:
    """Belief-propagation (peeling) decoder over the erasure channel.

    Each ingested symbol is reduced against everything already recovered.
    A symbol left with one neighbor joins the ripple, and the ripple is
    drained before ``ingest`` returns, so the decoder always sits at the
    peeling fixed point of what it has seen.
    """

    def __init__(self, k: int, symbol_size: int = 1):
        if k < 1 or symbol_size < 1:
            raise ValueError("k and symbol_size must be positive")
        self.k = k
        self.symbol_size = symbol_size
        self.recovered: dict[int, int] = {}
        self.received = 0
        # pending symbol id -> [remaining neighbor set, reduced value]
        self._pending: dict[int, list] = {}
        self._edges: dict[int, set[int]] = {}
        self._next_id = 0

    @property
    def recovered_count(self) -> int:
        return len(self.recovered)

    @property
    def is_complete(self) -> bool:
        return len(self.recovered) == self.k

    @property
    def pending_count(self) -> int:
        return len(self._pending)

    def payload(self, i: int) -> bytes:
        return self.recovered[i].to_bytes(self.symbol_size, "big")

    def recovered_payloads(self) -> dict[int, bytes]:
        return {i: self.payload(i) for i in self.recovered}

    def pending_neighbor_sets(self) -> list[frozenset[int]]:
        return [frozenset(rec[0]) for rec in self._pending.values()]

    def ingest(self, sym: CodedSymbol) -> list[tuple[int, bytes]]:
        """Add one received symbol; return ``(index, payload)`` for every new recovery, in order."""
        if len(sym.payload) != self.symbol_size:
            raise MalformedSymbol(f"payload has {len(sym.payload)} bytes, expected {self.symbol_size}")
        if not sym.neighbors:
            raise MalformedSymbol("symbol has no neighbors")
        for i in sym.neighbors:
            if not 0 <= i < self.k:
                raise MalformedSymbol(f"neighbor {i} outside 0..{self.k - 1}")
        self.received += 1

        value = int.from_bytes(sym.payload, "big")
        remaining = set()
        for i in sym.neighbors:
            if i in self.recovered:
                value ^= self.recovered[i]
            elif i in remaining:
                # repeated index cancels under XOR
                remaining.discard(i)
            else:
                remaining.add(i)

        if not remaining:
            return []
        if len(remaining) == 1:
            return self._cascade(deque([(remaining.pop(), value)]))

        sid = self._next_id
        self._next_id += 1
        self._pending[sid] = [remaining, value]
        for i in remaining:
            self._edges.setdefault(i, set()).add(sid)
        return []

    def _cascade(self, ripple: deque) -> list[tuple[int, bytes]]:
        out = []
        while ripple:
            i, value = ripple.popleft()
            if i in self.recovered:
                continue
            self.recovered[i] = value
            out.append((i, value.to_bytes(self.symbol_size, "big")))
            for sid in self._edges.pop(i, ()):
                rec = self._pending[sid]
                rec[0].discard(i)
                rec[1] ^= value
                if len(rec[0]) == 1:
                    (j,) = rec[0]
                    del self._pending[sid]
                    self._edges[j].discard(sid)
                    ripple.append((j, rec[1]))
        return out


def ge_oracle_decode(k: int, symbols: Iterable[CodedSymbol]) -> dict[int, bytes]:
    """Every source symbol uniquely determined by ``symbols`` over GF(2).

    Rows are reduced to reduced row echelon form; ``x_i`` is determined
    exactly when some reduced row has support ``{i}``.
    """
    rows: list[list[int]] = []
    size = None
    for sym in symbols:
        mask = 0
        for i in sym.neighbors:
            mask ^= 1 << i
        rows.append([mask, int.from_bytes(sym.payload, "big")])
        size = len(sym.payload)

    pivot_row = 0
    for col in range(k):
        bit = 1 << col
        sel = next((r for r in range(pivot_row, len(rows)) if rows[r][0] & bit), None)
        if sel is None:
            continue
        rows[pivot_row], rows[sel] = rows[sel], rows[pivot_row]
        pmask, pval = rows[pivot_row]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][0] & bit:
                rows[r][0] ^= pmask
                rows[r][1] ^= pval
        pivot_row += 1

    out = {}
    for mask, val in rows[:pivot_row]:
        if mask & (mask - 1) == 0:
            out[mask.bit_length() - 1] = val.to_bytes(size, "big")
    return out
