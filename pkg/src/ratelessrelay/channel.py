"""Memoryless binary erasure channel acting on whole coded symbols."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ratelessrelay.codec import CodedSymbol


@dataclass
class ErasureChannel:
    """Erases each symbol independently with probability ``eps``.

    The channel owns its random stream and takes exactly one draw per
    transmission, so channel and codec randomness never interleave.
    """

    eps: float
    rng: random.Random = field(default_factory=random.Random, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"erasure probability must lie in [0, 1], got {self.eps}")

    def transmit(self, sym: CodedSymbol) -> CodedSymbol | None:
        """Return ``sym`` unchanged, or ``None`` if erased."""
        if self.rng.random() < self.eps:
            return None
        return sym
