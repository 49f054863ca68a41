import random

import pytest

from ratelessrelay.channel import ErasureChannel
from ratelessrelay.codec import CodedSymbol

SYM = CodedSymbol((0, 3), b"\xde\xad", 0)


def test_eps_zero_always_delivers():
    ch = ErasureChannel(0.0, random.Random(1))
    assert all(ch.transmit(SYM) is SYM for _ in range(10_000))


def test_eps_one_always_erases():
    ch = ErasureChannel(1.0, random.Random(1))
    assert all(ch.transmit(SYM) is None for _ in range(10_000))


def test_erasure_rate():
    ch = ErasureChannel(0.4, random.Random(2))
    n = 1_000_000
    erased = sum(ch.transmit(SYM) is None for _ in range(n))
    assert erased / n == pytest.approx(0.4, abs=0.002)


def test_delivered_symbols_unchanged():
    ch = ErasureChannel(0.5, random.Random(3))
    for _ in range(1000):
        out = ch.transmit(SYM)
        assert out is None or out == SYM


def test_one_draw_per_transmission():
    a, b = random.Random(9), random.Random(9)
    ch = ErasureChannel(0.3, a)
    for _ in range(50):
        ch.transmit(SYM)
        b.random()
    assert a.random() == b.random()


@pytest.mark.parametrize("eps", [-0.1, 1.5])
def test_rejects_bad_probability(eps):
    with pytest.raises(ValueError):
        ErasureChannel(eps)
