import math

import numpy as np
import pytest

from crcgrand.bits import BitWord
from crcgrand.channel import (
    awgn_batch, awgn_transmit, bsc_transmit, ebno_to_p, noise_sigma, p_to_ebno, q_function,
)


def test_ebno_to_p_examples():
    assert ebno_to_p(0.5, 0.0) == pytest.approx(0.158655, abs=1e-6)
    assert ebno_to_p(120 / 127, 7.0) == pytest.approx(1.04e-3, rel=0.01)
    assert ebno_to_p(1.0, 10.0) < ebno_to_p(1.0, 0.0)
    assert ebno_to_p(0.9, 3.0) < ebno_to_p(0.5, 3.0)
    with pytest.raises(ValueError):
        ebno_to_p(0.0, 1.0)


def test_q_function_tail_accuracy():
    # reference values of the standard normal tail
    assert q_function(0.0) == 0.5
    assert q_function(3.0) == pytest.approx(1.3498980316300946e-3, rel=1e-10)
    assert q_function(5.0) == pytest.approx(2.866515718791939e-7, rel=1e-10)


@pytest.mark.parametrize("rate,db", [(0.5, 0.0), (51 / 64, 4.5), (120 / 127, 8.0)])
def test_p_to_ebno_inverse(rate, db):
    assert p_to_ebno(rate, ebno_to_p(rate, db)) == pytest.approx(db, abs=1e-9)


def test_bsc():
    rng = np.random.default_rng(1)
    x = BitWord.from_str("1011001110")
    assert bsc_transmit(x, 0.0, rng).hard == x
    out = bsc_transmit(x, 0.3, rng)
    assert out.hard == x ^ out.true_noise and out.reliabilities is None
    with pytest.raises(ValueError):
        bsc_transmit(x, 1.0, rng)
    a = bsc_transmit(x, 0.2, np.random.default_rng(9))
    b = bsc_transmit(x, 0.2, np.random.default_rng(9))
    assert a == b or (a.hard == b.hard and a.true_noise == b.true_noise)


def test_awgn_noiseless_and_reproducible():
    x = BitWord.from_str("0110")
    out = awgn_transmit(x, 0.5, 0.0, np.random.default_rng(0), sigma=0.0)
    assert out.hard == x and np.array_equal(out.reliabilities, np.ones(4))
    a = awgn_transmit(x, 0.5, 2.0, np.random.default_rng(4))
    b = awgn_transmit(x, 0.5, 2.0, np.random.default_rng(4))
    assert np.array_equal(a.reliabilities, b.reliabilities) and a.hard == b.hard
    assert a.true_noise == a.hard ^ x


@pytest.mark.parametrize("rate,db", [(51 / 64, 4.0), (0.5, 1.0)])
def test_awgn_flip_rate_matches_bsc(rate, db):
    rng = np.random.default_rng(123)
    n_bits = 1_000_000
    hard, rel = awgn_batch(np.zeros((1000, 1000), dtype=np.uint8), noise_sigma(rate, db), rng)
    p = ebno_to_p(rate, db)
    sigma = math.sqrt(p * (1 - p) / n_bits)
    assert abs(hard.mean() - p) < 3 * sigma
    assert (rel >= 0).all()
