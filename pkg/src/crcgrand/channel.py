"""Binary symmetric and BPSK/AWGN channels parameterized by Eb/N0."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfcinv

from .bits import BitWord


def q_function(x: float) -> float:
    """Standard normal upper tail."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _check_rate(rate: float) -> None:
    if not 0 < rate <= 1:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")


def ebno_to_p(rate: float, ebno_db: float) -> float:
    """Hard-decision flip probability of BPSK over AWGN at the given Eb/N0."""
    _check_rate(rate)
    return q_function(math.sqrt(2.0 * rate * 10.0 ** (ebno_db / 10.0)))


def p_to_ebno(rate: float, p: float) -> float:
    """Inverse of :func:`ebno_to_p`."""
    _check_rate(rate)
    if not 0 < p < 0.5:
        raise ValueError(f"p must lie in (0, 0.5), got {p}")
    x = math.sqrt(2.0) * float(erfcinv(2.0 * p))
    return 10.0 * math.log10(x * x / (2.0 * rate))


def noise_sigma(rate: float, ebno_db: float) -> float:
    _check_rate(rate)
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0)))


@dataclass(frozen=True)
class ChannelOutput:
    hard: BitWord
    reliabilities: np.ndarray | None
    true_noise: BitWord


def bsc_noise(shape, p: float, rng: np.random.Generator) -> np.ndarray:
    if not 0 <= p <= 0.5:
        raise ValueError(f"flip probability must lie in [0, 0.5], got {p}")
    return (rng.random(shape) < p).astype(np.uint8)


def bsc_transmit(x: BitWord, p: float, rng: np.random.Generator) -> ChannelOutput:
    noise = BitWord.from_array(bsc_noise(len(x), p, rng))
    return ChannelOutput(x ^ noise, None, noise)


def awgn_batch(
    codewords: np.ndarray, sigma: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """BPSK (0 -> +1, 1 -> -1) plus Gaussian noise.

    Returns the hard decisions and the reliabilities ``|y|``.
    """
    s = 1.0 - 2.0 * codewords.astype(np.float64)
    y = s + sigma * rng.standard_normal(codewords.shape)
    return (y < 0).astype(np.uint8), np.abs(y)


def awgn_transmit(
    x: BitWord, rate: float, ebno_db: float, rng: np.random.Generator, sigma: float | None = None
) -> ChannelOutput:
    """Send one word; ``sigma`` overrides the Eb/N0-derived noise level."""
    if sigma is None:
        sigma = noise_sigma(rate, ebno_db)
    hard, rel = awgn_batch(x.to_array()[None, :], sigma, rng)
    hw = BitWord.from_array(hard[0])
    return ChannelOutput(hw, rel[0], hw ^ x)
