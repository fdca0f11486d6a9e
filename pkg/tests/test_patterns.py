import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crcgrand.bits import BitWord
from crcgrand.patterns import (
    OrbGenerator, RankPermutation, SosGenerator, distinct_partitions, logistic_weight,
    orb_next, rank_from_reliabilities, sos_next,
)

SOS_4 = ("0000 1000 0100 0010 0001 1100 0110 0011 1010 0101 1001 "
         "1110 0111 1101 1011 1111").split()
ORB_3 = "000 100 010 001 110 101 011 111".split()


def test_sos_golden():
    assert [str(z) for z in SosGenerator(4)] == SOS_4


def test_orb_golden():
    gen = OrbGenerator(RankPermutation.identity(3))
    pats = [str(z) for z in gen]
    assert pats == ORB_3
    r = RankPermutation.identity(3)
    assert [logistic_weight(BitWord.from_str(p), r) for p in pats] == [0, 1, 2, 3, 3, 4, 5, 6]


def test_next_functions_exhaust():
    g = SosGenerator(2)
    out = [sos_next(g) for _ in range(5)]
    assert [str(z) for z in out[:4]] == ["00", "10", "01", "11"]
    assert out[4] is None and g.exhausted
    o = OrbGenerator(RankPermutation.identity(2))
    assert [str(orb_next(o)) for _ in range(4)] == ["00", "10", "01", "11"]
    assert orb_next(o) is None


def test_sos_weight_two_count():
    g = SosGenerator(127)
    count = 0
    while True:
        p = g.next_positions()
        if len(p) > 2:
            break
        count += 1
    assert count == 1 + 127 + 8001


@pytest.mark.parametrize("n", range(1, 13))
def test_completeness(n):
    sos = [z.value for z in SosGenerator(n)]
    assert len(sos) == len(set(sos)) == 2**n
    rel = np.random.default_rng(n).random(n)
    orb = [z.value for z in OrbGenerator(rank_from_reliabilities(rel))]
    assert len(orb) == len(set(orb)) == 2**n


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_orb_monotone(n, seed):
    rel = np.random.default_rng(seed).random(n)
    r = rank_from_reliabilities(rel)
    lw = [logistic_weight(z, r) for z in OrbGenerator(r)]
    assert lw == sorted(lw)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 11))
def test_sos_monotone(n):
    w = [z.weight for z in SosGenerator(n)]
    assert w == sorted(w)


def test_ranks():
    r = rank_from_reliabilities([0.9, 0.1, 0.5])
    assert r.rank.tolist() == [3, 1, 2]
    assert rank_from_reliabilities([0.3] * 5).rank.tolist() == [1, 2, 3, 4, 5]
    assert rank_from_reliabilities([0.2, 0.2, 0.1]).rank.tolist() == [2, 3, 1]
    assert logistic_weight(BitWord.from_str("1111"), RankPermutation.identity(4)) == 10


def test_distinct_partitions():
    assert list(distinct_partitions(6, 6)) == [(6,), (5, 1), (4, 2), (3, 2, 1)]
    assert list(distinct_partitions(6, 3)) == [(3, 2, 1)]
    assert list(distinct_partitions(0, 4)) == [()]
    assert list(distinct_partitions(7, 2)) == []
