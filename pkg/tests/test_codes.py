import itertools

import numpy as np
import pytest

from crcgrand.bits import BitWord, Gf2Matrix, Gf2Poly, poly_divmod
from crcgrand.codes import (
    CRC_PRESETS, REFERENCE_CODES, CodeSpec, bch_build, bhattacharyya, bm_decode, capolar_build, crc_build,
    crc_encode, crc_is_codeword, extract_generator_matrix, min_distance, parse_koopman,
    polar_build, polar_info_set, polar_transform, rlc_build, to_koopman,
)

HAMMING = Gf2Poly.from_exponents([3, 1, 0])


def all_messages(k):
    return [BitWord(k, v) for v in range(2**k)]


def test_parse_koopman():
    assert parse_koopman(0x65, 7) == Gf2Poly.from_exponents([7, 6, 3, 1, 0])
    assert parse_koopman(0x33, 6) == Gf2Poly.from_exponents([6, 5, 2, 1, 0])
    assert parse_koopman(0x1, 1) == Gf2Poly.from_exponents([1, 0])
    assert to_koopman(parse_koopman(0x12E6, 13)) == 0x12E6
    with pytest.raises(ValueError, match="polynomial degree mismatch with n-K"):
        parse_koopman(0x25, 7)


def test_crc_encode_examples():
    m = BitWord.from_str("1001")
    assert str(crc_encode(HAMMING, m, 7)) == "1001110"
    # x^6+x^4+x+1 written power-descending
    assert str(crc_encode(HAMMING, m, 7, "multiplicative")) == "1010011"
    for mode in ("systematic", "multiplicative"):
        assert crc_encode(HAMMING, BitWord(4, 0), 7, mode) == BitWord(7, 0)


def test_crc_is_codeword_examples():
    assert crc_is_codeword(HAMMING, BitWord.from_str("1001110"))
    assert crc_is_codeword(HAMMING, BitWord(7, 0))
    assert not crc_is_codeword(HAMMING, BitWord.from_str("0001110"))


@pytest.mark.parametrize("mode", ["systematic", "multiplicative"])
def test_crc_remainder_zero(mode, rng):
    g = parse_koopman(0xBAE, 12)
    for _ in range(50):
        m = BitWord(51, int(rng.integers(0, 2**51)))
        c = crc_encode(g, m, 63, mode)
        assert poly_divmod(c.to_poly(), g)[1].is_zero()


def test_bch_build():
    c = bch_build(7, 1)
    assert (c.n, c.k, c.g.degree) == (127, 120, 7)
    c = bch_build(7, 3)
    assert (c.n, c.k, c.g.degree) == (127, 106, 21)
    h = bch_build(3, 1)
    assert (h.n, h.k) == (7, 4) and h.g == HAMMING
    for m, t, k in [(6, 1, 57), (6, 2, 51), (6, 3, 45), (7, 2, 113)]:
        assert bch_build(m, t).k == k
    # largest admissible t gives the repetition code; the rate never reaches zero
    assert bch_build(3, 3).k == 1
    with pytest.raises(ValueError):
        bch_build(3, 4)


def test_bch_divisibility_matches_parity_check(rng):
    code = bch_build(6, 2)
    for _ in range(200):
        y = BitWord.from_array(rng.integers(0, 2, 63).astype(np.uint8))
        via_h = not (Gf2Matrix(y.to_array()[None, :]) @ code.parity_check_matrix.T).array.any()
        assert crc_is_codeword(code.g, y) == via_h == code.is_codeword(y)
    assert crc_is_codeword(code.g, code.encode(BitWord(51, 12345)))


def test_bm_examples():
    h = bch_build(3, 1)
    c = h.encode(BitWord.from_str("1001"))
    assert bm_decode(h, c).codeword == c
    assert bm_decode(h, c.flip(0)).codeword == c


def test_bm_exhaustive_small(rng):
    code = bch_build(4, 2)  # (15,7), t=2
    for _ in range(5):
        c = code.encode(BitWord(code.k, int(rng.integers(0, 2**code.k))))
        for w in range(3):
            for pos in itertools.combinations(range(15), w):
                out = bm_decode(code, c.flip(*pos))
                assert out.ok and out.codeword == c


def test_bm_beyond_t_stays_in_codebook(rng):
    code = bch_build(6, 2)
    c = code.encode(BitWord(code.k, int(rng.integers(0, 2**code.k))))
    fails = 0
    for pos in itertools.islice(itertools.combinations(range(63), 3), 0, None, 7):
        out = bm_decode(code, c.flip(*pos))
        if out.ok:
            assert code.is_codeword(out.codeword)
            assert out.codeword != c
        else:
            fails += 1
    assert fails > 0


def test_rlc():
    a, b = rlc_build(8, 4, seed=3), rlc_build(8, 4, seed=3)
    assert np.array_equal(a.generator_matrix.array, b.generator_matrix.array)
    assert (a.generator_matrix @ a.parity_check_matrix.T).is_zero()
    for m in all_messages(4):
        assert a.is_codeword(a.encode(m))
        assert a.message(a.encode(m)) == m
    z = rlc_build(8, 4, parity=np.zeros((4, 4), dtype=np.uint8))
    book = {str(z.encode(m)) for m in all_messages(4)}
    assert book == {f"{v:04b}0000" for v in range(16)}


def test_polar_examples():
    assert np.allclose(bhattacharyya(4, 0.5), [0.9375, 0.5625, 0.4375, 0.0625])
    assert polar_info_set(4, 2, 0.5).tolist() == [2, 3]
    assert polar_transform(np.array([0, 0, 0, 1])).tolist() == [1, 1, 1, 1]
    assert polar_transform(np.array([0, 1])).tolist() == [1, 1]
    with pytest.raises(ValueError):
        polar_build(12, 6)


def test_polar_generator_rows():
    code = polar_build(4, 2, z0=0.5)
    f2 = np.array([[1, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [1, 1, 1, 1]])
    assert np.array_equal(code.generator_matrix.array, f2[[2, 3]])


def test_capolar_inner_sizes():
    c = capolar_build(128, 99, *CRC_PRESETS["crc11"], 2.0, crc="crc11")
    assert c.inner.k == 110 and c.n - c.inner.k == 18
    c = capolar_build(64, 51, *CRC_PRESETS["crc11"], 2.0, crc="crc11")
    assert c.inner.k == 62
    assert c.encode(BitWord(51, 0)) == BitWord(64, 0)


def test_extract_generator_matrix():
    G = extract_generator_matrix(lambda m: crc_encode(HAMMING, m, 7), 4, 7)
    assert G.shape == (4, 7) and G.rank() == 4
    with pytest.raises(ValueError, match="encoder not linear"):
        extract_generator_matrix(lambda m: crc_encode(HAMMING, m, 7).flip(0), 4, 7)


SMALL_SPECS = [
    CodeSpec("crc", 7, 4, poly=0x5),
    CodeSpec("crc", 7, 4, poly=0x5, mode="multiplicative"),
    CodeSpec("crc", 16, 8, poly=0x83),
    CodeSpec("bch", 15, t=2),
    CodeSpec("rlc", 14, 6, seed=5),
    CodeSpec("polar", 16, 8),
    CodeSpec("capolar", 32, 10, crc_poly=0x5, crc_bits=3),
]


@pytest.mark.parametrize("spec", SMALL_SPECS, ids=lambda s: s.label() + s.mode)
def test_codebook_exhaustive(spec):
    code = spec.build()
    book = set()
    for m in all_messages(code.k):
        c = code.encode(m)
        assert code.is_codeword(c)
        assert code.message(c) == m
        book.add(c.value)
    assert len(book) == 2**code.k
    # no other word of the space is accepted (checked on a sample for longer n)
    others = [v for v in range(min(2**code.n, 1 << 14)) if v not in book]
    assert not any(code.is_codeword(BitWord(code.n, v)) for v in others)


@pytest.mark.parametrize("spec", SMALL_SPECS, ids=lambda s: s.label() + s.mode)
def test_batch_messages_roundtrip(spec, rng):
    code = spec.build()
    msgs = rng.integers(0, 2, (40, code.k)).astype(np.uint8)
    words = code.encode_batch(msgs)
    assert np.array_equal(code.messages(words), msgs)
    for m, c in zip(msgs, words):
        assert BitWord.from_array(c) == code.encode(BitWord.from_array(m))


def brute_min_distance(code):
    best = None
    for v in range(1, 2**code.k):
        w = code.encode(BitWord(code.k, v)).weight
        best = w if best is None else min(best, w)
    return best


@pytest.mark.parametrize("spec", SMALL_SPECS[:5], ids=lambda s: s.label())
def test_min_distance_vs_codebook(spec):
    code = spec.build()
    d = brute_min_distance(code)
    res = min_distance(code, code.n)
    assert res.d == d
    assert code.is_codeword(BitWord.from_positions(code.n, res.witness))
    assert min_distance(code, d - 1).report() == f"d > {d - 1}"
    assert min_distance(code, 0).report() == "d > 0"


def test_table_rows_parse():
    for n, k, t, poly, d in REFERENCE_CODES:
        code = crc_build(n, k, poly)
        assert code.k == k and code.g.degree == n - k


def test_spec_dict_roundtrip():
    s = CodeSpec("crc", 63, 51, poly=0xBAE)
    assert CodeSpec.from_dict(s.to_dict()) == s
    with pytest.raises(ValueError):
        CodeSpec("crc", 7, 7, poly=0x5)
    with pytest.raises(ValueError):
        CodeSpec.from_dict({"family": "crc", "n": 7, "k": 4, "bogus": 1})
