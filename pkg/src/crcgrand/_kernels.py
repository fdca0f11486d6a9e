"""
Compiled inner loops.

Every linear code is reduced here to its syndrome columns: ``cols[i]`` is the
syndrome (packed into ``nw`` uint64 words) of the single-bit word with bit
``i`` set.  A word is a code-word iff the XOR of the columns at its set bits
is zero, so testing ``y ^ z`` against the code-book reduces to comparing the
syndrome of ``z`` with the syndrome of ``y``.

The pattern orders below must stay in lock-step with the reference
generators in :mod:`crcgrand.patterns`; ``tests/test_grand.py`` cross-checks
query counts between the two.
"""

import numpy as np
from numba import njit

FOUND = 0
ABANDONED = 1

_NOGIL = dict(cache=True, nogil=True)


@njit(**_NOGIL)
def _eq_xor(cols, rel, w, off, target, nw):
    # True iff XOR of cols[off + rel[0..w)] equals target.
    for j in range(nw):
        acc = np.uint64(0)
        for i in range(w):
            acc ^= cols[off + rel[i], j]
        if acc != target[j]:
            return False
    return True


@njit(**_NOGIL)
def _is_zero(s, nw):
    for j in range(nw):
        if s[j] != 0:
            return False
    return True


@njit(**_NOGIL)
def sos_search(cols, target, tmax, qmax, out_pattern):
    """Simple-order-sweeping search for a pattern whose syndrome is ``target``.

    Writes the hit into ``out_pattern`` (cleared first) and returns
    ``(status, queries)``.
    """
    n = cols.shape[0]
    nw = cols.shape[1]
    out_pattern[:] = 0
    q = 0
    if qmax <= 0:
        return ABANDONED, 0
    q = 1
    if _is_zero(target, nw):
        return FOUND, q
    rel = np.empty(n, dtype=np.int64)
    idx = np.empty(n, dtype=np.int64)
    wlim = min(tmax, n)
    for w in range(1, wlim + 1):
        if w == 1:
            rel[0] = 0
            for off in range(n):
                if q >= qmax:
                    return ABANDONED, q
                q += 1
                if _eq_xor(cols, rel, 1, off, target, nw):
                    out_pattern[off] = 1
                    return FOUND, q
            continue
        c = w - 2
        for s in range(w, n + 1):
            m = s - 2
            for i in range(c):
                idx[i] = i + 1
            while True:
                rel[0] = 0
                for i in range(c):
                    rel[i + 1] = idx[i]
                rel[w - 1] = s - 1
                for off in range(n - s + 1):
                    if q >= qmax:
                        return ABANDONED, q
                    q += 1
                    if _eq_xor(cols, rel, w, off, target, nw):
                        for i in range(w):
                            out_pattern[off + rel[i]] = 1
                        return FOUND, q
                # next interior arrangement, lexicographic
                i = c - 1
                while i >= 0 and idx[i] == m - c + 1 + i:
                    i -= 1
                if i < 0:
                    break
                idx[i] += 1
                for j in range(i + 1, c):
                    idx[j] = idx[j - 1] + 1
    return ABANDONED, q


@njit(**_NOGIL)
def _first_partition(total, cap, parts):
    # Greedy distinct-part partition of total with all parts < cap.
    # Returns number of parts, or -1 when infeasible.
    if total > cap * (cap - 1) // 2:
        return -1
    L = 0
    rem = total
    top = cap
    while rem > 0:
        p = min(rem, top - 1)
        parts[L] = p
        L += 1
        rem -= p
        top = p
    return L


@njit(**_NOGIL)
def _next_partition(parts, L):
    # Advance to the next distinct-part partition of the same total in
    # reverse lexicographic order of the descending part sequence.
    # Returns the new length, or -1 when exhausted.
    suffix = 0
    for i in range(L - 1, -1, -1):
        suffix += parts[i]
        new = parts[i] - 1
        if new < 1:
            continue
        rem = suffix - new
        if rem <= new * (new - 1) // 2:
            parts[i] = new
            return i + 1 + _fill(parts, i + 1, rem, new)
    return -1


@njit(**_NOGIL)
def _fill(parts, start, rem, cap):
    L = 0
    top = cap
    while rem > 0:
        p = min(rem, top - 1)
        parts[start + L] = p
        L += 1
        rem -= p
        top = p
    return L


@njit(**_NOGIL)
def orb_search(cols, pos, target, qmax, out_pattern):
    """Logistic-weight ordered search; ``pos[j]`` is the bit of rank ``j + 1``.

    Returns ``(status, queries)`` and writes the hit into ``out_pattern``.
    """
    n = cols.shape[0]
    nw = cols.shape[1]
    out_pattern[:] = 0
    if qmax <= 0:
        return ABANDONED, 0
    q = 1
    if _is_zero(target, nw):
        return FOUND, q
    parts = np.empty(n + 1, dtype=np.int64)
    bits = np.empty(n + 1, dtype=np.int64)
    wmax = n * (n + 1) // 2
    for W in range(1, wmax + 1):
        L = _first_partition(W, n + 1, parts)
        while L > 0:
            if q >= qmax:
                return ABANDONED, q
            q += 1
            for i in range(L):
                bits[i] = pos[parts[i] - 1]
            if _eq_xor(cols, bits, L, 0, target, nw):
                for i in range(L):
                    out_pattern[bits[i]] = 1
                return FOUND, q
            L = _next_partition(parts, L)
    return ABANDONED, q


@njit(**_NOGIL)
def syndromes(cols, words):
    """Syndromes of a batch of words, ``words`` shaped (T, n) uint8."""
    T = words.shape[0]
    n = cols.shape[0]
    nw = cols.shape[1]
    out = np.zeros((T, nw), dtype=np.uint64)
    for t in range(T):
        for i in range(n):
            if words[t, i]:
                for j in range(nw):
                    out[t, j] ^= cols[i, j]
    return out


@njit(**_NOGIL)
def sos_batch(cols3, targets, tmax, qmax):
    """Run :func:`sos_search` for each row of ``targets``.

    ``cols3`` has shape (C, n, nw); with C == 1 all rows share one code,
    otherwise row t uses ``cols3[t]``.
    """
    T = targets.shape[0]
    n = cols3.shape[1]
    status = np.empty(T, dtype=np.int8)
    queries = np.empty(T, dtype=np.int64)
    patterns = np.zeros((T, n), dtype=np.uint8)
    for t in range(T):
        c = t if cols3.shape[0] > 1 else 0
        st, q = sos_search(cols3[c], targets[t], tmax, qmax, patterns[t])
        status[t] = st
        queries[t] = q
    return status, queries, patterns


@njit(**_NOGIL)
def orb_batch(cols3, positions, targets, qmax):
    T = targets.shape[0]
    n = cols3.shape[1]
    status = np.empty(T, dtype=np.int8)
    queries = np.empty(T, dtype=np.int64)
    patterns = np.zeros((T, n), dtype=np.uint8)
    for t in range(T):
        c = t if cols3.shape[0] > 1 else 0
        st, q = orb_search(cols3[c], positions[t], targets[t], qmax, patterns[t])
        status[t] = st
        queries[t] = q
    return status, queries, patterns


@njit(**_NOGIL)
def find_codeword_of_weight(cols, w, out_idx):
    """Exhaustively look for a nonzero code-word of Hamming weight ``w``.

    Enumerates every ``w``-subset of positions in lexicographic order and
    checks that the XOR of their syndromes vanishes.  Returns the number of
    subsets examined when a hit is found (positions in ``out_idx``), or
    ``-total`` when none exists.
    """
    n = cols.shape[0]
    nw = cols.shape[1]
    if w <= 0 or w > n:
        return 0
    idx = np.empty(w, dtype=np.int64)
    acc = np.zeros((w + 1, nw), dtype=np.uint64)
    for i in range(w):
        idx[i] = i
        for j in range(nw):
            acc[i + 1, j] = acc[i, j] ^ cols[i, j]
    count = 0
    while True:
        count += 1
        if _is_zero(acc[w], nw):
            for i in range(w):
                out_idx[i] = idx[i]
            return count
        i = w - 1
        while i >= 0 and idx[i] == n - w + i:
            i -= 1
        if i < 0:
            return -count
        idx[i] += 1
        for j in range(i + 1, w):
            idx[j] = idx[j - 1] + 1
        for l in range(i, w):
            for j in range(nw):
                acc[l + 1, j] = acc[l, j] ^ cols[idx[l], j]
