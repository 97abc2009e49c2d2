"""Compiled inner loops for the samplers."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def rsk_row_lengths(perm, max_rows, max_len):
    """Row lengths of the Schensted insertion tableau of ``perm``.

    ``max_rows`` and ``max_len`` must bound the longest decreasing and
    increasing subsequences. Rows are kept sorted in a dense buffer. A bumping
    route moves weakly left, so the bump position in row r+1 is found by
    galloping left from the position in row r, then a binary search.
    """
    n = perm.shape[0]
    rows = np.empty((max_rows + 1, max_len + 1), dtype=np.int32)
    lens = np.zeros(max_rows + 1, dtype=np.int64)
    cap = max_len + 1
    nrows = 0
    for i in range(n):
        v = perm[i]
        r = 0
        hi = cap
        while True:
            L = lens[r]
            if L == 0 or rows[r, L - 1] < v:
                rows[r, L] = v
                lens[r] = L + 1
                if L == 0:
                    nrows += 1
                break
            if hi > L - 1:
                hi = L - 1
            # invariant: rows[r, hi] > v
            step = 1
            lo = hi - 1
            while lo >= 0 and rows[r, lo] > v:
                hi = lo
                step <<= 1
                lo = hi - step
            if lo < -1:
                lo = -1
            while hi - lo > 1:
                mid = (lo + hi) >> 1
                if rows[r, mid] > v:
                    hi = mid
                else:
                    lo = mid
            w = rows[r, hi]
            rows[r, hi] = v
            v = w
            r += 1
    return lens[:nrows].copy()


@njit(cache=True, nogil=True)
def patience_lis(seq):
    """Length of the longest strictly increasing subsequence (patience sorting)."""
    n = seq.shape[0]
    tops = np.empty(n, dtype=seq.dtype)
    piles = 0
    for i in range(n):
        v = seq[i]
        lo = 0
        hi = piles
        while lo < hi:
            mid = (lo + hi) >> 1
            if tops[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        tops[lo] = v
        if lo == piles:
            piles += 1
    return piles


@njit(cache=True, nogil=True)
def _fill_corner_weights(rows, cols, nrows, out_r, out_p):
    m = 0
    for r in range(nrows + 1):
        c = rows[r]
        if r > 0 and rows[r - 1] == c:
            continue
        p = 1.0
        for j in range(c):
            h = c - j + cols[j] - r - 1
            p *= h / (h + 1.0)
        for i in range(r):
            h = rows[i] - c + r - i - 1
            p *= h / (h + 1.0)
        out_r[m] = r
        out_p[m] = p
        m += 1
    return m


@njit(cache=True, nogil=True)
def growth_row_lengths(n, uniforms):
    """Run the Plancherel growth chain for n steps.

    At each step a box is added at corner (r, c) with probability
    H(lambda) / H(lambda + box), i.e. the product of h / (h + 1) over the
    hooks in row r and column c that the new box lengthens.
    """
    rows = np.zeros(n + 2, dtype=np.int64)
    cols = np.zeros(n + 2, dtype=np.int64)
    corner_r = np.empty(n + 2, dtype=np.int64)
    weights = np.empty(n + 2, dtype=np.float64)
    nrows = 0
    for k in range(n):
        m = _fill_corner_weights(rows, cols, nrows, corner_r, weights)
        total = 0.0
        for q in range(m):
            total += weights[q]
        target = uniforms[k] * total
        chosen = corner_r[m - 1]
        acc = 0.0
        for q in range(m):
            acc += weights[q]
            if target < acc:
                chosen = corner_r[q]
                break
        c = rows[chosen]
        rows[chosen] = c + 1
        cols[c] += 1
        if chosen == nrows:
            nrows += 1
    return rows[:nrows].copy()


@njit(cache=True, nogil=True)
def growth_step_weights(rows, cols, nrows):
    """Corner rows and transition probabilities from the shape (rows, cols)."""
    out_r = np.empty(nrows + 1, dtype=np.int64)
    out_p = np.empty(nrows + 1, dtype=np.float64)
    m = _fill_corner_weights(rows, cols, nrows, out_r, out_p)
    return out_r[:m].copy(), out_p[:m].copy()
