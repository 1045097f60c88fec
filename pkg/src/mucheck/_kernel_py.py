"""Pure-Python implementations of the hot row kernels.

Rows are tuples of ints (one counter per least-fixpoint variable) or None for
the whole-row failure marker, which is the greatest element everywhere.
`start` is the number of truncated leading counters for the order in use.
All comparisons are lexicographic on the suffix with the LAST entry most
significant.  The compiled module `mucheck._kernel` exports the same API.
"""

from __future__ import annotations

COMPILED = False


def suffix_cmp(a, b, start):
    """-1/0/1 comparison of a[start:] vs b[start:], last entry most significant."""
    for idx in range(len(a) - 1, start - 1, -1):
        if a[idx] != b[idx]:
            return -1 if a[idx] < b[idx] else 1
    return 0


def row_leq(start, a, b):
    """a ⪯ b with truncation `start`; None (failure) is greatest."""
    if b is None:
        return True
    if a is None:
        return False
    return suffix_cmp(a, b, start) <= 0


def row_eq(start, a, b):
    if a is None or b is None:
        return a is None and b is None
    return suffix_cmp(a, b, start) == 0


def zero_prefix(row, start):
    """Canonical representative: truncated positions stored as 0."""
    if start == 0:
        return row
    return (0,) * start + row[start:]


def max_rows(start, rows):
    """max_⪯: failure wins; otherwise lexicographic max of suffixes, zero prefix."""
    best = None
    for r in rows:
        if r is None:
            return None
        if best is None or suffix_cmp(r, best, start) > 0:
            best = r
    return zero_prefix(best, start)


def min_rows(start, rows):
    """min_⪯: failures ignored unless everything fails."""
    best = None
    for r in rows:
        if r is None:
            continue
        if best is None or suffix_cmp(r, best, start) < 0:
            best = r
    if best is None:
        return None
    return zero_prefix(best, start)


def eval_prime_mask(starts, alpha, rows):
    """Bit i is set iff rows[i] is finite and alpha ⪰_(i+1) rows[i]."""
    mask = 0
    for i, row in enumerate(rows):
        if row is not None and suffix_cmp(alpha, row, starts[i]) >= 0:
            mask |= 1 << i
    return mask
