# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled row kernels; mirrors mucheck._kernel_py exactly."""

COMPILED = True


cpdef int suffix_cmp(tuple a, tuple b, Py_ssize_t start):
    cdef Py_ssize_t idx = len(a) - 1
    cdef long av, bv
    while idx >= start:
        av = a[idx]
        bv = b[idx]
        if av != bv:
            return -1 if av < bv else 1
        idx -= 1
    return 0


cpdef bint row_leq(Py_ssize_t start, a, b):
    if b is None:
        return True
    if a is None:
        return False
    return suffix_cmp(a, b, start) <= 0


cpdef bint row_eq(Py_ssize_t start, a, b):
    if a is None or b is None:
        return a is None and b is None
    return suffix_cmp(a, b, start) == 0


cpdef tuple zero_prefix(tuple row, Py_ssize_t start):
    if start == 0:
        return row
    return (0,) * start + row[start:]


cpdef max_rows(Py_ssize_t start, rows):
    cdef tuple best = None
    for r in rows:
        if r is None:
            return None
        if best is None or suffix_cmp(r, best, start) > 0:
            best = r
    return zero_prefix(best, start)


cpdef min_rows(Py_ssize_t start, rows):
    cdef tuple best = None
    for r in rows:
        if r is None:
            continue
        if best is None or suffix_cmp(r, best, start) < 0:
            best = r
    if best is None:
        return None
    return zero_prefix(best, start)


cpdef object eval_prime_mask(tuple starts, tuple alpha, tuple rows):
    cdef object mask = 0
    cdef Py_ssize_t i
    for i in range(len(rows)):
        row = rows[i]
        if row is not None and suffix_cmp(alpha, row, starts[i]) >= 0:
            mask |= 1 << i
    return mask
