"""Prioritized ordinals, the truncated lexicographic preorders, and
prioritized ordinal matrices (one row per equation, one counter per
least-fixpoint variable, or a whole-row failure marker).

Counters are plain naturals: transfinite entries never arise on finite
lattices, so the limit-case conditions elsewhere are vacuous.  Rows are
tuples of ints; `FAIL` (None) marks whole-row failure and is the greatest
element of every row order.  Truncated positions are stored as 0; the
display convention of "arbitrary" entries is never represented.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from mucheck import kernel

FAIL = None  # whole-row failure marker

Row = Optional[Tuple[int, ...]]


class PriordError(Exception):
    pass


@dataclass(frozen=True)
class PrioritySpec:
    """Equation count m and the 1-based positions of the μ-variables."""
    m: int
    mu_indices: Tuple[int, ...]

    def __post_init__(self):
        if list(self.mu_indices) != sorted(set(self.mu_indices)):
            raise PriordError("mu_indices must be strictly increasing")
        if self.mu_indices and not (1 <= self.mu_indices[0]
                                    and self.mu_indices[-1] <= self.m):
            raise PriordError("mu_indices out of range")
        # drop[i-1]: number of counters truncated away by ⪯_i
        drops = []
        for i in range(1, self.m + 1):
            drops.append(sum(1 for b in self.mu_indices if b < i))
        object.__setattr__(self, "_drops", tuple(drops))

    @property
    def k(self) -> int:
        return len(self.mu_indices)

    def drop(self, i: int) -> int:
        if not 1 <= i <= self.m:
            raise PriordError(f"equation index {i} out of range")
        return self._drops[i - 1]

    @property
    def drops(self) -> Tuple[int, ...]:
        return self._drops

    def check_tuple(self, a: Sequence[int]) -> Tuple[int, ...]:
        a = tuple(a)
        if len(a) != self.k:
            raise PriordError(f"expected {self.k} counters, got {len(a)}")
        return a


def trunc_lex_leq(spec: PrioritySpec, i: int, a: Sequence[int],
                  b: Sequence[int]) -> bool:
    """a ⪯_i b: drop the counters of μ-variables with smaller priority than
    u_i, then compare suffixes lexicographically, last entry most significant."""
    return kernel.suffix_cmp(spec.check_tuple(a), spec.check_tuple(b),
                             spec.drop(i)) <= 0


def trunc_lex_eq(spec: PrioritySpec, i: int, a, b) -> bool:
    """a =_i b (both directions of ⪯_i)."""
    return kernel.suffix_cmp(spec.check_tuple(a), spec.check_tuple(b),
                             spec.drop(i)) == 0


def trunc_lex_lt(spec: PrioritySpec, i: int, a, b) -> bool:
    """a ≺_i b (⪯_i holds, =_i fails)."""
    return kernel.suffix_cmp(spec.check_tuple(a), spec.check_tuple(b),
                             spec.drop(i)) < 0


def row_leq(spec: PrioritySpec, i: int, a: Row, b: Row) -> bool:
    """⪯_i extended to rows: FAIL is the greatest element."""
    return kernel.row_leq(spec.drop(i), a, b)


def row_lt(spec: PrioritySpec, i: int, a: Row, b: Row) -> bool:
    return kernel.row_leq(spec.drop(i), a, b) and not kernel.row_eq(spec.drop(i), a, b)


def max_trunc(spec: PrioritySpec, i: int, rows: Sequence[Row]) -> Row:
    """max_⪯i of a nonempty set of rows; any FAIL input forces FAIL."""
    rows = list(rows)
    if not rows:
        raise PriordError("max_trunc of empty input")
    return kernel.max_rows(spec.drop(i), rows)


def min_trunc(spec: PrioritySpec, i: int, rows: Sequence[Row]) -> Row:
    """min_⪯i of a nonempty set of rows; FAIL entries are ignored unless the
    input contains nothing else."""
    rows = list(rows)
    if not rows:
        raise PriordError("min_trunc of empty input")
    return kernel.min_rows(spec.drop(i), rows)


@dataclass(frozen=True)
class Pom:
    """m×k matrix of counters with whole-row failure, entries bounded."""
    rows: Tuple[Row, ...]
    bound: int

    def __post_init__(self):
        for r in self.rows:
            if r is not None and any(c < 0 or c > self.bound for c in r):
                raise PriordError("counter exceeds bound")

    def row(self, i: int) -> Row:
        return self.rows[i - 1]


def eval_prime(spec: PrioritySpec, a: Sequence[int], pom: Pom) -> list[bool]:
    """ev′(a⃗): component i′ is true iff row i′ is finite and a⃗ ⪰_{i′} row i′."""
    a = spec.check_tuple(a)
    if len(pom.rows) != spec.m:
        raise PriordError("matrix row count mismatch")
    mask = kernel.eval_prime_mask(spec.drops, a, pom.rows)
    return [bool(mask >> i & 1) for i in range(spec.m)]


def eval_prime_mask(spec: PrioritySpec, a: Tuple[int, ...], rows) -> int:
    """Bitmask form of eval_prime; bit i-1 for equation i."""
    return kernel.eval_prime_mask(spec.drops, a, rows)


def least_strict_upper(spec: PrioritySpec, i: int, row: Row,
                       caps: Sequence[int]) -> Row:
    """Least row ≻_i `row` whose counter at position j stays ≤ caps[j];
    truncated positions are zeroed.  FAIL if the suffix cannot be exceeded
    (or `row` is already FAIL)."""
    if row is None:
        return None
    start = spec.drop(i)
    out = [0] * start + list(row[start:])
    for pos in range(start, spec.k):
        if out[pos] < caps[pos]:
            out[pos] += 1
            return tuple(out)
        out[pos] = 0  # carry into the more significant position
    return None


# -- JSON shape ---------------------------------------------------------

def row_to_json(r: Row):
    return "FAIL" if r is None else list(r)


def row_from_json(v) -> Row:
    if v == "FAIL":
        return None
    return tuple(int(c) for c in v)


def pom_to_json(p: Pom) -> dict:
    return {"rows": [row_to_json(r) for r in p.rows], "bound": p.bound}


def pom_from_json(d) -> Pom:
    return Pom(tuple(row_from_json(r) for r in d["rows"]), int(d["bound"]))
