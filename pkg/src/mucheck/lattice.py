"""Finite complete lattices used as truth-value domains.

Four lattice shapes are supported: the two-point Boolean lattice, powersets
of a finite carrier, pointwise function lattices over a finite index set, and
finite products.  Powerset and Bool-pointwise elements are stored as integer
bitmasks over a canonical element ordering fixed at instance creation, so set
operations are word-parallel.  All values are immutable and safe to share.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence, Tuple

BOOL2 = "bool2"
POWERSET = "powerset"
POINTWISE = "pointwise"
PRODUCT = "product"


class LatticeError(Exception):
    """Structural misuse: mismatched instances or malformed payloads."""


@dataclass(frozen=True)
class LatticeInstance:
    kind: str
    carrier: Tuple[str, ...] = ()            # powerset only
    base: "LatticeInstance | None" = None    # pointwise only
    index: Tuple[str, ...] = ()              # pointwise only
    factors: Tuple["LatticeInstance", ...] = ()  # product only

    def __post_init__(self):
        if self.kind == POWERSET and not self.carrier:
            raise LatticeError("powerset carrier must be nonempty")
        if self.kind == POINTWISE and (self.base is None or not self.index):
            raise LatticeError("pointwise lattice needs a base and a nonempty index")

    # -- constructors -------------------------------------------------

    @staticmethod
    def bool2() -> "LatticeInstance":
        return LatticeInstance(BOOL2)

    @staticmethod
    def powerset(carrier: Sequence[str]) -> "LatticeInstance":
        return LatticeInstance(POWERSET, carrier=tuple(carrier))

    @staticmethod
    def pointwise(base: "LatticeInstance", index: Sequence[str]) -> "LatticeInstance":
        return LatticeInstance(POINTWISE, base=base, index=tuple(index))

    @staticmethod
    def product(factors: Sequence["LatticeInstance"]) -> "LatticeInstance":
        return LatticeInstance(PRODUCT, factors=tuple(factors))

    # -- helpers -------------------------------------------------------

    @property
    def is_bool_pointwise(self) -> bool:
        return self.kind == POINTWISE and self.base is not None and self.base.kind == BOOL2

    def elem(self, value) -> "LatticeElem":
        return LatticeElem(self, self._canon(value))

    def _canon(self, value):
        if self.kind == BOOL2:
            if not isinstance(value, bool):
                raise LatticeError(f"Bool2 payload must be bool, got {value!r}")
            return value
        if self.kind == POWERSET:
            return self._mask_from(value, self.carrier)
        if self.kind == POINTWISE:
            if self.is_bool_pointwise:
                return self._mask_from(value, self.index)
            if isinstance(value, dict):
                value = tuple(self.base._canon(value[i]) for i in self.index)
            else:
                value = tuple(self.base._canon(v) for v in value)
            if len(value) != len(self.index):
                raise LatticeError("pointwise payload width mismatch")
            return value
        if self.kind == PRODUCT:
            value = tuple(value)
            if len(value) != len(self.factors):
                raise LatticeError("product payload width mismatch")
            return tuple(f._canon(v) for f, v in zip(self.factors, value))
        raise LatticeError(f"unknown lattice kind {self.kind}")

    @staticmethod
    def _mask_from(value, names: Tuple[str, ...]) -> int:
        if isinstance(value, int) and not isinstance(value, bool):
            if value < 0 or value >= (1 << len(names)):
                raise LatticeError("bitmask out of range for carrier")
            return value
        pos = {n: b for b, n in enumerate(names)}
        mask = 0
        for v in value:
            if v not in pos:
                raise LatticeError(f"{v!r} not in carrier")
            mask |= 1 << pos[v]
        return mask

    # -- distinguished elements ---------------------------------------

    def bot(self) -> "LatticeElem":
        if self.kind == BOOL2:
            return LatticeElem(self, False)
        if self.kind == POWERSET or self.is_bool_pointwise:
            return LatticeElem(self, 0)
        if self.kind == POINTWISE:
            return LatticeElem(self, (self.base.bot().value,) * len(self.index))
        return LatticeElem(self, tuple(f.bot().value for f in self.factors))

    def top(self) -> "LatticeElem":
        if self.kind == BOOL2:
            return LatticeElem(self, True)
        if self.kind == POWERSET:
            return LatticeElem(self, (1 << len(self.carrier)) - 1)
        if self.is_bool_pointwise:
            return LatticeElem(self, (1 << len(self.index)) - 1)
        if self.kind == POINTWISE:
            return LatticeElem(self, (self.base.top().value,) * len(self.index))
        return LatticeElem(self, tuple(f.top().value for f in self.factors))

    def enumerate(self):
        """Yield every element.  Only for small instances (tests)."""
        if self.kind == BOOL2:
            yield LatticeElem(self, False)
            yield LatticeElem(self, True)
        elif self.kind == POWERSET:
            for m in range(1 << len(self.carrier)):
                yield LatticeElem(self, m)
        elif self.is_bool_pointwise:
            for m in range(1 << len(self.index)):
                yield LatticeElem(self, m)
        elif self.kind == POINTWISE:
            base_vals = [e.value for e in self.base.enumerate()]
            def rec(i):
                if i == len(self.index):
                    yield ()
                    return
                for rest in rec(i + 1):
                    for v in base_vals:
                        yield (v,) + rest
            for tup in rec(0):
                yield LatticeElem(self, tup)
        elif self.kind == PRODUCT:
            def rec(i):
                if i == len(self.factors):
                    yield ()
                    return
                for rest in rec(i + 1):
                    for v in self.factors[i].enumerate():
                        yield (v.value,) + rest
            for tup in rec(0):
                yield LatticeElem(self, tup)

    def random_elem(self, rng: random.Random) -> "LatticeElem":
        if self.kind == BOOL2:
            return LatticeElem(self, rng.random() < 0.5)
        if self.kind == POWERSET:
            return LatticeElem(self, rng.randrange(1 << len(self.carrier)))
        if self.is_bool_pointwise:
            return LatticeElem(self, rng.randrange(1 << len(self.index)))
        if self.kind == POINTWISE:
            return LatticeElem(self, tuple(self.base.random_elem(rng).value
                                           for _ in self.index))
        return LatticeElem(self, tuple(f.random_elem(rng).value for f in self.factors))


@dataclass(frozen=True)
class LatticeElem:
    instance: LatticeInstance
    value: Any

    def __hash__(self):
        return hash((id(self.instance.kind), _freeze(self.value)))

    def __eq__(self, other):
        return (isinstance(other, LatticeElem)
                and self.instance == other.instance
                and self.value == other.value)


def _freeze(v):
    if isinstance(v, tuple):
        return tuple(_freeze(x) for x in v)
    return v


def _same(a: LatticeElem, b: LatticeElem) -> LatticeInstance:
    if a.instance != b.instance:
        raise LatticeError("lattice instance mismatch")
    return a.instance


def leq(a: LatticeElem, b: LatticeElem) -> bool:
    """a ⊑ b."""
    L = _same(a, b)
    return _leq(L, a.value, b.value)


def _leq(L: LatticeInstance, x, y) -> bool:
    if L.kind == BOOL2:
        return (not x) or y
    if L.kind == POWERSET or L.is_bool_pointwise:
        return (x & ~y) == 0
    if L.kind == POINTWISE:
        return all(_leq(L.base, xi, yi) for xi, yi in zip(x, y))
    return all(_leq(f, xi, yi) for f, xi, yi in zip(L.factors, x, y))


def join(a: LatticeElem, b: LatticeElem) -> LatticeElem:
    L = _same(a, b)
    return LatticeElem(L, _join(L, a.value, b.value))


def _join(L, x, y):
    if L.kind == BOOL2:
        return x or y
    if L.kind == POWERSET or L.is_bool_pointwise:
        return x | y
    if L.kind == POINTWISE:
        return tuple(_join(L.base, xi, yi) for xi, yi in zip(x, y))
    return tuple(_join(f, xi, yi) for f, xi, yi in zip(L.factors, x, y))


def meet(a: LatticeElem, b: LatticeElem) -> LatticeElem:
    L = _same(a, b)
    return LatticeElem(L, _meet(L, a.value, b.value))


def _meet(L, x, y):
    if L.kind == BOOL2:
        return x and y
    if L.kind == POWERSET or L.is_bool_pointwise:
        return x & y
    if L.kind == POINTWISE:
        return tuple(_meet(L.base, xi, yi) for xi, yi in zip(x, y))
    return tuple(_meet(f, xi, yi) for f, xi, yi in zip(L.factors, x, y))


def join_all(L: LatticeInstance, elems) -> LatticeElem:
    out = L.bot()
    for e in elems:
        out = join(out, e)
    return out


def meet_all(L: LatticeInstance, elems) -> LatticeElem:
    out = L.top()
    for e in elems:
        out = meet(out, e)
    return out


def asc_chain_height(L: LatticeInstance) -> int:
    """Length of the longest strictly ascending chain (number of steps)."""
    if L.kind == BOOL2:
        return 1
    if L.kind == POWERSET:
        return len(L.carrier)
    if L.kind == POINTWISE:
        return len(L.index) * asc_chain_height(L.base)
    return sum(asc_chain_height(f) for f in L.factors)


@dataclass(frozen=True)
class MonotoneFn:
    """A monotone function L^arity -> L.  Monotonicity is a contract of the
    caller, spot-checked by randomized testing rather than by construction."""
    arity: int
    eval: Callable[..., LatticeElem]
    descriptor: str = "<fn>"

    def __call__(self, *args: LatticeElem) -> LatticeElem:
        if len(args) != self.arity:
            raise LatticeError(f"{self.descriptor}: expected {self.arity} args")
        return self.eval(*args)


def lfp_trace(f: MonotoneFn, L: LatticeInstance) -> tuple[LatticeElem, int]:
    """Least fixed point by iteration from ⊥; returns (fixpoint, #steps)."""
    return _iterate(f, L.bot(), L)


def gfp_trace(f: MonotoneFn, L: LatticeInstance) -> tuple[LatticeElem, int]:
    """Greatest fixed point by iteration from ⊤; returns (fixpoint, #steps)."""
    return _iterate(f, L.top(), L)


def _iterate(f: MonotoneFn, cur: LatticeElem, L: LatticeInstance):
    limit = asc_chain_height(L) + 1
    for step in range(limit + 1):
        nxt = f(cur)
        if nxt == cur:
            return cur, step
        cur = nxt
    raise LatticeError(f"{f.descriptor}: iteration exceeded chain height; "
                       "function is not monotone")


def lfp(f: MonotoneFn, L: LatticeInstance) -> LatticeElem:
    return lfp_trace(f, L)[0]


def gfp(f: MonotoneFn, L: LatticeInstance) -> LatticeElem:
    return gfp_trace(f, L)[0]


def check_monotone(f: MonotoneFn, L: LatticeInstance, trials: int,
                   rng: random.Random) -> bool:
    """Randomized spot check: ordered argument pairs give ordered results."""
    for _ in range(trials):
        lo = [L.random_elem(rng) for _ in range(f.arity)]
        hi = [join(a, L.random_elem(rng)) for a in lo]
        if not leq(f(*lo), f(*hi)):
            return False
    return True
