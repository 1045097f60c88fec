"""Priority-ordered equational systems of least/greatest fixpoints over a
finite lattice: the recursive solver (used as the testing oracle everywhere),
progress-measure verification and synthesis, and ranking-function checking.

The solver implements the definitional recursion literally: the first
equation is solved parametrically in the remaining variables, substituted,
and the procedure recurses; every inner parametric solution is memoized,
keyed by the argument positions the equation can actually read (when known),
so repeated inner solves are cheap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

from mucheck.lattice import (LatticeElem, LatticeInstance, LatticeError,
                             MonotoneFn, asc_chain_height, leq, lfp, join)
from mucheck.priord import FAIL, PrioritySpec, trunc_lex_leq as kernel_leq, trunc_lex_lt

MU = "mu"
NU = "nu"


class EqSysError(Exception):
    pass


@dataclass(frozen=True)
class EquationalSystem:
    L: LatticeInstance
    polarities: Tuple[str, ...]
    rhs: Tuple[MonotoneFn, ...]
    # reads[i-1]: 1-based variable indices equation i may depend on, or None
    # when the right-hand side is opaque.
    reads: Optional[Tuple[Optional[frozenset], ...]] = None

    def __post_init__(self):
        if len(self.polarities) != len(self.rhs):
            raise EqSysError("polarity/rhs length mismatch")
        for p in self.polarities:
            if p not in (MU, NU):
                raise EqSysError(f"bad polarity {p!r}")
        for f in self.rhs:
            if f.arity != self.m:
                raise EqSysError("every right-hand side takes all m variables")

    @property
    def m(self) -> int:
        return len(self.polarities)

    @property
    def spec(self) -> PrioritySpec:
        return PrioritySpec(self.m, tuple(i + 1 for i, p in enumerate(self.polarities)
                                          if p == MU))


@dataclass(frozen=True)
class EqSolution:
    values: Tuple[LatticeElem, ...]
    # interim[(i, j)] = l^(i)_j evaluated at the final solution arguments
    interim: Optional[Dict[Tuple[int, int], LatticeElem]] = None


def _dependency_sets(E: EquationalSystem):
    """D[(i, j)]: argument positions (subset of [i+1, m]) that the interim
    solution l^(i)_j can depend on.  None means "everything"."""
    if E.reads is None:
        return None
    m = E.m
    D: Dict[Tuple[int, int], frozenset] = {}
    for i in range(1, m + 1):
        r = E.reads[i - 1]
        if r is None:
            return None
        deps = set(r)
        for j in range(1, i):
            deps |= D[(i - 1, j)] | {i}
        D[(i, i)] = frozenset(d for d in deps if d > i)
        for j in range(1, i):
            prev = D[(i - 1, j)]
            cur = set(d for d in prev if d != i)
            if i in prev:
                cur |= D[(i, i)]
            D[(i, j)] = frozenset(cur)
    return D


class _Solver:
    def __init__(self, E: EquationalSystem):
        self.E = E
        self.deps = _dependency_sets(E)
        self.memo: Dict = {}

    def _key(self, i, j, args):
        if self.deps is None:
            return (i, j, args)
        rel = self.deps[(i, j)]
        # args[t] is the value for variable i+1+t
        return (i, j, tuple(args[d - i - 1] for d in sorted(rel)))

    def interim(self, i: int, j: int, args: Tuple[LatticeElem, ...]) -> LatticeElem:
        """l^(i)_j applied to values for u_(i+1), ..., u_m."""
        key = self._key(i, j, args)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        E = self.E
        if i == j:
            fi = E.rhs[i - 1]

            def body(l: LatticeElem) -> LatticeElem:
                inner = tuple(self.interim(i - 1, jj, (l,) + args)
                              for jj in range(1, i))
                return fi(*inner, l, *args)

            fn = MonotoneFn(1, body, f"eq{i}")
            if E.polarities[i - 1] == MU:
                val = _lfp(fn, E.L)
            else:
                val = _gfp(fn, E.L)
        else:
            val = self.interim(i - 1, j, (self.interim(i, i, args),) + args)
        self.memo[key] = val
        return val


def _lfp(fn, L):
    from mucheck.lattice import lfp as _l
    return _l(fn, L)


def _gfp(fn, L):
    from mucheck.lattice import gfp as _g
    return _g(fn, L)


def solve(E: EquationalSystem) -> EqSolution:
    """Solve left to right: equation 1 parametrically, substitute, recurse."""
    m = E.m
    if m == 0:
        return EqSolution(values=(), interim={})
    s = _Solver(E)
    values = tuple(s.interim(m, j, ()) for j in range(1, m + 1))
    interim: Dict[Tuple[int, int], LatticeElem] = {}
    for i in range(1, m + 1):
        args = values[i:]
        for j in range(1, i + 1):
            interim[(i, j)] = s.interim(i, j, args)
    return EqSolution(values=values, interim=interim)


# ----------------------------------------------------------------------
# Progress measures
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ProgressMeasure:
    spec: PrioritySpec
    maxima: Tuple[int, ...]
    # approx[(i, alpha)] for every i in [1, m] and alpha in the full box
    approx: Dict[Tuple[int, Tuple[int, ...]], LatticeElem]

    def value(self, i: int, alpha: Tuple[int, ...]) -> LatticeElem:
        return self.approx[(i, alpha)]


def _box(maxima: Tuple[int, ...]):
    return itertools.product(*(range(a + 1) for a in maxima))


def check_measure_shape(E: EquationalSystem, p: ProgressMeasure) -> None:
    if p.spec != E.spec:
        raise EqSysError("priority spec mismatch")
    if len(p.maxima) != p.spec.k:
        raise EqSysError("maxima width mismatch")
    for i in range(1, E.m + 1):
        for alpha in _box(p.maxima):
            if (i, alpha) not in p.approx:
                raise EqSysError(f"approximant missing at ({i}, {alpha})")


def verify_progress_measure(E: EquationalSystem, p: ProgressMeasure,
                            extended: bool = False):
    """Check Conditions 1-5; returns (ok, first violation or None).

    The first violated condition is reported in equation-index, then
    lexicographic-alpha, then condition-number order.  The limit case is
    vacuous over naturals.  Existential witnesses are searched in ascending
    lexicographic order (with a top-first shortcut that cannot change the
    verdict, since any witness suffices).
    """
    check_measure_shape(E, p)
    spec = E.spec
    k = spec.k
    box = sorted(_box(p.maxima))
    mu_pos = {ia: a for a, ia in enumerate(spec.mu_indices, start=1)}

    fvals: Dict[Tuple[int, Tuple[int, ...]], LatticeElem] = {}

    def f_at(i: int, alpha: Tuple[int, ...]) -> LatticeElem:
        got = fvals.get((i, alpha))
        if got is None:
            got = E.rhs[i - 1](*(p.value(j, alpha) for j in range(1, E.m + 1)))
            fvals[(i, alpha)] = got
        return got

    def betas(a: int, alpha: Tuple[int, ...]):
        """Argument tuples (beta_1..beta_(a-1), alpha_a..alpha_k), top first,
        then ascending lexicographic."""
        top = tuple(p.maxima[:a - 1]) + alpha[a - 1:]
        yield top
        for b in itertools.product(*(range(p.maxima[t] + 1) for t in range(a - 1))):
            cand = b + alpha[a - 1:]
            if cand != top:
                yield cand

    for i in range(1, E.m + 1):
        pol = E.polarities[i - 1]
        a = spec.drop(i) + 1
        violations = []

        # Cond 1 (monotonicity): alpha <=_i alpha' implies p_i(alpha) <= p_i(alpha').
        # Fast pass over the chain of =_i classes; localize in lex order only
        # when it fails, so the reported point is deterministic.
        key = lambda t: tuple(reversed(t[a - 1:]))
        ordered = sorted(box, key=key)
        mono_ok = True
        prev_key, prev_val = None, None
        for alpha in ordered:
            v = p.value(i, alpha)
            kk = key(alpha)
            if prev_key is not None:
                if (kk == prev_key and v != prev_val) or \
                   (kk != prev_key and not leq(prev_val, v)):
                    mono_ok = False
                    break
            prev_key, prev_val = kk, v
        if not mono_ok:
            first = next(alpha for alpha in box
                         for other in box
                         if kernel_leq(spec, i, alpha, other)
                         and not leq(p.value(i, alpha), p.value(i, other)))
            violations.append((first, 1, "monotonicity"))

        if pol == MU:
            aa = mu_pos[i]
            # Cond 2 / 2': base case at alpha_aa = 0
            for alpha in box:
                if alpha[aa - 1] != 0:
                    continue
                v = p.value(i, alpha)
                if v == E.L.bot():
                    continue
                if extended:
                    ok = any(trunc_lex_lt(spec, i, other, alpha)
                             and leq(v, p.value(i, other))
                             for other in box)
                    if ok:
                        continue
                    violations.append((alpha, 2, "mu base case (extended)"))
                else:
                    violations.append((alpha, 2, "mu base case"))
            # Cond 3: step case
            for alpha in box:
                if alpha[aa - 1] == 0:
                    continue
                prev = alpha[:aa - 1] + (alpha[aa - 1] - 1,) + alpha[aa:]
                v = p.value(i, alpha)
                if not any(leq(v, f_at(i, args)) for args in betas(aa, prev)):
                    violations.append((alpha, 3, "mu step case"))
            # Cond 4 (limit case) vacuous over naturals.
        else:
            # Cond 5: nu-variables are postfixed points up to smaller counters
            for alpha in box:
                v = p.value(i, alpha)
                if not any(leq(v, f_at(i, args)) for args in betas(a, alpha)):
                    violations.append((alpha, 5, "nu condition"))

        if violations:
            alpha, num, name = min(violations, key=lambda t: (t[0], t[1]))
            return False, f"condition {num} ({name}) at equation {i}, alpha={alpha}"
    return True, None


# ----------------------------------------------------------------------
# Ranking functions
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class RankingFunction:
    """Per-state natural rank or FAIL (None); finite ranks are >= 1."""
    rk: Dict[str, Optional[int]]


def verify_ranking(f: MonotoneFn, L: LatticeInstance, rk: RankingFunction) -> bool:
    """Check rk against a monotone f on a powerset lattice: finite ranks are
    nonzero and every rank level is produced by f from the level below."""
    if L.kind != "powerset":
        raise EqSysError("ranking functions live over powerset lattices")
    if set(rk.rk) != set(L.carrier):
        raise EqSysError("rk must be total on the carrier")
    finite = {x: r for x, r in rk.rk.items() if r is not None}
    if any(r == 0 for r in finite.values()):
        return False
    maxrank = max(finite.values(), default=0)
    for alpha in range(0, maxrank + 1):
        below = L.elem([x for x, r in finite.items() if r <= alpha])
        upto = L.elem([x for x, r in finite.items() if r <= alpha + 1])
        if not leq(upto, f(below)):
            return False
    # Soundness of the notion itself: finite ranks land inside the lfp.
    assert leq(L.elem(list(finite)), lfp(f, L)), \
        "accepted ranking escapes the least fixpoint"
    return True


# ----------------------------------------------------------------------
# Optimal progress-measure synthesis
# ----------------------------------------------------------------------

def _restrict(E: EquationalSystem, last: LatticeElem) -> EquationalSystem:
    """Drop the last equation, substituting `last` for its variable."""
    m = E.m
    rhs = []
    for i in range(m - 1):
        f = E.rhs[i]
        def g(*args, _f=f):
            return _f(*args, last)
        rhs.append(MonotoneFn(m - 1, g, f.descriptor + "|last"))
    reads = None
    if E.reads is not None:
        reads = tuple(None if r is None else frozenset(d for d in r if d < m)
                      for r in E.reads[:m - 1])
    return EquationalSystem(E.L, E.polarities[:m - 1], tuple(rhs), reads)


def synthesize_optimal_pm(E: EquationalSystem) -> ProgressMeasure:
    """Construct a progress measure that achieves the exact solution, with
    every maximum counter bounded by the chain height of L.

    Recursion on the number of equations: a final gfp variable contributes a
    constant approximant at its solution; a final lfp variable contributes
    the ascending chain of its defining operator, with the inner system
    re-synthesized at each chain value.  Sub-measures are extended to a
    common box by repeating stabilized values.
    """
    maxima, approx = _synth(E)
    return ProgressMeasure(E.spec, maxima, approx)


def _synth(E: EquationalSystem):
    m = E.m
    if m == 0:
        return (), {}
    L = E.L
    sol = solve(E)
    if E.polarities[m - 1] == NU:
        lstar = sol.values[m - 1]
        sub_max, sub_approx = _synth(_restrict(E, lstar))
        approx = {}
        for alpha in _box(sub_max):
            approx[(m, alpha)] = lstar
            for i in range(1, m):
                approx[(i, alpha)] = sub_approx[(i, alpha)]
        return sub_max, approx

    # Last variable is a lfp: iterate its closed operator from bottom.
    chain = [L.bot()]
    while True:
        cur = chain[-1]
        inner = solve(_restrict(E, cur))
        nxt = E.rhs[m - 1](*inner.values, cur)
        if nxt == cur:
            break
        if len(chain) > asc_chain_height(L):
            raise EqSysError("chain failed to stabilize within the height bound")
        chain.append(nxt)
    top = len(chain) - 1

    subs = [_synth(_restrict(E, l)) for l in chain]
    k_inner = len(subs[0][0]) if subs else 0
    common = tuple(max(s[0][a] for s in subs) for a in range(k_inner))

    def clamped(t: int, i: int, alpha_inner):
        mx = subs[t][0]
        point = tuple(min(alpha_inner[a], mx[a]) for a in range(k_inner))
        return subs[t][1][(i, point)]

    maxima = common + (top,)
    approx = {}
    for alpha in _box(maxima):
        t = alpha[-1]
        inner_pt = alpha[:-1]
        approx[(m, alpha)] = chain[t]
        for i in range(1, m):
            approx[(i, alpha)] = clamped(t, i, inner_pt)
    return maxima, approx
