"""Branching-time model checking: the naive equational-solving semantics
(the oracle) and the matrix-progress-measure engine, plus certificate
verification.

State predicates are bitmasks over the coalgebra's declared state order.
The matrix engine keeps one m-by-k counter matrix per state, sweeps states
in declared order and equations in index order, lifts each row to the least
value its condition allows, and marks a row failed once any counter passes
the number of states.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from mucheck import kernel, priord
from mucheck.coalgebra import (Coalgebra, CoalgebraError, FValue, ModalityDef,
                               STREAM, fmap, lift_proj, modality, modal_step)
from mucheck.eqsys import EquationalSystem, EqSolution, solve
from mucheck.lattice import LatticeElem, LatticeInstance, MonotoneFn
from mucheck.logic import (Conn, ConnRhs, Equation, Modal, ModalRhs, Mu, Nu,
                           SimpleEqSystem, Var, VarRef, to_formula)
from mucheck.priord import FAIL, Pom, PrioritySpec

Row = priord.Row


class CheckError(Exception):
    pass


@dataclass(frozen=True)
class McProblem:
    system: Coalgebra
    formula: SimpleEqSystem

    def __post_init__(self):
        for eq in self.formula.equations:
            if isinstance(eq.rhs, ModalRhs):
                mod = modality(self.system.functor, eq.rhs.op)
                if mod.arity != len(eq.rhs.refs):
                    raise CheckError(f"{eq.rhs.op}: arity mismatch")

    @property
    def m(self) -> int:
        return self.formula.m

    @property
    def spec(self) -> PrioritySpec:
        return PrioritySpec(self.formula.m, self.formula.mu_indices)

    @property
    def k(self) -> int:
        return self.spec.k

    def modality_for(self, i: int) -> ModalityDef:
        rhs = self.formula.equations[i - 1].rhs
        assert isinstance(rhs, ModalRhs)
        return modality(self.system.functor, rhs.op)


# ----------------------------------------------------------------------
# Naive semantics (oracle)
# ----------------------------------------------------------------------

def build_equational_system(p: McProblem) -> EquationalSystem:
    """The induced system over the pointwise Boolean lattice on the states."""
    c = p.system
    L = LatticeInstance.pointwise(LatticeInstance.bool2(), c.states)
    full = (1 << len(c.states)) - 1
    m = p.m
    rhs: List[MonotoneFn] = []
    reads: List[frozenset] = []
    for eq in p.formula.equations:
        r = eq.rhs
        if isinstance(r, VarRef):
            def f(*args, _j=r.ref):
                return args[_j - 1]
            rset = frozenset([r.ref])
        elif isinstance(r, ConnRhs):
            if r.op == "and":
                def f(*args, _refs=r.refs):
                    v = full
                    for j in _refs:
                        v &= args[j - 1].value
                    return LatticeElem(L, v)
            else:
                def f(*args, _refs=r.refs):
                    v = 0
                    for j in _refs:
                        v |= args[j - 1].value
                    return LatticeElem(L, v)
            rset = frozenset(r.refs)
        else:
            mod = modality(c.functor, r.op)

            def f(*args, _mod=mod, _refs=r.refs):
                return LatticeElem(L, modal_step(c, _mod,
                                                 [args[j - 1].value for j in _refs]))
            rset = frozenset(r.refs)
        rhs.append(MonotoneFn(m, f, f"{eq.var}"))
        reads.append(rset)
    pol = tuple(eq.pol for eq in p.formula.equations)
    return EquationalSystem(L, pol, tuple(rhs), tuple(reads))


def direct_semantics(p: McProblem) -> int:
    """The inductive denotation of the formulaic presentation; a bitmask."""
    c = p.system
    full = (1 << len(c.states)) - 1
    phi = to_formula(p.formula)
    memo: Dict = {}

    def free(node) -> frozenset:
        from mucheck.logic import free_vars
        return free_vars(node)

    def ev(node, env) -> int:
        key = (node, tuple(sorted((v, env[v]) for v in free(node))))
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(node, Var):
            out = env[node.name]
        elif isinstance(node, Conn):
            if node.op == "and":
                out = full
                for a in node.args:
                    out &= ev(a, env)
            else:
                out = 0
                for a in node.args:
                    out |= ev(a, env)
        elif isinstance(node, Modal):
            mod = modality(c.functor, node.op)
            out = modal_step(c, mod, [ev(a, env) for a in node.args])
        else:
            seed = 0 if isinstance(node, Mu) else full
            cur = seed
            while True:
                nxt = ev(node.body, {**env, node.var: cur})
                if nxt == cur:
                    break
                cur = nxt
            out = cur
        memo[key] = out
        return out

    return ev(phi, {})


def naive_semantics(p: McProblem) -> List[int]:
    """Solve the induced equational system; per-variable state bitmasks.

    The direct inductive semantics of the formulaic presentation is computed
    alongside and must agree with the last variable's component."""
    E = build_equational_system(p)
    sol = solve(E)
    masks = [v.value for v in sol.values]
    direct = direct_semantics(p)
    if masks and direct != masks[-1]:
        raise CheckError("equational and direct semantics disagree "
                         f"({masks[-1]:b} vs {direct:b})")
    return masks


# ----------------------------------------------------------------------
# Matrix progress measures
# ----------------------------------------------------------------------

@dataclass
class MpmState:
    """Current matrix per state; rows carry zeroed truncated prefixes."""
    rows: Dict[str, List[Row]]
    bound: int

    def pom(self, x: str) -> Pom:
        return Pom(tuple(self.rows[x]), self.bound)


def _suffix_candidates(n: int, drop: int, k: int):
    """All counter tuples with entries in [0, n], ascending in the i-th
    truncated order (last entry most significant), truncated prefix maxed."""
    width = k - drop
    if width == 0:
        yield (n,) * k if drop else ()
        return
    for rev in itertools.product(range(n + 1), repeat=width):
        yield (n,) * drop + tuple(reversed(rev))


def pt_m(p: McProblem, R: MpmState, i: int, x: str) -> Row:
    """Least candidate (in the i-th truncated order) whose one-step modal
    composite over the current matrices evaluates to true; FAIL if none."""
    eq = p.formula.equations[i - 1]
    if eq.pol != "nu" or not isinstance(eq.rhs, ModalRhs):
        raise CheckError("pt_m applies to nu-equations with modal right-hand side")
    spec = p.spec
    c = p.system
    mod = p.modality_for(i)
    refs = eq.rhs.refs
    n = len(c.states)
    drop = spec.drop(i)
    t = c.step[x]

    if c.functor.kind == STREAM and eq.rhs.op == "X":
        # Next-time shortcut: pick up the successor's argument row.
        succ_row = R.rows[t.data[1]][refs[0] - 1]
        if succ_row is None:
            return None
        return kernel.zero_prefix(succ_row, drop)

    rows_of = {y: tuple(R.rows[y]) for y in c.states}

    def satisfied(alpha: Tuple[int, ...]) -> bool:
        def ev_bits(y: str):
            mask = kernel.eval_prime_mask(spec.drops, alpha, rows_of[y])
            return tuple(bool(mask >> b & 1) for b in range(spec.m))
        return lift_proj(mod, refs, fmap(c.functor, ev_bits, t))

    if mod.arity == 0:
        # Candidate-independent condition; the zero class decides.
        return (0,) * spec.k if satisfied((n,) * spec.k) else None

    for alpha in _suffix_candidates(n, drop, spec.k):
        if satisfied(alpha):
            return kernel.zero_prefix(alpha, drop)
    return None


def mpm_check(p: McProblem):
    """The lifting algorithm; returns (bitmask for the last variable,
    final MpmState, number of sweeps that changed the matrix)."""
    c = p.system
    spec = p.spec
    m, k = spec.m, spec.k
    n = len(c.states)
    mu_pos = {ia: a for a, ia in enumerate(spec.mu_indices, start=1)}

    rows: Dict[str, List[Row]] = {}
    for x in c.states:
        base: List[Row] = [(0,) * k for _ in range(m)]
        for a, ia in enumerate(spec.mu_indices, start=1):
            r = list(base[ia - 1])
            r[a - 1] = 1
            base[ia - 1] = tuple(r)
        rows[x] = base
    R = MpmState(rows, n)

    changed_sweeps = 0
    while True:
        changed = False
        for x in c.states:
            for i in range(1, m + 1):
                eq = p.formula.equations[i - 1]
                cur = R.rows[x][i - 1]
                cand: Row
                if eq.pol == "mu":
                    a = mu_pos[i]
                    src = R.rows[x][eq.rhs.ref - 1]
                    if src is None:
                        cand = None
                    else:
                        bumped = list(src)
                        bumped[a - 1] += 1
                        cand = tuple(bumped)
                    new = kernel.max_rows(spec.drop(i), [cur, cand])
                elif isinstance(eq.rhs, VarRef):
                    new = kernel.max_rows(spec.drop(i),
                                          [cur, R.rows[x][eq.rhs.ref - 1]])
                elif isinstance(eq.rhs, ConnRhs) and eq.rhs.op == "and":
                    args = [R.rows[x][j - 1] for j in eq.rhs.refs]
                    new = kernel.max_rows(spec.drop(i), [cur] + args)
                elif isinstance(eq.rhs, ConnRhs):
                    if not eq.rhs.refs:
                        new = None  # empty disjunction is false
                    else:
                        inner = kernel.min_rows(spec.drop(i),
                                                [R.rows[x][j - 1] for j in eq.rhs.refs])
                        new = kernel.max_rows(spec.drop(i), [cur, inner])
                else:
                    new = kernel.max_rows(spec.drop(i), [cur, pt_m(p, R, i, x)])
                if new is not None and any(v > n for v in new):
                    new = None
                if new != cur:
                    R.rows[x][i - 1] = new
                    changed = True
        if not changed:
            break
        changed_sweeps += 1

    out = 0
    for b, x in enumerate(c.states):
        if R.rows[x][m - 1] is not None:
            out |= 1 << b
    return out, R, changed_sweeps


def local_row_violation(p: McProblem, rows: Sequence[Row],
                        where: str = "") -> Optional[str]:
    """Transition-independent row conditions (base, step, variable and
    propositional cases) for one matrix; None when all hold."""
    spec = p.spec
    mu_pos = {ia: a for a, ia in enumerate(spec.mu_indices, start=1)}
    for i in range(1, spec.m + 1):
        row = rows[i - 1]
        if row is None:
            continue
        eq = p.formula.equations[i - 1]
        drop = spec.drop(i)
        if eq.pol == "mu":
            a = mu_pos[i]
            zero = (0,) * spec.k
            if kernel.suffix_cmp(row, zero, drop) <= 0:
                return f"condition 2 (mu base) at {where}equation {i}"
            if eq.rhs.ref <= i:
                src = rows[eq.rhs.ref - 1]
                if src is None or kernel.suffix_cmp(row, src, drop) <= 0:
                    return f"condition 3 (mu step) at {where}equation {i}"
        elif isinstance(eq.rhs, VarRef):
            if not kernel.row_leq(drop, rows[eq.rhs.ref - 1], row):
                return f"condition 5(a) at {where}equation {i}"
        elif isinstance(eq.rhs, ConnRhs):
            ok_refs = [kernel.row_leq(drop, rows[j - 1], row) for j in eq.rhs.refs]
            if eq.rhs.op == "and":
                if not all(ok_refs):
                    return f"condition 5(b) (conjunction) at {where}equation {i}"
            elif not any(ok_refs):  # empty disjunction is always violated
                return f"condition 5(b) (disjunction) at {where}equation {i}"
    return None


def modal_row_holds(p: McProblem, rows_of: Dict[str, Tuple[Row, ...]],
                    i: int, x: str) -> bool:
    """Condition 5(c): the one-step composite at the row's own counters."""
    spec = p.spec
    eq = p.formula.equations[i - 1]
    alpha = rows_of[x][i - 1]
    mod = p.modality_for(i)

    def ev_bits(y: str):
        mask = kernel.eval_prime_mask(spec.drops, alpha, rows_of[y])
        return tuple(bool(mask >> b & 1) for b in range(spec.m))

    return lift_proj(mod, eq.rhs.refs, fmap(p.system.functor, ev_bits,
                                            p.system.step[x]))


def verify_mpm(p: McProblem, R: MpmState):
    """Check every condition for every non-failed row; (ok, first violation)."""
    c = p.system
    for x in c.states:
        rows = R.rows[x]
        if len(rows) != p.m:
            raise CheckError("matrix height mismatch")
        bad = local_row_violation(p, rows, where=f"state {x!r}, ")
        if bad:
            return False, bad
    rows_of = {y: tuple(R.rows[y]) for y in c.states}
    for x in c.states:
        for i in range(1, p.m + 1):
            eq = p.formula.equations[i - 1]
            if rows_of[x][i - 1] is None or not isinstance(eq.rhs, ModalRhs):
                continue
            if not modal_row_holds(p, rows_of, i, x):
                return False, f"condition 5(c) at state {x!r}, equation {i}"
    return True, None


# -- certificates ----------------------------------------------------------

def mpm_to_json(p: McProblem, R: MpmState) -> dict:
    return {"schema": 1, "kind": "mpm", "bound": R.bound,
            "states": {x: priord.pom_to_json(R.pom(x)) for x in p.system.states}}


def mpm_from_json(p: McProblem, doc: dict) -> MpmState:
    if doc.get("kind") != "mpm":
        raise CheckError("certificate kind mismatch: expected mpm")
    bound = int(doc["bound"])
    rows = {}
    for x in p.system.states:
        pom = priord.pom_from_json(doc["states"][x])
        if len(pom.rows) != p.m:
            raise CheckError(f"certificate at {x!r} has wrong height")
        rows[x] = list(pom.rows)
    return MpmState(rows, bound)


def mask_to_states(c: Coalgebra, mask: int) -> List[str]:
    return [x for b, x in enumerate(c.states) if mask >> b & 1]
