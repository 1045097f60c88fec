"""Concrete behavior functors, finite coalgebras, and predicate liftings.

Supported functor shapes: Kripke (label set and successor set), labelled
transition systems, monotone neighborhood frames, graded transition systems
(multiplicities saturated at a per-instance cap, with an explicit infinity
marker), and streams (one label set and one successor).  Monotone
neighborhood values are stored as antichains of inclusion-minimal sets and
read upward-closed.  Coalition-style functors are rejected at load time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, Optional, Sequence, Tuple

KRIPKE = "kripke"
LTS = "lts"
MONNBHD = "monnbhd"
GRADED = "graded"
STREAM = "stream"

INF = "inf"  # graded multiplicity marker for unbounded


class CoalgebraError(Exception):
    pass


@dataclass(frozen=True)
class FunctorInstance:
    kind: str
    ap: Tuple[str, ...] = ()
    actions: Tuple[str, ...] = ()
    cap: int = 0

    def __post_init__(self):
        if self.kind not in (KRIPKE, LTS, MONNBHD, GRADED, STREAM):
            raise CoalgebraError(f"unsupported functor {self.kind!r}")
        if self.kind in (KRIPKE, STREAM) and not self.ap:
            raise CoalgebraError(f"{self.kind} needs a nonempty atomic-proposition set")
        if self.kind == LTS and not self.actions:
            raise CoalgebraError("lts needs a nonempty action set")
        if self.kind == GRADED and self.cap < 1:
            raise CoalgebraError("graded needs a positive multiplicity cap")


@dataclass(frozen=True)
class FValue:
    """Functor-shaped container with payloads of an arbitrary type.

    kripke: (labels, frozenset of payloads)
    lts:    tuple of frozensets, one per action (in declared order)
    monnbhd: frozenset of frozensets of payloads (a minimal antichain)
    graded: tuple of (payload, multiplicity) pairs, multiplicity int or INF
    stream: (labels, payload)
    """
    functor: FunctorInstance
    data: Any


def _sat(f: FunctorInstance, a, b):
    if a == INF or b == INF:
        return INF
    return min(a + b, f.cap)


def minimize_antichain(sets) -> FrozenSet[FrozenSet]:
    sets = set(frozenset(s) for s in sets)
    return frozenset(s for s in sets
                     if not any(t < s for t in sets))


def upward_member(antichain, candidate: frozenset) -> bool:
    """candidate belongs to the upward-closed family given by its minima."""
    return any(s <= candidate for s in antichain)


def fmap(F: FunctorInstance, g: Callable, t: FValue) -> FValue:
    if t.functor is not F and t.functor != F:
        raise CoalgebraError("value does not belong to this functor")
    k = F.kind
    if k == KRIPKE:
        labels, succ = t.data
        return FValue(F, (labels, frozenset(g(v) for v in succ)))
    if k == LTS:
        return FValue(F, tuple(frozenset(g(v) for v in part) for part in t.data))
    if k == MONNBHD:
        return FValue(F, minimize_antichain(frozenset(g(v) for v in s)
                                            for s in t.data))
    if k == GRADED:
        out: Dict[Any, Any] = {}
        for v, mult in t.data:
            w = g(v)
            out[w] = _sat(F, out.get(w, 0), mult)
        return FValue(F, tuple(sorted(out.items(), key=lambda kv: repr(kv[0]))))
    labels, v = t.data
    return FValue(F, (labels, g(v)))


# -- Modalities -----------------------------------------------------------

_GRADED_OP = re.compile(r"^(box|dia)_(\d+)$")
_LTS_OP = re.compile(r"^[\[<]([A-Za-z_][A-Za-z0-9_]*)[\]>]$")


@dataclass(frozen=True)
class ModalityDef:
    id: str
    arity: int
    lifting: Callable[[FValue], bool]

    def __call__(self, t: FValue) -> bool:
        return self.lifting(t)


def modality(F: FunctorInstance, op: str) -> ModalityDef:
    """Resolve a modality name against a functor; the returned lifting
    evaluates on payloads that are tuples of booleans."""
    k = F.kind
    if k in (KRIPKE, STREAM) and op in F.ap:
        if k == KRIPKE:
            return ModalityDef(op, 0, lambda t, p=op: p in t.data[0])
        return ModalityDef(op, 0, lambda t, p=op: p in t.data[0])
    if k == KRIPKE and op == "box":
        return ModalityDef(op, 1, lambda t: all(w[0] for w in t.data[1]))
    if k == KRIPKE and op == "dia":
        return ModalityDef(op, 1, lambda t: any(w[0] for w in t.data[1]))
    if k == LTS:
        m = _LTS_OP.match(op)
        if m and m.group(1) in F.actions:
            idx = F.actions.index(m.group(1))
            if op[0] == "[":
                return ModalityDef(op, 1, lambda t, i=idx: all(w[0] for w in t.data[i]))
            return ModalityDef(op, 1, lambda t, i=idx: any(w[0] for w in t.data[i]))
    if k == MONNBHD and op == "box":
        return ModalityDef(op, 1,
                           lambda t: any(all(w[0] for w in s) for s in t.data))
    if k == GRADED:
        m = _GRADED_OP.match(op)
        if m:
            grade = int(m.group(2))
            if grade + 1 > F.cap:
                raise CoalgebraError(
                    f"{op}: grade {grade} not observable under cap {F.cap}")
            if m.group(1) == "box":
                def box_k(t, kk=grade):
                    total = 0
                    for w, mult in t.data:
                        if not w[0]:
                            if mult == INF:
                                return False
                            total += mult
                    return total <= kk
                return ModalityDef(op, 1, box_k)

            def dia_k(t, kk=grade):
                total = 0
                for w, mult in t.data:
                    if w[0]:
                        if mult == INF:
                            return True
                        total += mult
                return total > kk
            return ModalityDef(op, 1, dia_k)
    if k == STREAM and op == "X":
        return ModalityDef(op, 1, lambda t: t.data[1][0])
    raise CoalgebraError(f"modality {op!r} is not compatible with functor {k}")


def lift_tilde(mod: ModalityDef, t: FValue) -> bool:
    """The one-step evaluation of a modality on boolean payload tuples."""
    _check_width(mod.arity, t)
    return mod.lifting(t)


def lift_proj(mod: ModalityDef, js: Sequence[int], t: FValue) -> bool:
    """Evaluate through column projections: identical to lift_tilde after
    mapping each width-m payload to its (j_1..j_n) columns."""
    js = tuple(js)
    if len(js) != mod.arity:
        raise CoalgebraError("projection width must match modality arity")
    width = _payload_width(t)
    if width is not None and any(not 1 <= j <= width for j in js):
        raise CoalgebraError("projection index out of range")
    proj = fmap(t.functor, lambda w: tuple(w[j - 1] for j in js), t)
    return lift_tilde(mod, proj)


def _payload_width(t: FValue) -> Optional[int]:
    for w in _payloads(t):
        return len(w)
    return None


def _payloads(t: FValue):
    k = t.functor.kind
    if k == KRIPKE:
        yield from t.data[1]
    elif k == LTS:
        for part in t.data:
            yield from part
    elif k == MONNBHD:
        for s in t.data:
            yield from s
    elif k == GRADED:
        for w, _ in t.data:
            yield w
    else:
        yield t.data[1]


def _check_width(arity: int, t: FValue):
    for w in _payloads(t):
        if len(w) != arity:
            raise CoalgebraError(f"payload width {len(w)} != modality arity {arity}")


# -- Coalgebras -----------------------------------------------------------

@dataclass(frozen=True)
class Coalgebra:
    functor: FunctorInstance
    states: Tuple[str, ...]
    step: Dict[str, FValue]

    def __post_init__(self):
        idx = set(self.states)
        if len(idx) != len(self.states):
            raise CoalgebraError("duplicate state names")
        for x in self.states:
            if x not in self.step:
                raise CoalgebraError(f"state {x!r} has no transition structure")
            for v in _payloads(self.step[x]):
                if v not in idx:
                    raise CoalgebraError(f"undeclared successor {v!r}")

    def index(self, x: str) -> int:
        return self.states.index(x)


def modal_step(c: Coalgebra, mod: ModalityDef,
               arg_predicates: Sequence[int]) -> int:
    """One modal step: predicates and the result are bitmasks over c.states."""
    if len(arg_predicates) != mod.arity:
        raise CoalgebraError("argument count must match modality arity")
    pos = {x: b for b, x in enumerate(c.states)}

    def bits(v: str) -> Tuple[bool, ...]:
        b = pos[v]
        return tuple(bool(p >> b & 1) for p in arg_predicates)

    out = 0
    for b, x in enumerate(c.states):
        if lift_tilde(mod, fmap(c.functor, bits, c.step[x])):
            out |= 1 << b
    return out


def validate_modalities(phi, F: FunctorInstance) -> None:
    from mucheck import logic
    if isinstance(phi, logic.Modal):
        mod = modality(F, phi.op)
        if mod.arity != len(phi.args):
            raise CoalgebraError(f"{phi.op}: arity {mod.arity}, got {len(phi.args)}")
    if isinstance(phi, (logic.Conn, logic.Modal)):
        for a in phi.args:
            validate_modalities(a, F)
    elif isinstance(phi, (logic.Mu, logic.Nu)):
        validate_modalities(phi.body, F)


# -- JSON -----------------------------------------------------------------

def functor_to_json(F: FunctorInstance) -> dict:
    d: Dict[str, Any] = {"kind": F.kind}
    if F.kind in (KRIPKE, STREAM):
        d["ap"] = sorted(F.ap)
    if F.kind == LTS:
        d["actions"] = list(F.actions)
    if F.kind == GRADED:
        d["cap"] = F.cap
    return d


def functor_from_json(d: dict) -> FunctorInstance:
    kind = d.get("kind")
    if kind == "coalition":
        raise CoalgebraError("unsupported functor: coalition (class-valued)")
    if kind in (KRIPKE, STREAM):
        return FunctorInstance(kind, ap=tuple(d["ap"]))
    if kind == LTS:
        return FunctorInstance(kind, actions=tuple(d["actions"]))
    if kind == MONNBHD:
        return FunctorInstance(kind)
    if kind == GRADED:
        return FunctorInstance(kind, cap=int(d["cap"]))
    raise CoalgebraError(f"unsupported functor {kind!r}")


def _value_to_json(F: FunctorInstance, t: FValue):
    k = F.kind
    if k == KRIPKE:
        return {"labels": sorted(t.data[0]), "succ": sorted(t.data[1])}
    if k == LTS:
        return {a: sorted(part) for a, part in zip(F.actions, t.data)}
    if k == MONNBHD:
        return sorted([sorted(s) for s in t.data])
    if k == GRADED:
        return {v: m for v, m in t.data}
    return {"labels": sorted(t.data[0]), "succ": t.data[1]}


def _value_from_json(F: FunctorInstance, v) -> FValue:
    k = F.kind
    if k == KRIPKE:
        return FValue(F, (frozenset(v.get("labels", [])),
                          frozenset(v.get("succ", []))))
    if k == LTS:
        return FValue(F, tuple(frozenset(v.get(a, [])) for a in F.actions))
    if k == MONNBHD:
        return FValue(F, minimize_antichain(frozenset(s) for s in v))
    if k == GRADED:
        data = []
        for succ, mult in sorted(v.items()):
            if mult == INF:
                data.append((succ, INF))
            else:
                mult = int(mult)
                if mult < 0:
                    raise CoalgebraError("negative multiplicity")
                data.append((succ, min(mult, F.cap)))
        return FValue(F, tuple(data))
    return FValue(F, (frozenset(v.get("labels", [])), v["succ"]))


def coalgebra_to_json(c: Coalgebra) -> dict:
    return {"schema": 1,
            "functor": functor_to_json(c.functor),
            "states": list(c.states),
            "step": {x: _value_to_json(c.functor, c.step[x]) for x in c.states}}


def coalgebra_from_json(doc: dict) -> Coalgebra:
    F = functor_from_json(doc["functor"])
    states = tuple(doc["states"])
    step = {x: _value_from_json(F, doc["step"][x]) for x in states}
    return Coalgebra(F, states, step)


def labels_from_json(F: FunctorInstance, labels) -> FrozenSet[str]:
    labels = frozenset(labels)
    bad = labels - set(F.ap)
    if bad:
        raise CoalgebraError(f"labels {sorted(bad)} not among declared atoms")
    return labels
