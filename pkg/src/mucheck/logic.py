"""Fixpoint modal formulas, their ASCII surface syntax, and the two
translations between formulas and simple equational systems (right-hand
sides of depth at most one).

Surface grammar (EBNF, whitespace free-form):

    formula   ::= ("mu" | "nu") VAR "." formula | disj
    disj      ::= conj { "\\/" conj }
    conj      ::= unary { "/\\" unary }
    unary     ::= MODALOP unary | "[" NAME "]" unary | "<" NAME ">" unary | atom
    atom      ::= "(" formula ")" | "tt" | "ff"
                | NAME [ "(" [formula {"," formula}] ")" ]
    MODALOP   ::= "box" | "dia" | "X" | "box_" NAT | "dia_" NAT

`tt`/`ff` are the empty conjunction and disjunction.  A bare name is a bound
variable when a binder for it is in scope, and a 0-ary modality (an atomic
proposition) otherwise.  Binders extend as far right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

MU = "mu"
NU = "nu"

RESERVED_MODAL = re.compile(r"^(box|dia|X|box_\d+|dia_\d+)$")
KEYWORDS = {"mu", "nu", "tt", "ff"}


class LogicError(Exception):
    pass


class ParseError(LogicError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


# -- AST ----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Conn:
    op: str  # "and" | "or"
    args: Tuple["Formula", ...]


@dataclass(frozen=True)
class Modal:
    op: str
    args: Tuple["Formula", ...]


@dataclass(frozen=True)
class Mu:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Nu:
    var: str
    body: "Formula"


Formula = Union[Var, Conn, Modal, Mu, Nu]

TT = Conn("and", ())
FF = Conn("or", ())


def fmt(phi: Formula) -> str:
    if isinstance(phi, Var):
        return phi.name
    if isinstance(phi, Conn):
        if not phi.args:
            return "tt" if phi.op == "and" else "ff"
        sep = " /\\ " if phi.op == "and" else " \\/ "
        return "(" + sep.join(fmt(a) for a in phi.args) + ")"
    if isinstance(phi, Modal):
        if not phi.args:
            return phi.op
        return f"{phi.op}({', '.join(fmt(a) for a in phi.args)})"
    tag = "mu" if isinstance(phi, Mu) else "nu"
    return f"{tag} {phi.var}. {fmt(phi.body)}"


def free_vars(phi: Formula, bound=frozenset()) -> frozenset:
    if isinstance(phi, Var):
        return frozenset() if phi.name in bound else frozenset([phi.name])
    if isinstance(phi, (Conn, Modal)):
        out = frozenset()
        for a in phi.args:
            out |= free_vars(a, bound)
        return out
    return free_vars(phi.body, bound | {phi.var})


# -- Tokenizer / parser --------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<and>/\\)
  | (?P<or>\\/)
  | (?P<dot>\.)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<comma>,)
  | (?P<lbr>\[)
  | (?P<rbr>\])
  | (?P<lang><)
  | (?P<rang>>)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind}, found {t[1]!r}", t[2])
        return t

    def formula(self, bound):
        kind, val, pos = self.peek()
        if kind == "name" and val in (MU, NU):
            self.next()
            var = self.expect("name")[1]
            if var in KEYWORDS:
                raise ParseError(f"{var!r} cannot be a variable", pos)
            self.expect("dot")
            body = self.formula(bound | {var})
            return Mu(var, body) if val == MU else Nu(var, body)
        return self.disj(bound)

    def disj(self, bound):
        parts = [self.conj(bound)]
        while self.peek()[0] == "or":
            self.next()
            parts.append(self.conj(bound))
        return parts[0] if len(parts) == 1 else Conn("or", tuple(parts))

    def conj(self, bound):
        parts = [self.unary(bound)]
        while self.peek()[0] == "and":
            self.next()
            parts.append(self.unary(bound))
        return parts[0] if len(parts) == 1 else Conn("and", tuple(parts))

    def unary(self, bound):
        kind, val, pos = self.peek()
        if kind == "name" and RESERVED_MODAL.match(val):
            self.next()
            if self.peek()[0] == "lpar":
                args = self.call_args(bound)
                if len(args) != 1:
                    raise ParseError(f"{val} takes one argument, got {len(args)}", pos)
                return Modal(val, tuple(args))
            return Modal(val, (self.unary(bound),))
        if kind == "lbr":
            self.next()
            act = self.expect("name")[1]
            self.expect("rbr")
            return Modal(f"[{act}]", (self.unary(bound),))
        if kind == "lang":
            self.next()
            act = self.expect("name")[1]
            self.expect("rang")
            return Modal(f"<{act}>", (self.unary(bound),))
        return self.atom(bound)

    def call_args(self, bound):
        self.expect("lpar")
        args = []
        if self.peek()[0] != "rpar":
            args.append(self.formula(bound))
            while self.peek()[0] == "comma":
                self.next()
                args.append(self.formula(bound))
        self.expect("rpar")
        return args

    def atom(self, bound):
        kind, val, pos = self.next()
        if kind == "lpar":
            phi = self.formula(bound)
            self.expect("rpar")
            return phi
        if kind == "name":
            if val == "tt":
                return TT
            if val == "ff":
                return FF
            if val in (MU, NU):
                raise ParseError(f"misplaced {val!r}", pos)
            if self.peek()[0] == "lpar":
                args = self.call_args(bound)
                if val in bound:
                    raise ParseError(f"variable {val!r} cannot be applied", pos)
                raise ParseError(f"{val} is a 0-ary modality, got {len(args)} arguments",
                                 pos)
            if val in bound:
                return Var(val)
            return Modal(val, ())
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_formula(text: str, signature: Optional["object"] = None) -> Formula:
    """Parse the surface syntax; `signature` (a FunctorInstance) restricts
    modalities to the declared functor when given."""
    p = _Parser(text)
    phi = p.formula(frozenset())
    t = p.peek()
    if t[0] != "eof":
        raise ParseError(f"trailing input {t[1]!r}", t[2])
    if signature is not None:
        from mucheck.coalgebra import validate_modalities
        validate_modalities(phi, signature)
    return phi


# -- Simple equational systems -------------------------------------------

@dataclass(frozen=True)
class VarRef:
    ref: int  # 1-based equation index


@dataclass(frozen=True)
class ConnRhs:
    op: str
    refs: Tuple[int, ...]


@dataclass(frozen=True)
class ModalRhs:
    op: str
    refs: Tuple[int, ...]


SimpleRhs = Union[VarRef, ConnRhs, ModalRhs]


@dataclass(frozen=True)
class Equation:
    var: str
    pol: str  # "mu" | "nu"
    rhs: SimpleRhs


@dataclass(frozen=True)
class SimpleEqSystem:
    equations: Tuple[Equation, ...]

    def __post_init__(self):
        m = len(self.equations)
        seen = set()
        for eq in self.equations:
            if eq.var in seen:
                raise LogicError(f"duplicate variable {eq.var!r}")
            seen.add(eq.var)
            refs = rhs_refs(eq.rhs)
            if any(not 1 <= r <= m for r in refs):
                raise LogicError(f"equation {eq.var!r} references an undefined variable")
            if eq.pol == MU and not isinstance(eq.rhs, VarRef):
                raise LogicError(f"mu-equation {eq.var!r} must have a variable "
                                 "right-hand side")

    @property
    def m(self) -> int:
        return len(self.equations)

    @property
    def mu_indices(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i, eq in enumerate(self.equations) if eq.pol == MU)


def rhs_refs(rhs: SimpleRhs) -> Tuple[int, ...]:
    if isinstance(rhs, VarRef):
        return (rhs.ref,)
    return rhs.refs


def _rename_binders(phi: Formula, used: set, env: Dict[str, str]) -> Formula:
    """Give every binder a unique name (canonical renaming of shadowing)."""
    if isinstance(phi, Var):
        return Var(env.get(phi.name, phi.name))
    if isinstance(phi, Conn):
        return Conn(phi.op, tuple(_rename_binders(a, used, env) for a in phi.args))
    if isinstance(phi, Modal):
        return Modal(phi.op, tuple(_rename_binders(a, used, env) for a in phi.args))
    name = phi.var
    fresh = name
    n = 1
    while fresh in used:
        fresh = f"{name}'{n}"
        n += 1
    used.add(fresh)
    body = _rename_binders(phi.body, used, {**env, name: fresh})
    return Mu(fresh, body) if isinstance(phi, Mu) else Nu(fresh, body)


def to_equational(phi: Formula) -> SimpleEqSystem:
    """Equational presentation: one auxiliary =_nu equation per connective,
    modality, and variable occurrence, one equation per binder.  Fresh
    variables are named u1, u2, ... in first-created order."""
    if free_vars(phi):
        raise LogicError(f"formula is open: free {sorted(free_vars(phi))}")
    used: set = set()
    phi = _rename_binders(phi, used, {})

    counter = [0]

    def fresh() -> str:
        while True:
            counter[0] += 1
            name = f"u{counter[0]}"
            if name not in used:
                used.add(name)
                return name

    equations: List[Tuple[str, str, object]] = []  # rhs refs by name

    def emit(var, pol, rhs):
        equations.append((var, pol, rhs))

    def tr(node: Formula) -> str:
        if isinstance(node, Var):
            v = fresh()
            emit(v, NU, ("var", node.name))
            return v
        if isinstance(node, Conn):
            names = [tr(a) for a in node.args]
            v = fresh()
            emit(v, NU, ("conn", node.op, names))
            return v
        if isinstance(node, Modal):
            names = [tr(a) for a in node.args]
            v = fresh()
            emit(v, NU, ("modal", node.op, names))
            return v
        body = tr(node.body)
        emit(node.var, MU if isinstance(node, Mu) else NU, ("var", body))
        return node.var

    tr(phi)
    index = {var: i + 1 for i, (var, _, _) in enumerate(equations)}
    final = []
    for var, pol, rhs in equations:
        if rhs[0] == "var":
            final.append(Equation(var, pol, VarRef(index[rhs[1]])))
        elif rhs[0] == "conn":
            final.append(Equation(var, pol,
                                  ConnRhs(rhs[1], tuple(index[n] for n in rhs[2]))))
        else:
            final.append(Equation(var, pol,
                                  ModalRhs(rhs[1], tuple(index[n] for n in rhs[2]))))
    return SimpleEqSystem(tuple(final))


def _subst(phi: Formula, name: str, repl: Formula) -> Formula:
    if isinstance(phi, Var):
        return repl if phi.name == name else phi
    if isinstance(phi, Conn):
        return Conn(phi.op, tuple(_subst(a, name, repl) for a in phi.args))
    if isinstance(phi, Modal):
        return Modal(phi.op, tuple(_subst(a, name, repl) for a in phi.args))
    if phi.var == name:  # shadowed; cannot happen after canonical renaming
        return phi
    body = _subst(phi.body, name, repl)
    return Mu(phi.var, body) if isinstance(phi, Mu) else Nu(phi.var, body)


def to_formula(E: SimpleEqSystem) -> Formula:
    """Formulaic presentation: fold right to left, substituting each bound
    equation into the remainder.  No simplification is performed."""
    names = [eq.var for eq in E.equations]

    def rhs_formula(rhs: SimpleRhs) -> Formula:
        if isinstance(rhs, VarRef):
            return Var(names[rhs.ref - 1])
        if isinstance(rhs, ConnRhs):
            return Conn(rhs.op, tuple(Var(names[r - 1]) for r in rhs.refs))
        return Modal(rhs.op, tuple(Var(names[r - 1]) for r in rhs.refs))

    def fold(idx: int) -> Formula:
        eq = E.equations[idx]
        binder = Mu if eq.pol == MU else Nu
        head = binder(eq.var, rhs_formula(eq.rhs))
        if idx == len(E.equations) - 1:
            return head
        rest = fold(idx + 1)
        return _subst(rest, eq.var, head)

    if not E.equations:
        raise LogicError("empty system has no formulaic presentation")
    return fold(0)


def encode_connective(n: int, table) -> Formula:
    """Encode a monotone Boolean function of n arguments as a disjunction of
    conjunctions over its minimal true points (variables x1..xn)."""
    points = list(_bool_tuples(n))
    vals = {w: bool(table(*w)) for w in points}
    for w in points:
        for v in points:
            if all(a <= b for a, b in zip(w, v)) and vals[w] and not vals[v]:
                raise LogicError("table is not monotone")
    true_pts = [w for w in points if vals[w]]
    minimal = [w for w in true_pts
               if not any(v != w and all(a <= b for a, b in zip(v, w))
                          for v in true_pts)]
    minimal.sort()
    conjs = [Conn("and", tuple(Var(f"x{i + 1}") for i, b in enumerate(w) if b))
             for w in minimal]
    if not conjs:
        return FF
    if len(conjs) == 1:
        return conjs[0]
    return Conn("or", tuple(conjs))


def _bool_tuples(n: int):
    if n == 0:
        yield ()
        return
    for rest in _bool_tuples(n - 1):
        yield (False,) + rest
        yield (True,) + rest


# -- JSON ----------------------------------------------------------------

def system_to_json(E: SimpleEqSystem) -> dict:
    eqs = []
    names = [eq.var for eq in E.equations]
    for eq in E.equations:
        if isinstance(eq.rhs, VarRef):
            rhs = {"kind": "var", "args": [names[eq.rhs.ref - 1]]}
        elif isinstance(eq.rhs, ConnRhs):
            rhs = {"kind": "conn", "op": eq.rhs.op,
                   "args": [names[r - 1] for r in eq.rhs.refs]}
        else:
            rhs = {"kind": "modal", "op": eq.rhs.op,
                   "args": [names[r - 1] for r in eq.rhs.refs]}
        eqs.append({"var": eq.var, "pol": eq.pol, "rhs": rhs})
    return {"schema": 1, "equations": eqs}


def system_from_json(doc: dict) -> SimpleEqSystem:
    eqs = doc["equations"]
    index = {e["var"]: i + 1 for i, e in enumerate(eqs)}
    out = []
    for e in eqs:
        rhs = e["rhs"]
        try:
            refs = tuple(index[a] for a in rhs.get("args", []))
        except KeyError as exc:
            raise LogicError(f"undefined variable {exc.args[0]!r}") from None
        kind = rhs["kind"]
        if kind == "var":
            built: SimpleRhs = VarRef(refs[0])
        elif kind == "conn":
            built = ConnRhs(rhs["op"], refs)
        elif kind == "modal":
            built = ModalRhs(rhs["op"], refs)
        else:
            raise LogicError(f"unknown rhs kind {kind!r}")
        out.append(Equation(e["var"], e["pol"], built))
    return SimpleEqSystem(tuple(out))
