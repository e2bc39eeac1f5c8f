"""Syntax trees for values, terms, processes and transition labels, plus
name handling: free names, capture-avoiding substitution, alpha-equivalence
(via canonical renaming of binders) and structural congruence.

Term variables live in the same namespace as channel names: the value-input
process ``in x. P`` reads a value on channel x and binds the received value
to the name x itself inside P, so the subject occurrence stays free while
the body occurrences are bound.

Restrictions may carry an optional session-type ascription (``Res.anno``).
Ascriptions are checker/evaluator metadata: they never participate in
equality, hashing or congruence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, fields, replace
from typing import Iterator, Optional

from .kernel import Polynomial

# ---------------------------------------------------------------------
# values and terms


@dataclass(frozen=True)
class Value:
    pass


@dataclass(frozen=True)
class Var(Value):
    name: str


@dataclass(frozen=True)
class BoolLit(Value):
    value: bool


@dataclass(frozen=True)
class StrLit(Value):
    bits: str

    def __post_init__(self):
        if any(c not in "01" for c in self.bits):
            raise ValueError(f"bitstring literal over {{0,1}} expected: {self.bits!r}")


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class ValTerm(Term):
    value: Value


@dataclass(frozen=True)
class App(Term):
    """Function symbol applied to values only; nesting is not grammatical."""

    symbol: str
    index: Polynomial
    args: tuple[Value, ...]


def value_vars(v: Value) -> frozenset[str]:
    return frozenset((v.name,)) if isinstance(v, Var) else frozenset()


def term_vars(a: Term) -> frozenset[str]:
    if isinstance(a, ValTerm):
        return value_vars(a.value)
    out: frozenset[str] = frozenset()
    for v in a.args:
        out |= value_vars(v)
    return out


def subst_value_in_value(v: Value, name: str, val: Value) -> Value:
    if isinstance(v, Var) and v.name == name:
        return val
    return v


def subst_value_in_term(a: Term, name: str, val: Value) -> Term:
    if isinstance(a, ValTerm):
        return ValTerm(subst_value_in_value(a.value, name, val))
    return App(a.symbol, a.index, tuple(subst_value_in_value(v, name, val) for v in a.args))


def rename_in_value(v: Value, mapping: dict[str, str]) -> Value:
    if isinstance(v, Var) and v.name in mapping:
        return Var(mapping[v.name])
    return v


def rename_in_term(a: Term, mapping: dict[str, str]) -> Term:
    if isinstance(a, ValTerm):
        return ValTerm(rename_in_value(a.value, mapping))
    return App(a.symbol, a.index, tuple(rename_in_value(v, mapping) for v in a.args))


# ---------------------------------------------------------------------
# processes


@dataclass(frozen=True)
class Process:
    pass


@dataclass(frozen=True)
class Nil(Process):
    pass


@dataclass(frozen=True)
class Par(Process):
    left: Process
    right: Process


@dataclass(frozen=True)
class Res(Process):
    name: str
    body: Process
    anno: Optional[object] = field(default=None, compare=False)


@dataclass(frozen=True)
class OutCh(Process):
    """x̄⟨y⟩.P — send channel y on x, continue as P."""

    chan: str
    obj: str
    body: Process


@dataclass(frozen=True)
class InCh(Process):
    """x(y).P — receive a channel on x, bind it to y in P."""

    chan: str
    bind: str
    body: Process


@dataclass(frozen=True)
class OutVal(Process):
    """out x v — emit the value v on x and stop."""

    chan: str
    value: Value


@dataclass(frozen=True)
class InVal(Process):
    """in x. P — read a value on x; the name x is rebound to it in P."""

    chan: str
    body: Process


@dataclass(frozen=True)
class LetEval(Process):
    """let x = a in P — evaluate the term a, bind the outcome to x in P."""

    bind: str
    term: Term
    body: Process


@dataclass(frozen=True)
class RepIn(Process):
    """!x(y).P — replicated input server on x."""

    chan: str
    bind: str
    body: Process


@dataclass(frozen=True)
class SelL(Process):
    chan: str
    body: Process


@dataclass(frozen=True)
class SelR(Process):
    chan: str
    body: Process


@dataclass(frozen=True)
class Case(Process):
    chan: str
    left: Process
    right: Process


@dataclass(frozen=True)
class If(Process):
    cond: Value
    then: Process
    els: Process


# ---------------------------------------------------------------------
# free names

NIL = Nil()


def free_names(p: Process) -> frozenset[str]:
    if isinstance(p, Nil):
        return frozenset()
    if isinstance(p, Par):
        return free_names(p.left) | free_names(p.right)
    if isinstance(p, Res):
        return free_names(p.body) - {p.name}
    if isinstance(p, OutCh):
        return {p.chan, p.obj} | free_names(p.body)
    if isinstance(p, InCh):
        return {p.chan} | (free_names(p.body) - {p.bind})
    if isinstance(p, OutVal):
        return {p.chan} | value_vars(p.value)
    if isinstance(p, InVal):
        return {p.chan} | (free_names(p.body) - {p.chan})
    if isinstance(p, LetEval):
        return term_vars(p.term) | (free_names(p.body) - {p.bind})
    if isinstance(p, RepIn):
        return {p.chan} | (free_names(p.body) - {p.bind})
    if isinstance(p, (SelL, SelR)):
        return {p.chan} | free_names(p.body)
    if isinstance(p, Case):
        return {p.chan} | free_names(p.left) | free_names(p.right)
    if isinstance(p, If):
        return value_vars(p.cond) | free_names(p.then) | free_names(p.els)
    raise TypeError(p)


_fresh_counter = itertools.count(1)


def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    base = base.split("~")[0] or "x"
    while True:
        cand = f"{base}~{next(_fresh_counter)}"
        if cand not in avoid:
            return cand


# ---------------------------------------------------------------------
# renaming and substitution (capture-avoiding)


def _rename(p: Process, mapping: dict[str, str]) -> Process:
    """Simultaneous renaming of free names; binders alpha-renamed on demand."""
    if not mapping:
        return p

    def avoid() -> frozenset[str]:
        return frozenset(mapping.keys()) | frozenset(mapping.values()) | free_names(p)

    def under(bind: str, body: Process, rebuild) -> Process:
        inner = {k: v for k, v in mapping.items() if k != bind}
        if bind in inner.values():
            nb = fresh_name(bind, avoid() | free_names(body))
            body = _rename(body, {bind: nb})
            bind = nb
        return rebuild(bind, _rename(body, inner))

    if isinstance(p, Nil):
        return p
    if isinstance(p, Par):
        return Par(_rename(p.left, mapping), _rename(p.right, mapping))
    if isinstance(p, Res):
        return under(p.name, p.body, lambda b, q: Res(b, q, p.anno))
    if isinstance(p, OutCh):
        return OutCh(mapping.get(p.chan, p.chan), mapping.get(p.obj, p.obj), _rename(p.body, mapping))
    if isinstance(p, InCh):
        c = mapping.get(p.chan, p.chan)
        return under(p.bind, p.body, lambda b, q: InCh(c, b, q))
    if isinstance(p, OutVal):
        return OutVal(mapping.get(p.chan, p.chan), rename_in_value(p.value, mapping))
    if isinstance(p, InVal):
        # The subject is free and simultaneously the binder: renaming the
        # subject renames the bound occurrences with it.
        c = mapping.get(p.chan, p.chan)
        inner = {k: v for k, v in mapping.items() if k != p.chan}
        if any(v == c for v in inner.values()):
            # some other name is being renamed onto our binder: impossible to
            # alpha-dodge (the binder is also the free subject)
            raise ValueError(f"renaming captures value-input subject {c}")
        if p.chan != c:
            inner[p.chan] = c
        return InVal(c, _rename(p.body, inner))
    if isinstance(p, LetEval):
        t = rename_in_term(p.term, mapping)
        return under(p.bind, p.body, lambda b, q: LetEval(b, t, q))
    if isinstance(p, RepIn):
        c = mapping.get(p.chan, p.chan)
        return under(p.bind, p.body, lambda b, q: RepIn(c, b, q))
    if isinstance(p, SelL):
        return SelL(mapping.get(p.chan, p.chan), _rename(p.body, mapping))
    if isinstance(p, SelR):
        return SelR(mapping.get(p.chan, p.chan), _rename(p.body, mapping))
    if isinstance(p, Case):
        return Case(mapping.get(p.chan, p.chan), _rename(p.left, mapping), _rename(p.right, mapping))
    if isinstance(p, If):
        return If(rename_in_value(p.cond, mapping), _rename(p.then, mapping), _rename(p.els, mapping))
    raise TypeError(p)


def substitute_name(p: Process, old: str, new: str) -> Process:
    """P{new/old} on all free occurrences of the name old."""
    if old == new:
        return p
    return _rename(p, {old: new})


def substitute_value(p: Process, var: str, val: Value) -> Process:
    """P{val/var} on free value occurrences of the variable var."""
    newnames = value_vars(val)

    def go(p: Process) -> Process:
        if isinstance(p, Nil):
            return p
        if isinstance(p, Par):
            return Par(go(p.left), go(p.right))
        if isinstance(p, Res):
            if p.name == var:
                return p
            if p.name in newnames:
                nb = fresh_name(p.name, newnames | free_names(p.body) | {var})
                return Res(nb, go(substitute_name(p.body, p.name, nb)), p.anno)
            return Res(p.name, go(p.body), p.anno)
        if isinstance(p, OutCh):
            return OutCh(p.chan, p.obj, go(p.body))
        if isinstance(p, InCh):
            if p.bind == var:
                return p
            if p.bind in newnames:
                nb = fresh_name(p.bind, newnames | free_names(p.body) | {var})
                return InCh(p.chan, nb, go(substitute_name(p.body, p.bind, nb)))
            return InCh(p.chan, p.bind, go(p.body))
        if isinstance(p, OutVal):
            return OutVal(p.chan, subst_value_in_value(p.value, var, val))
        if isinstance(p, InVal):
            if p.chan == var:
                return p  # rebinds var in its body
            return InVal(p.chan, go(p.body))
        if isinstance(p, LetEval):
            t = subst_value_in_term(p.term, var, val)
            if p.bind == var:
                return LetEval(p.bind, t, p.body)
            if p.bind in newnames:
                nb = fresh_name(p.bind, newnames | free_names(p.body) | {var})
                return LetEval(nb, t, go(substitute_name(p.body, p.bind, nb)))
            return LetEval(p.bind, t, go(p.body))
        if isinstance(p, RepIn):
            if p.bind == var:
                return p
            if p.bind in newnames:
                nb = fresh_name(p.bind, newnames | free_names(p.body) | {var})
                return RepIn(p.chan, nb, go(substitute_name(p.body, p.bind, nb)))
            return RepIn(p.chan, p.bind, go(p.body))
        if isinstance(p, SelL):
            return SelL(p.chan, go(p.body))
        if isinstance(p, SelR):
            return SelR(p.chan, go(p.body))
        if isinstance(p, Case):
            return Case(p.chan, go(p.left), go(p.right))
        if isinstance(p, If):
            return If(subst_value_in_value(p.cond, var, val), go(p.then), go(p.els))
        raise TypeError(p)

    return go(p)


# ---------------------------------------------------------------------
# alpha canonicalization


def canonicalize(p: Process) -> Process:
    """Rename every binder to a canonical scheme _b0, _b1, ... (pre-order,
    skipping the process's free names), so that alpha-equivalent processes
    become structurally equal. Annotations are preserved but never compared.
    """
    free = free_names(p)
    counter = itertools.count()

    def next_binder() -> str:
        while True:
            cand = f"_b{next(counter)}"
            if cand not in free:
                return cand

    def go(p: Process, env: dict[str, str]) -> Process:
        def ch(x: str) -> str:
            return env.get(x, x)

        def bound(b: str):
            nb = next_binder()
            env2 = dict(env)
            env2[b] = nb
            return nb, env2

        if isinstance(p, Nil):
            return p
        if isinstance(p, Par):
            return Par(go(p.left, env), go(p.right, env))
        if isinstance(p, Res):
            nb, env2 = bound(p.name)
            return Res(nb, go(p.body, env2), p.anno)
        if isinstance(p, OutCh):
            return OutCh(ch(p.chan), ch(p.obj), go(p.body, env))
        if isinstance(p, InCh):
            c = ch(p.chan)
            nb, env2 = bound(p.bind)
            return InCh(c, nb, go(p.body, env2))
        if isinstance(p, OutVal):
            return OutVal(ch(p.chan), rename_in_value(p.value, env))
        if isinstance(p, InVal):
            # subject free, body occurrences refer to the same name
            return InVal(ch(p.chan), go(p.body, env))
        if isinstance(p, LetEval):
            t = rename_in_term(p.term, env)
            nb, env2 = bound(p.bind)
            return LetEval(nb, t, go(p.body, env2))
        if isinstance(p, RepIn):
            c = ch(p.chan)
            nb, env2 = bound(p.bind)
            return RepIn(c, nb, go(p.body, env2))
        if isinstance(p, SelL):
            return SelL(ch(p.chan), go(p.body, env))
        if isinstance(p, SelR):
            return SelR(ch(p.chan), go(p.body, env))
        if isinstance(p, Case):
            return Case(ch(p.chan), go(p.left, env), go(p.right, env))
        if isinstance(p, If):
            return If(rename_in_value(p.cond, env), go(p.then, env), go(p.els, env))
        raise TypeError(p)

    return go(p, {})


def alpha_eq(p: Process, q: Process) -> bool:
    return canonicalize(p) == canonicalize(q)


# ---------------------------------------------------------------------
# structural congruence
#
# The congruence is generated by exactly four axioms: two scope
# commutations (with their side conditions), alpha, and the garbage axiom
# P == (nu x)(P | 0) with x not free in P. Notably there is no
# commutativity or associativity of parallel composition.


def garbage_collect(p: Process) -> Process:
    """Remove (nu x)(Q | 0) wrappers with x not free in Q, bottom-up to a
    fixed point. This is the garbage axiom oriented left; together with
    alpha canonicalization it is the normalization used for support keys."""

    def go(p: Process) -> Process:
        if isinstance(p, Par):
            return Par(go(p.left), go(p.right))
        if isinstance(p, Res):
            body = go(p.body)
            if (
                isinstance(body, Par)
                and isinstance(body.right, Nil)
                and p.name not in free_names(body.left)
            ):
                return body.left
            return Res(p.name, body, p.anno)
        if isinstance(p, OutCh):
            return OutCh(p.chan, p.obj, go(p.body))
        if isinstance(p, InCh):
            return InCh(p.chan, p.bind, go(p.body))
        if isinstance(p, InVal):
            return InVal(p.chan, go(p.body))
        if isinstance(p, LetEval):
            return LetEval(p.bind, p.term, go(p.body))
        if isinstance(p, RepIn):
            return RepIn(p.chan, p.bind, go(p.body))
        if isinstance(p, SelL):
            return SelL(p.chan, go(p.body))
        if isinstance(p, SelR):
            return SelR(p.chan, go(p.body))
        if isinstance(p, Case):
            return Case(p.chan, go(p.left), go(p.right))
        if isinstance(p, If):
            return If(p.cond, go(p.then), go(p.els))
        return p

    while True:
        q = go(p)
        if q == p:
            return q
        p = q


def normalize(p: Process) -> Process:
    """Garbage-collected, alpha-canonical representative. Idempotent."""
    return canonicalize(garbage_collect(p))


def _scope_moves(p: Process) -> Iterator[Process]:
    """All single applications, in either direction and at any position, of
    the two scope-commutation axioms."""

    def at_node(p: Process) -> Iterator[Process]:
        # pattern: (nu x)(P | (nu y)(Q | R))
        if isinstance(p, Res) and isinstance(p.body, Par) and isinstance(p.body.right, Res):
            inner = p.body.right
            if isinstance(inner.body, Par):
                x, pp = p.name, p.body.left
                y, qq, rr = inner.name, inner.body.left, inner.body.right
                if y != x:
                    if y in free_names(pp):
                        # freshen the inner binder so the moves are applicable
                        ny = fresh_name(y, free_names(p) | free_names(inner.body) | {x})
                        qq = substitute_name(qq, y, ny)
                        rr = substitute_name(rr, y, ny)
                        y = ny
                    # axiom 1, left-to-right: ~> (nu y)((nu x)(P|Q) | R)
                    if x not in free_names(rr):
                        yield Res(y, Par(Res(x, Par(pp, qq), p.anno), rr), inner.anno)
                    # axiom 2, left-to-right: ~> (nu y)(Q | (nu x)(P|R))
                    if x not in free_names(qq):
                        yield Res(y, Par(qq, Res(x, Par(pp, rr), p.anno)), inner.anno)
        # right-to-left direction of axiom 1: (nu y)((nu x)(P|Q) | R)
        if isinstance(p, Res) and isinstance(p.body, Par) and isinstance(p.body.left, Res):
            inner = p.body.left
            if isinstance(inner.body, Par):
                y, rr = p.name, p.body.right
                x, pp, qq = inner.name, inner.body.left, inner.body.right
                if x != y:
                    if x in free_names(rr):
                        nx = fresh_name(x, free_names(p) | free_names(inner.body) | {y})
                        pp = substitute_name(pp, x, nx)
                        qq = substitute_name(qq, x, nx)
                        x = nx
                    if y not in free_names(pp):
                        yield Res(x, Par(pp, Res(y, Par(qq, rr), p.anno)), inner.anno)
        # right-to-left direction of axiom 2: (nu y)(Q | (nu x)(P|R))
        if isinstance(p, Res) and isinstance(p.body, Par) and isinstance(p.body.right, Res):
            inner = p.body.right
            if isinstance(inner.body, Par):
                y, qq = p.name, p.body.left
                x, pp, rr = inner.name, inner.body.left, inner.body.right
                if x != y:
                    if x in free_names(qq):
                        nx = fresh_name(x, free_names(p) | free_names(inner.body) | {y})
                        pp = substitute_name(pp, x, nx)
                        rr = substitute_name(rr, x, nx)
                        x = nx
                    if y not in free_names(pp):
                        yield Res(x, Par(pp, Res(y, Par(qq, rr), p.anno)), inner.anno)

    yield from at_node(p)
    # congruence: recurse into every process position
    if isinstance(p, Par):
        for l2 in _scope_moves(p.left):
            yield Par(l2, p.right)
        for r2 in _scope_moves(p.right):
            yield Par(p.left, r2)
    elif isinstance(p, Res):
        for b2 in _scope_moves(p.body):
            yield Res(p.name, b2, p.anno)
    elif isinstance(p, (OutCh, InCh, InVal, LetEval, RepIn, SelL, SelR)):
        for b2 in _scope_moves(p.body):
            yield replace(p, body=b2)
    elif isinstance(p, Case):
        for l2 in _scope_moves(p.left):
            yield Case(p.chan, l2, p.right)
        for r2 in _scope_moves(p.right):
            yield Case(p.chan, p.left, r2)
    elif isinstance(p, If):
        for t2 in _scope_moves(p.then):
            yield If(p.cond, t2, p.els)
        for e2 in _scope_moves(p.els):
            yield If(p.cond, p.then, e2)


def struct_congruent(p: Process, q: Process, max_nodes: int = 20000) -> bool:
    """Decide the four-axiom congruence by breadth-first search over
    garbage-collected alpha-canonical representatives, expanding with the
    scope-commutation moves in both directions."""
    start, goal = normalize(p), normalize(q)
    if start == goal:
        return True
    seen = {start}
    frontier = [start]
    while frontier:
        if len(seen) > max_nodes:
            raise RuntimeError("struct_congruent: search budget exceeded")
        nxt = []
        for cur in frontier:
            for moved in _scope_moves(cur):
                m = normalize(moved)
                if m == goal:
                    return True
                if m not in seen:
                    seen.add(m)
                    nxt.append(m)
        frontier = nxt
    return False


# ---------------------------------------------------------------------
# transition labels


@dataclass(frozen=True)
class ActionLabel:
    kind: str  # tau | out | in | bout | inl | inr | outl | outr | inv | outv
    chan: Optional[str] = None
    obj: Optional[str] = None
    value: Optional[Value] = None

    def subject(self) -> str:
        if self.kind == "tau":
            raise ValueError("tau has no subject")
        return self.chan

    def is_tau(self) -> bool:
        return self.kind == "tau"

    def __str__(self) -> str:
        k = self.kind
        if k == "tau":
            return "tau"
        if k == "out":
            return f"{self.chan}!<{self.obj}>"
        if k == "in":
            return f"{self.chan}({self.obj})"
        if k == "bout":
            return f"(new {self.obj}){self.chan}!<{self.obj}>"
        if k == "inl":
            return f"{self.chan}.inl"
        if k == "inr":
            return f"{self.chan}.inr"
        if k == "outl":
            return f"{self.chan}!.inl"
        if k == "outr":
            return f"{self.chan}!.inr"
        if k == "inv":
            return f"{self.chan}({_short_value(self.value)})"
        if k == "outv":
            return f"{self.chan}!<{_short_value(self.value)}>"
        raise ValueError(k)


def _short_value(v: Value) -> str:
    if isinstance(v, BoolLit):
        return "true" if v.value else "false"
    if isinstance(v, StrLit):
        return "#" + v.bits
    return v.name


TAU = ActionLabel("tau")
