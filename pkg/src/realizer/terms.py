"""Simply typed terms with primitive recursion, sums, and effect constants.

The object language is a lambda calculus over the ground types Unit, Nat,
State and Ex, closed under arrows, products and sums.  Binders use de Bruijn
indices.  Constants carry their type parameters explicitly; nothing is
inferred.  Reduction is weak (never under a binder) and leftmost-innermost,
with guarded recursion: ``rec`` unfolds only while its numeral argument stays
below the guard, and otherwise collapses to a type-directed dummy value.

``query``/``eval``/``exc`` constants are inert here unless an oracle is
supplied to :func:`step`/:func:`normalize`; the learning module provides the
oracle that interprets them against an ambient knowledge state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

DEFAULT_FUEL = 10**6

INFINITY = None  # rec guard for unbounded unfolding


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class TUnit:
    def __str__(self) -> str:
        return "unit"


@dataclass(frozen=True)
class TNat:
    def __str__(self) -> str:
        return "nat"


@dataclass(frozen=True)
class TState:
    def __str__(self) -> str:
        return "state"


@dataclass(frozen=True)
class TEx:
    def __str__(self) -> str:
        return "ex"


@dataclass(frozen=True)
class TArrow:
    dom: "Ty"
    cod: "Ty"

    def __str__(self) -> str:
        return f"(-> {self.dom} {self.cod})"


@dataclass(frozen=True)
class TProd:
    left: "Ty"
    right: "Ty"

    def __str__(self) -> str:
        return f"(* {self.left} {self.right})"


@dataclass(frozen=True)
class TSum:
    left: "Ty"
    right: "Ty"

    def __str__(self) -> str:
        return f"(+ {self.left} {self.right})"


Ty = TUnit | TNat | TState | TEx | TArrow | TProd | TSum

UNIT = TUnit()
NAT = TNat()
STATE = TState()
EX = TEx()


def arrows(*tys: Ty) -> Ty:
    """Right-nested arrow type from a list ``A1 ... An B``."""
    out = tys[-1]
    for ty in reversed(tys[:-1]):
        out = TArrow(ty, out)
    return out


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Lam:
    param: Ty
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Num:
    """Literal natural; expands to the canonical succ chain in one step."""

    value: int


@dataclass(frozen=True)
class Const:
    kind: str
    tys: tuple[Ty, ...] = ()
    # extra payload: rec guard (int | None), relation id for query/eval,
    # function symbol for prim, (rel, args, witness) for exc
    tag: object = None


Term = Var | Lam | App | Num | Const

# constant kinds
K_UNIT = "unit"
K_ZERO = "zero"
K_SUCC = "succ"
K_PAIR = "pair"
K_PRL = "prl"
K_PRR = "prr"
K_INL = "inl"
K_INR = "inr"
K_CASE = "case"
K_REC = "rec"
K_EXMERGE = "exmerge"
K_QUERY = "query"
K_EVAL = "eval"
K_PRIM = "prim"
K_EXC = "exc"
K_STATEREP = "staterep"

unit_const = Const(K_UNIT)
zero = Const(K_ZERO)
succ = Const(K_SUCC)
staterep = Const(K_STATEREP)


def pair_c(a: Ty, b: Ty) -> Const:
    return Const(K_PAIR, (a, b))


def prl_c(a: Ty, b: Ty) -> Const:
    return Const(K_PRL, (a, b))


def prr_c(a: Ty, b: Ty) -> Const:
    return Const(K_PRR, (a, b))


def inl_c(a: Ty, b: Ty) -> Const:
    return Const(K_INL, (a, b))


def inr_c(a: Ty, b: Ty) -> Const:
    return Const(K_INR, (a, b))


def case_c(a: Ty, b: Ty, c: Ty) -> Const:
    return Const(K_CASE, (a, b, c))


def rec_c(result: Ty, guard: Optional[int] = INFINITY) -> Const:
    """Guarded recursor; ``guard=None`` is the unbounded form."""
    return Const(K_REC, (result,), guard)


exmerge_const = Const(K_EXMERGE)


def query_c(rel: str, arity: int) -> Const:
    return Const(K_QUERY, (), (rel, arity))


def eval_c(rel: str, arity: int) -> Const:
    return Const(K_EVAL, (), (rel, arity))


def prim_c(symbol: str, fn) -> Const:
    """Opaque constant for a primitive recursive function symbol.

    fn is an arith.PrimFn; it rides along in the tag so saturated
    applications can be evaluated without a symbol registry.
    """
    return Const(K_PRIM, (), (symbol, fn))


def exc_const(rel: str, args: tuple[int, ...], witness: int) -> Const:
    return Const(K_EXC, (), (rel, args, witness))


def app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def numeral(n: int) -> Term:
    if n < 0:
        raise ValueError(f"numeral of negative {n}")
    t: Term = zero
    for _ in range(n):
        t = App(succ, t)
    return t


def as_numeral(t: Term) -> Optional[int]:
    """The natural n when t is succ^n(zero) (or a literal), else None."""
    n = 0
    while True:
        match t:
            case Const(kind="zero"):
                return n
            case Num(value):
                return n + value
            case App(Const(kind="succ"), inner):
                n += 1
                t = inner
            case _:
                return None


# ---------------------------------------------------------------------------
# errors


class TermError(Exception):
    pass


class UnboundVariable(TermError):
    def __init__(self, index: int, depth: int):
        super().__init__(f"unbound variable {index} at binder depth {depth}")
        self.index = index
        self.depth = depth


class TypeMismatch(TermError):
    def __init__(self, expected, found, where: str):
        super().__init__(f"expected {expected}, found {found} in {where}")
        self.expected = expected
        self.found = found
        self.where = where


class IllTyped(TermError):
    pass


class FuelExhausted(TermError):
    def __init__(self, steps: int, term: Term):
        super().__init__(f"no normal form within {steps} steps")
        self.steps = steps
        self.term = term


# ---------------------------------------------------------------------------
# typing

# TyCtx: index 0 is the innermost binder
TyCtx = tuple[Ty, ...]


def const_type(c: Const) -> Ty:
    match c.kind:
        case "unit":
            return UNIT
        case "zero":
            return NAT
        case "succ":
            return TArrow(NAT, NAT)
        case "pair":
            a, b = c.tys
            return arrows(a, b, TProd(a, b))
        case "prl":
            a, b = c.tys
            return TArrow(TProd(a, b), a)
        case "prr":
            a, b = c.tys
            return TArrow(TProd(a, b), b)
        case "inl":
            a, b = c.tys
            return TArrow(a, TSum(a, b))
        case "inr":
            a, b = c.tys
            return TArrow(b, TSum(a, b))
        case "case":
            a, b, z = c.tys
            return arrows(TSum(a, b), TArrow(a, z), TArrow(b, z), z)
        case "rec":
            (res,) = c.tys
            return arrows(arrows(NAT, TArrow(NAT, res), res), NAT, res)
        case "exmerge":
            return arrows(EX, EX, EX)
        case "query":
            _, arity = c.tag
            return arrows(STATE, *([NAT] * arity), TSum(UNIT, NAT))
        case "eval":
            _, arity = c.tag
            return arrows(*([NAT] * (arity + 1)), TSum(UNIT, EX))
        case "prim":
            _, fn = c.tag
            return arrows(*([NAT] * fn.arity), NAT)
        case "exc":
            return EX
        case "staterep":
            return STATE
    raise IllTyped(f"unknown constant kind {c.kind!r}")


def typecheck(t: Term, ctx: TyCtx = ()) -> Ty:
    """Type of t in ctx.  Raises UnboundVariable or TypeMismatch."""
    match t:
        case Var(index):
            if 0 <= index < len(ctx):
                return ctx[index]
            raise UnboundVariable(index, len(ctx))
        case Lam(param, body):
            return TArrow(param, typecheck(body, (param,) + ctx))
        case App(fn, arg):
            fty = typecheck(fn, ctx)
            aty = typecheck(arg, ctx)
            if not isinstance(fty, TArrow):
                raise TypeMismatch("a function type", fty, f"application head {fn}")
            if fty.dom != aty:
                raise TypeMismatch(fty.dom, aty, f"argument {arg}")
            return fty.cod
        case Num(value):
            if value < 0:
                raise IllTyped("negative literal")
            return NAT
        case Const():
            return const_type(t)
    raise IllTyped(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# de Bruijn machinery


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    match t:
        case Var(index):
            return Var(index + by) if index >= cutoff else t
        case Lam(param, body):
            return Lam(param, shift(body, by, cutoff + 1))
        case App(fn, arg):
            return App(shift(fn, by, cutoff), shift(arg, by, cutoff))
        case _:
            return t


def subst(t: Term, replacement: Term, index: int = 0) -> Term:
    """Substitute replacement for Var(index), adjusting indices."""
    match t:
        case Var(i):
            if i == index:
                return replacement
            return Var(i - 1) if i > index else t
        case Lam(param, body):
            return Lam(param, subst(body, shift(replacement, 1), index + 1))
        case App(fn, arg):
            return App(subst(fn, replacement, index), subst(arg, replacement, index))
        case _:
            return t


# ---------------------------------------------------------------------------
# dummy values (rec guard exhaustion)


def dummy(ty: Ty) -> Term:
    match ty:
        case TUnit():
            return unit_const
        case TNat():
            return zero
        case TArrow(dom, cod):
            return Lam(dom, dummy(cod))
        case TProd(a, b):
            return app(pair_c(a, b), dummy(a), dummy(b))
        case TSum(a, b):
            return App(inl_c(a, b), dummy(a))
    raise IllTyped(f"no dummy value at type {ty}")


# ---------------------------------------------------------------------------
# reduction

# An oracle decides query/eval applications; see learning.StateOracle.
Oracle = Callable[[Const, list[Term]], Optional[Term]]


def spine(t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def _delta(head: Term, args: list[Term], oracle: Optional[Oracle]) -> Optional[Term]:
    """Contract a head redex (beta or constant rule) at the root, if any."""
    if isinstance(head, Lam) and args:
        return app(subst(head.body, args[0]), *args[1:])
    if isinstance(head, Num):
        return numeral(head.value) if not args else app(numeral(head.value), *args)
    if not isinstance(head, Const):
        return None
    k = head.kind
    if k == "prl" and len(args) >= 1:
        h, a = spine(args[0])
        if isinstance(h, Const) and h.kind == "pair" and len(a) == 2:
            return app(a[0], *args[1:])
    elif k == "prr" and len(args) >= 1:
        h, a = spine(args[0])
        if isinstance(h, Const) and h.kind == "pair" and len(a) == 2:
            return app(a[1], *args[1:])
    elif k == "case" and len(args) >= 3:
        h, a = spine(args[0])
        if isinstance(h, Const) and h.kind in ("inl", "inr") and len(a) == 1:
            branch = args[1] if h.kind == "inl" else args[2]
            return app(branch, a[0], *args[3:])
    elif k == "rec" and len(args) >= 2:
        m = as_numeral(args[1])
        if m is not None:
            guard = head.tag
            (res,) = head.tys
            if guard is INFINITY or m < guard:
                return app(args[0], numeral(m), App(rec_c(res, m), args[0]), *args[2:])
            return app(dummy(res), *args[2:])
    elif k == "exmerge" and len(args) >= 2:
        if _is_ex_value(args[0]) and _is_ex_value(args[1]):
            return app(args[0], *args[2:])
    elif k == "prim":
        _, fn = head.tag
        arity = fn.arity
        if len(args) >= arity:
            vals = [as_numeral(a) for a in args[:arity]]
            if None not in vals:
                from . import arith

                out = arith.eval_prim(fn, vals)
                return app(numeral(out), *args[arity:])
    elif k in ("query", "eval") and oracle is not None:
        return oracle(head, args)
    return None


def _step(t: Term, oracle: Optional[Oracle], rightmost: bool) -> Optional[Term]:
    match t:
        case App():
            head, args = spine(t)
            order = range(len(args) - 1, -1, -1) if rightmost else range(len(args))
            # arguments first (innermost); the head of a spine is never an App
            for i in order:
                r = _step(args[i], oracle, rightmost)
                if r is not None:
                    return app(head, *args[:i], r, *args[i + 1 :])
            return _delta(head, args, oracle)
        case Num():
            return numeral(t.value)
        case _:
            return None


def step(t: Term, oracle: Optional[Oracle] = None, strategy: str = "left") -> Optional[Term]:
    """One innermost reduction step, or None when t is (weak) normal.

    strategy picks which argument of a spine to reduce first; "left" is the
    default used everywhere, "right" exists for confluence sampling.
    """
    if strategy not in ("left", "right"):
        raise ValueError(f"unknown strategy {strategy!r}")
    return _step(t, oracle, strategy == "right")


def _is_ex_value(t: Term) -> bool:
    return isinstance(t, Const) and t.kind == "exc"


def normalize(
    t: Term,
    fuel: int = DEFAULT_FUEL,
    oracle: Optional[Oracle] = None,
    strategy: str = "left",
) -> Term:
    """Reduce to weak normal form; FuelExhausted after fuel steps."""
    for _ in range(fuel):
        r = step(t, oracle, strategy)
        if r is None:
            return t
        t = r
    raise FuelExhausted(fuel, t)
