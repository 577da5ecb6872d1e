"""Primitive recursive arithmetic and first-order formulas over it.

Functions are built from zero, successor and projections by composition and
primitive recursion; a predicate is a function used as a characteristic, true
exactly when it returns 1.  First-order terms use named variables.  Formulas
are compared up to reduction of their closed subterms (the standard tables
give every closed term a numeral normal form).

Truth (top) and absurdity (bot) are distinguished 0-ary atoms; negation is
notation for implication into bot.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional


class ArithError(Exception):
    pass


class ArityMismatch(ArithError):
    pass


class UnboundTermVariable(ArithError):
    pass


class NotClosed(ArithError):
    pass


class NotPrenex(ArithError):
    pass


# ---------------------------------------------------------------------------
# primitive recursive functions


@dataclass(frozen=True)
class Zero:
    """Constant 0 of any arity."""

    arity: int = 0


@dataclass(frozen=True)
class Succ:
    @property
    def arity(self) -> int:
        return 1


@dataclass(frozen=True)
class Proj:
    n: int
    i: int  # 1-based
    def __post_init__(self):
        if not 1 <= self.i <= self.n:
            raise ArityMismatch(f"projection {self.i} of {self.n}")

    @property
    def arity(self) -> int:
        return self.n


@dataclass(frozen=True)
class Comp:
    outer: "PrimFn"
    inner: tuple["PrimFn", ...]

    def __post_init__(self):
        if len(self.inner) != self.outer.arity:
            raise ArityMismatch(
                f"composition feeds {len(self.inner)} arguments"
                f" to a function of arity {self.outer.arity}"
            )
        arities = {g.arity for g in self.inner}
        if len(arities) > 1:
            raise ArityMismatch(f"mixed inner arities {sorted(arities)}")

    @property
    def arity(self) -> int:
        return self.inner[0].arity if self.inner else 0


@dataclass(frozen=True)
class PRec:
    """f(0, xs) = base(xs); f(S y, xs) = step(y, f(y, xs), xs)."""

    base: "PrimFn"
    step: "PrimFn"

    def __post_init__(self):
        if self.step.arity != self.base.arity + 2:
            raise ArityMismatch(
                f"recursion step arity {self.step.arity},"
                f" wanted {self.base.arity + 2}"
            )

    @property
    def arity(self) -> int:
        return self.base.arity + 1


PrimFn = Zero | Succ | Proj | Comp | PRec


def eval_prim(f: PrimFn, args: Iterable[int]) -> int:
    args = tuple(args)
    if len(args) != f.arity:
        raise ArityMismatch(f"{len(args)} arguments for arity {f.arity}")
    match f:
        case Zero():
            return 0
        case Succ():
            return args[0] + 1
        case Proj(_, i):
            return args[i - 1]
        case Comp(outer, inner):
            return eval_prim(outer, [eval_prim(g, args) for g in inner])
        case PRec(base, step):
            # iterative, so towers of recursion do not hit Python's stack
            y, rest = args[0], args[1:]
            acc = eval_prim(base, rest)
            for k in range(y):
                acc = eval_prim(step, (k, acc) + rest)
            return acc
    raise ArithError(f"not a primitive recursive function: {f!r}")


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    char: PrimFn  # truth of the atom is char(args) == 1

    def __post_init__(self):
        if self.char.arity != self.arity:
            raise ArityMismatch(
                f"relation {self.name}: characteristic arity {self.char.arity}"
                f" != {self.arity}"
            )

    def holds(self, args: Iterable[int]) -> bool:
        return eval_prim(self.char, args) == 1


# ---------------------------------------------------------------------------
# the standard tables

_one = Comp(Succ(), (Zero(),))  # 0-ary constant 1
_pred = PRec(Zero(), Proj(2, 1))
# msub(y, x) = x monus y
_msub = PRec(Proj(1, 1), Comp(_pred, (Proj(3, 2),)))
# monus(x, y) = x monus y
_monus = Comp(_msub, (Proj(2, 2), Proj(2, 1)))
_is_zero = PRec(_one, Zero(2))

ADD = PRec(Proj(1, 1), Comp(Succ(), (Proj(3, 2),)))
MUL = PRec(Zero(1), Comp(ADD, (Proj(3, 2), Proj(3, 3))))

_le_char = Comp(_is_zero, (_monus,))  # x <= y  iff  x monus y == 0
_lt_char = Comp(_le_char, (Comp(Succ(), (Proj(2, 1),)), Proj(2, 2)))
_eq_char = Comp(MUL, (_le_char, Comp(_le_char, (Proj(2, 2), Proj(2, 1)))))

FUNCTIONS: dict[str, PrimFn] = {
    "0": Zero(0),
    "S": Succ(),
    "+": ADD,
    "*": MUL,
    "pred": _pred,
    "monus": _monus,
}

RELATIONS: dict[str, Relation] = {
    "=": Relation("=", 2, _eq_char),
    "<": Relation("<", 2, _lt_char),
    "<=": Relation("<=", 2, _le_char),
    "top": Relation("top", 0, _one),
    "bot": Relation("bot", 0, Zero(0)),
}


# ---------------------------------------------------------------------------
# first-order terms


@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class TApp:
    fn: str
    args: tuple["ATerm", ...] = ()


ATerm = TVar | TApp


def tnum(n: int) -> ATerm:
    """Numeral S^n(0) as a first-order term."""
    t: ATerm = TApp("0")
    for _ in range(n):
        t = TApp("S", (t,))
    return t


def aterm_vars(t: ATerm) -> frozenset[str]:
    match t:
        case TVar(name):
            return frozenset((name,))
        case TApp(_, args):
            return frozenset().union(*(aterm_vars(a) for a in args)) if args else frozenset()
    raise ArithError(f"not a term: {t!r}")


def reduce_aterm(t: ATerm, env: Mapping[str, int] = {}, fns: Mapping[str, PrimFn] = FUNCTIONS) -> int:
    """Value of t under env.  Raises UnboundTermVariable on a free variable."""
    match t:
        case TVar(name):
            if name in env:
                return env[name]
            raise UnboundTermVariable(name)
        case TApp(fn, args):
            if fn not in fns:
                raise ArithError(f"unknown function symbol {fn!r}")
            return eval_prim(fns[fn], [reduce_aterm(a, env, fns) for a in args])
    raise ArithError(f"not a term: {t!r}")


def subst_aterm(t: ATerm, var: str, rep: ATerm) -> ATerm:
    match t:
        case TVar(name):
            return rep if name == var else t
        case TApp(fn, args):
            return TApp(fn, tuple(subst_aterm(a, var, rep) for a in args))
    raise ArithError(f"not a term: {t!r}")


def norm_aterm(t: ATerm, fns: Mapping[str, PrimFn] = FUNCTIONS) -> ATerm:
    """Collapse every closed subterm to its numeral."""
    match t:
        case TVar():
            return t
        case TApp(fn, args):
            nargs = tuple(norm_aterm(a, fns) for a in args)
            if all(not aterm_vars(a) for a in nargs):
                return tnum(reduce_aterm(TApp(fn, nargs), {}, fns))
            return TApp(fn, nargs)
    raise ArithError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple[ATerm, ...] = ()


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imply:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Atom | And | Or | Imply | Forall | Exists

TOP = Atom("top")
BOT = Atom("bot")


def neg(a: Formula) -> Formula:
    return Imply(a, BOT)


def free_vars(f: Formula) -> frozenset[str]:
    match f:
        case Atom(_, args):
            return frozenset().union(*(aterm_vars(t) for t in args)) if args else frozenset()
        case And(a, b) | Or(a, b) | Imply(a, b):
            return free_vars(a) | free_vars(b)
        case Forall(var, body) | Exists(var, body):
            return free_vars(body) - {var}
    raise ArithError(f"not a formula: {f!r}")


def _fresh(base: str, taken: frozenset[str]) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def subst_formula(f: Formula, var: str, rep: ATerm) -> Formula:
    """Capture-avoiding substitution f[var := rep]."""
    match f:
        case Atom(rel, args):
            return Atom(rel, tuple(subst_aterm(t, var, rep) for t in args))
        case And(a, b):
            return And(subst_formula(a, var, rep), subst_formula(b, var, rep))
        case Or(a, b):
            return Or(subst_formula(a, var, rep), subst_formula(b, var, rep))
        case Imply(a, b):
            return Imply(subst_formula(a, var, rep), subst_formula(b, var, rep))
        case Forall(v, body) | Exists(v, body):
            klass = type(f)
            if v == var:
                return f
            if v in aterm_vars(rep) and var in free_vars(body):
                w = _fresh(v, aterm_vars(rep) | free_vars(body))
                body = subst_formula(body, v, TVar(w))
                v = w
            return klass(v, subst_formula(body, var, rep))
    raise ArithError(f"not a formula: {f!r}")


def norm_formula(f: Formula, fns: Mapping[str, PrimFn] = FUNCTIONS) -> Formula:
    """Normalize all first-order terms inside f (closed subterms to numerals)."""
    match f:
        case Atom(rel, args):
            return Atom(rel, tuple(norm_aterm(t, fns) for t in args))
        case And(a, b):
            return And(norm_formula(a, fns), norm_formula(b, fns))
        case Or(a, b):
            return Or(norm_formula(a, fns), norm_formula(b, fns))
        case Imply(a, b):
            return Imply(norm_formula(a, fns), norm_formula(b, fns))
        case Forall(v, body):
            return Forall(v, norm_formula(body, fns))
        case Exists(v, body):
            return Exists(v, norm_formula(body, fns))
    raise ArithError(f"not a formula: {f!r}")


def formulas_equal(a: Formula, b: Formula, fns: Mapping[str, PrimFn] = FUNCTIONS) -> bool:
    return norm_formula(a, fns) == norm_formula(b, fns)


def atomic_truth(
    f: Formula,
    rels: Mapping[str, Relation] = RELATIONS,
    fns: Mapping[str, PrimFn] = FUNCTIONS,
) -> bool:
    """Truth of a closed atom.  Raises NotClosed on anything else."""
    if not isinstance(f, Atom):
        raise NotClosed(f"not atomic: {f!r}")
    if free_vars(f):
        raise NotClosed(f"free variables {sorted(free_vars(f))}")
    if f.rel not in rels:
        raise ArithError(f"unknown relation {f.rel!r}")
    rel = rels[f.rel]
    if len(f.args) != rel.arity:
        raise ArityMismatch(f"{f.rel} expects {rel.arity} arguments, got {len(f.args)}")
    return rel.holds([reduce_aterm(t, {}, fns) for t in f.args])


# ---------------------------------------------------------------------------
# arithmetical hierarchy


@dataclass(frozen=True)
class HierLevel:
    cls: str  # "sigma" or "pi"; level 0 is reported as sigma (the classes agree)
    level: int

    def __str__(self) -> str:
        if self.level == 0:
            return "sigma0=pi0"
        return f"{self.cls}{self.level}"


def _quantifier_free(f: Formula) -> bool:
    match f:
        case Atom():
            return True
        case And(a, b) | Or(a, b) | Imply(a, b):
            return _quantifier_free(a) and _quantifier_free(b)
        case _:
            return False


def _prefix(f: Formula) -> Optional[tuple[list[tuple[str, str]], Formula]]:
    """Quantifier prefix [(kind, var)...] and matrix, or None if not prenex."""
    prefix: list[tuple[str, str]] = []
    while True:
        match f:
            case Forall(v, body):
                prefix.append(("forall", v))
                f = body
            case Exists(v, body):
                prefix.append(("exists", v))
                f = body
            case _:
                break
    return (prefix, f) if _quantifier_free(f) else None


def classify(f: Formula) -> Optional[HierLevel]:
    """Least level in the syntactic hierarchy, None when f is not prenex.

    Same-kind quantifier blocks collapse, so forall x forall y atom is pi1.
    """
    p = _prefix(f)
    if p is None:
        return None
    prefix, _ = p
    blocks: list[str] = []
    for kind, _ in prefix:
        if not blocks or blocks[-1] != kind:
            blocks.append(kind)
    if not blocks:
        return HierLevel("sigma", 0)
    cls = "sigma" if blocks[0] == "exists" else "pi"
    return HierLevel(cls, len(blocks))


def dual(f: Formula) -> Formula:
    """Swap quantifiers and negate the matrix.  Prenex inputs only."""
    p = _prefix(f)
    if p is None:
        raise NotPrenex(f"dual of a non-prenex formula: {f!r}")
    match f:
        case Forall(v, body):
            return Exists(v, dual(body))
        case Exists(v, body):
            return Forall(v, dual(body))
        case _:
            return neg(f)


def classify_dual(f: Formula) -> tuple[HierLevel, Formula]:
    """Level and dual together; raises NotPrenex off the prenex fragment."""
    level = classify(f)
    if level is None:
        raise NotPrenex(f"not prenex: {f!r}")
    return level, dual(f)
