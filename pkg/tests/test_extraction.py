"""Realizer types, decoration, and extraction of closed realizers."""

import random

import pytest

from realizer import arith, corpus
from realizer import deduction as dd
from realizer import extraction as ex
from realizer import monads as mn
from realizer import terms as tm
from realizer.arith import And, Atom, Exists, Forall, Imply, Or, TVar, tnum
from realizer.deduction import Derivation, Sequent
from realizer.extraction import computation_type, decorate, em_realizer, extract, realizer_type
from realizer.learning import Exceptional, Regular, State, run_realizer, spot_check_realizes
from realizer.terms import EX, NAT, STATE, UNIT, TArrow, TProd, TSum, typecheck

import conftest as gen

ALL = (mn.IDENTITY, mn.EXCEPTION, mn.INTERACTIVE)
RELS = arith.RELATIONS


# ---------------------------------------------------------------------------
# the type translation


@pytest.mark.parametrize("m", ALL, ids=lambda m: m.name)
def test_realizer_type_table(m):
    atom = Atom("top")
    assert realizer_type(atom, m) == UNIT
    assert realizer_type(And(atom, atom), m) == TProd(UNIT, UNIT)
    assert realizer_type(Or(atom, atom), m) == TSum(UNIT, UNIT)
    assert realizer_type(Imply(atom, atom), m) == TArrow(UNIT, m.type_op(UNIT))
    assert realizer_type(Forall("x", atom), m) == TArrow(NAT, m.type_op(UNIT))
    assert realizer_type(Exists("x", atom), m) == TProd(NAT, UNIT)
    assert computation_type(atom, m) == m.type_op(UNIT)


def test_realizer_type_nests_through_connectives():
    f = Imply(Exists("x", Atom("top")), Forall("y", And(Atom("top"), Atom("bot"))))
    m = mn.INTERACTIVE
    inner = TProd(UNIT, UNIT)
    want = TArrow(TProd(NAT, UNIT), m.type_op(TArrow(NAT, m.type_op(inner))))
    assert realizer_type(f, m) == want


# ---------------------------------------------------------------------------
# decoration of open derivations


@pytest.mark.parametrize("seed", range(30))
def test_decorations_typecheck_in_context(seed):
    rng = random.Random(seed)
    d = gen.decoratable_derivation(rng)
    has_em = any(isinstance(n.rule, dd.EM) for _, n in dd.walk(d))
    for m in (mn.INTERACTIVE,) if has_em else ALL:
        body = decorate(d, m)
        ctx = tuple(realizer_type(f, m) for _, f in reversed(d.conclusion.context))
        assert typecheck(body, ctx) == computation_type(d.conclusion.goal, m)


def test_extract_closes_over_the_context():
    rng = random.Random(5)
    d = gen.open_derivation(rng)
    m = mn.EXCEPTION
    t = extract(d, m)
    want = computation_type(d.conclusion.goal, m)
    for _, f in reversed(d.conclusion.context):
        want = TArrow(realizer_type(f, m), want)
    assert typecheck(t) == want


def test_extract_rejects_free_term_variables():
    x = TVar("x")
    d = Derivation(dd.AtomPost("refl"), Sequent((), Atom("=", (x, x))))
    with pytest.raises(ex.OpenDerivation):
        extract(d)


def test_extract_checks_first():
    bogus = Derivation(dd.AtomI(), Sequent((), Atom("=", (tnum(0), tnum(1)))))
    with pytest.raises(dd.DeductionError):
        extract(bogus)


def test_induction_has_no_direct_decoration():
    d = gen.ind_derivation(random.Random(0))
    with pytest.raises(ex.UnsupportedRule):
        decorate(d, mn.INTERACTIVE)


# ---------------------------------------------------------------------------
# running extracted realizers (no classical rules)


@pytest.mark.parametrize("seed", range(25))
def test_ha_realizers_run_regular_and_realize(seed):
    rng = random.Random(200 + seed)
    d, witness = gen.sigma01_derivation(rng, cuts=2)
    t = extract(d, mn.INTERACTIVE)
    out = run_realizer(t, State.empty(), RELS)
    assert isinstance(out, Regular)
    verdict = spot_check_realizes(out.value, d.conclusion.goal, State.empty(), RELS)
    assert verdict.ok, verdict
    if witness is not None:
        head, args = tm.spine(out.value)
        assert tm.as_numeral(args[0]) == witness


def _guessable(d):
    """Every EM matrix has the quantified variable as its own last argument."""
    for _, node in dd.walk(d):
        if isinstance(node.rule, dd.EM):
            univ = node.premisses[0].conclusion.lookup(node.rule.label)
            args = univ.body.args
            if not args or args[-1] != TVar(univ.var):
                return False
    return True


def test_corpus_realizers_run_regular():
    from realizer import normalizer

    pf = corpus.corpus_file()
    extracted = 0
    for name, d in pf.derivs.items():
        if not _guessable(d):
            with pytest.raises(ex.UnsupportedRule):
                extract(d, mn.INTERACTIVE, pf.rels, pf.fns)
            continue
        if any(isinstance(n.rule, dd.Ind) for _, n in dd.walk(d)):
            d = normalizer.normalize_derivation(d, rels=pf.rels, fns=pf.fns)
        t = extract(d, mn.INTERACTIVE, pf.rels, pf.fns)
        out = run_realizer(t, State.empty(), pf.rels)
        assert isinstance(out, (Regular, Exceptional)), name
        extracted += 1
        if isinstance(d.conclusion.goal, Exists) and isinstance(out, Regular):
            assert spot_check_realizes(out.value, d.conclusion.goal, State.empty(),
                                       pf.rels, fns=pf.fns).ok, name
    assert extracted >= 10


# ---------------------------------------------------------------------------
# the excluded-middle guess


def test_em_realizer_type():
    t = em_realizer("<", (tm.numeral(2),))
    left = TArrow(NAT, mn.INTERACTIVE.type_op(UNIT))
    right = TProd(NAT, TArrow(UNIT, mn.INTERACTIVE.type_op(UNIT)))
    assert typecheck(t) == TArrow(STATE, TSum(TSum(left, right), EX))


def test_em_realizer_needs_the_interactive_monad():
    for m in (mn.IDENTITY, mn.EXCEPTION):
        with pytest.raises(ex.UnsupportedRule):
            em_realizer("<", (tm.numeral(2),), m)


def test_em_decoration_rejects_other_monads():
    d = gen.em_derivation(random.Random(4))
    for m in (mn.IDENTITY, mn.EXCEPTION):
        with pytest.raises(ex.UnsupportedRule):
            decorate(d, m)


def test_em_needs_the_variable_last():
    univ = Forall("y", Atom("<=", (TVar("y"), tnum(3))))
    goal = Exists("x", Atom("=", (TVar("x"), tnum(0))))
    inst = Atom("=", (tnum(0), tnum(0)))
    cl = (("u", univ),)
    cr = (("u", arith.neg(Atom("<=", (TVar("y"), tnum(3))))),)
    left = Derivation(dd.ExistsI(tnum(0)), Sequent(cl, goal),
                      (Derivation(dd.AtomI(), Sequent(cl, inst)),))
    right = Derivation(dd.ExistsI(tnum(0)), Sequent(cr, goal),
                       (Derivation(dd.AtomI(), Sequent(cr, inst)),))
    d = Derivation(dd.EM("u", "y"), Sequent((), goal), (left, right))
    dd.check_derivation(d)
    with pytest.raises(ex.UnsupportedRule):
        decorate(d, mn.INTERACTIVE)


def test_term_to_nat():
    t = ex.term_to_nat(arith.TApp("+", (tnum(1), tnum(2))), (), arith.FUNCTIONS)
    assert tm.normalize(t) == tm.numeral(3)
    with pytest.raises(ex.ExtractionError):
        ex.term_to_nat(TVar("x"), (), arith.FUNCTIONS)
    with pytest.raises(ex.ExtractionError):
        ex.term_to_nat(arith.TApp("exp", (tnum(1),)), (), arith.FUNCTIONS)
