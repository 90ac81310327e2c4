import itertools
import random

import pytest

from causalogic.formulas import (
    And,
    Atom,
    BasicCausal,
    LanguageClass,
    Not,
    TRUE,
    box,
    classify_language,
    diamond,
    parse_formula,
    validate_formula,
)
from causalogic.model import depends_on, is_uniquely_solvable, solutions, submodel
from causalogic.modeltext import parse_signature
from causalogic.semantics import (
    affects,
    eval_inner,
    holds,
    rewrite_to_uniq,
)

from modelspaces import all_models
from randgen import random_formula, random_leaf

SIG_A = parse_signature("signature { endogenous X { 0 1 } endogenous Y { 0 1 } }")
TERNARY = parse_signature("signature { endogenous X { -1 0 1 } endogenous Y { -1 0 1 } }")


# --- eval_inner ---------------------------------------------------------------


def test_eval_inner_reads_intervened_value():
    assert eval_inner({"Y": "-1"}, (("X", "1"),), (), Atom("X", (), "1"))
    assert not eval_inner({"Y": "-1"}, (("X", "1"),), (), Atom("X", (), "0"))


def test_eval_inner_reads_solution_value():
    assert eval_inner({"Y": "-1"}, (("X", "1"),), (), Atom("Y", (), "-1"))


def test_eval_inner_constants_and_connectives():
    sol = {"Y": "0"}
    assert eval_inner(sol, (), (), TRUE)
    body = And(Atom("Y", (), "0"), Not(Atom("Y", (), "1")))
    assert eval_inner(sol, (), (), body)


# --- holds ---------------------------------------------------------------------


def test_holds_on_two_fixed_point_model(copy_cycle):
    f = parse_formula("[](X()=0 | X()=1) & !([](X()=0)) & !([](X()=1))", copy_cycle.signature)
    assert holds(copy_cycle, f).verdict

    g = parse_formula("!([](X()=1)) & !([](!(X()=1)))", copy_cycle.signature)
    assert holds(copy_cycle, g).verdict


def test_holds_vacuous_box_and_empty_diamond(no_fixpoint):
    assert holds(no_fixpoint, parse_formula("[](false)", no_fixpoint.signature)).verdict
    assert not holds(no_fixpoint, parse_formula("<>(true)", no_fixpoint.signature)).verdict


def test_holds_trace_one_entry_per_leaf(unique_cycle):
    f = parse_formula("[X<-1](Y()=-1) & !([](X()=1))", unique_cycle.signature)
    report = holds(unique_cycle, f)
    assert report.verdict
    assert len(report.leaves) == 2
    assert report.leaves[0].solution_count == 1
    assert report.leaves[0].verdict


def test_holds_box_false_carries_witness(copy_cycle):
    report = holds(copy_cycle, parse_formula("[](X()=0)", copy_cycle.signature))
    assert not report.verdict
    assert report.leaves[0].witness == {"X": "1", "Y": "1"}


def test_box_true_always_and_diamond_true_iff_solvable(unique_cycle, no_fixpoint):
    for model in (unique_cycle, no_fixpoint):
        assert holds(model, parse_formula("[X<-1](true)", model.signature)).verdict
        nonempty = bool(solutions(submodel(model, (("X", "1"),), ())))
        got = holds(model, parse_formula("<X<-1>(true)", model.signature)).verdict
        assert got == nonempty


def test_duality_diamond_equals_negated_box(ring3, copy_cycle, no_fixpoint):
    rng = random.Random(7)
    for model in (ring3, copy_cycle, no_fixpoint):
        for _ in range(40):
            leaf = random_leaf(rng, model.signature)
            dia = BasicCausal(leaf.intervention, True, leaf.body)
            dual = Not(BasicCausal(leaf.intervention, False, Not(leaf.body)))
            assert holds(model, dia).verdict == holds(model, dual).verdict


def test_box_conjunction_distributes_in_all_models():
    # distribution over & is truth-preserving in every model, not only the
    # uniquely solvable ones
    rng = random.Random(21)
    for model in all_models(SIG_A):
        for _ in range(6):
            leaf = random_leaf(rng, SIG_A, inner_depth=1)
            other = random_leaf(rng, SIG_A, inner_depth=1)
            joint = BasicCausal(leaf.intervention, False, And(leaf.body, other.body))
            split = And(
                BasicCausal(leaf.intervention, False, leaf.body),
                BasicCausal(leaf.intervention, False, other.body),
            )
            try:
                validate_formula(joint, SIG_A)
            except Exception:
                continue  # mixed contexts; not a legal joint body
            assert holds(model, joint).verdict == holds(model, split).verdict


# --- rewrite_to_uniq ------------------------------------------------------------


def test_rewrite_distributes_disjunction():
    f = parse_formula("[Y<-1](X()=0 | X()=1)", SIG_A)
    got = rewrite_to_uniq(f, SIG_A)
    assert got == parse_formula("[Y<-1](X()=0) | [Y<-1](X()=1)", SIG_A)


def test_rewrite_negated_atom_uses_domain_complement():
    f = parse_formula("[Y<-1](!(X()=1))", SIG_A)
    assert rewrite_to_uniq(f, SIG_A) == parse_formula("[Y<-1](X()=0)", SIG_A)
    g = parse_formula("[Y<-1](!(X()=0))", TERNARY)
    assert rewrite_to_uniq(g, TERNARY) == parse_formula(
        "[Y<-1](X()=-1) | [Y<-1](X()=1)", TERNARY
    )


def test_rewrite_single_atom_box_is_fixed_point():
    f = parse_formula("[Y<-1](X()=0)", SIG_A)
    assert rewrite_to_uniq(f, SIG_A) == f


def test_rewrite_pulls_compound_negation_outside():
    f = parse_formula("[](!(X()=1 & Y()=1))", SIG_A)
    got = rewrite_to_uniq(f, SIG_A)
    assert got == Not(And(box((), Atom("X", (), "1")), box((), Atom("Y", (), "1"))))


def test_rewrite_output_is_in_uniq_language():
    rng = random.Random(4242)
    for _ in range(120):
        f = random_formula(rng, SIG_A)
        out = rewrite_to_uniq(f, SIG_A)
        validate_formula(out, SIG_A)
        assert classify_language(out) in (LanguageClass.GP, LanguageClass.UNIQ)


def test_rewrite_preserves_truth_on_uniquely_solvable_models():
    rng = random.Random(99)
    uniq_models = [m for m in all_models(SIG_A) if is_uniquely_solvable(m)[0]]
    assert uniq_models
    formulas = [random_formula(rng, SIG_A) for _ in range(60)]
    for model in uniq_models:
        for f in formulas:
            assert holds(model, f).verdict == holds(model, rewrite_to_uniq(f, SIG_A)).verdict


def test_rewrite_equivalence_fails_beyond_unique_solutions(copy_cycle):
    sig = copy_cycle.signature
    f_or = parse_formula("[](X()=0 | X()=1)", sig)
    assert holds(copy_cycle, f_or).verdict
    assert not holds(copy_cycle, rewrite_to_uniq(f_or, sig)).verdict

    f_neg = parse_formula("[](!(X()=1 & Y()=1))", sig)
    assert not holds(copy_cycle, f_neg).verdict
    assert holds(copy_cycle, rewrite_to_uniq(f_neg, sig)).verdict


# --- affects --------------------------------------------------------------------


def test_mutual_affects_on_unique_cycle(unique_cycle):
    ok, witness = affects(unique_cycle, "X", "Y")
    assert ok
    assert witness.base_value != witness.changed_value
    assert affects(unique_cycle, "Y", "X")[0]


def test_ring_affects_cyclically(ring3):
    assert affects(ring3, "X0", "X1")[0]
    assert affects(ring3, "X1", "X2")[0]
    assert affects(ring3, "X2", "X0")[0]
    assert not affects(ring3, "X1", "X0")[0]


def test_nothing_affects_a_constant_variable(chain):
    assert not affects(chain, "Y", "X")[0]
    assert affects(chain, "X", "Y")[0]


def test_affects_witness_replays(unique_cycle):
    ok, w = affects(unique_cycle, "X", "Y")
    assert ok
    base = solutions(submodel(unique_cycle, w.pinned, w.context))
    moved = solutions(submodel(unique_cycle, w.pinned + (("X", w.src_value),), w.context))
    assert all(s["Y"] == w.base_value for s in base) or not base
    assert all(s.get("Y", w.changed_value) == w.changed_value for s in moved) or not moved


def test_depends_on_implies_affects_on_uniquely_solvable_models():
    for model in all_models(SIG_A):
        if not is_uniquely_solvable(model)[0]:
            continue
        for dst, src in itertools.permutations(model.signature.endogenous, 2):
            if depends_on(model, dst, src):
                assert affects(model, src, dst)[0]
