import itertools

import pytest

from causalogic.errors import BudgetExceeded, ValidationError
from causalogic.model import (
    Budget,
    CausalModel,
    ClassKind,
    EquationTable,
    Signature,
    apply_table,
    class_contains,
    classify,
    depends_on,
    is_recursive,
    is_uniquely_solvable,
    solutions,
    submodel,
    validate_model,
)


def brute_force_solutions(equations, domains, pinned):
    """Independent oracle: try every total assignment against plain dict tables.

    ``equations`` maps each variable to a python function of the full
    environment; completely separate from the engine's table machinery.
    """
    free = sorted(v for v in domains if v not in pinned)
    out = []
    for combo in itertools.product(*(domains[v] for v in free)):
        env = dict(pinned)
        env.update(zip(free, combo))
        if all(env[v] == fn(env) for v, fn in equations.items() if v not in pinned):
            out.append({v: env[v] for v in free})
    return out


# --- apply_table -----------------------------------------------------------


def test_apply_table_negating_equation(unique_cycle):
    table = unique_cycle.equations["Y"]
    assert apply_table(table, {"X": "1"}) == "-1"
    assert apply_table(table, {"X": "-1"}) == "1"
    assert apply_table(table, {"X": "0"}) == "0"


def test_apply_table_default_only():
    table = EquationTable("X", (), "0")
    assert apply_table(table, {"Y": "1"}) == "0"
    assert apply_table(table, {}) == "0"


def test_apply_table_ring_neighbour(ring3):
    table = ring3.equations["X1"]
    assert apply_table(table, {"X0": "1", "X2": "0"}) == "2"
    assert apply_table(table, {"X0": "0", "X2": "1"}) == "0"


def test_apply_table_missing_input_is_contract_error(unique_cycle):
    with pytest.raises(ValidationError):
        apply_table(unique_cycle.equations["Y"], {"Z": "1"})


# --- submodel --------------------------------------------------------------


def test_submodel_drops_equation_for_intervened(unique_cycle):
    sub = submodel(unique_cycle, (("X", "1"),), ())
    assert sub.free == ("Y",)
    assert sub.intervention == (("X", "1"),)


def test_submodel_everything_pinned(unique_cycle):
    sub = submodel(unique_cycle, (("X", "0"), ("Y", "0")), ())
    assert sub.free == ()
    assert solutions(sub) == [{}]


def test_submodel_empty_intervention(unique_cycle):
    sub = submodel(unique_cycle, (), ())
    assert sub.free == ("X", "Y")


def test_submodel_rejects_duplicates_and_bad_values(unique_cycle):
    with pytest.raises(ValidationError):
        submodel(unique_cycle, (("X", "1"), ("X", "0")), ())
    with pytest.raises(ValidationError):
        submodel(unique_cycle, (("X", "7"),), ())
    with pytest.raises(ValidationError):
        submodel(unique_cycle, (("U", "1"),), ())


def test_submodel_requires_total_context(exo_pair):
    with pytest.raises(ValidationError):
        submodel(exo_pair, (), ())
    sub = submodel(exo_pair, (), (("U", "0"),))
    assert sub.free == ("X", "Y")


# --- solutions -------------------------------------------------------------


def test_unique_cycle_unintervened_solution(unique_cycle):
    assert solutions(submodel(unique_cycle, (), ())) == [{"X": "0", "Y": "0"}]


def test_copy_cycle_two_solutions_canonical_order(copy_cycle):
    sols = solutions(submodel(copy_cycle, (), ()))
    assert sols == [{"X": "0", "Y": "0"}, {"X": "1", "Y": "1"}]


def test_no_fixpoint_has_empty_solution_set(no_fixpoint):
    # Oracle first: enumerate the four candidates directly.
    oracle = brute_force_solutions(
        {"X": lambda e: "1" if e["Y"] == "0" else "0", "Y": lambda e: e["X"]},
        {"X": ("0", "1"), "Y": ("0", "1")},
        {},
    )
    assert oracle == []
    assert solutions(submodel(no_fixpoint, (), ())) == []


def test_solutions_match_brute_force_on_exogenous_model(exo_pair):
    for u in ("0", "1"):
        oracle = brute_force_solutions(
            {
                "X": lambda e: "1" if e["U"] == "1" else "0",
                "Y": lambda e: "1" if (e["X"], e["U"]) == ("1", "1") else "0",
            },
            {"X": ("0", "1"), "Y": ("0", "1")},
            {"U": u},
        )
        assert solutions(submodel(exo_pair, (), (("U", u),))) == oracle


def test_every_solution_reevaluates_through_its_tables(unique_cycle, copy_cycle, ring3):
    for model in (unique_cycle, copy_cycle, ring3):
        sig = model.signature
        for var in sig.endogenous:
            for value in sig.domains[var]:
                sub = submodel(model, ((var, value),), ())
                for sol in solutions(sub):
                    env = {var: value, **sol}
                    for free in sub.free:
                        assert apply_table(model.equations[free], env) == sol[free]


# --- depends_on ------------------------------------------------------------


def test_mutual_dependence(unique_cycle):
    assert depends_on(unique_cycle, "X", "Y")
    assert depends_on(unique_cycle, "Y", "X")


def test_constant_table_depends_on_nothing(chain):
    assert not depends_on(chain, "X", "Y")
    assert depends_on(chain, "Y", "X")


def test_ring_reads_exactly_one_neighbour(ring3):
    deps = {
        x: {y for y in ring3.signature.endogenous if y != x and depends_on(ring3, x, y)}
        for x in ring3.signature.endogenous
    }
    assert deps == {"X0": {"X2"}, "X1": {"X0"}, "X2": {"X1"}}


def test_depends_on_rejects_bad_arguments(unique_cycle):
    with pytest.raises(ValidationError):
        depends_on(unique_cycle, "X", "X")
    with pytest.raises(ValidationError):
        depends_on(unique_cycle, "X", "Q")


# --- is_recursive ----------------------------------------------------------


def test_chain_is_recursive_with_order(chain):
    ok, order = is_recursive(chain)
    assert ok
    assert order == ("X", "Y")


def test_unique_cycle_not_recursive(unique_cycle):
    ok, cycle = is_recursive(unique_cycle)
    assert not ok
    assert set(cycle) == {"X", "Y"}


def test_ring_not_recursive_three_cycle(ring3):
    ok, cycle = is_recursive(ring3)
    assert not ok
    assert set(cycle) == {"X0", "X1", "X2"}


# --- is_uniquely_solvable / classify ---------------------------------------


def test_unique_cycle_uniquely_solvable(unique_cycle):
    ok, witness = is_uniquely_solvable(unique_cycle)
    assert ok and witness is None


def test_copy_cycle_counterexample(copy_cycle):
    ok, witness = is_uniquely_solvable(copy_cycle)
    assert not ok
    assert witness.intervention == ()
    assert witness.solution_count == 2


def test_ring_uniquely_solvable(ring3):
    ok, _ = is_uniquely_solvable(ring3)
    assert ok


def test_classification(unique_cycle, copy_cycle, chain, ring3, no_fixpoint):
    assert classify(unique_cycle).kind is ClassKind.UNIQUE_SOLUTIONS
    assert classify(copy_cycle).kind is ClassKind.GENERAL
    assert classify(chain).kind is ClassKind.RECURSIVE
    assert classify(chain).causal_order == ("X", "Y")
    assert classify(ring3).kind is ClassKind.UNIQUE_SOLUTIONS
    verdict = classify(no_fixpoint)
    assert verdict.kind is ClassKind.GENERAL
    assert verdict.counterexample.solution_count == 0


def test_class_containment_ranks():
    assert class_contains(ClassKind.GENERAL, ClassKind.RECURSIVE)
    assert class_contains(ClassKind.UNIQUE_SOLUTIONS, ClassKind.RECURSIVE)
    assert not class_contains(ClassKind.RECURSIVE, ClassKind.GENERAL)


def test_budget_exceeded_is_distinct_outcome(ring3):
    with pytest.raises(BudgetExceeded):
        is_uniquely_solvable(ring3, Budget(3))


# --- validate_model --------------------------------------------------------


def test_validate_accepts_fixture(unique_cycle):
    assert validate_model(unique_cycle) == []


def test_validate_rejects_out_of_domain_output_naming_row():
    sig = Signature((), ("X", "Y"), {"X": ("0", "1"), "Y": ("0", "1")})
    model = CausalModel(
        sig,
        {
            "X": EquationTable("X", ((( ("Y", "0"),), "2"),), "0"),
            "Y": EquationTable("Y", (), "0"),
        },
    )
    problems = validate_model(model)
    assert any("row 1" in p and "outside domain" in p for p in problems)


def test_validate_rejects_single_value_endogenous_domain():
    sig = Signature((), ("X",), {"X": ("0",)})
    model = CausalModel(sig, {"X": EquationTable("X", (), "0")})
    problems = validate_model(model)
    assert any("single-value domain" in p for p in problems)


def test_validate_rejects_condition_on_target():
    sig = Signature((), ("X", "Y"), {"X": ("0", "1"), "Y": ("0", "1")})
    model = CausalModel(
        sig,
        {
            "X": EquationTable("X", (((("X", "0"),), "1"),), "0"),
            "Y": EquationTable("Y", (), "0"),
        },
    )
    assert any("mentions the target" in p for p in validate_model(sig and model))


def test_validate_reports_missing_equation():
    sig = Signature((), ("X", "Y"), {"X": ("0", "1"), "Y": ("0", "1")})
    model = CausalModel(sig, {"X": EquationTable("X", (), "0")})
    assert any("missing equation" in p for p in validate_model(model))
