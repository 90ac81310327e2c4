"""Finite structural-equation models.

A signature declares exogenous and endogenous variables, each with a
finite ordered value domain.  A causal model attaches one total equation
table to every endogenous variable.  Intervening pins some endogenous
variables to fixed values; solving the resulting submodel enumerates the
assignments to the remaining free variables that satisfy every equation
simultaneously (there may be none, one, or several).

Equations are finite condition tables: ordered rows of partial
assignments dispatched first-match-wins, closed by a mandatory default
row, so every table is total by construction.  Canonical orderings
(witnesses, enumeration order) derive from declaration order of
variables and domain values; solution listings sort free variables by
name and then by domain position.

All types are immutable once validated and every operation is a pure
function of its inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping

from .errors import BudgetExceeded, ValidationError

# Ordered (variable, value) pairs; used for interventions, contexts,
# equation-row conditions, and solutions alike.
Assignment = tuple[tuple[str, str], ...]

DEFAULT_SUBMODEL_BUDGET = 10**6


class Budget:
    """Counts enumeration steps and fails hard once the cap is passed."""

    def __init__(self, limit: int = DEFAULT_SUBMODEL_BUDGET):
        self.limit = limit
        self.used = 0

    def spend(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceeded("submodel enumeration budget exhausted", self.used)


@dataclass(frozen=True)
class Signature:
    """Variable inventory: exogenous and endogenous names with their domains.

    ``domains`` maps every declared variable to its ordered tuple of value
    tokens.  Declaration order of variables and values is semantically
    meaningful: it fixes every canonical enumeration the engine performs.
    """

    exogenous: tuple[str, ...]
    endogenous: tuple[str, ...]
    domains: Mapping[str, tuple[str, ...]]

    def domain(self, var: str) -> tuple[str, ...]:
        try:
            return self.domains[var]
        except KeyError:
            raise ValidationError(f"unknown variable: {var}") from None

    def is_endogenous(self, var: str) -> bool:
        return var in self.endogenous

    def is_exogenous(self, var: str) -> bool:
        return var in self.exogenous

    def others(self, target: str) -> tuple[str, ...]:
        """All variables an equation for ``target`` may read, in canonical order."""
        return self.exogenous + tuple(v for v in self.endogenous if v != target)

    def contexts(self) -> list[Assignment]:
        """Every total assignment to the exogenous variables, canonical order."""
        doms = [self.domains[u] for u in self.exogenous]
        return [tuple(zip(self.exogenous, combo)) for combo in itertools.product(*doms)]

    def canonical_context(self) -> Assignment:
        """The first context in canonical order (empty when there are no exogenous variables)."""
        return tuple((u, self.domains[u][0]) for u in self.exogenous)

    def endo_index(self, var: str) -> int:
        return self.endogenous.index(var)

    def sort_pairs(self, pairs) -> Assignment:
        """Order (variable, value) pairs by declaration position, exogenous first."""
        order = {v: i for i, v in enumerate(self.exogenous + self.endogenous)}
        return tuple(sorted(pairs, key=lambda p: order.get(p[0], len(order))))


@dataclass(frozen=True)
class EquationTable:
    """One structural equation, as an ordered condition table.

    A row fires when every (variable, value) pair of its condition matches
    the input; the first firing row wins, and the default value covers
    everything else.  Conditions never mention the target variable.
    """

    target: str
    rows: tuple[tuple[Assignment, str], ...]
    default: str

    def output_for(self, env: Mapping[str, str]) -> str:
        for condition, out in self.rows:
            if all(env[name] == value for name, value in condition):
                return out
        return self.default


@dataclass(frozen=True)
class CausalModel:
    """A signature plus one equation table per endogenous variable."""

    signature: Signature
    equations: Mapping[str, EquationTable]


@dataclass(frozen=True)
class Submodel:
    """The equation system left after pinning an intervention and a context.

    The intervened variables lose their equations; ``free`` lists the
    endogenous variables that still carry one, in declaration order.  The
    context stays attached so the submodel is self-contained.
    """

    base: CausalModel
    intervention: Assignment
    context: Assignment
    free: tuple[str, ...]


class ClassKind(Enum):
    RECURSIVE = "recursive"
    UNIQUE_SOLUTIONS = "unique-solutions"
    GENERAL = "general"


# Containment order: recursive models all have unique solutions, and both
# sit inside the class of all models.
_CLASS_RANK = {
    ClassKind.RECURSIVE: 0,
    ClassKind.UNIQUE_SOLUTIONS: 1,
    ClassKind.GENERAL: 2,
}


def class_contains(cls: ClassKind, kind: ClassKind) -> bool:
    """True when a model of classification ``kind`` belongs to class ``cls``."""
    return _CLASS_RANK[kind] <= _CLASS_RANK[cls]


@dataclass(frozen=True)
class UniquenessCounterexample:
    """A submodel whose solution count is not exactly one."""

    intervention: Assignment
    context: Assignment
    solution_count: int


@dataclass(frozen=True)
class ModelClass:
    """Classification verdict plus its witness.

    Recursive models carry a causal order; non-recursive ones carry a
    dependency cycle; models outside the unique-solutions class also carry
    the first counterexample submodel found in canonical order.
    """

    kind: ClassKind
    causal_order: tuple[str, ...] | None = None
    cycle: tuple[str, ...] | None = None
    counterexample: UniquenessCounterexample | None = None


def validate_model(model: CausalModel) -> list[str]:
    """Check every structural invariant; return the list of violations.

    An empty report means the model is accepted.  Nothing is raised: the
    report carries all failures, each naming the offending variable or row.
    """
    sig = model.signature
    problems: list[str] = []

    seen: set[str] = set()
    for name in sig.exogenous + sig.endogenous:
        if name in seen:
            problems.append(f"duplicate variable name: {name}")
        seen.add(name)
    overlap = set(sig.exogenous) & set(sig.endogenous)
    for name in sorted(overlap):
        problems.append(f"variable declared both exogenous and endogenous: {name}")

    for name in sig.exogenous + sig.endogenous:
        dom = sig.domains.get(name)
        if not dom:
            problems.append(f"empty domain for variable: {name}")
            continue
        if len(set(dom)) != len(dom):
            problems.append(f"duplicate value in domain of {name}")
    for name in sig.endogenous:
        dom = sig.domains.get(name) or ()
        if len(dom) == 1:
            problems.append(
                f"endogenous variable {name} has a single-value domain; "
                "at least two values are required"
            )

    for name in sig.endogenous:
        if name not in model.equations:
            problems.append(f"missing equation for endogenous variable: {name}")
    for name in model.equations:
        if name not in sig.endogenous:
            problems.append(f"equation for unknown endogenous variable: {name}")

    for name in sig.endogenous:
        table = model.equations.get(name)
        if table is None:
            continue
        if table.target != name:
            problems.append(f"equation keyed {name} targets {table.target}")
        readable = set(sig.others(name))
        dom = sig.domains.get(name) or ()
        for i, (condition, out) in enumerate(table.rows, start=1):
            cond_vars = [v for v, _ in condition]
            if len(set(cond_vars)) != len(cond_vars):
                problems.append(f"equation for {name}, row {i}: repeated condition variable")
            for cvar, cval in condition:
                if cvar == name:
                    problems.append(f"equation for {name}, row {i}: condition mentions the target")
                elif cvar not in readable:
                    problems.append(f"equation for {name}, row {i}: unknown condition variable {cvar}")
                elif cval not in sig.domains.get(cvar, ()):
                    problems.append(
                        f"equation for {name}, row {i}: value {cval} outside domain of {cvar}"
                    )
            if out not in dom:
                problems.append(f"equation for {name}, row {i}: output {out} outside domain of {name}")
        if table.default not in dom:
            problems.append(
                f"equation for {name}, default row: output {table.default} outside domain of {name}"
            )

    return problems


def apply_table(table: EquationTable, inputs: Mapping[str, str]) -> str:
    """Evaluate an equation table on a total assignment to all other variables.

    Deterministic: the first matching row wins, the default covers the rest.
    A condition variable missing from ``inputs`` is a contract violation.
    """
    try:
        return table.output_for(inputs)
    except KeyError as exc:
        raise ValidationError(
            f"input for equation of {table.target} is missing variable {exc.args[0]}"
        ) from None


def _check_assignment(sig: Signature, pairs: Assignment, *, endogenous: bool, what: str) -> None:
    seen = set()
    pool = sig.endogenous if endogenous else sig.exogenous
    for var, value in pairs:
        if var in seen:
            raise ValidationError(f"duplicate {what} variable: {var}")
        seen.add(var)
        if var not in pool:
            kind = "endogenous" if endogenous else "exogenous"
            raise ValidationError(f"{what} variable {var} is not {kind}")
        if value not in sig.domains[var]:
            raise ValidationError(f"value {value} outside domain of {var}")


def submodel(model: CausalModel, intervention: Assignment, context: Assignment) -> Submodel:
    """Pin the intervened variables and the context; keep equations for the rest."""
    sig = model.signature
    _check_assignment(sig, tuple(intervention), endogenous=True, what="intervened")
    _check_assignment(sig, tuple(context), endogenous=False, what="context")
    ctx_vars = {v for v, _ in context}
    missing = [u for u in sig.exogenous if u not in ctx_vars]
    if missing:
        raise ValidationError(f"context does not cover exogenous variable {missing[0]}")
    pinned = {v for v, _ in intervention}
    free = tuple(v for v in sig.endogenous if v not in pinned)
    return Submodel(model, tuple(intervention), tuple(context), free)


def solutions(sub: Submodel, budget: Budget | None = None) -> list[dict[str, str]]:
    """All assignments to the free variables satisfying every remaining equation.

    Returned in canonical witness order: free variables sorted by name,
    candidate values stepped in domain order (last variable fastest).  The
    empty list is a legal result; pinning every endogenous variable yields
    exactly one empty assignment.
    """
    if budget is not None:
        budget.spend()
    sig = sub.base.signature
    names = sorted(sub.free)
    base_env = dict(sub.context)
    base_env.update(sub.intervention)
    tables = [(v, sub.base.equations[v]) for v in names]
    found: list[dict[str, str]] = []
    for combo in itertools.product(*(sig.domains[v] for v in names)):
        env = dict(base_env)
        env.update(zip(names, combo))
        if all(table.output_for(env) == env[v] for v, table in tables):
            found.append(dict(zip(names, combo)))
    return found


def depends_on(model: CausalModel, target: str, source: str) -> bool:
    """True when the target's equation reacts to the source somewhere.

    Witnessed by two total inputs differing only at ``source`` with
    different outputs; checked by brute force over the input grid.
    """
    sig = model.signature
    if target == source:
        raise ValidationError("depends_on requires target != source")
    if target not in sig.endogenous:
        raise ValidationError(f"unknown endogenous variable: {target}")
    if source not in sig.domains:
        raise ValidationError(f"unknown variable: {source}")
    table = model.equations[target]
    rest = [v for v in sig.others(target) if v != source]
    src_dom = sig.domains[source]
    for combo in itertools.product(*(sig.domains[v] for v in rest)):
        env = dict(zip(rest, combo))
        outputs = set()
        for value in src_dom:
            env[source] = value
            outputs.add(table.output_for(env))
            if len(outputs) > 1:
                return True
    return False


def dependency_graph(model: CausalModel) -> dict[str, tuple[str, ...]]:
    """Map each endogenous variable to the endogenous variables it reads."""
    sig = model.signature
    return {
        x: tuple(y for y in sig.endogenous if y != x and depends_on(model, x, y))
        for x in sig.endogenous
    }


def is_recursive(model: CausalModel) -> tuple[bool, tuple[str, ...]]:
    """Decide acyclicity of the dependency graph.

    Returns ``(True, causal_order)`` where the order lists parents before
    children, or ``(False, cycle)`` with one dependency cycle.  Both
    witnesses are canonical: ties break by declaration order.
    """
    sig = model.signature
    parents = dependency_graph(model)
    remaining = {v: set(ps) for v, ps in parents.items()}
    order: list[str] = []
    placed: set[str] = set()
    while len(order) < len(sig.endogenous):
        ready = [v for v in sig.endogenous if v not in placed and not (remaining[v] - placed)]
        if not ready:
            break
        nxt = ready[0]
        order.append(nxt)
        placed.add(nxt)
    if len(order) == len(sig.endogenous):
        return True, tuple(order)

    # Walk parent links among the stuck variables until one repeats.
    stuck = [v for v in sig.endogenous if v not in placed]
    trail: list[str] = [stuck[0]]
    seen_at = {stuck[0]: 0}
    while True:
        current = trail[-1]
        nxt = next(p for p in parents[current] if p not in placed)
        if nxt in seen_at:
            cycle = trail[seen_at[nxt]:]
            return False, tuple(cycle)
        seen_at[nxt] = len(trail)
        trail.append(nxt)


def _intervention_space(sig: Signature) -> Iterator[Assignment]:
    """Every intervention list, subsets by increasing size then position, values row-major."""
    n = len(sig.endogenous)
    for size in range(n + 1):
        for idxs in itertools.combinations(range(n), size):
            vs = [sig.endogenous[i] for i in idxs]
            for values in itertools.product(*(sig.domains[v] for v in vs)):
                yield tuple(zip(vs, values))


def is_uniquely_solvable(
    model: CausalModel, budget: Budget | None = None
) -> tuple[bool, UniquenessCounterexample | None]:
    """Check that every submodel of the model has exactly one solution.

    Scans every intervention (all subsets, all value vectors) under every
    context, in canonical order, so the reported counterexample is stable.
    """
    if budget is None:
        budget = Budget()
    for intervention in _intervention_space(model.signature):
        for context in model.signature.contexts():
            sub = submodel(model, intervention, context)
            count = len(solutions(sub, budget))
            if count != 1:
                return False, UniquenessCounterexample(intervention, context, count)
    return True, None


def classify(model: CausalModel, budget: Budget | None = None) -> ModelClass:
    """Place the model in the tightest of the three classes, with witness."""
    recursive, witness = is_recursive(model)
    if recursive:
        return ModelClass(ClassKind.RECURSIVE, causal_order=witness)
    unique, counter = is_uniquely_solvable(model, budget)
    if unique:
        return ModelClass(ClassKind.UNIQUE_SOLUTIONS, cycle=witness)
    return ModelClass(ClassKind.GENERAL, cycle=witness, counterexample=counter)
