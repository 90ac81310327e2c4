"""Truth evaluation of causal formulas against a model.

A box leaf ``[iv](body)`` holds when the body is true in every solution
of the system pinned by ``iv`` under the leaf's context; it is vacuously
true when that system has no solutions.  The diamond form holds when the
body is true in some solution.  The context of a leaf is the one shared
by its atoms; a leaf whose body has no atoms (only constants) is
evaluated under the canonical first context.

Also here: the rewriting of full-bodied formulas into single-atom-box
form (truth-preserving over models whose submodels all have unique
solutions, and over those only), and the "affects" relation between
endogenous variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ValidationError
from .formulas import (
    FALSE,
    TRUE,
    And,
    Atom,
    BasicCausal,
    FalseConst,
    Formula,
    Not,
    Or,
    TrueConst,
    box,
    disj,
    iter_atoms,
    leaf_context,
)
from .model import (
    Assignment,
    Budget,
    CausalModel,
    Signature,
    solutions,
    submodel,
)

SolutionCache = dict[tuple[Assignment, Assignment], list[dict[str, str]]]


@dataclass(frozen=True)
class LeafTrace:
    """Outcome of one box/diamond leaf: its pinned system and verdict.

    ``witness`` carries a decisive solution when one exists: a violating
    solution for a false box, a satisfying one for a true diamond.
    """

    intervention: Assignment
    context: Assignment
    diamond: bool
    solution_count: int
    verdict: bool
    witness: dict[str, str] | None


@dataclass(frozen=True)
class EvalReport:
    verdict: bool
    leaves: tuple[LeafTrace, ...]


def eval_inner(sol: dict[str, str], intervention: Assignment, context: Assignment, body: Formula) -> bool:
    """Evaluate a box body in one solution.

    An atom reads the intervened value for pinned variables and the
    solution's value otherwise; connectives are classical.
    """
    if isinstance(body, TrueConst):
        return True
    if isinstance(body, FalseConst):
        return False
    if isinstance(body, Atom):
        for var, value in intervention:
            if var == body.var:
                return value == body.value
        return sol[body.var] == body.value
    if isinstance(body, Not):
        return not eval_inner(sol, intervention, context, body.body)
    if isinstance(body, And):
        return eval_inner(sol, intervention, context, body.left) and eval_inner(
            sol, intervention, context, body.right
        )
    if isinstance(body, Or):
        return eval_inner(sol, intervention, context, body.left) or eval_inner(
            sol, intervention, context, body.right
        )
    raise ValidationError(f"not an inner formula: {body!r}")


def cached_solutions(
    model: CausalModel,
    intervention: Assignment,
    context: Assignment,
    cache: SolutionCache | None,
    budget: Budget | None,
) -> list[dict[str, str]]:
    """Solution set of one pinned system, memoized per (intervention, context).

    The memo key ignores intervention order; the budget is charged only on
    cache misses, so charging reflects actual enumeration work.
    """
    key = (tuple(sorted(intervention)), tuple(sorted(context)))
    if cache is not None and key in cache:
        return cache[key]
    sols = solutions(submodel(model, intervention, context), budget)
    if cache is not None:
        cache[key] = sols
    return sols


def _eval_leaf(
    model: CausalModel,
    leaf: BasicCausal,
    cache: SolutionCache | None,
    budget: Budget | None,
    trace: list[LeafTrace],
) -> bool:
    context = leaf_context(leaf)
    if context is None:
        context = model.signature.canonical_context()
    sols = cached_solutions(model, leaf.intervention, context, cache, budget)
    witness = None
    if leaf.diamond:
        verdict = False
        for sol in sols:
            if eval_inner(sol, leaf.intervention, context, leaf.body):
                verdict, witness = True, sol
                break
    else:
        verdict = True
        for sol in sols:
            if not eval_inner(sol, leaf.intervention, context, leaf.body):
                verdict, witness = False, sol
                break
    trace.append(
        LeafTrace(leaf.intervention, context, leaf.diamond, len(sols), verdict, witness)
    )
    return verdict


def _eval_formula(model, f, cache, budget, trace) -> bool:
    if isinstance(f, BasicCausal):
        return _eval_leaf(model, f, cache, budget, trace)
    if isinstance(f, Not):
        return not _eval_formula(model, f.body, cache, budget, trace)
    if isinstance(f, And):
        left = _eval_formula(model, f.left, cache, budget, trace)
        right = _eval_formula(model, f.right, cache, budget, trace)
        return left and right
    if isinstance(f, Or):
        left = _eval_formula(model, f.left, cache, budget, trace)
        right = _eval_formula(model, f.right, cache, budget, trace)
        return left or right
    raise ValidationError(f"not a causal formula: {f!r}")


def holds(
    model: CausalModel,
    f: Formula,
    budget: Budget | None = None,
    cache: SolutionCache | None = None,
) -> EvalReport:
    """Decide whether the model satisfies the formula.

    Boolean connectives evaluate both branches so the trace always covers
    every leaf, one entry per leaf in left-to-right order.  Passing a
    cache shares solution sets across repeated calls on the same model.
    """
    if cache is None:
        cache = {}
    trace: list[LeafTrace] = []
    verdict = _eval_formula(model, f, cache, budget, trace)
    return EvalReport(verdict, tuple(trace))


# --- rewriting into single-atom boxes ----------------------------------------


def _fold_constants(body: Formula) -> Formula:
    if isinstance(body, Not):
        inner = _fold_constants(body.body)
        if isinstance(inner, TrueConst):
            return FALSE
        if isinstance(inner, FalseConst):
            return TRUE
        if isinstance(inner, Not):
            return inner.body
        return Not(inner)
    if isinstance(body, And):
        left, right = _fold_constants(body.left), _fold_constants(body.right)
        if isinstance(left, FalseConst) or isinstance(right, FalseConst):
            return FALSE
        if isinstance(left, TrueConst):
            return right
        if isinstance(right, TrueConst):
            return left
        return And(left, right)
    if isinstance(body, Or):
        left, right = _fold_constants(body.left), _fold_constants(body.right)
        if isinstance(left, TrueConst) or isinstance(right, TrueConst):
            return TRUE
        if isinstance(left, FalseConst):
            return right
        if isinstance(right, FalseConst):
            return left
        return Or(left, right)
    return body


def _anchor_atom(sig: Signature) -> tuple[str, Assignment]:
    if not sig.endogenous:
        raise ValidationError("rewriting needs at least one endogenous variable")
    return sig.endogenous[0], sig.canonical_context()


def _rewrite_leaf(intervention: Assignment, body: Formula, sig: Signature) -> Formula:
    body = _fold_constants(body)

    def rec(part: Formula) -> Formula:
        if isinstance(part, Atom):
            return box(intervention, part)
        if isinstance(part, TrueConst):
            # some value is taken: a full disjunction over an anchor variable
            var, ctx = _anchor_atom(sig)
            return disj(box(intervention, Atom(var, ctx, v)) for v in sig.domains[var])
        if isinstance(part, FalseConst):
            # no single value can be two values at once
            var, ctx = _anchor_atom(sig)
            v0, v1 = sig.domains[var][0], sig.domains[var][1]
            return And(box(intervention, Atom(var, ctx, v0)), box(intervention, Atom(var, ctx, v1)))
        if isinstance(part, Not):
            if isinstance(part.body, Atom):
                # negated atom: disjunction over the rest of the domain
                atom = part.body
                rest = [v for v in sig.domains[atom.var] if v != atom.value]
                return disj(box(intervention, Atom(atom.var, atom.context, v)) for v in rest)
            return Not(rec(part.body))
        if isinstance(part, And):
            return And(rec(part.left), rec(part.right))
        if isinstance(part, Or):
            return Or(rec(part.left), rec(part.right))
        raise ValidationError(f"not an inner formula: {part!r}")

    return rec(body)


def rewrite_to_uniq(f: Formula, sig: Signature) -> Formula:
    """Push boxes through their bodies until every leaf wraps a single atom.

    Diamonds are eliminated through their negation duals, conjunctions and
    disjunctions distribute over the box, negated atoms expand into the
    domain complement, compound negations move outside the box, and
    constants expand through an anchor variable.  The result is in the
    single-atom-box language; it is equivalent to the input over models
    whose submodels all have unique solutions (and only over those).
    """
    if isinstance(f, BasicCausal):
        if f.diamond:
            return Not(_rewrite_leaf(f.intervention, Not(f.body), sig))
        return _rewrite_leaf(f.intervention, f.body, sig)
    if isinstance(f, Not):
        return Not(rewrite_to_uniq(f.body, sig))
    if isinstance(f, And):
        return And(rewrite_to_uniq(f.left, sig), rewrite_to_uniq(f.right, sig))
    if isinstance(f, Or):
        return Or(rewrite_to_uniq(f.left, sig), rewrite_to_uniq(f.right, sig))
    raise ValidationError(f"not a causal formula: {f!r}")


# --- the affects relation -----------------------------------------------------


@dataclass(frozen=True)
class AffectsWitness:
    """One instantiation showing that changing src moves dst.

    With ``pinned`` fixed and the context set, dst is forced to
    ``base_value``; additionally pinning src to ``src_value`` forces dst to
    ``changed_value`` instead.
    """

    pinned: Assignment
    src_value: str
    context: Assignment
    base_value: str
    changed_value: str


def pinned_value_set(sols: list[dict[str, str]], intervention: Assignment, var: str, domain) -> list[str]:
    """Values v for which "in every solution, var = v" holds.

    Empty solution sets make the claim vacuously true for every value;
    otherwise the value must be shared by all solutions (intervened
    variables read their pinned value).
    """
    if not sols:
        return list(domain)
    pinned = dict(intervention)
    if var in pinned:
        return [pinned[var]]
    first = sols[0][var]
    if all(sol[var] == first for sol in sols):
        return [first]
    return []


def iter_value_subsets(sig: Signature, variables: tuple[str, ...]):
    """All (subset, value-vector) interventions over ``variables``, canonical order."""
    n = len(variables)
    for size in range(n + 1):
        for idxs in itertools.combinations(range(n), size):
            vs = [variables[i] for i in idxs]
            for values in itertools.product(*(sig.domains[v] for v in vs)):
                yield tuple(zip(vs, values))


def affects(
    model: CausalModel,
    src: str,
    dst: str,
    budget: Budget | None = None,
    cache: SolutionCache | None = None,
) -> tuple[bool, AffectsWitness | None]:
    """Does intervening on src ever change the forced value of dst?

    True when some pinning of other variables, context, and src value make
    dst's all-solutions value flip from one value to a different one.  The
    search is canonical (subsets by size, values in domain order), so the
    returned witness is stable.
    """
    sig = model.signature
    if src == dst:
        raise ValidationError("affects requires src != dst")
    for var in (src, dst):
        if var not in sig.endogenous:
            raise ValidationError(f"unknown endogenous variable: {var}")
    if cache is None:
        cache = {}
    rest = tuple(v for v in sig.endogenous if v != src)
    dst_domain = sig.domains[dst]
    for pinned in iter_value_subsets(sig, rest):
        for y in sig.domains[src]:
            for context in sig.contexts():
                base = cached_solutions(model, pinned, context, cache, budget)
                base_vals = pinned_value_set(base, pinned, dst, dst_domain)
                if not base_vals:
                    continue
                moved = cached_solutions(
                    model, pinned + ((src, y),), context, cache, budget
                )
                moved_vals = pinned_value_set(moved, pinned + ((src, y),), dst, dst_domain)
                for z in base_vals:
                    for z2 in moved_vals:
                        if z != z2:
                            return True, AffectsWitness(pinned, y, context, z, z2)
    return False, None
