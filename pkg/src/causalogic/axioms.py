"""Axiom schemes for causal reasoning: instantiation, matching, soundness.

Each scheme is identified by its conventional name (C0..C6, D0..D10, Ord).
The C-side schemes live in the single-atom-box language; the D-side
schemes use full box bodies.  ``instantiate`` turns a scheme plus a
binding of its metavariables into a concrete formula, ``is_instance``
inverts that, ``enumerate_instances`` streams every instance within
bounds in a canonical order, and ``check_soundness`` evaluates a stream
of instances against one model.

Intervention lists inside instances are always emitted in declaration
order of the endogenous variables, so every scheme has a single canonical
surface form and matching is plain structural equality.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator

from .errors import TautologyCapExceeded, ValidationError
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
    conj,
    diamond,
    disj,
    iff,
    implies,
    validate_formula,
)
from .model import Assignment, Budget, CausalModel, Signature
from .semantics import SolutionCache, holds, iter_value_subsets

SCHEMES = (
    "C0", "C1", "C2", "C3", "C4", "C5", "C6",
    "D0", "D1", "D2", "D3", "D4", "D5", "D6", "D7", "D8", "D9", "D10",
    "Ord",
)

DEFAULT_TAUTOLOGY_CAP = 16


@dataclass(frozen=True)
class Bounds:
    """Caps for instance enumeration.

    ``max_chain`` bounds the chain length k of C6/D6 (None: one less than
    the number of endogenous variables); ``max_intervention`` caps the
    size of enumerated intervention lists; ``inner_depth`` controls the
    body pool for D7 (0 keeps bare atoms only).
    """

    max_chain: int | None = None
    max_intervention: int | None = None
    inner_depth: int = 1
    tautology_cap: int = DEFAULT_TAUTOLOGY_CAP


@dataclass(frozen=True)
class AxiomInstance:
    scheme: str
    bindings: dict
    formula: Formula


# --- tautology oracle ---------------------------------------------------------


def _bool_eval(f: Formula, env: dict) -> bool:
    if isinstance(f, TrueConst):
        return True
    if isinstance(f, FalseConst):
        return False
    if isinstance(f, (BasicCausal, Atom)):
        return env[f]
    if isinstance(f, Not):
        return not _bool_eval(f.body, env)
    if isinstance(f, And):
        return _bool_eval(f.left, env) and _bool_eval(f.right, env)
    if isinstance(f, Or):
        return _bool_eval(f.left, env) or _bool_eval(f.right, env)
    raise ValidationError(f"not a Boolean combination: {f!r}")


def tautology(f: Formula, cap: int = DEFAULT_TAUTOLOGY_CAP) -> bool:
    """Truth-table check treating box leaves and atoms as opaque units.

    Works for top-level formulas (units: basic causal leaves) and for box
    bodies (units: atoms).  Raises TautologyCapExceeded past ``cap``
    distinct units rather than attempting a huge table.
    """
    units: dict[Formula, None] = {}

    def collect(g: Formula) -> None:
        if isinstance(g, (BasicCausal, Atom)):
            units.setdefault(g)
        elif isinstance(g, Not):
            collect(g.body)
        elif isinstance(g, (And, Or)):
            collect(g.left)
            collect(g.right)

    collect(f)
    if len(units) > cap:
        raise TautologyCapExceeded(len(units), cap)
    keys = list(units)
    for bits in itertools.product((False, True), repeat=len(keys)):
        if not _bool_eval(f, dict(zip(keys, bits))):
            return False
    return True


# --- the affects relation, expanded into a formula ------------------------------


def affects_expansion(sig: Signature, src: str, dst: str) -> Formula:
    """The "src affects dst" statement spelled out as one large disjunction.

    Each disjunct fixes a pinning of the other variables, a value for src,
    a context, and a pair of distinct dst values: the system forces dst to
    one value, and additionally pinning src forces the other.  Mirrors the
    semantic check in ``semantics.affects`` disjunct for disjunct.
    """
    rest = tuple(v for v in sig.endogenous if v != src)
    parts = []
    for pinned in iter_value_subsets(sig, rest):
        for y in sig.domains[src]:
            moved = sig.sort_pairs(pinned + ((src, y),))
            for context in sig.contexts():
                for z in sig.domains[dst]:
                    for z2 in sig.domains[dst]:
                        if z == z2:
                            continue
                        parts.append(
                            And(
                                box(moved, Atom(dst, context, z2)),
                                box(pinned, Atom(dst, context, z)),
                            )
                        )
    return disj(parts)


# --- instantiation ---------------------------------------------------------------


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValidationError(message)


def _check_distinct_endo(sig: Signature, pairs: Assignment, what: str) -> None:
    seen = set()
    for var, value in pairs:
        _require(var in sig.endogenous, f"{what}: {var} is not endogenous")
        _require(var not in seen, f"{what}: repeated variable {var}")
        _require(value in sig.domains[var], f"{what}: value {value} outside domain of {var}")
        seen.add(var)


def _check_context(sig: Signature, context: Assignment) -> None:
    _require(
        tuple(v for v, _ in context) == sig.exogenous,
        "context must assign every exogenous variable in declaration order",
    )
    for var, value in context:
        _require(value in sig.domains[var], f"context value {value} outside domain of {var}")


def _atom(sig: Signature, var: str, context: Assignment, value: str) -> Atom:
    _require(var in sig.endogenous, f"{var} is not endogenous")
    _require(value in sig.domains[var], f"value {value} outside domain of {var}")
    return Atom(var, context, value)


def _build(scheme: str, b: dict, sig: Signature, order=None) -> Formula:
    sort = sig.sort_pairs

    if scheme in ("C0", "D0"):
        f = b["formula"]
        _require(tautology(f), f"{scheme} requires a propositional tautology")
        return f

    if scheme in ("C1", "D1"):
        iv, ctx = sort(b["intervention"]), b["context"]
        var, x, x2 = b["var"], b["value"], b["other_value"]
        _check_distinct_endo(sig, iv, "intervention")
        _check_context(sig, ctx)
        _require(x != x2, f"{scheme} needs two distinct values")
        _require(var not in {v for v, _ in iv}, f"{scheme}: {var} may not be intervened on")
        a1, a2 = _atom(sig, var, ctx, x), _atom(sig, var, ctx, x2)
        if scheme == "C1":
            return implies(box(iv, a1), Not(box(iv, a2)))
        return box(iv, implies(a1, Not(a2)))

    if scheme in ("C2", "D2"):
        iv, ctx, var = sort(b["intervention"]), b["context"], b["var"]
        _check_distinct_endo(sig, iv, "intervention")
        _check_context(sig, ctx)
        _require(var in sig.endogenous, f"{var} is not endogenous")
        _require(var not in {v for v, _ in iv}, f"{scheme}: {var} may not be intervened on")
        atoms = [Atom(var, ctx, v) for v in sig.domains[var]]
        if scheme == "C2":
            return disj(box(iv, a) for a in atoms)
        return box(iv, disj(atoms))

    if scheme == "C3":
        base, ctx = sort(b["base"]), b["context"]
        (w_var, w_val), (y_var, y_val) = b["promoted"], b["target"]
        _check_distinct_endo(sig, base, "intervention")
        _check_context(sig, ctx)
        pinned = {v for v, _ in base}
        _require(w_var not in pinned and y_var not in pinned, "C3: promoted/target already pinned")
        _require(w_var != y_var, "C3: promoted and target must differ")
        a_w = _atom(sig, w_var, ctx, w_val)
        a_y = _atom(sig, y_var, ctx, y_val)
        return implies(
            And(box(base, a_w), box(base, a_y)),
            box(sort(base + ((w_var, w_val),)), a_y),
        )

    if scheme == "D3":
        base, ctx = sort(b["base"]), b["context"]
        w_var, w_val = b["promoted"]
        targets = sort(b["targets"])
        _check_distinct_endo(sig, base, "intervention")
        _check_distinct_endo(sig, targets, "targets")
        _check_context(sig, ctx)
        pinned = {v for v, _ in base}
        _require(w_var not in pinned, "D3: promoted variable already pinned")
        target_vars = {v for v, _ in targets}
        _require(w_var not in target_vars, "D3: promoted variable among targets")
        _require(not (target_vars & pinned), "D3: target already pinned")
        a_w = _atom(sig, w_var, ctx, w_val)
        target_atoms = [Atom(v, ctx, val) for v, val in targets]
        left = diamond(base, conj([a_w] + target_atoms))
        right = diamond(sort(base + ((w_var, w_val),)), conj(target_atoms) if target_atoms else TRUE)
        return implies(left, right)

    if scheme in ("C4", "D4"):
        others, ctx = sort(b["others"]), b["context"]
        var, value = b["var"], b["value"]
        _check_distinct_endo(sig, others, "intervention")
        _check_context(sig, ctx)
        _require(var not in {v for v, _ in others}, f"{scheme}: {var} repeated in intervention")
        a = _atom(sig, var, ctx, value)
        return box(sort(others + ((var, value),)), a)

    if scheme == "C5":
        base, ctx = sort(b["base"]), b["context"]
        (y_var, y_val), (w_var, w_val) = b["left"], b["right"]
        _check_distinct_endo(sig, base, "intervention")
        _check_context(sig, ctx)
        pinned = {v for v, _ in base}
        _require(y_var != w_var, "C5: the two variables must differ")
        _require(y_var not in pinned and w_var not in pinned, "C5: variable already pinned")
        a_y = _atom(sig, y_var, ctx, y_val)
        a_w = _atom(sig, w_var, ctx, w_val)
        return implies(
            And(
                box(sort(base + ((w_var, w_val),)), a_y),
                box(sort(base + ((y_var, y_val),)), a_w),
            ),
            box(base, a_y),
        )

    if scheme == "D5":
        base, ctx = sort(b["base"]), b["context"]
        (y_var, y_val), (w_var, w_val) = b["left"], b["right"]
        rest = sort(b["rest"])
        _check_distinct_endo(sig, base, "intervention")
        _check_distinct_endo(sig, rest, "rest")
        _check_context(sig, ctx)
        pinned = {v for v, _ in base}
        _require(y_var != w_var, "D5: the two variables must differ")
        _require(y_var not in pinned and w_var not in pinned, "D5: variable already pinned")
        expected_rest = tuple(
            v for v in sig.endogenous if v not in pinned and v not in (y_var, w_var)
        )
        _require(
            tuple(v for v, _ in rest) == expected_rest,
            "D5: rest must cover exactly the unpinned variables besides the pair",
        )
        a_y = _atom(sig, y_var, ctx, y_val)
        a_w = _atom(sig, w_var, ctx, w_val)
        rest_atoms = [Atom(v, ctx, val) for v, val in rest]
        left = diamond(sort(base + ((y_var, y_val),)), conj([a_w] + rest_atoms))
        mid = diamond(sort(base + ((w_var, w_val),)), conj([a_y] + rest_atoms))
        right = diamond(base, conj([a_w, a_y] + rest_atoms))
        return implies(And(left, mid), right)

    if scheme in ("C6", "D6"):
        chain = tuple(b["chain"])
        _require(len(chain) >= 2, f"{scheme}: chain needs at least two variables")
        _require(len(set(chain)) == len(chain), f"{scheme}: chain variables must be distinct")
        for var in chain:
            _require(var in sig.endogenous, f"{scheme}: {var} is not endogenous")
        steps = [affects_expansion(sig, chain[i], chain[i + 1]) for i in range(len(chain) - 1)]
        return implies(conj(steps), Not(affects_expansion(sig, chain[-1], chain[0])))

    if scheme == "D7":
        iv = sort(b["intervention"])
        premise, conclusion = b["premise"], b["conclusion"]
        _check_distinct_endo(sig, iv, "intervention")
        return implies(
            And(box(iv, premise), box(iv, implies(premise, conclusion))),
            box(iv, conclusion),
        )

    if scheme == "D8":
        iv = sort(b["intervention"])
        body = b["body"]
        _check_distinct_endo(sig, iv, "intervention")
        _require(tautology(body), "D8 requires a tautological body")
        return box(iv, body)

    if scheme in ("D9", "D10"):
        var, ctx = b["var"], b["context"]
        iv = sort(b["intervention"])
        _check_distinct_endo(sig, iv, "intervention")
        _check_context(sig, ctx)
        _require(var in sig.endogenous, f"{var} is not endogenous")
        _require(var not in {v for v, _ in iv}, f"{scheme}: {var} may not be intervened on")
        if scheme == "D9":
            expected = tuple(v for v in sig.endogenous if v != var)
            _require(
                tuple(v for v, _ in iv) == expected,
                "D9: the intervention must pin every other endogenous variable",
            )
        return And(
            diamond(iv, TRUE),
            disj(box(iv, Atom(var, ctx, x)) for x in sig.domains[var]),
        )

    if scheme == "Ord":
        _require(order is not None, "Ord needs a total order over the endogenous variables")
        _require(tuple(sorted(order)) == tuple(sorted(sig.endogenous)), "Ord order must cover all endogenous variables")
        base, ctx = sort(b["base"]), b["context"]
        var = b["var"]
        w_var, w_val = b["promoted"]
        _check_distinct_endo(sig, base, "intervention")
        _check_context(sig, ctx)
        pinned = {v for v, _ in base}
        _require(var != w_var, "Ord: the two variables must differ")
        _require(var not in pinned and w_var not in pinned, "Ord: variable already pinned")
        _require(w_val in sig.domains[w_var], f"value {w_val} outside domain of {w_var}")
        _require(
            order.index(var) < order.index(w_var),
            "Ord applies only when the observed variable precedes the pinned one",
        )
        with_w = sort(base + ((w_var, w_val),))
        return conj(
            iff(box(with_w, Atom(var, ctx, y)), box(base, Atom(var, ctx, y)))
            for y in sig.domains[var]
        )

    raise ValidationError(f"unknown scheme: {scheme}")


def instantiate(scheme: str, bindings: dict, sig: Signature, order=None) -> AxiomInstance:
    """Build the concrete formula for a scheme under a metavariable binding.

    Side conditions (distinctness, coverage, tautology requirements) are
    enforced; the produced formula always passes formula validation.
    """
    formula = _build(scheme, bindings, sig, order)
    validate_formula(formula, sig)
    return AxiomInstance(scheme, dict(bindings), formula)


# --- enumeration -----------------------------------------------------------------


def _iv_space(sig: Signature, exclude: tuple[str, ...], bounds: Bounds) -> list[Assignment]:
    pool = tuple(v for v in sig.endogenous if v not in exclude)
    cap = len(pool) if bounds.max_intervention is None else min(bounds.max_intervention, len(pool))
    out = []
    for pinned in iter_value_subsets(sig, pool):
        if len(pinned) <= cap:
            out.append(pinned)
    return out


def _atom_pool(sig: Signature, context: Assignment) -> list[Atom]:
    return [
        Atom(var, context, value)
        for var in sig.endogenous
        for value in sig.domains[var]
    ]


def _body_pool(sig: Signature, context: Assignment, bounds: Bounds) -> list[Formula]:
    atoms = _atom_pool(sig, context)
    pool: list[Formula] = list(atoms)
    if bounds.inner_depth >= 1:
        pool.extend(Not(a) for a in atoms)
        for a, b in itertools.permutations(atoms, 2):
            pool.append(And(a, b))
            pool.append(Or(a, b))
            pool.append(implies(a, b))
    return pool


def _tautology_pool(sig: Signature, context: Assignment) -> list[Formula]:
    """A fixed family of tautological bodies; every entry is oracle-verified."""
    atoms = _atom_pool(sig, context)
    pool: list[Formula] = [TRUE]
    for a in atoms:
        pool.append(implies(a, a))
        pool.append(Or(a, Not(a)))
        pool.append(Not(And(a, Not(a))))
    for a, b in itertools.permutations(atoms, 2):
        pool.append(implies(And(a, b), a))
        pool.append(implies(a, Or(a, b)))
        pool.append(implies(a, implies(b, a)))
        pool.append(implies(And(implies(a, b), a), b))
    seen: set = set()
    unique = []
    for f in pool:
        if f not in seen:
            assert tautology(f)
            seen.add(f)
            unique.append(f)
    return unique


def _unit_boxes(sig: Signature) -> list[Formula]:
    ctx = sig.canonical_context()
    return [box((), Atom(var, ctx, value)) for var in sig.endogenous for value in sig.domains[var]]


def enumerate_instances(
    scheme: str, sig: Signature, bounds: Bounds = Bounds(), order=None
) -> Iterator[AxiomInstance]:
    """Stream every instance of a scheme within bounds, canonically ordered.

    C0/D0 range over all propositional tautologies and D8 bodies over all
    tautological inner formulas, so those streams draw from a fixed
    template family rather than pretending to exhaust an infinite scheme.
    """
    contexts = sig.contexts()
    endo = sig.endogenous

    if scheme in ("C0", "D0"):
        units = _unit_boxes(sig)
        for u in units:
            yield instantiate(scheme, {"formula": Or(u, Not(u))}, sig)
            yield instantiate(scheme, {"formula": implies(u, u)}, sig)
        for u, v in itertools.permutations(units, 2):
            yield instantiate(scheme, {"formula": implies(u, implies(v, And(u, v)))}, sig)
        return

    if scheme in ("C1", "D1"):
        for var in endo:
            for x, x2 in itertools.permutations(sig.domains[var], 2):
                for iv in _iv_space(sig, (var,), bounds):
                    for ctx in contexts:
                        yield instantiate(
                            scheme,
                            {"intervention": iv, "var": var, "value": x, "other_value": x2, "context": ctx},
                            sig,
                        )
        return

    if scheme in ("C2", "D2"):
        for var in endo:
            for iv in _iv_space(sig, (var,), bounds):
                for ctx in contexts:
                    yield instantiate(scheme, {"intervention": iv, "var": var, "context": ctx}, sig)
        return

    if scheme == "C3":
        for w_var in endo:
            for y_var in endo:
                if y_var == w_var:
                    continue
                for base in _iv_space(sig, (w_var, y_var), bounds):
                    for w_val in sig.domains[w_var]:
                        for y_val in sig.domains[y_var]:
                            for ctx in contexts:
                                yield instantiate(
                                    scheme,
                                    {
                                        "base": base,
                                        "promoted": (w_var, w_val),
                                        "target": (y_var, y_val),
                                        "context": ctx,
                                    },
                                    sig,
                                )
        return

    if scheme == "D3":
        for w_var in endo:
            for base in _iv_space(sig, (w_var,), bounds):
                pinned = tuple(v for v, _ in base)
                free = tuple(v for v in endo if v != w_var and v not in pinned)
                for targets in iter_value_subsets(sig, free):
                    for w_val in sig.domains[w_var]:
                        for ctx in contexts:
                            yield instantiate(
                                scheme,
                                {
                                    "base": base,
                                    "promoted": (w_var, w_val),
                                    "targets": targets,
                                    "context": ctx,
                                },
                                sig,
                            )
        return

    if scheme in ("C4", "D4"):
        for var in endo:
            for value in sig.domains[var]:
                for others in _iv_space(sig, (var,), bounds):
                    for ctx in contexts:
                        yield instantiate(
                            scheme,
                            {"var": var, "value": value, "others": others, "context": ctx},
                            sig,
                        )
        return

    if scheme == "C5":
        for y_var in endo:
            for w_var in endo:
                if w_var == y_var:
                    continue
                for base in _iv_space(sig, (y_var, w_var), bounds):
                    for y_val in sig.domains[y_var]:
                        for w_val in sig.domains[w_var]:
                            for ctx in contexts:
                                yield instantiate(
                                    scheme,
                                    {
                                        "base": base,
                                        "left": (y_var, y_val),
                                        "right": (w_var, w_val),
                                        "context": ctx,
                                    },
                                    sig,
                                )
        return

    if scheme == "D5":
        for y_var in endo:
            for w_var in endo:
                if w_var == y_var:
                    continue
                for base in _iv_space(sig, (y_var, w_var), bounds):
                    pinned = tuple(v for v, _ in base)
                    rest_vars = tuple(v for v in endo if v not in pinned and v not in (y_var, w_var))
                    for y_val in sig.domains[y_var]:
                        for w_val in sig.domains[w_var]:
                            for rest_vals in itertools.product(*(sig.domains[v] for v in rest_vars)):
                                for ctx in contexts:
                                    yield instantiate(
                                        scheme,
                                        {
                                            "base": base,
                                            "left": (y_var, y_val),
                                            "right": (w_var, w_val),
                                            "rest": tuple(zip(rest_vars, rest_vals)),
                                            "context": ctx,
                                        },
                                        sig,
                                    )
        return

    if scheme in ("C6", "D6"):
        longest = len(endo) - 1 if bounds.max_chain is None else min(bounds.max_chain, len(endo) - 1)
        for k in range(1, longest + 1):
            for chain in itertools.permutations(endo, k + 1):
                yield instantiate(scheme, {"chain": chain}, sig)
        return

    if scheme == "D7":
        for iv in _iv_space(sig, (), bounds):
            for ctx in contexts:
                pool = _body_pool(sig, ctx, bounds)
                for premise in pool:
                    for conclusion in pool:
                        yield instantiate(
                            scheme,
                            {"intervention": iv, "premise": premise, "conclusion": conclusion},
                            sig,
                        )
        return

    if scheme == "D8":
        for iv in _iv_space(sig, (), bounds):
            for ctx in contexts:
                for body in _tautology_pool(sig, ctx):
                    yield instantiate(scheme, {"intervention": iv, "body": body}, sig)
        return

    if scheme == "D9":
        for var in endo:
            rest = tuple(v for v in endo if v != var)
            for values in itertools.product(*(sig.domains[v] for v in rest)):
                for ctx in contexts:
                    yield instantiate(
                        scheme,
                        {"var": var, "intervention": tuple(zip(rest, values)), "context": ctx},
                        sig,
                    )
        return

    if scheme == "D10":
        for var in endo:
            for iv in _iv_space(sig, (var,), bounds):
                for ctx in contexts:
                    yield instantiate(scheme, {"var": var, "intervention": iv, "context": ctx}, sig)
        return

    if scheme == "Ord":
        if order is None:
            raise ValidationError("Ord needs a total order over the endogenous variables")
        for var in order:
            for w_var in order:
                if order.index(var) >= order.index(w_var):
                    continue
                for base in _iv_space(sig, (var, w_var), bounds):
                    for w_val in sig.domains[w_var]:
                        for ctx in contexts:
                            yield instantiate(
                                scheme,
                                {"var": var, "promoted": (w_var, w_val), "base": base, "context": ctx},
                                sig,
                                order,
                            )
        return

    raise ValidationError(f"unknown scheme: {scheme}")


# --- matching ----------------------------------------------------------------------


def _dest_implies(f: Formula):
    if isinstance(f, Or) and isinstance(f.left, Not):
        return f.left.body, f.right
    return None


def _flat_or(f: Formula) -> list[Formula]:
    parts: list[Formula] = []

    def walk(g: Formula) -> None:
        if isinstance(g, Or):
            walk(g.left)
            parts.append(g.right)
        else:
            parts.append(g)

    walk(f)
    return parts


def _flat_and(f: Formula) -> list[Formula]:
    parts: list[Formula] = []

    def walk(g: Formula) -> None:
        if isinstance(g, And):
            walk(g.left)
            parts.append(g.right)
        else:
            parts.append(g)

    walk(f)
    return parts


def _leaf(f: Formula, diamond_mode: bool):
    if isinstance(f, BasicCausal) and f.diamond == diamond_mode:
        return f
    return None


def _extract(scheme: str, f: Formula, sig: Signature, order=None) -> dict | None:
    """Propose bindings from the shape of ``f``; verification happens later."""

    if scheme in ("C1", "D1"):
        if scheme == "C1":
            split = _dest_implies(f)
            if not split or not isinstance(split[1], Not):
                return None
            b1, b2 = _leaf(split[0], False), _leaf(split[1].body, False)
        else:
            outer = _leaf(f, False)
            if not outer:
                return None
            split = _dest_implies(outer.body)
            if not split or not isinstance(split[0], Atom) or not isinstance(split[1], Not):
                return None
            b1 = BasicCausal(outer.intervention, False, split[0])
            b2 = BasicCausal(outer.intervention, False, split[1].body)
        if not b1 or not b2:
            return None
        a1, a2 = b1.body, b2.body
        if not isinstance(a1, Atom) or not isinstance(a2, Atom):
            return None
        return {
            "intervention": b1.intervention,
            "var": a1.var,
            "value": a1.value,
            "other_value": a2.value,
            "context": a1.context,
        }

    if scheme == "C2":
        parts = _flat_or(f)
        first = _leaf(parts[0], False)
        if not first or not isinstance(first.body, Atom):
            return None
        a = first.body
        return {"intervention": first.intervention, "var": a.var, "context": a.context}

    if scheme == "D2":
        outer = _leaf(f, False)
        if not outer:
            return None
        parts = _flat_or(outer.body)
        if not parts or not isinstance(parts[0], Atom):
            return None
        a = parts[0]
        return {"intervention": outer.intervention, "var": a.var, "context": a.context}

    if scheme == "C3":
        split = _dest_implies(f)
        if not split:
            return None
        left, right = split
        pieces = _flat_and(left)
        if len(pieces) != 2:
            return None
        b_w, b_y = _leaf(pieces[0], False), _leaf(pieces[1], False)
        b_r = _leaf(right, False)
        if not (b_w and b_y and b_r):
            return None
        if not (isinstance(b_w.body, Atom) and isinstance(b_y.body, Atom)):
            return None
        return {
            "base": b_w.intervention,
            "promoted": (b_w.body.var, b_w.body.value),
            "target": (b_y.body.var, b_y.body.value),
            "context": b_w.body.context,
        }

    if scheme == "D3":
        split = _dest_implies(f)
        if not split:
            return None
        d_left = _leaf(split[0], True)
        if not d_left:
            return None
        atoms = _flat_and(d_left.body)
        if not atoms or not all(isinstance(a, Atom) for a in atoms):
            return None
        a_w, targets = atoms[0], atoms[1:]
        return {
            "base": d_left.intervention,
            "promoted": (a_w.var, a_w.value),
            "targets": tuple((a.var, a.value) for a in targets),
            "context": a_w.context,
        }

    if scheme in ("C4", "D4"):
        leaf = _leaf(f, False)
        if not leaf or not isinstance(leaf.body, Atom):
            return None
        a = leaf.body
        if (a.var, a.value) not in leaf.intervention:
            return None
        others = tuple(p for p in leaf.intervention if p != (a.var, a.value))
        return {"var": a.var, "value": a.value, "others": others, "context": a.context}

    if scheme == "C5":
        split = _dest_implies(f)
        if not split:
            return None
        left, right = split
        pieces = _flat_and(left)
        if len(pieces) != 2:
            return None
        b1, b2 = _leaf(pieces[0], False), _leaf(pieces[1], False)
        b_r = _leaf(right, False)
        if not (b1 and b2 and b_r):
            return None
        if not (isinstance(b1.body, Atom) and isinstance(b2.body, Atom)):
            return None
        return {
            "base": b_r.intervention,
            "left": (b1.body.var, b1.body.value),
            "right": (b2.body.var, b2.body.value),
            "context": b1.body.context,
        }

    if scheme == "D5":
        split = _dest_implies(f)
        if not split:
            return None
        d_r = _leaf(split[1], True)
        if not d_r:
            return None
        atoms = _flat_and(d_r.body)
        if len(atoms) < 2 or not all(isinstance(a, Atom) for a in atoms):
            return None
        a_w, a_y, rest = atoms[0], atoms[1], atoms[2:]
        return {
            "base": d_r.intervention,
            "left": (a_y.var, a_y.value),
            "right": (a_w.var, a_w.value),
            "rest": tuple((a.var, a.value) for a in rest),
            "context": a_w.context,
        }

    if scheme in ("C6", "D6"):
        # no cheap shape anchor: try every candidate chain
        for k in range(1, len(sig.endogenous)):
            for chain in itertools.permutations(sig.endogenous, k + 1):
                try:
                    if _build(scheme, {"chain": chain}, sig) == f:
                        return {"chain": chain}
                except ValidationError:
                    continue
        return None

    if scheme == "D7":
        split = _dest_implies(f)
        if not split:
            return None
        pieces = _flat_and(split[0])
        if len(pieces) != 2:
            return None
        b1 = _leaf(pieces[0], False)
        b3 = _leaf(split[1], False)
        if not (b1 and b3):
            return None
        return {
            "intervention": b1.intervention,
            "premise": b1.body,
            "conclusion": b3.body,
        }

    if scheme == "D8":
        leaf = _leaf(f, False)
        if not leaf:
            return None
        return {"intervention": leaf.intervention, "body": leaf.body}

    if scheme in ("D9", "D10"):
        pieces = _flat_and(f)
        if len(pieces) != 2:
            return None
        dia = _leaf(pieces[0], True)
        if not dia or not isinstance(dia.body, TrueConst):
            return None
        boxes = _flat_or(pieces[1])
        first = _leaf(boxes[0], False)
        if not first or not isinstance(first.body, Atom):
            return None
        a = first.body
        return {"var": a.var, "intervention": dia.intervention, "context": a.context}

    if scheme == "Ord":
        if order is None:
            return None
        from .formulas import format_formula  # localized: only for error-free probing

        pieces = _flat_and(f)
        # the first biconditional contributes four atoms through two boxes;
        # recover them from the desugared shape
        probe = f
        while isinstance(probe, And):
            probe = probe.left
        split = _dest_implies(probe)
        if not split:
            return None
        b_w = _leaf(split[0], False)
        b_plain = _leaf(split[1], False)
        if not (b_w and b_plain and isinstance(b_plain.body, Atom)):
            return None
        promoted = tuple(p for p in b_w.intervention if p not in b_plain.intervention)
        if len(promoted) != 1:
            return None
        return {
            "var": b_plain.body.var,
            "promoted": promoted[0],
            "base": b_plain.intervention,
            "context": b_plain.body.context,
        }

    return None


def is_instance(f: Formula, scheme: str, sig: Signature, order=None, cap: int = DEFAULT_TAUTOLOGY_CAP) -> dict | None:
    """Bindings under which the scheme instantiates to exactly ``f``, or None.

    C0/D0 delegate to the tautology oracle over box-leaf units; D8 checks
    the box body the same way.  Everything else is shape-directed
    extraction confirmed by re-instantiation, so a match guarantees
    ``instantiate(scheme, bindings) == f``.
    """
    if scheme in ("C0", "D0"):
        return {"formula": f} if tautology(f, cap) else None
    if scheme == "D8":
        leaf = _leaf(f, False)
        if not leaf:
            return None
        if not tautology(leaf.body, cap):
            return None
        return {"intervention": leaf.intervention, "body": leaf.body}
    bindings = _extract(scheme, f, sig, order)
    if bindings is None:
        return None
    try:
        candidate = instantiate(scheme, bindings, sig, order)
    except (ValidationError, TautologyCapExceeded):
        return None
    return bindings if candidate.formula == f else None


# --- soundness sweeps -----------------------------------------------------------------


@dataclass(frozen=True)
class SoundnessFailure:
    bindings: dict
    formula: Formula


@dataclass(frozen=True)
class SoundnessReport:
    scheme: str
    exhaustive: bool
    samples: int | None
    seed: int | None
    total: int
    failures: tuple[SoundnessFailure, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def _random_iv(rng: random.Random, sig: Signature, exclude: tuple[str, ...]) -> Assignment:
    pool = [v for v in sig.endogenous if v not in exclude]
    size = rng.randint(0, len(pool))
    chosen = sorted(rng.sample(range(len(pool)), size))
    return tuple((pool[i], rng.choice(sig.domains[pool[i]])) for i in chosen)


def _random_context(rng: random.Random, sig: Signature) -> Assignment:
    return tuple((u, rng.choice(sig.domains[u])) for u in sig.exogenous)


def sample_instance(
    scheme: str, sig: Signature, rng: random.Random, bounds: Bounds = Bounds(), order=None
) -> AxiomInstance:
    """One random instance of a scheme; retries until side conditions hold."""
    endo = sig.endogenous
    for _ in range(1000):
        try:
            ctx = _random_context(rng, sig)
            if scheme in ("C0", "D0"):
                units = _unit_boxes(sig)
                u, v = rng.choice(units), rng.choice(units)
                formula = rng.choice(
                    [Or(u, Not(u)), implies(u, u), implies(And(u, v), u), implies(u, Or(u, v))]
                )
                return instantiate(scheme, {"formula": formula}, sig)
            if scheme in ("C1", "D1"):
                var = rng.choice(endo)
                x, x2 = rng.sample(sig.domains[var], 2)
                return instantiate(
                    scheme,
                    {
                        "intervention": _random_iv(rng, sig, (var,)),
                        "var": var,
                        "value": x,
                        "other_value": x2,
                        "context": ctx,
                    },
                    sig,
                )
            if scheme in ("C2", "D2"):
                var = rng.choice(endo)
                return instantiate(
                    scheme,
                    {"intervention": _random_iv(rng, sig, (var,)), "var": var, "context": ctx},
                    sig,
                )
            if scheme == "C3":
                w_var, y_var = rng.sample(endo, 2)
                return instantiate(
                    scheme,
                    {
                        "base": _random_iv(rng, sig, (w_var, y_var)),
                        "promoted": (w_var, rng.choice(sig.domains[w_var])),
                        "target": (y_var, rng.choice(sig.domains[y_var])),
                        "context": ctx,
                    },
                    sig,
                )
            if scheme == "D3":
                w_var = rng.choice(endo)
                base = _random_iv(rng, sig, (w_var,))
                pinned = {v for v, _ in base} | {w_var}
                free = [v for v in endo if v not in pinned]
                picked = rng.sample(free, rng.randint(0, len(free)))
                targets = sig.sort_pairs((v, rng.choice(sig.domains[v])) for v in picked)
                return instantiate(
                    scheme,
                    {
                        "base": base,
                        "promoted": (w_var, rng.choice(sig.domains[w_var])),
                        "targets": targets,
                        "context": ctx,
                    },
                    sig,
                )
            if scheme in ("C4", "D4"):
                var = rng.choice(endo)
                return instantiate(
                    scheme,
                    {
                        "var": var,
                        "value": rng.choice(sig.domains[var]),
                        "others": _random_iv(rng, sig, (var,)),
                        "context": ctx,
                    },
                    sig,
                )
            if scheme == "C5":
                y_var, w_var = rng.sample(endo, 2)
                return instantiate(
                    scheme,
                    {
                        "base": _random_iv(rng, sig, (y_var, w_var)),
                        "left": (y_var, rng.choice(sig.domains[y_var])),
                        "right": (w_var, rng.choice(sig.domains[w_var])),
                        "context": ctx,
                    },
                    sig,
                )
            if scheme == "D5":
                y_var, w_var = rng.sample(endo, 2)
                base = _random_iv(rng, sig, (y_var, w_var))
                pinned = {v for v, _ in base}
                rest = tuple(
                    (v, rng.choice(sig.domains[v]))
                    for v in endo
                    if v not in pinned and v not in (y_var, w_var)
                )
                return instantiate(
                    scheme,
                    {
                        "base": base,
                        "left": (y_var, rng.choice(sig.domains[y_var])),
                        "right": (w_var, rng.choice(sig.domains[w_var])),
                        "rest": rest,
                        "context": ctx,
                    },
                    sig,
                )
            if scheme in ("C6", "D6"):
                longest = len(endo) - 1 if bounds.max_chain is None else min(bounds.max_chain, len(endo) - 1)
                k = rng.randint(1, max(1, longest))
                chain = tuple(rng.sample(endo, k + 1))
                return instantiate(scheme, {"chain": chain}, sig)
            if scheme == "D7":
                pool = _body_pool(sig, ctx, bounds)
                return instantiate(
                    scheme,
                    {
                        "intervention": _random_iv(rng, sig, ()),
                        "premise": rng.choice(pool),
                        "conclusion": rng.choice(pool),
                    },
                    sig,
                )
            if scheme == "D8":
                pool = _tautology_pool(sig, ctx)
                return instantiate(
                    scheme,
                    {"intervention": _random_iv(rng, sig, ()), "body": rng.choice(pool)},
                    sig,
                )
            if scheme == "D9":
                var = rng.choice(endo)
                rest = tuple((v, rng.choice(sig.domains[v])) for v in endo if v != var)
                return instantiate(scheme, {"var": var, "intervention": rest, "context": ctx}, sig)
            if scheme == "D10":
                var = rng.choice(endo)
                return instantiate(
                    scheme,
                    {"var": var, "intervention": _random_iv(rng, sig, (var,)), "context": ctx},
                    sig,
                )
            if scheme == "Ord":
                if order is None:
                    raise ValidationError("Ord needs a total order")
                var, w_var = sorted(rng.sample(endo, 2), key=order.index)
                return instantiate(
                    scheme,
                    {
                        "var": var,
                        "promoted": (w_var, rng.choice(sig.domains[w_var])),
                        "base": _random_iv(rng, sig, (var, w_var)),
                        "context": ctx,
                    },
                    sig,
                    order,
                )
            raise ValidationError(f"unknown scheme: {scheme}")
        except ValidationError:
            if scheme not in SCHEMES:
                raise
            continue
    raise ValidationError(f"could not sample an instance of {scheme} for this signature")


def check_soundness(
    model: CausalModel,
    scheme: str,
    bounds: Bounds = Bounds(),
    samples: int | None = None,
    seed: int = 0,
    order=None,
    budget: Budget | None = None,
) -> SoundnessReport:
    """Evaluate scheme instances against one model and report the failures.

    Exhaustive by default (every instance within bounds); pass ``samples``
    for a seeded random sweep instead.  Solution sets are shared across
    instances, so sweeps stay cheap on desk-scale signatures.
    """
    sig = model.signature
    cache: SolutionCache = {}
    failures: list[SoundnessFailure] = []
    total = 0
    if samples is None:
        stream: Iterator[AxiomInstance] = enumerate_instances(scheme, sig, bounds, order)
    else:
        rng = random.Random(seed)
        stream = (sample_instance(scheme, sig, rng, bounds, order) for _ in range(samples))
    for instance in stream:
        total += 1
        if not holds(model, instance.formula, budget, cache).verdict:
            failures.append(SoundnessFailure(instance.bindings, instance.formula))
    return SoundnessReport(
        scheme=scheme,
        exhaustive=samples is None,
        samples=samples,
        seed=None if samples is None else seed,
        total=total,
        failures=tuple(failures),
    )
