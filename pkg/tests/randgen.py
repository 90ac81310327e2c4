"""Seeded random generators for models and formulas (test plumbing only)."""

import random

from causalogic.formulas import (
    FALSE,
    TRUE,
    And,
    Atom,
    BasicCausal,
    Formula,
    Not,
    Or,
    iff,
    implies,
)
from causalogic.model import CausalModel, EquationTable, Signature


def random_signature(rng: random.Random) -> Signature:
    n_exo = rng.randint(0, 2)
    n_endo = rng.randint(1, 3)
    exo = tuple(f"E{i}" for i in range(n_exo))
    endo = tuple(f"V{i}" for i in range(n_endo))
    domains = {}
    for name in exo:
        domains[name] = tuple(str(v) for v in range(rng.randint(1, 3)))
    for name in endo:
        if rng.random() < 0.5:
            domains[name] = tuple(str(v) for v in range(rng.randint(2, 3)))
        else:
            domains[name] = tuple(rng.sample(["lo", "mid", "hi", "off"], rng.randint(2, 3)))
    return Signature(exo, endo, domains)


def random_model(rng: random.Random, sig: Signature | None = None) -> CausalModel:
    if sig is None:
        sig = random_signature(rng)
    equations = {}
    for target in sig.endogenous:
        readable = list(sig.others(target))
        rows = []
        for _ in range(rng.randint(0, 3)):
            if not readable:
                break
            picked = rng.sample(readable, rng.randint(1, len(readable)))
            condition = sig.sort_pairs((v, rng.choice(sig.domains[v])) for v in picked)
            rows.append((condition, rng.choice(sig.domains[target])))
        equations[target] = EquationTable(target, tuple(rows), rng.choice(sig.domains[target]))
    return CausalModel(sig, equations)


def random_inner(rng: random.Random, sig: Signature, context, depth: int) -> Formula:
    if depth == 0 or rng.random() < 0.4:
        roll = rng.random()
        if roll < 0.1:
            return TRUE
        if roll < 0.15:
            return FALSE
        var = rng.choice(sig.endogenous)
        return Atom(var, context, rng.choice(sig.domains[var]))
    shape = rng.randrange(5)
    if shape == 0:
        return Not(random_inner(rng, sig, context, depth - 1))
    left = random_inner(rng, sig, context, depth - 1)
    right = random_inner(rng, sig, context, depth - 1)
    return [And, Or, implies, iff][shape - 1](left, right)


def random_leaf(rng: random.Random, sig: Signature, inner_depth: int = 2) -> BasicCausal:
    size = rng.randint(0, len(sig.endogenous))
    pinned = rng.sample(list(sig.endogenous), size)
    intervention = sig.sort_pairs((v, rng.choice(sig.domains[v])) for v in pinned)
    context = tuple(rng.choice(sig.contexts()))
    body = random_inner(rng, sig, context, inner_depth)
    return BasicCausal(intervention, rng.random() < 0.3, body)


def random_formula(rng: random.Random, sig: Signature, depth: int = 2, inner_depth: int = 2) -> Formula:
    if depth == 0 or rng.random() < 0.4:
        return random_leaf(rng, sig, inner_depth)
    shape = rng.randrange(5)
    if shape == 0:
        return Not(random_formula(rng, sig, depth - 1, inner_depth))
    left = random_formula(rng, sig, depth - 1, inner_depth)
    right = random_formula(rng, sig, depth - 1, inner_depth)
    return [And, Or, implies, iff][shape - 1](left, right)
