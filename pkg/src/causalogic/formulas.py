"""Causal formula language: AST, parser, printer, and classifiers.

A causal formula is a Boolean combination of intervention boxes.  A box
``[X<-1, Y<-0](...)`` asserts its body in every solution of the system
obtained by pinning the listed variables; the diamond form ``<...>(...)``
asserts it in some solution.  Box bodies are Boolean combinations of
atoms ``V(ctx)=value`` (where ``ctx`` totally assigns the exogenous
variables) plus the constants ``true`` and ``false``.

Concrete grammar (whitespace-insensitive)::

    formula := combination of leaves under  !  &  |  ->  <->  ( )
    leaf    := '[' sets ']' '(' inner ')'  |  '<' sets '>' '(' inner ')'
    sets    := empty | VAR '<-' VALUE (',' VAR '<-' VALUE)*
    inner   := combination of atoms and true/false under the same operators
    atom    := VAR '(' ctx ')' '=' VALUE
    ctx     := empty | EXOVAR '=' VALUE (',' ...)*

Precedence: ``!`` binds tightest, then ``&``, ``|``, ``->``
(right-associative), ``<->``; boxes bind tighter than all connectives.
Implication and biconditional are surface sugar: the constructors desugar
them to negation/disjunction, and the printer re-sugars when the shape
matches, so structural equality is equality up to that normalization.

Atoms cannot appear bare at the top level; all atoms under one box must
carry the same context, because one box evaluates one pinned system.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ParseError, ValidationError
from .model import Assignment, Signature


class Formula:
    """Base class for every AST node."""

    __slots__ = ()


@dataclass(frozen=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True)
class FalseConst(Formula):
    pass


TRUE = TrueConst()
FALSE = FalseConst()


@dataclass(frozen=True)
class Atom(Formula):
    """``var(context)=value`` with the context in canonical exogenous order."""

    var: str
    context: Assignment
    value: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class BasicCausal(Formula):
    """An intervention box (or diamond) wrapping an inner formula."""

    intervention: Assignment
    diamond: bool
    body: Formula


def implies(left: Formula, right: Formula) -> Formula:
    return Or(Not(left), right)


def iff(left: Formula, right: Formula) -> Formula:
    return And(implies(left, right), implies(right, left))


def conj(parts) -> Formula:
    """Left-associated conjunction; empty input collapses to true."""
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def box(intervention, body: Formula) -> BasicCausal:
    return BasicCausal(tuple(intervention), False, body)


def diamond(intervention, body: Formula) -> BasicCausal:
    return BasicCausal(tuple(intervention), True, body)


# --- traversal helpers -------------------------------------------------------


def iter_leaves(f: Formula):
    """Basic-causal leaves of a top-level formula, left to right."""
    if isinstance(f, BasicCausal):
        yield f
    elif isinstance(f, Not):
        yield from iter_leaves(f.body)
    elif isinstance(f, (And, Or)):
        yield from iter_leaves(f.left)
        yield from iter_leaves(f.right)


def iter_atoms(inner: Formula):
    if isinstance(inner, Atom):
        yield inner
    elif isinstance(inner, Not):
        yield from iter_atoms(inner.body)
    elif isinstance(inner, (And, Or)):
        yield from iter_atoms(inner.left)
        yield from iter_atoms(inner.right)


def leaf_context(leaf: BasicCausal) -> Assignment | None:
    """The shared context of the leaf's atoms, or None for an atom-free body."""
    for atom in iter_atoms(leaf.body):
        return atom.context
    return None


# --- validation --------------------------------------------------------------


def _validate_inner(body: Formula, sig: Signature, seen_context: list) -> None:
    if isinstance(body, (TrueConst, FalseConst)):
        return
    if isinstance(body, Atom):
        if body.var not in sig.endogenous:
            raise ValidationError(f"unknown endogenous variable: {body.var}")
        if body.value not in sig.domains[body.var]:
            raise ValidationError(f"value {body.value} outside domain of {body.var}")
        ctx_vars = [v for v, _ in body.context]
        if len(set(ctx_vars)) != len(ctx_vars):
            raise ValidationError(f"atom for {body.var} repeats a context variable")
        for cvar, cval in body.context:
            if cvar not in sig.exogenous:
                raise ValidationError(f"context variable {cvar} is not exogenous")
            if cval not in sig.domains[cvar]:
                raise ValidationError(f"value {cval} outside domain of {cvar}")
        if set(ctx_vars) != set(sig.exogenous):
            raise ValidationError(
                f"partial context in atom for {body.var}: a context must assign "
                "every exogenous variable"
            )
        if seen_context:
            if body.context != seen_context[0]:
                raise ValidationError(
                    "mixed contexts inside one box: each box evaluates a single "
                    "pinned system, so all its atoms must share one context"
                )
        else:
            seen_context.append(body.context)
        return
    if isinstance(body, Not):
        _validate_inner(body.body, sig, seen_context)
        return
    if isinstance(body, (And, Or)):
        _validate_inner(body.left, sig, seen_context)
        _validate_inner(body.right, sig, seen_context)
        return
    if isinstance(body, BasicCausal):
        raise ValidationError("intervention boxes cannot nest inside a box body")
    raise ValidationError(f"unexpected node in box body: {body!r}")


def validate_formula(f: Formula, sig: Signature) -> None:
    """Raise ValidationError unless ``f`` is a well-formed causal formula over ``sig``."""
    if isinstance(f, BasicCausal):
        seen = set()
        for var, value in f.intervention:
            if var in seen:
                raise ValidationError(f"duplicate intervened variable: {var}")
            seen.add(var)
            if var not in sig.endogenous:
                raise ValidationError(f"intervened variable {var} is not endogenous")
            if value not in sig.domains[var]:
                raise ValidationError(f"value {value} outside domain of {var}")
        _validate_inner(f.body, sig, [])
        return
    if isinstance(f, Not):
        validate_formula(f.body, sig)
        return
    if isinstance(f, (And, Or)):
        validate_formula(f.left, sig)
        validate_formula(f.right, sig)
        return
    if isinstance(f, Atom):
        raise ValidationError(
            "a bare atom is not a causal formula; wrap it in an empty "
            "intervention, e.g. [](X()=1)"
        )
    raise ValidationError(f"not a causal formula: {f!r}")


# --- language classification ---------------------------------------------------


class LanguageClass:
    GP = "GP"
    UNIQ = "uniq"
    PLUS = "plus"


def _single_atom_box(leaf: BasicCausal) -> bool:
    return not leaf.diamond and isinstance(leaf.body, Atom)


def _is_gp(f: Formula) -> bool:
    if isinstance(f, BasicCausal):
        return _single_atom_box(f)
    if isinstance(f, And):
        return _is_gp(f.left) and _is_gp(f.right)
    return False


def classify_language(f: Formula) -> str:
    """Smallest language layer containing the formula.

    GP: a conjunction of boxes each wrapping one atom.  uniq: arbitrary
    Boolean structure whose leaves are all single-atom boxes (no diamonds).
    plus: everything else.
    """
    if _is_gp(f):
        return LanguageClass.GP
    if all(_single_atom_box(leaf) for leaf in iter_leaves(f)):
        return LanguageClass.UNIQ
    return LanguageClass.PLUS


def mentioned(f: Formula) -> tuple[tuple[str, ...], tuple[Assignment, ...]]:
    """Endogenous variables and distinct context tuples appearing in ``f``.

    Both are returned in first-appearance order over a left-to-right walk,
    covering intervention lists as well as atoms.
    """
    variables: dict[str, None] = {}
    contexts: dict[Assignment, None] = {}
    for leaf in iter_leaves(f):
        for var, _ in leaf.intervention:
            variables.setdefault(var)
        for atom in iter_atoms(leaf.body):
            variables.setdefault(atom.var)
            contexts.setdefault(atom.context)
    return tuple(variables), tuple(contexts)


# --- tokenizer ---------------------------------------------------------------


_FORMULA_PUNCT = ("<->", "<-", "->", "(", ")", "[", "]", "<", ">", ",", "=", "!", "&", "|")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Tok]:
    tokens: list[_Tok] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(_Tok("ident", text[start:i], line, col))
            col += i - start
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            start = i
            i += 1
            while i < n and text[i].isdigit():
                i += 1
            tokens.append(_Tok("int", str(int(text[start:i])), line, col))
            col += i - start
            continue
        for punct in _FORMULA_PUNCT:
            if text.startswith(punct, i):
                tokens.append(_Tok(punct, punct, line, col))
                i += len(punct)
                col += len(punct)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Tok("eof", "", line, col))
    return tokens


class _Parser:
    """Recursive-descent parser shared by the outer and inner levels.

    The two levels differ only in their leaves: intervention boxes at the
    top, atoms and constants inside a box.
    """

    def __init__(self, tokens: list[_Tok], sig: Signature):
        self.tokens = tokens
        self.sig = sig
        self.pos = 0

    def peek(self) -> _Tok:
        return self.tokens[self.pos]

    def next(self) -> _Tok:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.line, tok.column
            )
        return self.next()

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.column)

    # precedence cascade, lowest first

    def formula(self, inner: bool) -> Formula:
        return self.iff_level(inner)

    def iff_level(self, inner: bool) -> Formula:
        left = self.imp_level(inner)
        while self.peek().kind == "<->":
            self.next()
            left = iff(left, self.imp_level(inner))
        return left

    def imp_level(self, inner: bool) -> Formula:
        left = self.or_level(inner)
        if self.peek().kind == "->":
            self.next()
            return implies(left, self.imp_level(inner))
        return left

    def or_level(self, inner: bool) -> Formula:
        left = self.and_level(inner)
        while self.peek().kind == "|":
            self.next()
            left = Or(left, self.and_level(inner))
        return left

    def and_level(self, inner: bool) -> Formula:
        left = self.unary(inner)
        while self.peek().kind == "&":
            self.next()
            left = And(left, self.unary(inner))
        return left

    def unary(self, inner: bool) -> Formula:
        tok = self.peek()
        if tok.kind == "!":
            self.next()
            return Not(self.unary(inner))
        if tok.kind == "(":
            self.next()
            out = self.formula(inner)
            self.expect(")")
            return out
        return self.inner_leaf() if inner else self.outer_leaf()

    # leaves

    def outer_leaf(self) -> Formula:
        tok = self.peek()
        if tok.kind == "[":
            self.next()
            pairs = self.intervention_sets("]")
            return BasicCausal(pairs, False, self.boxed_body())
        if tok.kind == "<":
            self.next()
            pairs = self.intervention_sets(">")
            return BasicCausal(pairs, True, self.boxed_body())
        if tok.kind == "ident":
            raise self.error(
                f"bare atom {tok.text!r} at top level; wrap it in an empty "
                f"intervention, e.g. []({tok.text}(...)=...)"
            )
        raise self.error(f"expected '[' or '<', found {tok.text or 'end of input'!r}")

    def boxed_body(self) -> Formula:
        self.expect("(")
        body = self.formula(inner=True)
        self.expect(")")
        return body

    def intervention_sets(self, closer: str) -> Assignment:
        pairs: list[tuple[str, str]] = []
        if self.peek().kind == closer:
            self.next()
            return ()
        while True:
            var = self.expect("ident").text
            self.expect("<-")
            pairs.append((var, self.value_token()))
            tok = self.peek()
            if tok.kind == ",":
                self.next()
                continue
            if tok.kind == closer:
                self.next()
                return tuple(pairs)
            raise self.error(f"expected ',' or {closer!r}, found {tok.text or 'end of input'!r}")

    def inner_leaf(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "true":
            self.next()
            return TRUE
        if tok.kind == "ident" and tok.text == "false":
            self.next()
            return FALSE
        if tok.kind == "ident":
            var = self.next().text
            self.expect("(")
            context: list[tuple[str, str]] = []
            if self.peek().kind != ")":
                while True:
                    cvar = self.expect("ident").text
                    self.expect("=")
                    context.append((cvar, self.value_token()))
                    if self.peek().kind == ",":
                        self.next()
                        continue
                    break
            self.expect(")")
            self.expect("=")
            return Atom(var, self.sig.sort_pairs(context), self.value_token())
        raise self.error(
            f"expected an atom, 'true', or 'false', found {tok.text or 'end of input'!r}"
        )

    def value_token(self) -> str:
        tok = self.peek()
        if tok.kind in ("int", "ident"):
            return self.next().text
        raise self.error(f"expected a value token, found {tok.text or 'end of input'!r}")


def parse_formula(text: str, sig: Signature) -> Formula:
    """Parse and validate a causal formula against a signature."""
    parser = _Parser(_tokenize(text), sig)
    out = parser.formula(inner=False)
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.column)
    validate_formula(out, sig)
    return out


# --- printer -----------------------------------------------------------------

_PREC_IFF, _PREC_IMP, _PREC_OR, _PREC_AND, _PREC_LEAF = 1, 2, 3, 4, 5


def _unsugar_iff(f: Formula):
    # matches And(Or(Not a, b), Or(Not b, a)) produced by iff()
    if (
        isinstance(f, And)
        and isinstance(f.left, Or)
        and isinstance(f.right, Or)
        and isinstance(f.left.left, Not)
        and isinstance(f.right.left, Not)
        and f.left.left.body == f.right.right
        and f.right.left.body == f.left.right
    ):
        return f.left.left.body, f.left.right
    return None


def _fmt(f: Formula, want: int) -> str:
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Atom):
        ctx = ", ".join(f"{v}={val}" for v, val in f.context)
        return f"{f.var}({ctx})={f.value}"
    if isinstance(f, BasicCausal):
        sets = ", ".join(f"{v}<-{val}" for v, val in f.intervention)
        opener, closer = ("<", ">") if f.diamond else ("[", "]")
        return f"{opener}{sets}{closer}({_fmt(f.body, _PREC_IFF)})"
    if isinstance(f, Not):
        return f"!({_fmt(f.body, _PREC_IFF)})"
    if isinstance(f, And):
        pair = _unsugar_iff(f)
        if pair is not None:
            a, b = pair
            text = f"{_fmt(a, _PREC_IMP)} <-> {_fmt(b, _PREC_IMP)}"
            return f"({text})" if want > _PREC_IFF else text
        text = f"{_fmt(f.left, _PREC_AND)} & {_fmt(f.right, _PREC_AND + 1)}"
        return f"({text})" if want > _PREC_AND else text
    if isinstance(f, Or):
        if isinstance(f.left, Not):
            # re-sugar the implication shape produced by implies()
            text = f"{_fmt(f.left.body, _PREC_IMP + 1)} -> {_fmt(f.right, _PREC_IMP)}"
            return f"({text})" if want > _PREC_IMP else text
        text = f"{_fmt(f.left, _PREC_OR)} | {_fmt(f.right, _PREC_OR + 1)}"
        return f"({text})" if want > _PREC_OR else text
    raise ValidationError(f"cannot print: {f!r}")


def format_formula(f: Formula) -> str:
    """Canonical text form; parsing it back yields a structurally equal AST."""
    return _fmt(f, _PREC_IFF)
