"""Text format for signatures and causal models.

A model file has a ``signature`` block and an ``equations`` block::

    # comments run to end of line
    signature {
      exogenous U { 0 1 }
      endogenous X { -1 0 1 }
      endogenous Y { -1 0 1 }
    }
    equations {
      X: case Y=-1 -> -1; case Y=0 -> 0; default -> 1
      Y: case X=-1 -> 1; case X=0 -> 0; default -> -1
    }

Whitespace and comments are insignificant: two files differing only there
load to equal models.  Value tokens are identifiers or integers (integers
are normalized, so ``01`` and ``1`` coincide).  The equations block may be
omitted to describe a bare signature.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, ValidationError
from .model import Assignment, CausalModel, EquationTable, Signature, validate_model

_KEYWORDS = {"signature", "equations", "exogenous", "endogenous", "case", "default"}

_PUNCT = ("->", "{", "}", ":", ";", ",", "=")


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "int" | punctuation text | "eof"
    text: str
    line: int
    column: int


def tokenize_model(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
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
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            tokens.append(Token("ident", word, line, col))
            col += i - start
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            start = i
            i += 1
            while i < n and text[i].isdigit():
                i += 1
            raw = text[start:i]
            tokens.append(Token("int", str(int(raw)), line, col))
            col += i - start
            continue
        for punct in _PUNCT:
            if text.startswith(punct, i):
                tokens.append(Token(punct, punct, line, col))
                i += len(punct)
                col += len(punct)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Stream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.line, tok.column)
        return self.next()

    def expect_word(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            raise ParseError(f"expected {word!r}, found {tok.text or 'end of input'!r}", tok.line, tok.column)
        return self.next()

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word


def _parse_name(stream: _Stream, what: str) -> Token:
    tok = stream.peek()
    if tok.kind != "ident" or tok.text in _KEYWORDS:
        raise ParseError(f"expected {what}, found {tok.text or 'end of input'!r}", tok.line, tok.column)
    return stream.next()


def _parse_value(stream: _Stream) -> str:
    tok = stream.peek()
    if tok.kind == "int":
        return stream.next().text
    if tok.kind == "ident" and tok.text not in _KEYWORDS:
        return stream.next().text
    raise ParseError(f"expected a value token, found {tok.text or 'end of input'!r}", tok.line, tok.column)


def _parse_signature_block(stream: _Stream) -> Signature:
    stream.expect_word("signature")
    stream.expect("{")
    exogenous: list[str] = []
    endogenous: list[str] = []
    domains: dict[str, tuple[str, ...]] = {}
    while not stream.peek().kind == "}":
        tok = stream.peek()
        if stream.at_word("exogenous") or stream.at_word("endogenous"):
            role = stream.next().text
        else:
            raise ParseError(
                f"expected 'exogenous' or 'endogenous', found {tok.text or 'end of input'!r}",
                tok.line,
                tok.column,
            )
        name_tok = _parse_name(stream, "a variable name")
        stream.expect("{")
        values: list[str] = []
        while stream.peek().kind != "}":
            values.append(_parse_value(stream))
        stream.expect("}")
        (exogenous if role == "exogenous" else endogenous).append(name_tok.text)
        if name_tok.text in domains:
            raise ParseError(f"variable {name_tok.text} declared twice", name_tok.line, name_tok.column)
        domains[name_tok.text] = tuple(values)
    stream.expect("}")
    return Signature(tuple(exogenous), tuple(endogenous), domains)


def _parse_condition(stream: _Stream, sig: Signature) -> Assignment:
    pairs = []
    while True:
        name = _parse_name(stream, "a condition variable").text
        stream.expect("=")
        pairs.append((name, _parse_value(stream)))
        if stream.peek().kind == ",":
            stream.next()
            continue
        break
    return sig.sort_pairs(pairs)


def _parse_equations_block(stream: _Stream, sig: Signature) -> dict[str, EquationTable]:
    stream.expect_word("equations")
    stream.expect("{")
    tables: dict[str, EquationTable] = {}
    while stream.peek().kind != "}":
        name_tok = _parse_name(stream, "an equation target")
        stream.expect(":")
        rows: list[tuple[Assignment, str]] = []
        default: str | None = None
        while True:
            tok = stream.peek()
            if stream.at_word("case"):
                stream.next()
                condition = _parse_condition(stream, sig)
                stream.expect("->")
                rows.append((condition, _parse_value(stream)))
            elif stream.at_word("default"):
                stream.next()
                stream.expect("->")
                default = _parse_value(stream)
            else:
                raise ParseError(
                    f"expected 'case' or 'default', found {tok.text or 'end of input'!r}",
                    tok.line,
                    tok.column,
                )
            if default is not None:
                break
            stream.expect(";")
        if name_tok.text in tables:
            raise ParseError(f"two equations for {name_tok.text}", name_tok.line, name_tok.column)
        tables[name_tok.text] = EquationTable(name_tok.text, tuple(rows), default)
    stream.expect("}")
    return tables


def parse_model(text: str, *, check: bool = True) -> CausalModel:
    """Parse model text into a CausalModel.

    Raises ParseError with a position on malformed syntax.  With ``check``
    (the default) the parsed model is validated and a ValidationError
    listing every violation is raised when it is rejected.
    """
    stream = _Stream(tokenize_model(text))
    sig = _parse_signature_block(stream)
    equations: dict[str, EquationTable] = {}
    if stream.at_word("equations"):
        equations = _parse_equations_block(stream, sig)
    tok = stream.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.column)
    model = CausalModel(sig, equations)
    if check:
        problems = validate_model(model)
        if problems:
            raise ValidationError("model rejected:\n  " + "\n  ".join(problems))
    return model


def parse_signature(text: str) -> Signature:
    """Parse the signature of a model file or of a bare signature file."""
    return parse_model(text, check=False).signature


def load_model(path: str, *, check: bool = True) -> CausalModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), check=check)


def load_signature(path: str) -> Signature:
    with open(path, encoding="utf-8") as fh:
        return parse_signature(fh.read())


def format_signature(sig: Signature) -> str:
    lines = ["signature {"]
    for name in sig.exogenous:
        lines.append(f"  exogenous {name} {{ {' '.join(sig.domains[name])} }}")
    for name in sig.endogenous:
        lines.append(f"  endogenous {name} {{ {' '.join(sig.domains[name])} }}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_model(model: CausalModel) -> str:
    """Serialize a model in canonical text form; parses back to an equal model."""
    out = [format_signature(model.signature).rstrip("\n")]
    out.append("equations {")
    for name in model.signature.endogenous:
        table = model.equations[name]
        clauses = [
            "case " + ", ".join(f"{v}={val}" for v, val in condition) + f" -> {result}"
            for condition, result in table.rows
        ]
        clauses.append(f"default -> {table.default}")
        out.append(f"  {name}: " + "; ".join(clauses))
    out.append("}")
    return "\n".join(out) + "\n"
