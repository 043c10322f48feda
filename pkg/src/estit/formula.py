"""Formulas of the epistemic stit language with objective and subjective oughts.

The core AST has eight node types.  Disjunction, implication and the
possibility diamond are sugar: ``Or``, ``Implies`` and ``Diamond`` build the
equivalent core term, and :func:`render` folds those shapes back into the
concrete syntax.

Concrete syntax::

    ~p   p & q   p | q   p -> q   [] p   <> p
    [a] p   K[a] p   O[a] p   Os[a] p

Prefix operators bind tightest, then ``&``, then ``|``, then ``->`` (which
associates to the right).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Optional, Union


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    operand: Formula


@dataclass(frozen=True)
class Stit(Formula):
    agent: str
    operand: Formula


@dataclass(frozen=True)
class Knows(Formula):
    agent: str
    operand: Formula


@dataclass(frozen=True)
class ObjOught(Formula):
    agent: str
    operand: Formula


@dataclass(frozen=True)
class SubjOught(Formula):
    agent: str
    operand: Formula


AGENT_OPERATORS = (Stit, Knows, ObjOught, SubjOught)


def Or(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def Implies(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))


def Diamond(operand: Formula) -> Formula:
    return Not(Box(Not(operand)))


def conjoin(parts) -> Formula:
    """Left-nested conjunction of a nonempty sequence."""
    parts = list(parts)
    if not parts:
        raise ValueError("conjoin needs at least one formula")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order walk over every subformula, including ``f`` itself."""
    if isinstance(f, And):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, Atom):
        pass
    else:
        yield from subformulas(f.operand)
    yield f


def atoms(f: Formula) -> frozenset:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def agents(f: Formula) -> frozenset:
    return frozenset(g.agent for g in subformulas(f) if isinstance(g, AGENT_OPERATORS))


def depth(f: Formula) -> int:
    """Operator depth as written: ``<>``, ``|`` and ``->`` count as one level each."""
    if isinstance(f, Atom):
        return 0
    sugar = _sugar(f)
    if sugar is not None:
        return 1 + max(depth(g) for g in sugar[1:])
    if isinstance(f, And):
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + depth(f.operand)


# ---------------------------------------------------------------------------
# Rendering

_IMPLIES, _OR, _AND, _UNARY = range(4)

_PREFIX = {Stit: "[{}]", Knows: "K[{}]", ObjOught: "O[{}]", SubjOught: "Os[{}]"}


def _sugar(f: Formula):
    """Classify ``f`` as one of the sugared shapes, or return None."""
    if not isinstance(f, Not):
        return None
    inner = f.operand
    if isinstance(inner, Box) and isinstance(inner.operand, Not):
        return ("<>", inner.operand.operand)
    if isinstance(inner, And) and isinstance(inner.right, Not):
        # a diamond antecedent reads better as an implication
        if isinstance(inner.left, Not) and _sugar(inner.left) is None:
            return ("|", inner.left.operand, inner.right.operand)
        return ("->", inner.left, inner.right.operand)
    return None


def _render(f: Formula, ctx: int) -> str:
    sugar = _sugar(f)
    if sugar is not None and sugar[0] == "<>":
        return "<> " + _render(sugar[1], _UNARY)
    if sugar is not None and sugar[0] == "|":
        text = _render(sugar[1], _OR) + " | " + _render(sugar[2], _AND)
        return text if ctx <= _OR else f"({text})"
    if sugar is not None:
        text = _render(sugar[1], _OR) + " -> " + _render(sugar[2], _IMPLIES)
        return text if ctx <= _IMPLIES else f"({text})"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "~" + _render(f.operand, _UNARY)
    if isinstance(f, And):
        text = _render(f.left, _AND) + " & " + _render(f.right, _UNARY)
        return text if ctx <= _AND else f"({text})"
    if isinstance(f, Box):
        return "[] " + _render(f.operand, _UNARY)
    if isinstance(f, AGENT_OPERATORS):
        return _PREFIX[type(f)].format(f.agent) + " " + _render(f.operand, _UNARY)
    raise TypeError(f"not a formula: {f!r}")


def render(f: Formula) -> str:
    """Print ``f`` in concrete syntax with the fewest parentheses needed."""
    return _render(f, _IMPLIES)


# ---------------------------------------------------------------------------
# Parsing

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_MODAL_KEYWORDS = {"K": Knows, "O": ObjOught, "Os": SubjOught}


class ParseError(ValueError):
    """Raised on malformed formula text.

    ``offset`` is the byte offset of the offending token and ``expected`` the
    set of token kinds that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected=frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class UnknownOperatorError(ParseError):
    pass


@dataclass(frozen=True)
class _Token:
    kind: str  # one of the punctuation strings, "ident", "op" or "end"
    text: str
    offset: int


_PUNCT = ("->", "<>", "~", "&", "|", "(", ")", "]")
_UNARY_START = frozenset({"~", "[]", "<>", "[", "K[", "O[", "Os[", "ident", "("})


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> list:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "[":
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j < n and text[j] == "]":
                tokens.append(_Token("[]", text[i:j + 1], _byte_offset(text, i)))
                i = j + 1
            else:
                tokens.append(_Token("[", "[", _byte_offset(text, i)))
                i += 1
            continue
        m = IDENT.match(text, i)
        if m:
            j = m.end()
            k = j
            while k < n and text[k].isspace():
                k += 1
            if k < n and text[k] == "[" and not text[k + 1:].lstrip().startswith("]"):
                word = m.group()
                if word not in _MODAL_KEYWORDS:
                    raise UnknownOperatorError(
                        f"unknown operator {word!r}", _byte_offset(text, i),
                        {kw + "[" for kw in _MODAL_KEYWORDS})
                tokens.append(_Token(word + "[", word, _byte_offset(text, i)))
                i = k + 1
            else:
                tokens.append(_Token("ident", m.group(), _byte_offset(text, i)))
                i = j
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                tokens.append(_Token(p, p, _byte_offset(text, i)))
                i += len(p)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", _byte_offset(text, i), _UNARY_START)
    tokens.append(_Token("end", "", _byte_offset(text, n)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.offset, {kind})
        return self.advance()

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek().kind == "->":
            self.advance()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.peek().kind == "|":
            self.advance()
            out = Or(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.peek().kind == "&":
            self.advance()
            out = And(out, self.unary())
        return out

    def agent(self) -> str:
        name = self.expect("ident").text
        self.expect("]")
        return name

    def unary(self) -> Formula:
        tok = self.peek()
        kind = tok.kind
        if kind == "~":
            self.advance()
            return Not(self.unary())
        if kind == "[]":
            self.advance()
            return Box(self.unary())
        if kind == "<>":
            self.advance()
            return Diamond(self.unary())
        if kind == "[":
            self.advance()
            a = self.agent()
            return Stit(a, self.unary())
        if kind in ("K[", "O[", "Os["):
            self.advance()
            a = self.agent()
            return _MODAL_KEYWORDS[tok.text](a, self.unary())
        if kind == "ident":
            self.advance()
            return Atom(tok.text)
        if kind == "(":
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.offset, _UNARY_START)

    def parse(self) -> Formula:
        f = self.formula()
        tok = self.peek()
        if tok.kind != "end":
            expected = {"end", "&", "|", "->"}
            raise ParseError(f"unexpected {tok.text!r}", tok.offset, expected)
        return f


@lru_cache(maxsize=4096)
def parse(text: str) -> Formula:
    """Parse concrete syntax into the core AST.

    >>> parse("Os[a] ~G")
    SubjOught(agent='a', operand=Not(operand=Atom(name='G')))
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Schemata and substitution

FIXED = "fixed"
INDEXED = "agent-indexed-n"


@dataclass(frozen=True)
class Schema:
    """An axiom template written in concrete syntax.

    Formula metavariables are atoms (``p``, ``q``, ``p1``...) and agent
    metavariables are agent names (``A``, ``A1``...).  For the indexed family
    ``template`` is a format string receiving ``n`` and is expanded by
    :meth:`expand`.
    """

    name: str
    group: str
    template: str
    formula_vars: tuple = ("p",)
    agent_vars: tuple = ("A",)
    family: str = FIXED

    def expand(self, n: Optional[int] = None):
        """Return ``(template formula, formula vars, agent vars)`` for this schema."""
        if self.family == FIXED:
            if n is not None:
                raise ValueError(f"schema {self.name} takes no index")
            return parse(self.template), self.formula_vars, self.agent_vars
        if n is None or n < 1:
            raise ValueError(f"schema {self.name} needs an index n >= 1")
        fvars = tuple(f"p{i}" for i in range(1, n + 1))
        avars = tuple(f"A{i}" for i in range(1, n + 1))
        lhs = " & ".join(f"<> [A{i}] p{i}" for i in range(1, n + 1))
        rhs = " & ".join(f"[A{i}] p{i}" for i in range(1, n + 1))
        return parse(f"{lhs} -> <> ({rhs})"), fvars, avars


def _replace(f: Formula, fmap: Mapping, amap: Mapping) -> Formula:
    if isinstance(f, Atom):
        return fmap[f.name]
    if isinstance(f, Not):
        return Not(_replace(f.operand, fmap, amap))
    if isinstance(f, And):
        return And(_replace(f.left, fmap, amap), _replace(f.right, fmap, amap))
    if isinstance(f, Box):
        return Box(_replace(f.operand, fmap, amap))
    return type(f)(amap[f.agent], _replace(f.operand, fmap, amap))


class SubstitutionError(ValueError):
    pass


def substitute(schema: Schema, formula_binding: Mapping[str, Union[Formula, str]],
               agent_binding: Mapping[str, str], n: Optional[int] = None) -> Formula:
    """Instantiate ``schema`` with the given bindings.

    Formula bindings may be given as concrete syntax strings.
    """
    template, fvars, avars = schema.expand(n)
    missing = [v for v in fvars if v not in formula_binding]
    missing += [v for v in avars if v not in agent_binding]
    if missing:
        raise SubstitutionError(f"schema {schema.name}: no binding for {', '.join(missing)}")
    if schema.family == INDEXED:
        bound = [agent_binding[v] for v in avars]
        if len(set(bound)) != len(bound):
            raise SubstitutionError(f"schema {schema.name}: agents must be pairwise distinct, got {bound}")
    fmap = {v: parse(b) if isinstance(b, str) else b for v, b in formula_binding.items()}
    return _replace(template, fmap, agent_binding)
