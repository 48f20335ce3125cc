"""PatQL: a small textual query language over the graph store.

Covers MATCH / OPTIONAL MATCH path patterns with label and property
filters, WHERE predicates (=, =~ regex, IN over list properties or
literal lists, AND), and RETURN with an optional count aggregate.
Keywords are case-insensitive; the language is read-only by design —
mutation goes through the typed operations.

Grammar (EBNF):

    query       = clause, { clause }, return ;
    clause      = [ "OPTIONAL" ], "MATCH", pattern, [ where ] ;
    pattern     = node, { edge, node } ;
    node        = "(", [ ident ], [ ":", ident ], [ props ], ")" ;
    edge        = "-", "[", [ ident ], [ ":", ident ], [ props ], "]", "->" ;
    props       = "{", [ ident, ":", literal, { ",", ident, ":", literal } ], "}" ;
    where       = "WHERE", condition, { "AND", condition } ;
    condition   = literal, "IN", ident, ".", ident
                | ident, ".", ident, ( "=", literal
                                     | "=~", string
                                     | "IN", "[", [ literal, { ",", literal } ], "]" ) ;
    return      = "RETURN", item, { ",", item } ;
    item        = "COUNT", "(", ident, ")", [ "AS", ident ]
                | ident, [ "AS", ident ] ;
    literal     = string | [ "-" ], number | "TRUE" | "FALSE" ;
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, NamedTuple

from .errors import ParseError, UnknownVariable
from .pattern import (
    ABSENT,
    EdgePattern,
    NodePattern,
    PatternSegment,
    PatternSpec,
    Predicate,
    PropEquals,
    PropInValues,
    PropRegex,
    ValueInListProp,
)
from .store import GraphStore

_KEYWORDS = {"match", "optional", "where", "return", "and", "in", "count", "as", "true", "false"}

_PUNCT = {
    "(": "LPAREN", ")": "RPAREN", "[": "LBRACKET", "]": "RBRACKET",
    "{": "LBRACE", "}": "RBRACE", ":": "COLON", ",": "COMMA", ".": "DOT",
}


class _Token(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    length = len(text)
    while i < length:
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
        start_col = col
        if text.startswith("->", i):
            tokens.append(_Token("ARROW", "->", line, start_col))
            i += 2
            col += 2
            continue
        if text.startswith("=~", i):
            tokens.append(_Token("REGEX", "=~", line, start_col))
            i += 2
            col += 2
            continue
        if ch == "=":
            tokens.append(_Token("EQ", "=", line, start_col))
            i += 1
            col += 1
            continue
        if ch == "-":
            tokens.append(_Token("DASH", "-", line, start_col))
            i += 1
            col += 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token(_PUNCT[ch], ch, line, start_col))
            i += 1
            col += 1
            continue
        if ch == '"':
            value, consumed = _read_string(text, i, line, start_col)
            tokens.append(_Token("STRING", value, line, start_col))
            i += consumed
            col += consumed
            continue
        if ch.isdigit():
            j = i
            while j < length and text[j].isdigit():
                j += 1
            if j < length and text[j] == "." and j + 1 < length and text[j + 1].isdigit():
                j += 1
                while j < length and text[j].isdigit():
                    j += 1
            tokens.append(_Token("NUMBER", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < length and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("IDENT", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        raise ParseError(line, start_col, ("identifier", "string", "number", "punctuation"),
                         found=repr(ch))
    tokens.append(_Token("EOF", "", line, col))
    return tokens


def _read_string(text: str, start: int, line: int, col: int) -> tuple[str, int]:
    escapes = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}
    chars: list[str] = []
    i = start + 1
    while i < len(text):
        ch = text[i]
        if ch == '"':
            return "".join(chars), i - start + 1
        if ch == "\n":
            break
        if ch == "\\" and i + 1 < len(text):
            chars.append(escapes.get(text[i + 1], text[i + 1]))
            i += 2
            continue
        chars.append(ch)
        i += 1
    raise ParseError(line, col, ('closing "',), found="end of input")


# --- AST ----------------------------------------------------------------------


@dataclass
class MatchClause:
    optional: bool
    nodes: list[NodePattern]
    edges: list[EdgePattern]


@dataclass
class ReturnItem:
    var: str
    alias: str | None = None
    is_count: bool = False

    @property
    def name(self) -> str:
        if self.alias:
            return self.alias
        return f"count({self.var})" if self.is_count else self.var


@dataclass
class QueryAst:
    clauses: list[MatchClause]
    predicates: list[Predicate] = field(default_factory=list)
    returns: list[ReturnItem] = field(default_factory=list)

    def to_pattern_spec(self) -> PatternSpec:
        segments: list[PatternSegment] = []
        for clause in self.clauses:
            for index, node in enumerate(clause.nodes):
                edge = clause.edges[index] if index < len(clause.edges) else None
                segments.append(PatternSegment(node, edge, clause.optional))
        wanted = list(dict.fromkeys(item.var for item in self.returns))
        return PatternSpec(segments, list(self.predicates), wanted)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    # -- token plumbing ---------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        if token.kind != "EOF":
            self.pos += 1
        return token

    def fail(self, expected: tuple[str, ...]) -> ParseError:
        token = self.peek()
        found = token.text if token.kind != "EOF" else "end of input"
        return ParseError(token.line, token.col, expected, found=found)

    def expect(self, kind: str, label: str) -> _Token:
        if self.peek().kind != kind:
            raise self.fail((label,))
        return self.advance()

    def at_keyword(self, *words: str) -> bool:
        token = self.peek()
        return token.kind == "IDENT" and token.text.casefold() in words

    def expect_keyword(self, word: str) -> _Token:
        if not self.at_keyword(word):
            raise self.fail((word.upper(),))
        return self.advance()

    def ident(self, label: str) -> str:
        token = self.peek()
        if token.kind != "IDENT":
            raise self.fail((label,))
        return self.advance().text

    # -- grammar ------------------------------------------------------------

    def parse(self) -> QueryAst:
        clauses: list[MatchClause] = []
        predicates: list[Predicate] = []
        while True:
            if self.at_keyword("optional"):
                self.advance()
                self.expect_keyword("match")
                clauses.append(self.match_clause(optional=True))
            elif self.at_keyword("match"):
                self.advance()
                clauses.append(self.match_clause(optional=False))
            elif not clauses:
                raise self.fail(("MATCH", "OPTIONAL MATCH"))
            else:
                break
            if self.at_keyword("where"):
                self.advance()
                predicates.extend(self.conditions())
        self.expect_keyword("return")
        returns = [self.return_item()]
        while self.peek().kind == "COMMA":
            self.advance()
            returns.append(self.return_item())
        if self.peek().kind != "EOF":
            raise self.fail(("end of query", ","))
        return QueryAst(clauses, predicates, returns)

    def match_clause(self, optional: bool) -> MatchClause:
        nodes = [self.node_pattern()]
        edges: list[EdgePattern] = []
        while self.peek().kind == "DASH":
            edges.append(self.edge_pattern())
            nodes.append(self.node_pattern())
        return MatchClause(optional, nodes, edges)

    def node_pattern(self) -> NodePattern:
        self.expect("LPAREN", "(")
        var, label, props, expected = self._pattern_body(")")
        if self.peek().kind != "RPAREN":
            raise self.fail(tuple(expected))
        self.advance()
        return NodePattern(var, label, props)

    def edge_pattern(self) -> EdgePattern:
        self.expect("DASH", "-")
        self.expect("LBRACKET", "[")
        var, type_name, props, expected = self._pattern_body("]")
        if self.peek().kind != "RBRACKET":
            raise self.fail(tuple(expected))
        self.advance()
        self.expect("ARROW", "->")
        return EdgePattern(var, type_name, props)

    def _pattern_body(self, closer: str):
        """The shared `[var][:name][{props}]` interior of node/edge patterns."""
        var = None
        name = None
        expected = ["variable", ":", "{", closer]
        if self.peek().kind == "IDENT":
            var = self.advance().text
            expected.remove("variable")
        if self.peek().kind == "COLON":
            self.advance()
            name = self.ident("label")
            if "variable" in expected:
                expected.remove("variable")
            expected.remove(":")
        props: dict = {}
        if self.peek().kind == "LBRACE":
            props = self.prop_map()
            expected = [closer]
        return var, name, props, expected

    def prop_map(self) -> dict:
        self.expect("LBRACE", "{")
        props: dict = {}
        if self.peek().kind != "RBRACE":
            while True:
                key = self.ident("property key")
                self.expect("COLON", ":")
                props[key] = self.literal()
                if self.peek().kind != "COMMA":
                    break
                self.advance()
        self.expect("RBRACE", "}")
        return props

    def literal(self):
        token = self.peek()
        if token.kind == "STRING":
            return self.advance().text
        if token.kind == "DASH":
            self.advance()
            number = self.expect("NUMBER", "number")
            return -self._number(number.text)
        if token.kind == "NUMBER":
            return self._number(self.advance().text)
        if self.at_keyword("true"):
            self.advance()
            return True
        if self.at_keyword("false"):
            self.advance()
            return False
        raise self.fail(("string", "number", "TRUE", "FALSE"))

    @staticmethod
    def _number(text: str):
        return float(text) if "." in text else int(text)

    def conditions(self) -> list[Predicate]:
        predicates = [self.condition()]
        while self.at_keyword("and"):
            self.advance()
            predicates.append(self.condition())
        return predicates

    def condition(self) -> Predicate:
        token = self.peek()
        if token.kind in ("STRING", "NUMBER", "DASH") or self.at_keyword("true", "false"):
            value = self.literal()
            self.expect_keyword("in")
            var = self.ident("variable")
            self.expect("DOT", ".")
            key = self.ident("property key")
            return ValueInListProp(value, var, key)
        var = self.ident("variable")
        self.expect("DOT", ".")
        key = self.ident("property key")
        operator = self.peek()
        if operator.kind == "EQ":
            self.advance()
            return PropEquals(var, key, self.literal())
        if operator.kind == "REGEX":
            self.advance()
            pattern = self.expect("STRING", "regex string")
            return PropRegex(var, key, pattern.text)
        if self.at_keyword("in"):
            self.advance()
            self.expect("LBRACKET", "[")
            values = []
            if self.peek().kind != "RBRACKET":
                while True:
                    values.append(self.literal())
                    if self.peek().kind != "COMMA":
                        break
                    self.advance()
            self.expect("RBRACKET", "]")
            return PropInValues(var, key, tuple(values))
        raise self.fail(("=", "=~", "IN"))

    def return_item(self) -> ReturnItem:
        if self.at_keyword("count") and self.tokens[self.pos + 1].kind == "LPAREN":
            self.advance()
            self.advance()
            var = self.ident("variable")
            self.expect("RPAREN", ")")
            alias = self.maybe_alias()
            return ReturnItem(var, alias, is_count=True)
        var = self.ident("variable")
        return ReturnItem(var, self.maybe_alias(), is_count=False)

    def maybe_alias(self) -> str | None:
        if self.at_keyword("as"):
            self.advance()
            return self.ident("alias")
        return None


def parse_query(text: str) -> QueryAst:
    """Parse PatQL text into an AST; raises ParseError on any malformed input."""
    if not text or not text.strip():
        raise ParseError(1, 1, ("MATCH", "OPTIONAL MATCH"), found="empty query")
    return _Parser(text).parse()


def execute_query(store: "GraphStore | Any", ast_or_text: "QueryAst | str") -> list[dict[str, Any]]:
    """Run a parsed query (or source text) and return result rows.

    Rows map each return item's name to a GraphNode, GraphEdge, ABSENT, or
    an integer for count items. Count aggregates group the remaining items.
    """
    ast = parse_query(ast_or_text) if isinstance(ast_or_text, str) else ast_or_text
    if hasattr(store, "store"):
        store = store.store
    spec = ast.to_pattern_spec()
    declared = set(spec.declared_variables())
    for item in ast.returns:
        if item.var not in declared:
            raise UnknownVariable(f"return item references undeclared variable {item.var!r}")
    rows = store.match_pattern(spec)

    count_items = [item for item in ast.returns if item.is_count]
    plain_items = [item for item in ast.returns if not item.is_count]
    if not count_items:
        return [{item.name: row[item.var] for item in ast.returns} for row in rows]

    if not rows and not plain_items:
        return [{item.name: 0 for item in count_items}]

    grouped: dict[tuple, dict[str, Any]] = {}
    tallies: dict[tuple, dict[str, int]] = {}
    for row in rows:
        key = tuple(_element_key(row[item.var]) for item in plain_items)
        if key not in grouped:
            grouped[key] = {item.name: row[item.var] for item in plain_items}
            tallies[key] = {item.name: 0 for item in count_items}
        for item in count_items:
            if row[item.var] is not ABSENT:
                tallies[key][item.name] += 1
    results = []
    for key, base in grouped.items():
        out = dict(base)
        out.update(tallies[key])
        results.append(out)
    return results


def _element_key(element) -> tuple:
    if element is ABSENT:
        return ("absent",)
    kind = "edge" if hasattr(element, "from_id") else "node"
    return (kind, element.id)
