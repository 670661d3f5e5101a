"""
Recursive-descent parser for carddl knowledge bases, concepts and queries.

Document layout: sections introduced by `tbox:`, `abox:`, `erc:`, `ec:`,
`goal:` or `roles:`, each followed by items separated by newlines or `;`.
`#` starts a comment. Inside set terms a bare name is read as a role when it
is declared or asserted as one, or starts with a lower-case letter; any other
name is a concept. `{C}` embeds an arbitrary concept in a set term.
"""

import logging
import re
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Set, Tuple

from models.concepts import (
    EMPTY,
    UNIV,
    And,
    CAnd,
    Card,
    CardEq,
    CardLt,
    CNot,
    COr,
    Concept,
    ConceptName,
    ConceptVar,
    Constr,
    Constraint,
    Divides,
    IntConst,
    Or,
    PAExpr,
    RoleVar,
    ScalarMul,
    SetComp,
    SetEq,
    SetInter,
    SetSub,
    SetTerm,
    SetUnion,
    Succ,
    Sum,
    bottom,
    constraint_roles,
    negate,
    top,
)
from models.errors import ParseError, SignatureError
from models.knowledge_base import (
    ConceptAssertion,
    ConceptAtom,
    ConceptInclusion,
    ConjunctiveQuery,
    Erc,
    ErcAnd,
    ErcOr,
    KnowledgeBase,
    NegatedRoleAssertion,
    RoleAssertion,
    RoleAtom,
    SemiRestrictedConstraint,
)

logger = logging.getLogger(__name__)

KEYWORDS = frozenset({
    "and", "or", "not", "sat", "succ", "inter", "union", "comp",
    "empty", "univ", "card", "div", "top", "bottom",
})
SECTIONS = ("tbox", "abox", "erc", "ec", "goal", "roles")
SINGLE_SECTIONS = frozenset({"erc", "ec", "goal"})

_TOKEN_RE = re.compile(
    r"(?P<space>[ \t\r]+)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<newline>[\n;])"
    r"|(?P<int>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<punct>:-|<=|>=|[(){},:=<>+\-*])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, int, punct, newline, eof
    value: str
    line: int
    column: int


def tokenize(text: str, newlines: bool = True) -> List[Token]:
    """Split text into tokens; newlines inside brackets are dropped."""
    tokens: List[Token] = []
    depth = 0
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        column = pos - line_start + 1
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column)
        kind = match.lastgroup
        value = match.group()
        if kind == "newline":
            if value == "\n":
                line += 1
                line_start = match.end()
            if newlines and depth == 0:
                tokens.append(Token("newline", value, line, column))
        elif kind == "int":
            tokens.append(Token("int", value, line, column))
        elif kind == "ident":
            tokens.append(Token("keyword" if value in KEYWORDS else "ident", value, line, column))
        elif kind == "punct":
            if value in "({":
                depth += 1
            elif value in ")}":
                depth = max(0, depth - 1)
            tokens.append(Token("punct", value, line, column))
        pos = match.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _prescan_roles(tokens: List[Token]) -> Set[str]:
    """Role names declared in `roles:` or used in binary assertions and atoms."""
    roles: Set[str] = set()
    in_roles = False
    for i, tok in enumerate(tokens):
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if tok.kind == "ident" and tok.value in SECTIONS and nxt is not None and nxt.value == ":":
            in_roles = tok.value == "roles"
            continue
        if in_roles and tok.kind == "ident":
            roles.add(tok.value)
        if (
            tok.kind == "ident"
            and i + 4 < len(tokens)
            and tokens[i + 1].value == "("
            and tokens[i + 2].kind == "ident"
            and tokens[i + 3].value == ","
        ):
            roles.add(tok.value)
    return roles


class _Parser:
    """Token cursor with the grammar productions."""

    def __init__(self, tokens: List[Token], roles: Iterable[str] = ()):
        self.tokens = tokens
        self.pos = 0
        self.roles: Set[str] = set(roles)
        self.role_uses: Set[str] = set()
        self.concept_uses: Set[str] = set()
        self.individual_uses: Set[str] = set()

    # ------------------------------------------------------------ cursor

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok.kind in ("punct", "keyword") and tok.value == value

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.advance()
            return True
        return False

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.fail(f"expected {value!r}")
        return self.advance()

    def expect_ident(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            self.fail(f"expected {what}")
        self.advance()
        return tok.value

    def expect_int(self) -> int:
        tok = self.peek()
        if tok.kind != "int":
            self.fail("expected integer")
        self.advance()
        return int(tok.value)

    def fail(self, message: str):
        tok = self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.value)
        raise ParseError(f"{message}, found {found}", tok.line, tok.column)

    def attempt(self, production: Callable):
        """Run a production, rewinding and returning None on failure."""
        saved = self.pos
        try:
            return production()
        except ParseError:
            self.pos = saved
            return None

    def skip_newlines(self):
        while self.peek().kind == "newline":
            self.advance()

    def at_section(self) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.value in SECTIONS and self.peek(1).value == ":"

    # ------------------------------------------------------------ concepts

    def concept(self) -> Concept:
        operands = [self.concept_and()]
        while self.accept("or"):
            operands.append(self.concept_and())
        return operands[0] if len(operands) == 1 else Or(tuple(operands))

    def concept_and(self) -> Concept:
        operands = [self.concept_unary()]
        while self.accept("and"):
            operands.append(self.concept_unary())
        return operands[0] if len(operands) == 1 else And(tuple(operands))

    def concept_unary(self) -> Concept:
        if self.accept("not"):
            return negate(self.concept_unary())
        return self.concept_primary()

    def concept_primary(self) -> Concept:
        tok = self.peek()
        if tok.kind == "ident":
            self.advance()
            self.concept_uses.add(tok.value)
            return ConceptName(tok.value)
        if self.accept("top"):
            return top()
        if self.accept("bottom"):
            return bottom()
        if self.accept("sat"):
            self.expect("(")
            constraint = self.constraint()
            self.expect(")")
            return Constr(constraint)
        if self.accept("succ"):
            self.expect("(")
            constraint = self.constraint()
            self.expect(")")
            return Succ(constraint)
        if self.accept("("):
            inner = self.concept()
            self.expect(")")
            return inner
        self.fail("expected concept")

    # ------------------------------------------------------------ constraints

    def constraint(self) -> Constraint:
        result = self.constraint_and()
        while self.accept("or"):
            result = COr(result, self.constraint_and())
        return result

    def constraint_and(self) -> Constraint:
        result = self.constraint_unary()
        while self.accept("and"):
            result = CAnd(result, self.constraint_unary())
        return result

    def constraint_unary(self) -> Constraint:
        if self.accept("not"):
            return CNot(self.constraint_unary())
        if self.at("div"):
            self.advance()
            self.expect("(")
            divisor = self.expect_int()
            if divisor <= 0:
                self.fail("divisor must be positive")
            self.expect(",")
            expr = self.pa_expr()
            self.expect(")")
            return Divides(divisor, expr)
        if self.at("("):
            atom = self.attempt(self.atom)
            if atom is not None:
                return atom
            self.expect("(")
            inner = self.constraint()
            self.expect(")")
            return inner
        return self.atom()

    def atom(self) -> Constraint:
        left = self.operand()
        tok = self.peek()
        if not (tok.kind == "punct" and tok.value in ("=", "<", "<=", ">", ">=")):
            self.fail("expected comparison")
        self.advance()
        op = tok.value
        right = self.operand()
        if isinstance(left, PAExpr) and isinstance(right, PAExpr):
            if op == "=":
                return CardEq(left, right)
            if op == "<":
                return CardLt(left, right)
            if op == ">":
                return CardLt(right, left)
            if op == "<=":
                return CNot(CardLt(right, left))
            return CNot(CardLt(left, right))
        if isinstance(left, SetTerm) and isinstance(right, SetTerm):
            if op == "=":
                return SetEq(left, right)
            if op == "<=":
                return SetSub(left, right)
            raise ParseError(f"operator {op!r} does not compare sets", tok.line, tok.column)
        raise ParseError("cannot compare a set with an integer", tok.line, tok.column)

    def operand(self):
        tok = self.peek()
        if tok.kind == "int" or self.at("card") or self.at("-"):
            return self.pa_expr()
        return self.set_expr()

    def pa_expr(self) -> PAExpr:
        result = self.pa_term()
        while True:
            if self.accept("+"):
                result = Sum(result, self.pa_term())
            elif self.accept("-"):
                result = Sum(result, ScalarMul(-1, self.pa_term()))
            else:
                return result

    def pa_term(self) -> PAExpr:
        if self.at("card"):
            return self.pa_card()
        if self.accept("("):
            inner = self.pa_expr()
            self.expect(")")
            return inner
        sign = -1 if self.accept("-") else 1
        value = sign * self.expect_int()
        if self.accept("*"):
            return ScalarMul(value, self.pa_factor())
        return IntConst(value)

    def pa_factor(self) -> PAExpr:
        if self.at("card"):
            return self.pa_card()
        self.expect("(")
        inner = self.pa_expr()
        self.expect(")")
        return inner

    def pa_card(self) -> PAExpr:
        self.expect("card")
        self.expect("(")
        term = self.set_expr()
        self.expect(")")
        return Card(term)

    # ------------------------------------------------------------ set terms

    def set_expr(self) -> SetTerm:
        result = self.set_inter()
        while self.accept("union"):
            result = SetUnion(result, self.set_inter())
        return result

    def set_inter(self) -> SetTerm:
        result = self.set_atom()
        while self.accept("inter"):
            result = SetInter(result, self.set_atom())
        return result

    def set_atom(self) -> SetTerm:
        tok = self.peek()
        if self.accept("empty"):
            return EMPTY
        if self.accept("univ"):
            return UNIV
        if self.accept("comp"):
            self.expect("(")
            inner = self.set_expr()
            self.expect(")")
            return SetComp(inner)
        if self.accept("("):
            inner = self.set_expr()
            self.expect(")")
            return inner
        if self.accept("{"):
            concept = self.concept()
            self.expect("}")
            return ConceptVar(concept)
        if tok.kind == "ident":
            self.advance()
            if tok.value in self.roles or tok.value[0].islower():
                self.role_uses.add(tok.value)
                return RoleVar(tok.value)
            self.concept_uses.add(tok.value)
            return ConceptVar(ConceptName(tok.value))
        if tok.kind == "keyword" and tok.value in ("top", "bottom", "sat", "succ"):
            return ConceptVar(self.concept_primary())
        self.fail("expected set term")

    # ------------------------------------------------------------ assertions

    def assertion(self):
        if self.accept("not"):
            inner = self.assertion()
            if isinstance(inner, RoleAssertion):
                return NegatedRoleAssertion(inner.role, inner.source, inner.target)
            if isinstance(inner, NegatedRoleAssertion):
                self.fail("double negation of a role assertion")
            return ConceptAssertion(negate(inner.concept), inner.individual)
        tok = self.peek()
        if tok.kind == "ident" and self.peek(1).value == "(" and self.peek(3).value == ",":
            self.advance()
            self.expect("(")
            source = self.individual()
            self.expect(",")
            target = self.individual()
            self.expect(")")
            self.role_uses.add(tok.value)
            return RoleAssertion(tok.value, source, target)
        concept = self.concept_primary()
        self.expect("(")
        individual = self.individual()
        self.expect(")")
        return ConceptAssertion(concept, individual)

    def individual(self) -> str:
        name = self.expect_ident("individual name")
        self.individual_uses.add(name)
        return name

    def inclusion(self) -> ConceptInclusion:
        sub = self.concept()
        self.expect("<=")
        sup = self.concept()
        return ConceptInclusion(sub, sup)

    # ------------------------------------------------------------ ERCBox

    def erc(self) -> Erc:
        operands = [self.erc_and()]
        while self.accept("or"):
            operands.append(self.erc_and())
        return operands[0] if len(operands) == 1 else ErcOr(tuple(operands))

    def erc_and(self) -> Erc:
        operands = [self.erc_primary()]
        while self.accept("and"):
            operands.append(self.erc_primary())
        return operands[0] if len(operands) == 1 else ErcAnd(tuple(operands))

    def erc_primary(self) -> Erc:
        if self.at("not"):
            self.fail("ERCBox must be a positive Boolean combination")
        if self.accept("("):
            inner = self.erc()
            self.expect(")")
            return inner
        return self.semi_restricted()

    def semi_restricted(self) -> Erc:
        left_terms, left_const = self.erc_side()
        tok = self.peek()
        if not (tok.kind == "punct" and tok.value in ("<=", ">=", "=")):
            self.fail("expected '<=', '>=' or '='")
        self.advance()
        right_terms, right_const = self.erc_side()

        def build(lhs, lconst, rhs, rconst) -> SemiRestrictedConstraint:
            offset = lconst - rconst
            if offset < 0:
                raise ParseError("constant offset of a semi-restricted constraint must be non-negative", tok.line, tok.column)
            return SemiRestrictedConstraint(tuple(lhs), offset, tuple(rhs))

        if tok.value == "<=":
            return build(left_terms, left_const, right_terms, right_const)
        if tok.value == ">=":
            return build(right_terms, right_const, left_terms, left_const)
        return ErcAnd((
            build(left_terms, left_const, right_terms, right_const),
            build(right_terms, right_const, left_terms, left_const),
        ))

    def erc_side(self) -> Tuple[List[Tuple[int, Concept]], int]:
        terms: List[Tuple[int, Concept]] = []
        constant = 0
        sign = 1
        while True:
            tok = self.peek()
            if self.at("card"):
                coefficient, concept = sign, self.erc_card()
            else:
                value = sign * (-1 if self.accept("-") else 1) * self.expect_int()
                if not self.accept("*"):
                    constant += value
                    coefficient = None
                else:
                    coefficient, concept = value, self.erc_card()
            if coefficient is not None:
                if coefficient < 0:
                    raise ParseError("cardinality coefficients must be natural numbers", tok.line, tok.column)
                terms.append((coefficient, concept))
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                return terms, constant

    def erc_card(self) -> Concept:
        self.expect("card")
        self.expect("(")
        concept = self.concept()
        self.expect(")")
        return concept

    # ------------------------------------------------------------ documents

    def items(self, production: Callable) -> List:
        found = []
        while True:
            self.skip_newlines()
            if self.peek().kind == "eof" or self.at_section():
                return found
            found.append(production())
            if self.peek().kind not in ("newline", "eof"):
                self.fail("expected end of item")

    def document(self) -> KnowledgeBase:
        abox, tbox = [], []
        single = {}
        declared: Set[str] = set()
        self.skip_newlines()
        while self.peek().kind != "eof":
            if not self.at_section():
                self.fail("expected section header")
            tok = self.advance()
            self.expect(":")
            name = tok.value
            if name in SINGLE_SECTIONS and name in single:
                raise ParseError(f"duplicate section {name!r}", tok.line, tok.column)
            if name == "tbox":
                tbox.extend(self.items(self.inclusion))
            elif name == "abox":
                abox.extend(self.items(self.assertion))
            elif name == "roles":
                for names in self.items(self.role_list):
                    declared.update(names)
            elif name == "erc":
                single[name] = self.single_item(self.erc)
            elif name == "ec":
                single[name] = self.single_item(self.constraint)
                roles = sorted(set(constraint_roles(single[name])))
                if roles:
                    raise SignatureError(f"ECBox constraints mention only concepts, found role {roles[0]}")
            else:
                single[name] = self.single_item(self.concept)
        self.role_uses |= declared
        self.check_signature()
        kb = KnowledgeBase(
            abox=tuple(dict.fromkeys(abox)),
            tbox=tuple(dict.fromkeys(tbox)),
            ercbox=single.get("erc"),
            ecbox=single.get("ec"),
            goal=single.get("goal"),
            roles=frozenset(self.role_uses),
        )
        logger.debug(f"Parsed KB with {len(kb.abox)} assertions and {len(kb.tbox)} inclusions")
        return kb

    def role_list(self) -> List[str]:
        names = [self.expect_ident("role name")]
        while self.accept(","):
            names.append(self.expect_ident("role name"))
        return names

    def single_item(self, production: Callable):
        found = self.items(production)
        if len(found) != 1:
            self.fail("section takes exactly one item")
        return found[0]

    def check_signature(self):
        categories = (
            ("concept", self.concept_uses),
            ("role", self.role_uses),
            ("individual", self.individual_uses),
        )
        for i, (first, names) in enumerate(categories):
            for second, others in categories[i + 1:]:
                clash = sorted(names & others)
                if clash:
                    raise SignatureError(f"name {clash[0]!r} used as both {first} and {second}")

    def finish(self):
        self.skip_newlines()
        if self.peek().kind != "eof":
            self.fail("unexpected trailing input")

    # ------------------------------------------------------------ queries

    def query(self) -> ConjunctiveQuery:
        if self.peek().kind == "ident" and self.peek(1).value == ":-":
            self.advance()
        self.accept(":-")
        role_atoms, concept_atoms = [], []
        while True:
            atom = self.query_atom()
            (role_atoms if isinstance(atom, RoleAtom) else concept_atoms).append(atom)
            if not self.accept(","):
                break
        self.check_signature()
        return ConjunctiveQuery(tuple(dict.fromkeys(role_atoms)), tuple(dict.fromkeys(concept_atoms)))

    def query_atom(self):
        tok = self.peek()
        if tok.kind == "ident" and self.peek(1).value == "(" and self.peek(3).value == ",":
            self.advance()
            self.expect("(")
            source = self.expect_ident("variable")
            self.expect(",")
            target = self.expect_ident("variable")
            self.expect(")")
            self.role_uses.add(tok.value)
            return RoleAtom(tok.value, source, target)
        concept = self.concept_primary()
        self.expect("(")
        variable = self.expect_ident("variable")
        self.expect(")")
        return ConceptAtom(concept, variable)


def parse_kb(text: str) -> KnowledgeBase:
    """Parse a knowledge-base document."""
    tokens = tokenize(text)
    parser = _Parser(tokens, _prescan_roles(tokens))
    return parser.document()


def parse_concept(text: str, roles: Iterable[str] = ()) -> Concept:
    tokens = tokenize(text, newlines=False)
    parser = _Parser(tokens, set(roles) | _prescan_roles(tokens))
    concept = parser.concept()
    parser.finish()
    parser.check_signature()
    return concept


def parse_constraint(text: str, roles: Iterable[str] = ()) -> Constraint:
    tokens = tokenize(text, newlines=False)
    parser = _Parser(tokens, set(roles) | _prescan_roles(tokens))
    constraint = parser.constraint()
    parser.finish()
    parser.check_signature()
    return constraint


def parse_query(text: str, roles: Iterable[str] = ()) -> ConjunctiveQuery:
    """Parse `q :- r(x, y), B(y)`; the head is optional."""
    tokens = tokenize(text, newlines=False)
    parser = _Parser(tokens, set(roles) | _prescan_roles(tokens))
    query = parser.query()
    parser.finish()
    return query


def parse_erc(text: str) -> Optional[Erc]:
    tokens = tokenize(text, newlines=False)
    parser = _Parser(tokens, _prescan_roles(tokens))
    erc = parser.erc()
    parser.finish()
    return erc
