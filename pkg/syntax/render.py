"""
Printers producing text that parses back to the same syntax tree.
"""

from typing import List

from models.concepts import (
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
    EmptySet,
    IndivVar,
    IntConst,
    Not,
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
    SetVar,
    Succ,
    Sum,
    Universe,
    is_bottom,
    is_top,
)
from models.knowledge_base import (
    ConjunctiveQuery,
    Erc,
    ErcAnd,
    ErcOr,
    KnowledgeBase,
    NegatedRoleAssertion,
    RoleAssertion,
    SemiRestrictedConstraint,
)


def render_concept(concept: Concept) -> str:
    if is_top(concept):
        return "top"
    if is_bottom(concept):
        return "bottom"
    if isinstance(concept, ConceptName):
        return concept.name
    if isinstance(concept, And):
        return " and ".join(_concept_operand(op, nested=(And, Or)) for op in concept.operands)
    if isinstance(concept, Or):
        return " or ".join(_concept_operand(op, nested=(Or,)) for op in concept.operands)
    if isinstance(concept, Not):
        return f"not {_concept_operand(concept.inner, nested=(And, Or, Not))}"
    if isinstance(concept, Constr):
        return f"sat({render_constraint(concept.constraint)})"
    if isinstance(concept, Succ):
        return f"succ({render_constraint(concept.constraint)})"
    raise TypeError(f"not a concept: {concept!r}")


def _concept_operand(concept: Concept, nested) -> str:
    text = render_concept(concept)
    if isinstance(concept, nested) and not (is_top(concept) or is_bottom(concept)):
        return f"({text})"
    return text


def render_constraint(constraint: Constraint) -> str:
    if isinstance(constraint, COr):
        right = render_constraint(constraint.right)
        if isinstance(constraint.right, COr):
            right = f"({right})"
        return f"{render_constraint(constraint.left)} or {right}"
    if isinstance(constraint, CAnd):
        left = render_constraint(constraint.left)
        if isinstance(constraint.left, COr):
            left = f"({left})"
        right = render_constraint(constraint.right)
        if isinstance(constraint.right, (CAnd, COr)):
            right = f"({right})"
        return f"{left} and {right}"
    if isinstance(constraint, CNot):
        inner = constraint.inner
        if isinstance(inner, CardLt):
            return f"{render_pa(inner.left)} >= {render_pa(inner.right)}"
        text = render_constraint(inner)
        if isinstance(inner, (CAnd, COr)):
            text = f"({text})"
        return f"not {text}"
    if isinstance(constraint, SetEq):
        return f"{render_set_term(constraint.left)} = {render_set_term(constraint.right)}"
    if isinstance(constraint, SetSub):
        return f"{render_set_term(constraint.left)} <= {render_set_term(constraint.right)}"
    if isinstance(constraint, CardEq):
        return f"{render_pa(constraint.left)} = {render_pa(constraint.right)}"
    if isinstance(constraint, CardLt):
        return f"{render_pa(constraint.left)} < {render_pa(constraint.right)}"
    if isinstance(constraint, Divides):
        return f"div({constraint.divisor}, {render_pa(constraint.expr)})"
    raise TypeError(f"not a constraint: {constraint!r}")


def render_pa(expr: PAExpr) -> str:
    if isinstance(expr, IntConst):
        return str(expr.value)
    if isinstance(expr, Card):
        return f"card({render_set_term(expr.term)})"
    if isinstance(expr, ScalarMul):
        inner = render_pa(expr.expr)
        if not isinstance(expr.expr, Card):
            inner = f"({inner})"
        return f"{expr.factor} * {inner}"
    if isinstance(expr, Sum):
        right = render_pa(expr.right)
        if isinstance(expr.right, Sum):
            right = f"({right})"
        return f"{render_pa(expr.left)} + {right}"
    raise TypeError(f"not a PA expression: {expr!r}")


def render_set_term(term: SetTerm) -> str:
    if isinstance(term, SetUnion):
        right = render_set_term(term.right)
        if isinstance(term.right, SetUnion):
            right = f"({right})"
        return f"{render_set_term(term.left)} union {right}"
    if isinstance(term, SetInter):
        left = render_set_term(term.left)
        if isinstance(term.left, SetUnion):
            left = f"({left})"
        right = render_set_term(term.right)
        if isinstance(term.right, (SetUnion, SetInter)):
            right = f"({right})"
        return f"{left} inter {right}"
    if isinstance(term, SetComp):
        return f"comp({render_set_term(term.inner)})"
    if isinstance(term, EmptySet):
        return "empty"
    if isinstance(term, Universe):
        return "univ"
    if isinstance(term, RoleVar):
        return term.role
    if isinstance(term, ConceptVar):
        concept = term.concept
        if isinstance(concept, ConceptName) and not concept.name[0].islower():
            return concept.name
        if isinstance(concept, (Constr, Succ)) or is_top(concept) or is_bottom(concept):
            return render_concept(concept)
        return "{" + render_concept(concept) + "}"
    if isinstance(term, IndivVar):
        return "{" + term.individual + "}"
    if isinstance(term, SetVar):
        return f"X[{term.label}]"
    raise TypeError(f"not a set term: {term!r}")


def render_erc(erc: Erc) -> str:
    if isinstance(erc, SemiRestrictedConstraint):
        def side(terms) -> List[str]:
            parts = []
            for coefficient, concept in terms:
                card = f"card({render_concept(concept)})"
                parts.append(card if coefficient == 1 else f"{coefficient} * {card}")
            return parts

        lhs = side(erc.lhs)
        if erc.offset or not lhs:
            lhs.append(str(erc.offset))
        rhs = side(erc.rhs) or ["0"]
        return f"{' + '.join(lhs)} <= {' + '.join(rhs)}"
    if isinstance(erc, ErcAnd):
        return " and ".join(
            f"({render_erc(op)})" if isinstance(op, (ErcAnd, ErcOr)) else render_erc(op)
            for op in erc.operands
        )
    return " or ".join(
        f"({render_erc(op)})" if isinstance(op, ErcOr) else render_erc(op)
        for op in erc.operands
    )


def render_assertion(assertion) -> str:
    if isinstance(assertion, RoleAssertion):
        return f"{assertion.role}({assertion.source}, {assertion.target})"
    if isinstance(assertion, NegatedRoleAssertion):
        return f"not {assertion.role}({assertion.source}, {assertion.target})"
    concept = assertion.concept
    text = render_concept(concept)
    if not (isinstance(concept, (ConceptName, Constr, Succ)) or is_top(concept) or is_bottom(concept)):
        text = f"({text})"
    return f"{text}({assertion.individual})"


def render_kb(kb: KnowledgeBase) -> str:
    lines = []
    roles = kb.role_names()
    if roles:
        lines.append(f"roles: {', '.join(roles)}")
    for inclusion in kb.tbox:
        lines.append(f"tbox: {render_concept(inclusion.sub)} <= {render_concept(inclusion.sup)}")
    for assertion in kb.abox:
        lines.append(f"abox: {render_assertion(assertion)}")
    if kb.ercbox is not None:
        lines.append(f"erc: {render_erc(kb.ercbox)}")
    if kb.ecbox is not None:
        lines.append(f"ec: {render_constraint(kb.ecbox)}")
    if kb.goal is not None:
        lines.append(f"goal: {render_concept(kb.goal)}")
    return "\n".join(lines) + "\n"


def render_query(query: ConjunctiveQuery) -> str:
    atoms = [f"{a.role}({a.source}, {a.target})" for a in query.role_atoms]
    for atom in query.concept_atoms:
        text = render_concept(atom.concept)
        if not isinstance(atom.concept, (ConceptName, Constr, Succ)):
            text = f"({text})"
        atoms.append(f"{text}({atom.variable})")
    return "q :- " + ", ".join(atoms)
