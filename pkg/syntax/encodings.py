"""
Encodings of nominals, role operators and whole knowledge bases as concepts.

Every encoding yields an ALCSCC++ concept (global constraints) whose
satisfiability matches the encoded notion.
"""

from typing import List, Sequence

from models.concepts import (
    EMPTY,
    UNIV,
    Card,
    CardEq,
    CardLt,
    CNot,
    COr,
    Divides,
    Concept,
    ConceptName,
    ConceptVar,
    Constr,
    Constraint,
    IntConst,
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
    And,
    Not,
    Or,
    CAnd,
    at_most,
    conjoin,
    disjoin,
    map_constraint,
    negate,
    sum_all,
    top,
    union_all,
    walk_concept,
)
from models.errors import DialectError
from models.knowledge_base import (
    ConceptAssertion,
    Erc,
    ErcAnd,
    KnowledgeBase,
    NegatedRoleAssertion,
    RoleAssertion,
    SemiRestrictedConstraint,
)

NOMINAL_PREFIX = "_nom_"


def _everywhere(concept: Concept) -> Concept:
    """Constr(top <= C): C holds at every element."""
    return Constr(SetSub(ConceptVar(top()), ConceptVar(concept)))


def encode_nominal(name: str) -> Concept:
    """The concept name is interpreted by exactly one element."""
    return Constr(CardEq(Card(ConceptVar(ConceptName(name))), IntConst(1)))


def encode_universal_role(role: str) -> Concept:
    """The role relates every element to every element."""
    return _everywhere(Constr(SetEq(RoleVar(role), UNIV)))


def encode_role_negation(role: str, complement: str) -> Concept:
    """complement is interpreted as the complement of role."""
    disjoint = _everywhere(Constr(SetSub(SetInter(RoleVar(role), RoleVar(complement)), EMPTY)))
    covering = _everywhere(Constr(CardEq(
        Sum(Card(RoleVar(role)), Card(RoleVar(complement))),
        Card(UNIV),
    )))
    return conjoin(disjoint, covering)


def encode_role_conjunction(target: str, left: str, right: str) -> Concept:
    """target is interpreted as the intersection of left and right."""
    return _everywhere(Constr(SetEq(RoleVar(target), SetInter(RoleVar(left), RoleVar(right)))))


def encode_role_cover(left: str, right: str) -> Concept:
    """Every element reaches every element through left or right."""
    return _everywhere(Constr(CardEq(Card(SetUnion(RoleVar(left), RoleVar(right))), Card(UNIV))))


def ecbox_to_concept(ecbox: Constraint) -> Concept:
    """An ECBox as a conjunction of global constraints, one per top-level conjunct."""
    parts: List[Concept] = []

    def split(node: Constraint):
        if isinstance(node, CAnd):
            split(node.left)
            split(node.right)
        else:
            parts.append(Constr(node))

    split(ecbox)
    return conjoin(*parts)


def scc_to_pp(concept: Concept, roles: Sequence[str]) -> Concept:
    """
    Translate local constraints into global ones.

    Inside a local constraint the universe is the set of all role successors,
    so concept sets, the universe and complements are intersected with the
    union of the signature's roles.
    """
    successors: SetTerm = union_all(RoleVar(r) for r in sorted(set(roles)))

    def translate(node: Concept) -> Concept:
        if isinstance(node, And):
            return And(tuple(translate(op) for op in node.operands))
        if isinstance(node, Or):
            return Or(tuple(translate(op) for op in node.operands))
        if isinstance(node, Not):
            return negate(translate(node.inner))
        if isinstance(node, Constr):
            return Constr(map_constraint(node.constraint, global_leaf))
        if isinstance(node, Succ):
            return Constr(_localize(node.constraint))
        return node

    def global_leaf(term: SetTerm) -> SetTerm:
        if isinstance(term, ConceptVar):
            return ConceptVar(translate(term.concept))
        return term

    def local_term(term: SetTerm) -> SetTerm:
        if isinstance(term, SetUnion):
            return SetUnion(local_term(term.left), local_term(term.right))
        if isinstance(term, SetInter):
            return SetInter(local_term(term.left), local_term(term.right))
        if isinstance(term, SetComp):
            return SetInter(SetComp(local_term(term.inner)), successors)
        if isinstance(term, ConceptVar):
            return SetInter(ConceptVar(translate(term.concept)), successors)
        if term == UNIV:
            return successors
        return term

    def _localize(constraint: Constraint) -> Constraint:
        return _map_terms(constraint, local_term)

    return translate(concept)


def _map_terms(constraint: Constraint, rewrite) -> Constraint:
    """Like map_constraint, but hands whole set terms (not leaves) to rewrite."""
    def pa(node):
        if isinstance(node, Card):
            return Card(rewrite(node.term))
        if isinstance(node, Sum):
            return Sum(pa(node.left), pa(node.right))
        if isinstance(node, ScalarMul):
            return ScalarMul(node.factor, pa(node.expr))
        return node

    def walk(node: Constraint) -> Constraint:
        if isinstance(node, CAnd):
            return CAnd(walk(node.left), walk(node.right))
        if isinstance(node, COr):
            return COr(walk(node.left), walk(node.right))
        if isinstance(node, CNot):
            return CNot(walk(node.inner))
        if isinstance(node, SetEq):
            return SetEq(rewrite(node.left), rewrite(node.right))
        if isinstance(node, SetSub):
            return SetSub(rewrite(node.left), rewrite(node.right))
        if isinstance(node, CardEq):
            return CardEq(pa(node.left), pa(node.right))
        if isinstance(node, CardLt):
            return CardLt(pa(node.left), pa(node.right))
        if isinstance(node, Divides):
            return Divides(node.divisor, pa(node.expr))
        raise TypeError(f"not a constraint: {node!r}")

    return walk(constraint)


def erc_to_constraint(erc: Erc, translate=lambda c: c) -> Constraint:
    """A positive ERCBox as an ordinary cardinality constraint over concepts."""
    if isinstance(erc, SemiRestrictedConstraint):
        def side(terms, offset=0):
            exprs = [
                Card(ConceptVar(translate(c))) if n == 1 else ScalarMul(n, Card(ConceptVar(translate(c))))
                for n, c in terms
            ]
            if offset:
                exprs.append(IntConst(offset))
            return sum_all(exprs)

        return at_most(side(erc.lhs, erc.offset), side(erc.rhs))
    parts = [erc_to_constraint(op, translate) for op in erc.operands]
    result = parts[0]
    for part in parts[1:]:
        result = CAnd(result, part) if isinstance(erc, ErcAnd) else COr(result, part)
    return result


def nominal_name(individual: str) -> str:
    return f"{NOMINAL_PREFIX}{individual}"


def kb_to_concept(kb: KnowledgeBase) -> Concept:
    """
    Whole KB (plus its goal) as one ALCSCC++ concept.

    The concept is satisfiable iff the KB has a model in which the goal, or
    top when there is no goal, has an instance. Individuals become nominal
    concept names.
    """
    roles = kb.role_names()

    def pp(concept: Concept) -> Concept:
        return scc_to_pp(concept, roles)

    def nominal(individual: str) -> ConceptVar:
        return ConceptVar(ConceptName(nominal_name(individual)))

    parts: List[Concept] = []
    for individual in kb.individuals():
        parts.append(encode_nominal(nominal_name(individual)))
    for ci in kb.tbox:
        parts.append(_everywhere(disjoin(negate(pp(ci.sub)), pp(ci.sup))))
    for assertion in kb.abox:
        if isinstance(assertion, ConceptAssertion):
            parts.append(Constr(SetSub(nominal(assertion.individual), ConceptVar(pp(assertion.concept)))))
        elif isinstance(assertion, RoleAssertion):
            reach = Constr(SetSub(nominal(assertion.target), RoleVar(assertion.role)))
            parts.append(Constr(SetSub(nominal(assertion.source), ConceptVar(reach))))
        elif isinstance(assertion, NegatedRoleAssertion):
            avoid = Constr(SetSub(SetInter(nominal(assertion.target), RoleVar(assertion.role)), EMPTY))
            parts.append(Constr(SetSub(nominal(assertion.source), ConceptVar(avoid))))
    if kb.ercbox is not None:
        parts.append(Constr(erc_to_constraint(kb.ercbox, pp)))
    if kb.ecbox is not None:
        parts.append(ecbox_to_concept(map_constraint(
            kb.ecbox,
            lambda t: ConceptVar(pp(t.concept)) if isinstance(t, ConceptVar) else t,
        )))
    parts.append(pp(kb.goal) if kb.goal is not None else top())
    return conjoin(*parts)


def require_dialect(concept: Concept, allow_constr: bool, allow_succ: bool) -> None:
    """Raise DialectError when the concept uses a disallowed constraint constructor."""
    for node in walk_concept(concept):
        if isinstance(node, Constr) and not allow_constr:
            raise DialectError("global constraint found in an ALCSCC concept")
        if isinstance(node, Succ) and not allow_succ:
            raise DialectError("successor constraint found outside scc_to_pp translation")
