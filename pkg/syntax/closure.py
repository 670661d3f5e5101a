"""
Subdescriptions and closures of concept descriptions.
"""

from typing import Iterable, List

from models.concepts import And, Concept, Constr, Not, Or, Succ, constraint_concepts, negate


def subdescriptions(concept: Concept) -> List[Concept]:
    """Every subdescription, children before parents, without duplicates."""
    found: List[Concept] = []
    seen = set()

    def visit(node: Concept):
        if node in seen:
            return
        if isinstance(node, (And, Or)):
            for operand in node.operands:
                visit(operand)
        elif isinstance(node, Not):
            visit(node.inner)
        elif isinstance(node, (Constr, Succ)):
            for inner in constraint_concepts(node.constraint):
                visit(inner)
        seen.add(node)
        found.append(node)

    visit(concept)
    return found


def closure_of(concepts: Iterable[Concept]) -> List[Concept]:
    """
    Smallest set containing the given concepts, closed under subdescriptions
    and negation, with negation collapsed.

    Each non-negated member appears right before its negation.
    """
    result: List[Concept] = []
    seen = set()
    for concept in concepts:
        for sub in subdescriptions(concept):
            base = sub.inner if isinstance(sub, Not) else sub
            if base in seen:
                continue
            seen.add(base)
            seen.add(negate(base))
            result.extend((base, negate(base)))
    return result


def closure_me(concept: Concept) -> List[Concept]:
    return closure_of([concept])


def positive_members(closure: Iterable[Concept]) -> List[Concept]:
    """Closure members that are not negations."""
    return [c for c in closure if not isinstance(c, Not)]
