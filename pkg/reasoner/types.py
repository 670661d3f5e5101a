"""
Types: maximal consistent selections from a closure.

A type fixes, for every non-negated closure member, whether it or its
negation holds; Boolean members are then forced by their operands. Extra
atomic labels (individual names) may be added, each free to be in or out.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Tuple

from models.concepts import TOP_NAME, And, Concept, ConceptName, Not, Or, negate
from models.errors import ResourceExceeded


@dataclass(frozen=True)
class IndividualLabel:
    """Closure entry standing for an individual name."""

    name: str


@lru_cache(maxsize=256)
def _positions(closure: Tuple[Hashable, ...]) -> Dict[Hashable, int]:
    return {member: i for i, member in enumerate(closure)}


@dataclass(frozen=True)
class TypeSet:
    """
    A type over a closure, stored densely as one sign per closure entry.

    Attributes:
        closure: closure entries (concepts with their negations, then labels)
        signs: whether each entry belongs to the type
    """

    closure: Tuple[Hashable, ...]
    signs: Tuple[bool, ...]

    def __contains__(self, item: Hashable) -> bool:
        index = _positions(self.closure).get(item)
        return index is not None and self.signs[index]

    def members(self) -> Tuple[Hashable, ...]:
        return tuple(m for m, s in zip(self.closure, self.signs) if s)

    def concepts(self) -> Tuple[Concept, ...]:
        return tuple(m for m in self.members() if isinstance(m, Concept))

    def individuals(self) -> FrozenSet[str]:
        return frozenset(m.name for m in self.members() if isinstance(m, IndividualLabel))

    def concept_names(self) -> FrozenSet[str]:
        return frozenset(
            m.name for m in self.members() if isinstance(m, ConceptName) and m.name != TOP_NAME
        )

    @property
    def key(self) -> Tuple[bool, ...]:
        return self.signs


class _Valuation(dict):
    """Concept signs; a negation reads the sign of its operand."""

    def __missing__(self, key):
        if isinstance(key, Not):
            return not self[key.inner]
        raise KeyError(key)


def _forced(concept: Concept, value: Dict[Concept, bool]) -> Optional[bool]:
    if isinstance(concept, And):
        return all(value[op] for op in concept.operands)
    if isinstance(concept, Or):
        return any(value[op] for op in concept.operands)
    if isinstance(concept, Not):
        return not value[concept.inner]
    return None


def generate_types(
    closure: Sequence[Concept],
    labels: Iterable[IndividualLabel] = (),
    accept: Optional[Callable[[Dict[Concept, bool]], bool]] = None,
    cap: int = 4096,
    fixed: Optional[Dict[Concept, bool]] = None,
) -> List[TypeSet]:
    """
    All types over the closure, in a deterministic order.

    closure must list subdescriptions before the concepts containing them,
    as closure_of does. accept filters on the concept valuation; fixed pins
    the sign of some non-negated members in every type.
    """
    fixed = fixed or {}
    closure = tuple(closure)
    labels = tuple(labels)
    entries: Tuple[Hashable, ...] = closure + labels
    bases = [c for c in closure if not isinstance(c, Not)]
    value = _Valuation()
    found: List[TypeSet] = []

    def emit():
        concept_signs = []
        for member in closure:
            concept_signs.append(value[member] if not isinstance(member, Not) else not value[member.inner])
        for label_signs in _label_vectors(len(labels)):
            found.append(TypeSet(entries, tuple(concept_signs) + label_signs))
            if len(found) > cap:
                raise ResourceExceeded(f"more than {cap} types", cap="max_types")

    def extend(i: int):
        if i == len(bases):
            if accept is None or accept(value):
                emit()
            return
        base = bases[i]
        forced = _forced(base, value)
        options = (True, False) if forced is None else (forced,)
        if base in fixed:
            options = tuple(o for o in options if o == fixed[base])
        for option in options:
            value[base] = option
            extend(i + 1)
        value.pop(base, None)

    extend(0)
    return found


def _label_vectors(count: int) -> List[Tuple[bool, ...]]:
    if count == 0:
        return [()]
    rest = _label_vectors(count - 1)
    return [(True,) + r for r in rest] + [(False,) + r for r in rest]


def check_type_conditions(t: TypeSet) -> bool:
    """Exactly one of C and its negation, and Boolean members agree with their operands."""
    concepts = [m for m in t.closure if isinstance(m, Concept)]
    for member in concepts:
        if (member in t) == (negate(member) in t):
            return False
        if isinstance(member, And) and (member in t) != all(op in t for op in member.operands):
            return False
        if isinstance(member, Or) and (member in t) != any(op in t for op in member.operands):
            return False
    return True
