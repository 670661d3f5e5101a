"""
Knowledge bases, cardinality boxes and conjunctive queries.

A KnowledgeBase bundles an ABox, a TBox, an optional positive Boolean
combination of semi-restricted constraints (the ERCBox), an optional
extended-cardinality box over concepts only (the ECBox) and an optional
goal concept used by the satisfiability command.
"""

from dataclasses import dataclass, field, replace
from typing import FrozenSet, Iterable, Iterator, Optional, Tuple, Union

from models.concepts import (
    TOP_NAME,
    Concept,
    Constraint,
    concept_names,
    concept_roles,
    constraint_concepts,
    constraint_roles,
)


@dataclass(frozen=True)
class ConceptAssertion:
    concept: Concept
    individual: str


@dataclass(frozen=True)
class RoleAssertion:
    role: str
    source: str
    target: str


@dataclass(frozen=True)
class NegatedRoleAssertion:
    role: str
    source: str
    target: str


Assertion = Union[ConceptAssertion, RoleAssertion, NegatedRoleAssertion]


@dataclass(frozen=True)
class ConceptInclusion:
    sub: Concept
    sup: Concept


@dataclass(frozen=True)
class SemiRestrictedConstraint:
    """
    N1|C1| + ... + Nk|Ck| + offset <= N'1|D1| + ... + N'l|Dl|.

    Attributes:
        lhs: (coefficient, concept) pairs on the left
        offset: non-negative constant on the left
        rhs: (coefficient, concept) pairs on the right
    """

    lhs: Tuple[Tuple[int, Concept], ...]
    offset: int
    rhs: Tuple[Tuple[int, Concept], ...]

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError(f"offset must be non-negative, got {self.offset}")

    def concepts(self) -> Iterator[Concept]:
        for _, concept in self.lhs + self.rhs:
            yield concept


@dataclass(frozen=True)
class ErcAnd:
    operands: Tuple["Erc", ...]


@dataclass(frozen=True)
class ErcOr:
    operands: Tuple["Erc", ...]


Erc = Union[SemiRestrictedConstraint, ErcAnd, ErcOr]


def erc_leaves(erc: Optional[Erc]) -> Iterator[SemiRestrictedConstraint]:
    """Leaves of a positive Boolean ERCBox, left to right."""
    if erc is None:
        return
    if isinstance(erc, SemiRestrictedConstraint):
        yield erc
        return
    for operand in erc.operands:
        yield from erc_leaves(operand)


@dataclass(frozen=True)
class ConjunctiveErcBox:
    """A finite conjunction of semi-restricted constraints."""

    constraints: Tuple[SemiRestrictedConstraint, ...] = ()

    def concepts(self) -> Iterator[Concept]:
        for constraint in self.constraints:
            yield from constraint.concepts()


@dataclass(frozen=True)
class KnowledgeBase:
    """
    ALCSCC knowledge base with optional cardinality boxes.

    Attributes:
        abox: concept, role and negated role assertions
        tbox: concept inclusions
        ercbox: positive Boolean combination of semi-restricted constraints
        ecbox: cardinality constraint over concepts only
        goal: concept whose satisfiability the sat command decides
        roles: role names declared without being used in an assertion
    """

    abox: Tuple[Assertion, ...] = ()
    tbox: Tuple[ConceptInclusion, ...] = ()
    ercbox: Optional[Erc] = None
    ecbox: Optional[Constraint] = None
    goal: Optional[Concept] = None
    roles: FrozenSet[str] = field(default_factory=frozenset)

    def with_axioms(
        self,
        abox: Iterable[Assertion] = (),
        tbox: Iterable[ConceptInclusion] = (),
    ) -> "KnowledgeBase":
        """Copy with extra assertions and inclusions appended, duplicates dropped."""
        new_abox = tuple(dict.fromkeys(self.abox + tuple(abox)))
        new_tbox = tuple(dict.fromkeys(self.tbox + tuple(tbox)))
        return replace(self, abox=new_abox, tbox=new_tbox)

    def concepts(self) -> Iterator[Concept]:
        """Every top-level concept of the KB."""
        for assertion in self.abox:
            if isinstance(assertion, ConceptAssertion):
                yield assertion.concept
        for inclusion in self.tbox:
            yield inclusion.sub
            yield inclusion.sup
        for leaf in erc_leaves(self.ercbox):
            yield from leaf.concepts()
        if self.ecbox is not None:
            yield from constraint_concepts(self.ecbox)
        if self.goal is not None:
            yield self.goal

    def individuals(self) -> Tuple[str, ...]:
        names = set()
        for assertion in self.abox:
            if isinstance(assertion, ConceptAssertion):
                names.add(assertion.individual)
            else:
                names.update((assertion.source, assertion.target))
        return tuple(sorted(names))

    def concept_names(self) -> Tuple[str, ...]:
        names = set()
        for concept in self.concepts():
            names.update(concept_names(concept))
        names.discard(TOP_NAME)
        return tuple(sorted(names))

    def role_names(self) -> Tuple[str, ...]:
        names = set(self.roles)
        for assertion in self.abox:
            if not isinstance(assertion, ConceptAssertion):
                names.add(assertion.role)
        for concept in self.concepts():
            names.update(concept_roles(concept))
        if self.ecbox is not None:
            names.update(constraint_roles(self.ecbox))
        return tuple(sorted(names))


@dataclass(frozen=True)
class RoleAtom:
    role: str
    source: str
    target: str


@dataclass(frozen=True)
class ConceptAtom:
    concept: Concept
    variable: str


@dataclass(frozen=True)
class ConjunctiveQuery:
    """Boolean conjunctive query: every variable is existentially quantified."""

    role_atoms: Tuple[RoleAtom, ...] = ()
    concept_atoms: Tuple[ConceptAtom, ...] = ()

    @property
    def variables(self) -> Tuple[str, ...]:
        names = set()
        for atom in self.role_atoms:
            names.update((atom.source, atom.target))
        for atom in self.concept_atoms:
            names.add(atom.variable)
        return tuple(sorted(names))

    @property
    def size(self) -> int:
        return len(self.role_atoms) + len(self.concept_atoms)

    def roles(self) -> Tuple[str, ...]:
        return tuple(sorted({atom.role for atom in self.role_atoms}))

    def rename(self, mapping) -> "ConjunctiveQuery":
        """Apply a variable renaming; merged atoms collapse."""
        role_atoms = tuple(sorted(
            {RoleAtom(a.role, mapping.get(a.source, a.source), mapping.get(a.target, a.target)) for a in self.role_atoms},
            key=lambda a: (a.role, a.source, a.target),
        ))
        concept_atoms = tuple(dict.fromkeys(
            ConceptAtom(a.concept, mapping.get(a.variable, a.variable)) for a in self.concept_atoms
        ))
        return ConjunctiveQuery(role_atoms, concept_atoms)

    def restrict(self, variables: Iterable[str]) -> "ConjunctiveQuery":
        """Atoms whose variables all lie in the given set."""
        keep = set(variables)
        return ConjunctiveQuery(
            tuple(a for a in self.role_atoms if a.source in keep and a.target in keep),
            tuple(a for a in self.concept_atoms if a.variable in keep),
        )
