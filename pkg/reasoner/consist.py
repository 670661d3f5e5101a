"""
Consistency of ALCSCC knowledge bases with a positive ERCBox.

The procedure works over types of the KB closure extended with individual
names. An augmented type pairs a type with a set of Venn regions that one of
its elements can see among its role successors, witnessed by a solution of
the type's successor formula. Augmented types whose regions are not realized
by surviving types, and types the ERCBox forces to be empty, are eliminated
until a fixpoint; a non-empty fixpoint that covers every individual yields a
model.

Augmented types are computed lazily: each type keeps one witness, re-solved
inside the regions still realized whenever its current witness goes stale.
A type survives exactly when some witness exists inside the realized
regions, which is what eliminating all of its augmented types would decide.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from models.concepts import (
    EMPTY,
    UNIV,
    Card,
    CardEq,
    CNot,
    Concept,
    ConceptVar,
    Constr,
    Constraint,
    IntConst,
    Not,
    RoleVar,
    SetComp,
    SetEq,
    SetInter,
    SetTerm,
    SetVar,
    Succ,
    at_least,
    at_most,
    map_constraint,
    union_all,
    walk_concept,
)
from models.config import SolverConfig
from models.errors import DialectError, InvalidInputError, ModelError, ResourceExceeded
from models.interpretation import Interpretation
from models.knowledge_base import (
    Assertion,
    ConceptAssertion,
    ConjunctiveErcBox,
    Erc,
    ErcAnd,
    KnowledgeBase,
    NegatedRoleAssertion,
    RoleAssertion,
    SemiRestrictedConstraint,
    erc_leaves,
)
from reasoner.linear import LinearSystem, lin_feasible_rational, lin_positive_support
from reasoner.qfbapa import QfbapaFormula, Region, Solution, minimal_supports, solve, solve_with_support, sparse_bound
from reasoner.satpp import SatVerdict, sat, with_nominal_individuals
from reasoner.semantics import satisfies
from reasoner.types import IndividualLabel, TypeSet, generate_types
from syntax.closure import closure_of, positive_members
from syntax.encodings import kb_to_concept
from syntax.normalize import normalize_kb

logger = logging.getLogger(__name__)

EXHAUSTIVE_SUPPORT_LIMIT = 256


@dataclass(frozen=True)
class AugmentedType:
    """
    A type with the Venn regions one of its elements sees.

    Attributes:
        index: position of the type in the context's type list
        type: the type
        support: non-empty regions of the witness
        witness: solution of the type's successor formula
    """

    index: int
    type: TypeSet
    support: FrozenSet[Region]
    witness: Solution = field(compare=False, hash=False)

    @property
    def successors(self) -> int:
        return self.witness.universe_size

    def sort_key(self) -> Tuple:
        return (self.index, tuple(sorted(self.support)))


@dataclass
class TraceEvent:
    """One step of the elimination procedure."""

    step: str
    detail: str

    def to_json(self) -> dict:
        return {"step": self.step, "detail": self.detail}


@dataclass
class EliminationState:
    """
    Fixpoint reached by the elimination procedure.

    Attributes:
        augmented: surviving augmented types
        choice: individual -> augmented type interpreting it
        trace: steps taken
    """

    augmented: List[AugmentedType]
    choice: Dict[str, AugmentedType]
    trace: List[TraceEvent] = field(default_factory=list)

    def type_indices(self) -> List[int]:
        return list(dict.fromkeys(a.index for a in self.augmented))


@dataclass
class ConsistencyResult:
    """Verdict of a consistency check, with the model when consistent."""

    consistent: bool
    model: Optional[Interpretation] = None
    trace: List[TraceEvent] = field(default_factory=list)


class ReasoningContext:
    """
    Closure, types and successor formulas of one normalised KB.

    Attributes:
        closure: closure of the ABox, TBox and ERCBox concepts
        roles: role names, sorted
        individuals: individual names, sorted
        abox: the KB's assertions
        types: types satisfying every TBox inclusion
        variables: X_C per non-negated closure member, then X_r per role, then X_b per individual
    """

    def __init__(self, kb: KnowledgeBase, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()
        concepts: List[Concept] = [a.concept for a in kb.abox if isinstance(a, ConceptAssertion)]
        for ci in kb.tbox:
            concepts.extend((ci.sub, ci.sup))
        for leaf in erc_leaves(kb.ercbox):
            concepts.extend(leaf.concepts())
        for concept in concepts:
            for node in walk_concept(concept):
                if isinstance(node, Constr):
                    raise DialectError("global constraint in an ALCSCC knowledge base")
        self.kb = kb
        self.closure = closure_of(concepts)
        self.positives = positive_members(self.closure)
        self.roles = kb.role_names()
        self.individuals = kb.individuals()
        self.abox: Tuple[Assertion, ...] = kb.abox
        tbox = kb.tbox

        def accept(value) -> bool:
            return all(not value[ci.sub] or value[ci.sup] for ci in tbox)

        self.types = generate_types(
            self.closure,
            labels=[IndividualLabel(b) for b in self.individuals],
            accept=accept,
            cap=self.config.max_types,
        )
        self.concept_vars = {c: SetVar(("C", c)) for c in self.positives}
        self.role_vars = {r: SetVar(("r", r)) for r in self.roles}
        self.individual_vars = {b: SetVar(("b", b)) for b in self.individuals}
        self.variables: Tuple[SetVar, ...] = (
            tuple(self.concept_vars.values()) + tuple(self.role_vars.values()) + tuple(self.individual_vars.values())
        )
        self._formulas: Dict[int, QfbapaFormula] = {}
        self._witnesses: Dict[Tuple[int, FrozenSet[int]], Optional[Solution]] = {}
        logger.info(
            f"Consistency context: closure {len(self.closure)}, {len(self.types)} types, "
            f"{len(self.roles)} roles, {len(self.individuals)} individuals"
        )

    # ------------------------------------------------------------ projections

    def type_projection(self, t: TypeSet) -> Tuple[Tuple[bool, ...], FrozenSet[str]]:
        return tuple(c in t for c in self.positives), t.individuals()

    def region_projection(self, region: Region) -> Tuple[Tuple[bool, ...], FrozenSet[str]]:
        n_concepts, n_roles = len(self.positives), len(self.roles)
        individual_signs = region[n_concepts + n_roles:]
        return (
            tuple(region[:n_concepts]),
            frozenset(b for b, s in zip(self.individuals, individual_signs) if s),
        )

    def candidate_regions(self, allowed: Sequence[int]) -> List[Region]:
        """Regions whose concept and individual part is some allowed type."""
        regions: List[Region] = []
        for index in allowed:
            t = self.types[index]
            concepts = tuple(c in t for c in self.positives)
            names = tuple(b in t.individuals() for b in self.individuals)
            for rho in itertools.product((True, False), repeat=len(self.roles)):
                regions.append(concepts + rho + names)
        return regions

    # ------------------------------------------------------------ formulas

    def term_for(self, concept: Concept) -> SetTerm:
        if isinstance(concept, Not):
            return SetComp(self.concept_vars[concept.inner])
        return self.concept_vars[concept]

    def _translate(self, constraint: Constraint) -> Constraint:
        def leaf(term: SetTerm) -> SetTerm:
            if isinstance(term, ConceptVar):
                return self.term_for(term.concept)
            if isinstance(term, RoleVar):
                return self.role_vars[term.role]
            return term

        return map_constraint(constraint, leaf)

    def phi_t_prime(self, index: int) -> QfbapaFormula:
        """Successor formula of a type: what an element of the type needs among its successors."""
        if index in self._formulas:
            return self._formulas[index]
        t = self.types[index]
        conjuncts: List[Constraint] = []
        for member, sign in zip(t.closure, t.signs):
            if isinstance(member, Succ):
                translated = self._translate(member.constraint)
                conjuncts.append(translated if sign else CNot(translated))
        if self.roles:
            conjuncts.append(SetEq(union_all(self.role_vars[r] for r in self.roles), UNIV))
        else:
            conjuncts.append(SetEq(UNIV, EMPTY))
        for b in self.individuals:
            conjuncts.append(at_most(Card(self.individual_vars[b]), IntConst(1)))
        names = t.individuals()
        for assertion in self.abox:
            if isinstance(assertion, (RoleAssertion, NegatedRoleAssertion)) and assertion.source in names:
                edge = Card(SetInter(self.individual_vars[assertion.target], self.role_vars[assertion.role]))
                if isinstance(assertion, RoleAssertion):
                    conjuncts.append(at_least(edge, IntConst(1)))
                else:
                    conjuncts.append(CardEq(edge, IntConst(0)))
        formula = QfbapaFormula.of(conjuncts, self.variables)
        self._formulas[index] = formula
        return formula

    def witness(self, index: int, allowed: FrozenSet[int]) -> Optional[Solution]:
        """A solution of the type's successor formula inside the regions of the allowed types."""
        key = (index, allowed)
        if key not in self._witnesses:
            formula = self.phi_t_prime(index)
            bound = sparse_bound(formula, self.config.sparse_multiplier)
            self._witnesses[key] = solve(
                formula,
                self.config,
                max_support=bound,
                within=self.candidate_regions(sorted(allowed)),
            )
        return self._witnesses[key]

    def realized(self, support: FrozenSet[Region], allowed: Sequence[int]) -> bool:
        """Every region's concept and individual part is one of the allowed types."""
        available = {self.type_projection(self.types[i]) for i in allowed}
        return all(self.region_projection(v) in available for v in support)


# ---------------------------------------------------------------- ERCBox helpers


def _erc_true(erc: Erc, chosen: FrozenSet[SemiRestrictedConstraint]) -> bool:
    if isinstance(erc, SemiRestrictedConstraint):
        return erc in chosen
    if isinstance(erc, ErcAnd):
        return all(_erc_true(op, chosen) for op in erc.operands)
    return any(_erc_true(op, chosen) for op in erc.operands)


def dnf_split(erc: Optional[Erc], cap: int = 16) -> List[ConjunctiveErcBox]:
    """
    One conjunctive ERCBox per satisfying valuation of the positive structure.

    Smaller conjunctions come first.
    """
    if erc is None:
        return [ConjunctiveErcBox(())]
    leaves = list(dict.fromkeys(erc_leaves(erc)))
    if len(leaves) > cap:
        raise ResourceExceeded(f"ERCBox has {len(leaves)} distinct constraints, more than {cap}", cap="max_erc_leaves")
    boxes: List[ConjunctiveErcBox] = []
    for size in range(1, len(leaves) + 1):
        for combo in itertools.combinations(leaves, size):
            if _erc_true(erc, frozenset(combo)):
                boxes.append(ConjunctiveErcBox(tuple(combo)))
    return boxes


def linear_system_for(ctx: ReasoningContext, box: ConjunctiveErcBox, indices: Sequence[int]) -> LinearSystem:
    """One row per constraint; unknown i counts the elements of type indices[i]."""
    rows, bounds = [], []
    for constraint in box.constraints:
        row = []
        for index in indices:
            t = ctx.types[index]
            gain = sum(n for n, d in constraint.rhs if d in t)
            cost = sum(n for n, c in constraint.lhs if c in t)
            row.append(gain - cost)
        rows.append(tuple(row))
        bounds.append(constraint.offset)
    return LinearSystem(tuple(rows), tuple(bounds), len(indices))


# ---------------------------------------------------------------- elimination


def augmented_types(ctx: ReasoningContext, exhaustive: bool = False) -> List[AugmentedType]:
    """
    Augmented types over all types.

    By default one representative per type; with exhaustive=True one per
    inclusion-minimal region set of bounded size that some solution occupies.
    A larger support is realized only when a minimal one inside it is, so
    the minimal ones decide the same elimination.
    """
    everything = frozenset(range(len(ctx.types)))
    found: List[AugmentedType] = []
    for index, t in enumerate(ctx.types):
        if not exhaustive:
            solution = ctx.witness(index, everything)
            if solution is not None:
                found.append(AugmentedType(index, t, solution.support, solution))
            continue
        formula = ctx.phi_t_prime(index)
        for solution in minimal_supports(
            formula,
            ctx.config,
            within=ctx.candidate_regions(sorted(everything)),
            max_size=sparse_bound(formula, ctx.config.sparse_multiplier),
            limit=EXHAUSTIVE_SUPPORT_LIMIT,
        ):
            # the support alone must admit a witness
            witness = solve_with_support(formula, solution.support, config=ctx.config, exact=True)
            if witness is None:
                logger.info(f"Dropping support of size {len(solution.support)} for type {index}: no exact witness")
                continue
            found.append(AugmentedType(index, t, witness.support, witness))
    return found


def _respects_abox(ctx: ReasoningContext, aug: AugmentedType) -> bool:
    names = aug.type.individuals()
    for assertion in ctx.abox:
        if isinstance(assertion, ConceptAssertion) and assertion.individual in names:
            if assertion.concept not in aug.type:
                return False
    return True


def _choices(ctx: ReasoningContext, candidates: List[AugmentedType]) -> Iterator[Dict[str, AugmentedType]]:
    """Assignments of individuals to augmented types, each individual in exactly one."""
    options = {
        b: sorted((a for a in candidates if b in a.type.individuals()), key=AugmentedType.sort_key)
        for b in ctx.individuals
    }
    choice: Dict[str, AugmentedType] = {}

    def extend(i: int) -> Iterator[Dict[str, AugmentedType]]:
        if i == len(ctx.individuals):
            yield dict(choice)
            return
        b = ctx.individuals[i]
        if b in choice:
            yield from extend(i + 1)
            return
        for aug in options[b]:
            names = aug.type.individuals()
            if any(c in choice for c in names):
                continue
            for c in names:
                choice[c] = aug
            yield from extend(i + 1)
            for c in names:
                del choice[c]

    yield from extend(0)


def _eliminate(
    ctx: ReasoningContext,
    box: ConjunctiveErcBox,
    start: List[AugmentedType],
    exhaustive: bool,
    trace: List[TraceEvent],
) -> Optional[EliminationState]:
    current = list(start)
    while True:
        # realized-regions step
        changed = True
        while changed:
            changed = False
            allowed = list(dict.fromkeys(a.index for a in current))
            for position, aug in enumerate(current):
                if ctx.realized(aug.support, allowed):
                    continue
                solution = None if exhaustive else ctx.witness(aug.index, frozenset(allowed))
                if solution is None:
                    trace.append(TraceEvent("regions", f"removed augmented type of type {aug.index}"))
                    del current[position]
                else:
                    trace.append(TraceEvent("regions", f"re-witnessed type {aug.index} inside realized regions"))
                    current[position] = AugmentedType(aug.index, aug.type, solution.support, solution)
                changed = True
                break
            lost = [b for b in ctx.individuals if not any(b in a.type.individuals() for a in current)]
            if lost:
                trace.append(TraceEvent("regions", f"individual {lost[0]} lost every type"))
                return None
        # ERCBox step
        indices = list(dict.fromkeys(a.index for a in current))
        system = linear_system_for(ctx, box, indices)
        infeasible = None
        for position, index in enumerate(indices):
            if lin_feasible_rational(system.with_lower_bound(position), ctx.config) is None:
                infeasible = index
                break
        if infeasible is None:
            chosen = {}
            for b in ctx.individuals:
                chosen[b] = next(a for a in current if b in a.type.individuals())
            return EliminationState(current, chosen, trace)
        trace.append(TraceEvent("erc", f"type {infeasible} cannot be populated under the ERCBox"))
        current = [a for a in current if a.index != infeasible]
        if not current:
            return None


def algorithm1(
    ctx: ReasoningContext,
    box: ConjunctiveErcBox,
    exhaustive: bool = False,
    trace: Optional[List[TraceEvent]] = None,
) -> Optional[EliminationState]:
    """Run type elimination for a conjunctive ERCBox; None means no model."""
    trace = trace if trace is not None else []
    initial = [a for a in augmented_types(ctx, exhaustive) if _respects_abox(ctx, a)]
    trace.append(TraceEvent("start", f"{len(initial)} augmented types"))
    anonymous = [a for a in initial if not a.type.individuals()]
    named = [a for a in initial if a.type.individuals()]
    for b in ctx.individuals:
        if not any(b in a.type.individuals() for a in named):
            trace.append(TraceEvent("abox", f"no type can interpret individual {b}"))
            return None
    for attempt, choice in enumerate(_choices(ctx, named)):
        if attempt >= ctx.config.max_choices:
            raise ResourceExceeded(f"more than {ctx.config.max_choices} individual placements", cap="max_choices")
        picked = list(dict.fromkeys(choice.values()))
        trace.append(TraceEvent(
            "abox", "placement " + ", ".join(f"{b}->type {choice[b].index}" for b in ctx.individuals)
        ))
        state = _eliminate(ctx, box, anonymous + picked, exhaustive, trace)
        if state is not None:
            return state
    return None


# ---------------------------------------------------------------- models


def extract_model(ctx: ReasoningContext, state: EliminationState, box: ConjunctiveErcBox) -> Interpretation:
    """Interpretation assembled from copies of the surviving augmented types."""
    augmented = state.augmented
    indices = state.type_indices()
    per_type = {index: sum(1 for a in augmented if a.index == index) for index in indices}
    largest = max((a.successors for a in augmented), default=0)
    scale = max(1, largest) * math.prod(per_type.values())
    system = linear_system_for(ctx, box, indices)
    base = lin_positive_support(system, range(len(indices)), ctx.config)
    if base is None:
        raise ModelError("surviving types admit no positive ERCBox solution")
    population = {index: scale * base[i] for i, index in enumerate(indices)}
    copies: Dict[int, int] = {}
    for position, aug in enumerate(augmented):
        if population[aug.index] % per_type[aug.index]:
            raise ModelError("type population is not divisible among its augmented types")
        copies[position] = population[aug.index] // per_type[aug.index]

    ids: Dict[Tuple[int, int], int] = {}
    labels: Dict[int, str] = {}
    for position, aug in enumerate(augmented):
        for copy in range(1, copies[position] + 1):
            element = len(ids)
            ids[(position, copy)] = element
            labels[element] = f"t{aug.index}.{position}.{copy}"

    owner = {id(a): p for p, a in enumerate(augmented)}
    individuals = {b: ids[(owner[id(state.choice[b])], 1)] for b in ctx.individuals}

    concepts: Dict[str, List[int]] = {}
    for position, aug in enumerate(augmented):
        for name in aug.type.concept_names():
            concepts.setdefault(name, []).extend(ids[(position, c)] for c in range(1, copies[position] + 1))

    realizers: Dict[Tuple, List[int]] = {}
    for position, aug in enumerate(augmented):
        realizers.setdefault(ctx.type_projection(aug.type), []).append(position)

    role_index = {r: len(ctx.positives) + i for i, r in enumerate(ctx.roles)}
    edges: Dict[str, List[Tuple[int, int]]] = {r: [] for r in ctx.roles}
    for position, aug in enumerate(augmented):
        used: Dict[int, int] = {}
        targets: Dict[int, int] = {}
        for region in sorted(aug.witness.elements):
            projection = ctx.region_projection(region)
            owners = realizers.get(projection)
            if not owners:
                raise ModelError(f"region of type {aug.index} is not realized by a surviving type")
            target = owners[0]
            for element in aug.witness.elements[region]:
                # named regions hold at most one element, mapped to the individual itself
                copy = 1 if projection[1] else used.get(target, 0) + 1
                if not projection[1]:
                    used[target] = copy
                if copy > copies[target]:
                    raise ModelError("not enough copies to map successors injectively")
                targets[element] = ids[(target, copy)]
        for role in ctx.roles:
            successors = [targets[e] for region, elems in aug.witness.elements.items()
                          if region[role_index[role]] for e in elems]
            for copy in range(1, copies[position] + 1):
                source = ids[(position, copy)]
                edges[role].extend((source, target) for target in successors)

    return Interpretation.build(
        domain=range(len(ids)),
        concepts=concepts,
        roles=edges,
        individuals=individuals,
        labels=labels,
    )


# ---------------------------------------------------------------- entry point


def _via_satpp(kb: KnowledgeBase, config: SolverConfig) -> ConsistencyResult:
    result = sat(kb_to_concept(replace(kb, goal=None)), config)
    trace = [TraceEvent("satpp", "ECBox present; decided through the concept encoding")]
    if result.verdict != SatVerdict.SAT:
        return ConsistencyResult(False, None, trace)
    return ConsistencyResult(True, with_nominal_individuals(result.model, kb.individuals()), trace)


def consistent(kb: KnowledgeBase, config: Optional[SolverConfig] = None) -> ConsistencyResult:
    """Decide consistency; a consistent verdict carries an audited model."""
    config = config or SolverConfig()
    if not kb.abox:
        raise InvalidInputError("ABox must be non-empty")
    if kb.ecbox is not None:
        result = _via_satpp(kb, config)
    else:
        normalized = normalize_kb(kb).kb
        ctx = ReasoningContext(normalized, config)
        trace: List[TraceEvent] = []
        result = ConsistencyResult(False, None, trace)
        for box in dnf_split(normalized.ercbox, config.max_erc_leaves):
            trace.append(TraceEvent("erc", f"trying conjunction of {len(box.constraints)} constraints"))
            state = algorithm1(ctx, box, config.exhaustive_augmented, trace)
            if state is not None:
                result = ConsistencyResult(True, extract_model(ctx, state, box), trace)
                break
    if result.consistent:
        report = satisfies(result.model, kb)
        if not report.satisfied:
            raise ModelError(f"constructed model fails its audit: {report.violations[0]}")
    logger.info(f"Consistency verdict: {result.consistent}")
    return result
