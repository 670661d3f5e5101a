"""
Satisfiability of ALCSCC++ concepts.

A concept E is reduced to one QFBAPA formula: one global set variable per
closure member, one role variable per (type, role) pair, Boolean structure
enforced by set equations, and for every type either an empty type region
or the type's global constraints read with that type's role variables.
E is satisfiable iff the formula is, and any solution yields a model.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Collection, Dict, List, Optional, Sequence, Tuple

from models.concepts import (
    EMPTY,
    TOP_NAME,
    UNIV,
    And,
    CardEq,
    Card,
    CNot,
    COr,
    Concept,
    ConceptName,
    ConceptVar,
    Constr,
    Constraint,
    EmptySet,
    IntConst,
    Not,
    Or,
    RoleVar,
    SetComp,
    SetEq,
    SetTerm,
    SetVar,
    Succ,
    Universe,
    at_least,
    concept_roles,
    constraint_all,
    constraint_roles,
    inter_all,
    map_constraint,
    union_all,
)
from models.config import SolverConfig
from models.errors import DialectError, ModelError
from models.interpretation import Interpretation
from reasoner.qfbapa import QfbapaFormula, Solution, solve
from reasoner.semantics import eval_pp
from reasoner.types import TypeSet, generate_types
from syntax.closure import closure_me
from syntax.encodings import nominal_name

logger = logging.getLogger(__name__)


class SatVerdict(str, Enum):
    """Outcome of a satisfiability check."""
    SAT = "SAT"
    UNSAT = "UNSAT"
    RESOURCE = "RESOURCE"


@dataclass
class SatResult:
    """
    Satisfiability verdict with the evidence that produced it.

    Attributes:
        verdict: SAT or UNSAT
        concept: the decided concept
        types: the types of its closure
        formula: the reduced QFBAPA formula
        solution: a satisfying assignment when SAT
        model: an interpretation with an instance of the concept when SAT
    """

    verdict: SatVerdict
    concept: Concept
    types: List[TypeSet] = field(default_factory=list)
    formula: Optional[QfbapaFormula] = None
    solution: Optional[Solution] = None
    model: Optional[Interpretation] = None


def concept_var(concept: Concept) -> SetVar:
    """Global set variable standing for a closure member."""
    return SetVar(("C", concept))


def role_var(role: str, scope: int) -> SetVar:
    """Role variable of one type."""
    return SetVar(("r", role), scope)


def types_of(concept: Concept, cap: int = 4096, fixed: Optional[Dict[Concept, bool]] = None) -> List[TypeSet]:
    """All types over the closure of the concept, with the signs in fixed pinned."""
    for node in closure_me(concept):
        if isinstance(node, Succ):
            raise DialectError("successor constraint in an ALCSCC++ concept; translate with scc_to_pp first")
    return generate_types(closure_me(concept), cap=cap, fixed=fixed)


def uniform_signs(concept: Concept) -> Dict[Concept, bool]:
    """
    Signs of role-free global constraints conjoined at the top of the concept.

    Such a constraint talks about the whole domain only, so it holds at every
    element once it holds at an instance of the concept.
    """
    conjuncts = concept.operands if isinstance(concept, And) else (concept,)
    signs: Dict[Concept, bool] = {}
    for conjunct in conjuncts:
        positive = not isinstance(conjunct, Not)
        member = conjunct if positive else conjunct.inner
        if isinstance(member, Constr) and not any(constraint_roles(member.constraint)):
            signs[member] = positive
    return signs


def _translate(constraint: Constraint, scope: int) -> Constraint:
    def leaf(term: SetTerm) -> SetTerm:
        if isinstance(term, ConceptVar):
            return concept_var(term.concept)
        if isinstance(term, RoleVar):
            return role_var(term.role, scope)
        if isinstance(term, (Universe, EmptySet)):
            return term
        raise DialectError(f"unsupported set term {term!r}")

    return map_constraint(constraint, leaf)


def psi_t(t: TypeSet, scope: int, skip: Collection[Concept] = ()) -> QfbapaFormula:
    """
    Global constraints of a type, with roles read as the type's role variables.

    Members of the form Constr(c) contribute c; members not(Constr(c)) contribute not c.
    Members in skip are left out.
    """
    conjuncts: List[Constraint] = []
    for member, sign in zip(t.closure, t.signs):
        if isinstance(member, Constr) and member not in skip:
            translated = _translate(member.constraint, scope)
            conjuncts.append(translated if sign else CNot(translated))
    return QfbapaFormula.of(conjuncts)


def beta(closure: Sequence[Concept]) -> List[Constraint]:
    """Set equations tying closure variables to their Boolean structure."""
    equations: List[Constraint] = []
    for member in closure:
        if isinstance(member, Not):
            equations.append(SetEq(concept_var(member), SetComp(concept_var(member.inner))))
        elif isinstance(member, And):
            equations.append(SetEq(concept_var(member), inter_all(concept_var(op) for op in member.operands)))
        elif isinstance(member, Or):
            equations.append(SetEq(concept_var(member), union_all(concept_var(op) for op in member.operands)))
    return equations


def delta(concept: Concept, config: Optional[SolverConfig] = None) -> Tuple[QfbapaFormula, List[TypeSet]]:
    """The QFBAPA formula equisatisfiable with the concept, plus the types it ranges over."""
    config = config or SolverConfig()
    closure = closure_me(concept)
    fixed = uniform_signs(concept)
    pinned: Dict[Concept, bool] = dict(fixed)
    # top is the anchor name or its negation, so the anchor can hold everywhere
    if ConceptName(TOP_NAME) in closure:
        pinned[ConceptName(TOP_NAME)] = True
    types = types_of(concept, config.max_types, pinned)
    roles = sorted(set(concept_roles(concept)))
    conjuncts: List[Constraint] = [at_least(Card(concept_var(concept)), IntConst(1))]
    conjuncts.extend(beta(closure))
    for member, sign in fixed.items():
        translated = _translate(member.constraint, None)
        conjuncts.append(translated if sign else CNot(translated))
    for member, sign in pinned.items():
        conjuncts.append(SetEq(concept_var(member), UNIV if sign else EMPTY))
    for index, t in enumerate(types):
        local = psi_t(t, index, fixed)
        body = constraint_all(local.conjuncts)
        if body is None:
            continue
        region = inter_all(concept_var(m) for m in t.members())
        conjuncts.append(COr(CardEq(Card(region), IntConst(0)), body))
    variables = [concept_var(c) for c in closure]
    variables.extend(role_var(r, i) for i in range(len(types)) for r in roles)
    formula = QfbapaFormula.of(conjuncts, variables)
    logger.info(f"Reduced concept with closure of {len(closure)} to {len(types)} types")
    return formula, types


def sat(concept: Concept, config: Optional[SolverConfig] = None, build_model: bool = True) -> SatResult:
    """Decide satisfiability; on SAT also build and audit a model."""
    config = config or SolverConfig()
    formula, types = delta(concept, config)
    solution = solve(formula, config)
    if solution is None:
        return SatResult(SatVerdict.UNSAT, concept, types, formula)
    model = extract_model(concept, solution, types) if build_model else None
    if model is not None and not eval_pp(model, concept):
        raise ModelError("extracted model has no instance of the concept")
    return SatResult(SatVerdict.SAT, concept, types, formula, solution, model)


def extract_model(concept: Concept, solution: Solution, types: Sequence[TypeSet]) -> Interpretation:
    """
    Interpretation built from a solution of delta(concept).

    Elements are the universe of the solution, grouped by type. A concept
    name holds where its variable does; an element of type t has as role
    successors the value of t's role variable.
    """
    closure = closure_me(concept)
    roles = sorted(set(concept_roles(concept)))
    table = solution.variables
    position = {var: i for i, var in enumerate(table)}
    members = [m for m in closure]
    signature_of = {tuple(t.signs): index for index, t in enumerate(types)}

    element_type: Dict[int, int] = {}
    for region, elements in solution.elements.items():
        signs = tuple(region[position[concept_var(m)]] for m in members)
        if signs not in signature_of:
            raise ModelError("solution element matches no type")
        for element in elements:
            element_type[element] = signature_of[signs]

    ordered = sorted(element_type, key=lambda e: (element_type[e], e))
    new_id = {old: new for new, old in enumerate(ordered)}
    copies: Dict[int, int] = {}
    labels = {}
    for old in ordered:
        t = element_type[old]
        copies[t] = copies.get(t, 0) + 1
        labels[new_id[old]] = f"t{t}.{copies[t]}"

    names = sorted({m.name for m in closure if isinstance(m, ConceptName) and m.name != TOP_NAME})
    concepts = {
        name: [new_id[e] for e in solution.value(concept_var(ConceptName(name)))]
        for name in names
    }
    role_edges: Dict[str, List[Tuple[int, int]]] = {r: [] for r in roles}
    for role in roles:
        values = {index: solution.value(role_var(role, index)) for index in set(element_type.values())
                  if role_var(role, index) in position}
        for old, index in element_type.items():
            for target in values.get(index, ()):
                role_edges[role].append((new_id[old], new_id[target]))
    return Interpretation.build(
        domain=range(len(ordered)),
        concepts=concepts,
        roles=role_edges,
        labels=labels,
    )


def with_nominal_individuals(model: Interpretation, individuals: Sequence[str]) -> Interpretation:
    """Interpret each individual as the single instance of its nominal concept name."""
    placed = {}
    for individual in individuals:
        extension = model.extension(nominal_name(individual))
        if len(extension) != 1:
            raise ModelError(f"nominal for {individual} is not a singleton")
        placed[individual] = next(iter(extension))
    return replace(model, individuals=placed)
