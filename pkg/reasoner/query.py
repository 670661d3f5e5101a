"""
Conjunctive query entailment over ALCSCC knowledge bases with ERCBoxes.

A query is entailed unless some super-spoiler, a minimal set of extra
assertions and inclusions blocking every way the query could be matched
along the ABox and its tree-shaped surroundings, keeps the KB consistent.
Each candidate is decided with the consistency procedure; the model it
returns is loosened and repaired when it still matches the query.
"""

import itertools
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
from networkx.algorithms.isomorphism import categorical_edge_match, categorical_node_match

from models.concepts import (
    Card,
    Concept,
    ConceptVar,
    IntConst,
    RoleVar,
    Succ,
    at_least,
    conjoin,
    inter_all,
    is_top,
    negate,
    top,
)
from models.config import SolverConfig
from models.errors import DialectError, ModelError, ResourceExceeded
from models.interpretation import Interpretation
from models.knowledge_base import (
    ConceptAssertion,
    ConceptInclusion,
    ConjunctiveQuery,
    KnowledgeBase,
    NegatedRoleAssertion,
)
from reasoner.consist import consistent
from reasoner.semantics import cq_match, satisfies
from reasoner.transforms import k_loosening, repair_ercbox, s_duplicate, type_counts
from syntax.normalize import normalize_kb, normalize_query
from syntax.render import render_assertion, render_concept

logger = logging.getLogger(__name__)

SpoilerAxiom = Union[ConceptInclusion, ConceptAssertion, NegatedRoleAssertion]

FRESH_INDIVIDUAL = "_anon"


class EntailmentVerdict(str, Enum):
    """Outcome of an entailment check."""
    ENTAILED = "ENTAILED"
    NOT_ENTAILED = "NOT_ENTAILED"
    RESOURCE = "RESOURCE"


@dataclass
class EntailmentResult:
    """
    Entailment verdict with its evidence.

    Attributes:
        verdict: ENTAILED or NOT_ENTAILED
        model: countermodel without a match of the query when NOT_ENTAILED
        spoiler: the super-spoiler whose addition stayed consistent
        checked: number of super-spoilers decided
    """

    verdict: EntailmentVerdict
    model: Optional[Interpretation] = None
    spoiler: Tuple[SpoilerAxiom, ...] = ()
    checked: int = 0


@dataclass(frozen=True)
class Splitting:
    """
    Partition of the query variables into ABox roots, free trees and attached subtrees.

    Attributes:
        roots: variables mapped to individuals
        trees: components of the free part, each as (variables, root)
        subtrees: attached components as (variables, root, parent in roots)
        naming: root variable -> individual
    """

    roots: Tuple[str, ...]
    trees: Tuple[Tuple[Tuple[str, ...], str], ...]
    subtrees: Tuple[Tuple[Tuple[str, ...], str, str], ...]
    naming: Tuple[Tuple[str, str], ...] = field(default=())

    @property
    def individual_of(self) -> Dict[str, str]:
        return dict(self.naming)


# ---------------------------------------------------------------- query graphs


def query_graph(query: ConjunctiveQuery, variables: Optional[Sequence[str]] = None) -> nx.DiGraph:
    """Directed graph of the query; nodes carry concept labels, edges the role set."""
    graph = nx.DiGraph()
    keep = set(query.variables if variables is None else variables)
    for v in sorted(keep):
        labels = sorted(render_concept(a.concept) for a in query.concept_atoms if a.variable == v)
        graph.add_node(v, label="&".join(labels))
    for atom in query.role_atoms:
        if atom.source in keep and atom.target in keep:
            if graph.has_edge(atom.source, atom.target):
                graph.edges[atom.source, atom.target]["roles"].add(atom.role)
            else:
                graph.add_edge(atom.source, atom.target, roles={atom.role})
    for _, _, data in graph.edges(data=True):
        data["label"] = "&".join(sorted(data["roles"]))
    return graph


def is_tree_shaped(query: ConjunctiveQuery, variables: Optional[Sequence[str]] = None) -> bool:
    graph = query_graph(query, variables)
    return graph.number_of_nodes() > 0 and nx.is_arborescence(graph)


def tree_root(query: ConjunctiveQuery, variables: Sequence[str]) -> str:
    graph = query_graph(query, variables)
    return next(v for v, degree in graph.in_degree() if degree == 0)


def equivalent(first: ConjunctiveQuery, second: ConjunctiveQuery) -> bool:
    """Equal up to variable renaming."""
    return nx.is_isomorphic(
        query_graph(first),
        query_graph(second),
        node_match=categorical_node_match("label", ""),
        edge_match=categorical_edge_match("label", ""),
    )


def _fingerprint(query: ConjunctiveQuery) -> str:
    return nx.weisfeiler_lehman_graph_hash(query_graph(query), node_attr="label", edge_attr="label")


# ---------------------------------------------------------------- fork rewriting


def fork_eliminations(query: ConjunctiveQuery) -> List[Tuple[ConjunctiveQuery, Tuple[str, str]]]:
    """Every query obtained by identifying two variables with an edge into the same variable."""
    found: List[Tuple[ConjunctiveQuery, Tuple[str, str]]] = []
    seen = set()
    for first, second in itertools.combinations(query.role_atoms, 2):
        if first.target != second.target or first.source == second.source:
            continue
        keep, drop = sorted((first.source, second.source))
        if (keep, drop) in seen:
            continue
        seen.add((keep, drop))
        found.append((query.rename({drop: keep}), (keep, drop)))
    return found


def fork_rewritings(query: ConjunctiveQuery, cap: int = 2000) -> List[ConjunctiveQuery]:
    """The query and everything fork elimination reaches from it, one per renaming class."""
    classes: Dict[str, List[ConjunctiveQuery]] = {}
    result: List[ConjunctiveQuery] = []
    queue = [query]

    def admit(candidate: ConjunctiveQuery) -> bool:
        bucket = classes.setdefault(_fingerprint(candidate), [])
        if any(equivalent(candidate, other) for other in bucket):
            return False
        bucket.append(candidate)
        result.append(candidate)
        if len(result) > cap:
            raise ResourceExceeded(f"more than {cap} fork rewritings", cap="max_rewritings")
        return True

    admit(query)
    while queue:
        current = queue.pop(0)
        for rewritten, _ in fork_eliminations(current):
            if admit(rewritten):
                queue.append(rewritten)
    return result


def maximal_fork_rewriting(query: ConjunctiveQuery, rng: Optional[random.Random] = None) -> ConjunctiveQuery:
    """Apply fork elimination until none applies; rng picks among the options."""
    current = query
    while True:
        options = fork_eliminations(current)
        if not options:
            return current
        current = (rng.choice(options) if rng is not None else options[0])[0]


# ---------------------------------------------------------------- splittings


def splittings(query: ConjunctiveQuery, individuals: Sequence[str]) -> Iterator[Splitting]:
    """
    All splittings of the query over the given individuals.

    Every atom from a root into an attached subtree must enter the subtree's
    root from one and the same root variable.
    """
    variables = query.variables
    for size in range(len(variables) + 1):
        for roots in itertools.combinations(variables, size):
            shape = _shape(query, roots)
            if shape is None:
                continue
            trees, subtrees = shape
            if roots and not individuals:
                continue
            for names in itertools.product(individuals, repeat=len(roots)):
                yield Splitting(roots, trees, subtrees, tuple(zip(roots, names)))


def _shape(query: ConjunctiveQuery, roots: Tuple[str, ...]):
    root_set = set(roots)
    rest = [v for v in query.variables if v not in root_set]
    graph = query_graph(query, rest)
    trees, subtrees = [], []
    for component in sorted((sorted(c) for c in nx.weakly_connected_components(graph)), key=lambda c: c[0]):
        members = set(component)
        if not nx.is_arborescence(graph.subgraph(component)):
            return None
        root = tree_root(query, component)
        incoming = [a for a in query.role_atoms if a.source in root_set and a.target in members]
        outgoing = [a for a in query.role_atoms if a.source in members and a.target in root_set]
        if outgoing:
            return None
        if not incoming:
            trees.append((tuple(component), root))
            continue
        parents = {a.source for a in incoming}
        if any(a.target != root for a in incoming) or len(parents) != 1:
            return None
        subtrees.append((tuple(component), root, parents.pop()))
    return tuple(trees), tuple(subtrees)


# ---------------------------------------------------------------- rolling up


def roll_up(query: ConjunctiveQuery, root: str, variables: Optional[Sequence[str]] = None) -> Concept:
    """Concept whose instances are exactly the images of root under matches of a tree-shaped query."""
    part = query if variables is None else query.restrict(variables)
    graph = query_graph(query, variables)
    if root not in graph or not nx.is_arborescence(graph):
        raise ValueError("roll_up needs a tree-shaped query")

    def concept_at(v: str) -> Concept:
        parts = [a.concept for a in part.concept_atoms if a.variable == v]
        for child in sorted(graph.successors(v)):
            parts.append(_exists(graph.edges[v, child]["roles"], concept_at(child)))
        return conjoin(*parts)

    return concept_at(root)


def _exists(roles, filler: Concept) -> Concept:
    terms = [RoleVar(r) for r in sorted(roles)]
    if not is_top(filler):
        terms.append(ConceptVar(filler))
    return Succ(at_least(Card(inter_all(terms)), IntConst(1)))


# ---------------------------------------------------------------- spoilers


def spoiler_clause(query: ConjunctiveQuery, splitting: Splitting) -> Tuple[SpoilerAxiom, ...]:
    """Axioms any one of which rules out matches of the query shaped like the splitting."""
    placed = splitting.individual_of
    clause: List[SpoilerAxiom] = []
    for variables, root in splitting.trees:
        clause.append(ConceptInclusion(top(), negate(roll_up(query, root, variables))))
    for atom in query.concept_atoms:
        if atom.variable in placed:
            clause.append(ConceptAssertion(negate(atom.concept), placed[atom.variable]))
    for atom in query.role_atoms:
        if atom.source in placed and atom.target in placed:
            clause.append(NegatedRoleAssertion(atom.role, placed[atom.source], placed[atom.target]))
    for variables, root, parent in splitting.subtrees:
        roles = {a.role for a in query.role_atoms if a.source == parent and a.target == root}
        attached = _exists(roles, roll_up(query, root, variables))
        clause.append(ConceptAssertion(negate(attached), placed[parent]))
    return tuple(dict.fromkeys(clause))


def _axiom_key(axiom: SpoilerAxiom) -> str:
    if isinstance(axiom, ConceptInclusion):
        return f"T {render_concept(axiom.sub)} <= {render_concept(axiom.sup)}"
    return f"A {render_assertion(axiom)}"


def minimal_hitting_sets(clauses: Sequence[Sequence[SpoilerAxiom]], cap: int = 5000) -> List[Tuple[SpoilerAxiom, ...]]:
    """Minimal sets meeting every clause, built one clause at a time."""
    clauses = sorted({tuple(sorted(set(c), key=_axiom_key)) for c in clauses}, key=lambda c: (len(c), [_axiom_key(a) for a in c]))
    hitting: List[frozenset] = [frozenset()]
    for clause in clauses:
        grown = set()
        for current in hitting:
            if current.intersection(clause):
                grown.add(current)
            else:
                grown.update(current | {axiom} for axiom in clause)
        minimal = sorted(grown, key=len)
        hitting = []
        for candidate in minimal:
            if not any(kept <= candidate for kept in hitting):
                hitting.append(candidate)
        if len(hitting) > cap:
            raise ResourceExceeded(f"more than {cap} super-spoilers", cap="max_spoilers")
        if not hitting:
            break
    ordered = [tuple(sorted(h, key=_axiom_key)) for h in hitting]
    return sorted(ordered, key=lambda h: (len(h), [_axiom_key(a) for a in h]))


def spoiler_clauses(query: ConjunctiveQuery, individuals: Sequence[str], config: Optional[SolverConfig] = None):
    """One clause per pair of fork rewriting and splitting."""
    config = config or SolverConfig()
    for rewriting in fork_rewritings(query, config.max_rewritings):
        for splitting in splittings(rewriting, individuals):
            yield spoiler_clause(rewriting, splitting)


def super_spoilers(
    query: ConjunctiveQuery,
    individuals: Sequence[str],
    config: Optional[SolverConfig] = None,
) -> List[Tuple[SpoilerAxiom, ...]]:
    """Minimal axiom sets spoiling every splitting of every fork rewriting."""
    config = config or SolverConfig()
    clauses = list(spoiler_clauses(query, individuals, config))
    spoilers = minimal_hitting_sets(clauses, config.max_spoilers)
    logger.info(f"{len(clauses)} spoiler clauses, {len(spoilers)} super-spoilers")
    return spoilers


def with_spoiler(kb: KnowledgeBase, spoiler: Sequence[SpoilerAxiom]) -> KnowledgeBase:
    abox = [a for a in spoiler if not isinstance(a, ConceptInclusion)]
    tbox = [a for a in spoiler if isinstance(a, ConceptInclusion)]
    return kb.with_axioms(abox=abox, tbox=tbox)


# ---------------------------------------------------------------- entailment


def harden(model: Interpretation, kb: KnowledgeBase, query: ConjunctiveQuery, config: SolverConfig) -> Interpretation:
    """Turn a model of a spoiled KB into one without any match of the query."""
    if cq_match(model, query) is None:
        return model
    k = query.size + 1
    logger.info(f"Countermodel still matches the query; loosening with k={k}")
    loose = k_loosening(model, k, cap=config.max_model_size)
    plan = repair_ercbox(loose, kb.ercbox, type_counts(model))
    repaired = s_duplicate(loose, plan)
    if repaired.size > config.max_model_size:
        raise ResourceExceeded(f"repaired model exceeds {config.max_model_size} elements", cap="max_model_size")
    report = satisfies(repaired, kb)
    if not report.satisfied:
        raise ModelError(f"hardened model fails its audit: {report.violations[0]}")
    if cq_match(repaired, query) is not None:
        raise ModelError("hardened model still matches the query")
    return repaired


def _decide(kb: KnowledgeBase, query: ConjunctiveQuery, spoiler, config: SolverConfig) -> Optional[Interpretation]:
    spoiled = normalize_kb(with_spoiler(kb, spoiler)).kb
    result = consistent(spoiled, config)
    if not result.consistent:
        return None
    return harden(result.model, spoiled, query, config)


def entails(kb: KnowledgeBase, query: ConjunctiveQuery, config: Optional[SolverConfig] = None) -> EntailmentResult:
    """Decide whether every model of the KB has a match of the query."""
    config = config or SolverConfig()
    if kb.ecbox is not None:
        raise DialectError("query entailment covers knowledge bases without an ECBox")
    if not query.variables:
        return EntailmentResult(EntailmentVerdict.ENTAILED)
    normalized_query, kb = normalize_query(query, kb)
    if not kb.abox:
        fresh = FRESH_INDIVIDUAL
        while fresh in kb.individuals():
            fresh = f"_{fresh}"
        kb = kb.with_axioms(abox=[ConceptAssertion(top(), fresh)])
    kb = normalize_kb(kb).kb
    spoilers = super_spoilers(normalized_query, kb.individuals(), config)

    checked = 0
    for start in range(0, len(spoilers), max(1, config.jobs)):
        batch = spoilers[start:start + max(1, config.jobs)]
        if config.jobs > 1:
            with ThreadPoolExecutor(max_workers=config.jobs) as pool:
                models = list(pool.map(lambda s: _decide(kb, normalized_query, s, config), batch))
        else:
            models = [_decide(kb, normalized_query, batch[0], config)]
        for spoiler, model in zip(batch, models):
            checked += 1
            if model is not None:
                logger.info(f"Not entailed: spoiler {checked} of {len(spoilers)} is consistent")
                return EntailmentResult(EntailmentVerdict.NOT_ENTAILED, model, spoiler, checked)
    logger.info(f"Entailed: all {len(spoilers)} super-spoilers are inconsistent")
    return EntailmentResult(EntailmentVerdict.ENTAILED, checked=checked)
