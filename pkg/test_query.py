"""
Tests for conjunctive query rewriting, splittings, spoilers and entailment.
"""

import random

import pytest

from models.concepts import ConceptName, negate, top
from models.config import SolverConfig
from models.errors import DialectError, ResourceExceeded
from models.interpretation import Interpretation
from models.knowledge_base import ConceptAssertion, ConceptInclusion, ConjunctiveQuery, NegatedRoleAssertion
from reasoner.query import (
    EntailmentVerdict,
    entails,
    equivalent,
    fork_eliminations,
    fork_rewritings,
    harden,
    is_tree_shaped,
    maximal_fork_rewriting,
    minimal_hitting_sets,
    roll_up,
    spoiler_clause,
    splittings,
    super_spoilers,
)
from reasoner.oracle import enumerate_models
from reasoner.semantics import cq_match, eval_scc, satisfies
from syntax.parser import parse_concept, parse_kb, parse_query


def test_fork_elimination_merges_sources():
    query = parse_query("r(x, y), r(t, y), B(y)")
    eliminations = fork_eliminations(query)
    assert len(eliminations) == 1
    merged, pair = eliminations[0]
    assert pair == ("t", "x")
    assert merged.variables == ("t", "y")
    assert merged.size == 2


def test_fork_rewritings_include_the_query():
    query = parse_query("r(x, z), s(y, z)")
    rewritings = fork_rewritings(query)
    assert len(rewritings) == 2
    assert equivalent(rewritings[0], query)


def test_maximal_fork_rewriting_has_no_forks():
    query = parse_query("r(x, z), r(y, z), r(z, w), r(v, w)")
    result = maximal_fork_rewriting(query)
    assert fork_eliminations(result) == []
    assert len(result.variables) == 3


def test_rewriting_cap():
    query = parse_query("r(a1, z), r(a2, z), r(a3, z), r(a4, z)")
    with pytest.raises(ResourceExceeded) as info:
        fork_rewritings(query, cap=2)
    assert info.value.cap == "max_rewritings"


def test_equivalence_up_to_renaming():
    assert equivalent(parse_query("r(x, y), B(y)"), parse_query("r(u, v), B(v)"))
    assert not equivalent(parse_query("r(x, y), B(y)"), parse_query("r(u, v), B(u)"))


def test_tree_shape():
    assert is_tree_shaped(parse_query("r(x, y), s(x, z)"))
    assert not is_tree_shaped(parse_query("r(x, y), r(y, x)"))
    assert not is_tree_shaped(parse_query("r(x, z), r(y, z)"))


def test_splittings_over_one_individual():
    query = parse_query("r(x, y), B(y)")
    found = list(splittings(query, ["a"]))
    assert sorted(s.roots for s in found) == [(), ("x",), ("x", "y")]
    attached = next(s for s in found if s.roots == ("x",))
    assert attached.subtrees == ((("y",), "y", "x"),)
    assert attached.individual_of == {"x": "a"}
    assert [s.roots for s in splittings(query, [])] == [()]


def test_roll_up_matches_successor_concept():
    query = parse_query("r(x, y), B(y)")
    assert roll_up(query, "x") == parse_concept("succ(card(r inter B) >= 1)")


def test_roll_up_agrees_with_matching():
    query = parse_query("r(x, y), s(x, z), B(z)")
    interp = Interpretation.build(
        domain=range(4),
        concepts={"B": [2, 3]},
        roles={"r": [(0, 1), (1, 1)], "s": [(0, 2), (1, 0)]},
    )
    assert eval_scc(interp, roll_up(query, "x")) == frozenset({0})
    assert cq_match(interp, query) == {"x": 0, "y": 1, "z": 2}


def test_spoiler_clause_for_full_placement():
    query = parse_query("r(x, y), B(y)")
    placement = next(s for s in splittings(query, ["a"]) if s.roots == ("x", "y"))
    clause = spoiler_clause(query, placement)
    assert ConceptAssertion(negate(ConceptName("B")), "a") in clause
    assert NegatedRoleAssertion("r", "a", "a") in clause


def test_minimal_hitting_sets():
    a, b, c = (ConceptAssertion(ConceptName(n), "i") for n in "ABC")
    hitting = minimal_hitting_sets([[a], [b, c], [a, b]])
    assert sorted(sorted(x.concept.name for x in h) for h in hitting) == [["A", "B"], ["A", "C"]]
    with pytest.raises(ResourceExceeded):
        d = ConceptAssertion(ConceptName("D"), "i")
        minimal_hitting_sets([[a, b], [c, d]], cap=3)


def test_super_spoilers_of_concept_query():
    spoilers = super_spoilers(parse_query("B(x)"), ["a"])
    assert len(spoilers) == 1
    assert ConceptInclusion(top(), negate(ConceptName("B"))) in spoilers[0]
    assert ConceptAssertion(negate(ConceptName("B")), "a") in spoilers[0]


@pytest.mark.slow
def test_existential_tbox_entails_query():
    kb = parse_kb("abox: A(a)\ntbox: top <= succ(card(r inter B) >= 1)")
    result = entails(kb, parse_query("r(x, y), B(y)"))
    assert result.verdict == EntailmentVerdict.ENTAILED
    assert result.model is None
    assert result.checked >= 1


@pytest.mark.slow
def test_unconstrained_concept_is_not_entailed():
    kb = parse_kb("abox: A(a)")
    query = parse_query("B(x)")
    result = entails(kb, query)
    assert result.verdict == EntailmentVerdict.NOT_ENTAILED
    assert cq_match(result.model, query) is None
    assert satisfies(result.model, kb).satisfied


@pytest.mark.slow
def test_parallel_checks_agree():
    kb = parse_kb("abox: A(a)\ntbox: top <= succ(card(r inter B) >= 1)")
    result = entails(kb, parse_query("r(x, y), B(y)"), SolverConfig(jobs=2))
    assert result.verdict == EntailmentVerdict.ENTAILED


def test_empty_query_is_entailed():
    assert entails(parse_kb("abox: A(a)"), ConjunctiveQuery()).verdict == EntailmentVerdict.ENTAILED


def test_ecbox_is_rejected():
    with pytest.raises(DialectError):
        entails(parse_kb("abox: A(a)\nec: card(A) >= 1"), parse_query("A(x)"))


def test_harden_breaks_anonymous_cycles():
    kb = parse_kb("abox: A(a)\ntbox: A <= succ(card(r inter A) >= 1)")
    model = Interpretation.build(
        domain=range(2),
        concepts={"A": [0, 1]},
        roles={"r": [(0, 1), (1, 1)]},
        individuals={"a": 0},
    )
    query = parse_query("r(x, x)")
    assert satisfies(model, kb).satisfied
    assert cq_match(model, query) is not None
    hardened = harden(model, kb, query, SolverConfig())
    assert cq_match(hardened, query) is None
    assert satisfies(hardened, kb).satisfied


def test_roll_up_of_atomless_variables():
    query = parse_query("r(x, y)")
    assert roll_up(query, "x") == parse_concept("succ(card(r) >= 1)")
    assert roll_up(query, "y", ["y"]) == top()
    with pytest.raises(ValueError):
        roll_up(parse_query("r(x, y), r(y, x)"), "x")


@pytest.mark.parametrize("text", ["r(x, y)", "r(x, y), r(y, z)", "r(x, y), r(z, y)"])
def test_spoilers_of_queries_without_concept_atoms(text):
    spoilers = super_spoilers(parse_query(text), ["a"])
    assert spoilers
    assert all(spoilers)


@pytest.mark.slow
@pytest.mark.parametrize("text", ["r(x, y)", "r(x, y), r(y, z)", "r(x, y), r(z, y)"])
def test_queries_without_concept_atoms_are_not_entailed(text):
    kb = parse_kb("abox: A(a)")
    query = parse_query(text)
    result = entails(kb, query)
    assert result.verdict == EntailmentVerdict.NOT_ENTAILED
    assert cq_match(result.model, query) is None
    assert satisfies(result.model, kb).satisfied


def _random_query(rng: random.Random) -> ConjunctiveQuery:
    variables = "xyzw"
    atoms = [
        f"{rng.choice('rs')}({rng.choice(variables)}, {rng.choice(variables)})"
        for _ in range(rng.randint(2, 5))
    ]
    if rng.random() < 0.5:
        atoms.append(f"{rng.choice('AB')}({rng.choice(variables)})")
    return parse_query(", ".join(atoms))


@pytest.mark.parametrize("seed", range(30))
def test_fork_rewriting_is_confluent(seed):
    query = _random_query(random.Random(seed))
    results = [maximal_fork_rewriting(query, random.Random(order)) for order in range(4)]
    assert fork_eliminations(results[0]) == []
    assert all(equivalent(results[0], other) for other in results[1:])
    assert any(equivalent(results[0], r) for r in fork_rewritings(query))


TBOX_PARTS = [
    "A <= succ(card(r inter B) >= 1)",
    "B <= A",
    "top <= succ(card(r) <= 1)",
    "A <= not B",
    "B <= succ(card(r inter A) = 0)",
]
ABOX_PARTS = ["B(a)", "r(a, a)", "not B(a)", "not r(a, a)"]
QUERIES = [
    "r(x, y)",
    "r(x, y), B(y)",
    "A(x), r(x, y), r(y, z)",
    "r(x, y), r(z, y)",
    "B(x)",
    "r(x, x)",
    "A(x), B(x)",
]


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_entailment_agrees_with_small_models(seed):
    rng = random.Random(seed)
    abox = ["A(a)"] + rng.sample(ABOX_PARTS, rng.randint(0, 1))
    tbox = rng.sample(TBOX_PARTS, rng.randint(1, 2))
    kb = parse_kb(f"abox: {'; '.join(abox)}\ntbox: {'; '.join(tbox)}\n")
    query = parse_query(rng.choice(QUERIES))
    result = entails(kb, query)
    if result.verdict == EntailmentVerdict.ENTAILED:
        assert all(cq_match(model, query) is not None for model in enumerate_models(kb, 2))
    else:
        assert cq_match(result.model, query) is None
        assert satisfies(result.model, kb).satisfied
