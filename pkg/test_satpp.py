"""
Tests for ALCSCC++ concept satisfiability.
"""

import random

import pytest

from models.concepts import Constr, Not, SetEq, conjoin
from models.config import SolverConfig
from models.errors import DialectError, ResourceExceeded
from reasoner.oracle import concept_model
from reasoner.qfbapa import solve
from reasoner.satpp import SatVerdict, beta, delta, psi_t, sat, types_of, uniform_signs, with_nominal_individuals
from reasoner.semantics import eval_pp, satisfies
from syntax.closure import closure_me
from syntax.encodings import (
    encode_nominal,
    encode_role_conjunction,
    encode_role_cover,
    encode_role_negation,
    encode_universal_role,
    kb_to_concept,
    scc_to_pp,
)
from syntax.parser import parse_concept, parse_kb


def test_global_example_is_unsatisfiable(concept_e_text):
    result = sat(parse_concept(concept_e_text))
    assert result.verdict == SatVerdict.UNSAT
    assert result.model is None


def test_types_of_global_example(concept_e_text):
    concept = parse_concept(concept_e_text)
    types = types_of(concept)
    assert len(types) == 16
    assert len([t for t in types if concept in t]) == 2


def test_boolean_equations(concept_e_text):
    equations = beta(closure_me(parse_concept(concept_e_text)))
    complements = [e for e in equations if isinstance(e.left.key[1], Not)]
    assert len(equations) == 6
    assert len(complements) == 5
    assert all(isinstance(e, SetEq) for e in equations)


def test_translated_local_example_with_global_bound(concept_e_local_text):
    local = scc_to_pp(parse_concept(concept_e_local_text), ["r"])
    concept = conjoin(local, parse_concept("sat(card(A) >= 4)"))
    result = sat(concept)
    assert result.verdict == SatVerdict.SAT
    assert len(result.model.extension("A")) >= 4
    assert eval_pp(result.model, concept)


def test_model_for_counting_concept():
    concept = parse_concept("A and sat(card(r inter B) = 2) and sat(card(B) = 3)")
    result = sat(concept)
    assert result.verdict == SatVerdict.SAT
    model = result.model
    instance = min(eval_pp(model, concept))
    assert len(model.successors(instance, "r") & model.extension("B")) == 2
    assert len(model.extension("B")) == 3


def test_negated_global_constraint():
    concept = parse_concept("not sat(card(A) >= 1) and sat(card(univ) >= 2)")
    result = sat(concept)
    assert result.verdict == SatVerdict.SAT
    assert result.model.extension("A") == frozenset()
    assert result.model.size >= 2


def test_divisibility_and_cardinality_clash():
    assert sat(parse_concept("sat(div(2, card(A))) and sat(card(A) = 3)")).verdict == SatVerdict.UNSAT


@pytest.mark.parametrize("text", [
    "A and not A",
    "sat(card(A) = 1) and sat(card(B) = 1) and sat(A <= comp(B)) and sat(card(univ) = 1)",
    "sat(card(r) >= 1) and sat(card(univ) = 1) and sat(r <= empty)",
    "A and sat(A <= r) and not sat(card(r) >= 1)",
])
def test_unsatisfiable_concepts_agree_with_oracle(text):
    concept = parse_concept(text)
    assert sat(concept).verdict == SatVerdict.UNSAT
    assert concept_model(concept, 2) is None


@pytest.mark.parametrize("text", [
    "A or B",
    "sat(card(r inter A) >= 1) and not A",
    "sat(A = r) and sat(card(A) = 2)",
    "sat(card(A) + card(B) = 3) and sat(A <= comp(B))",
])
def test_satisfiable_concepts_agree_with_oracle(text):
    concept = parse_concept(text)
    result = sat(concept)
    assert result.verdict == SatVerdict.SAT
    assert eval_pp(result.model, concept)
    assert concept_model(concept, 3) is not None


def test_delta_has_one_role_variable_per_type(concept_e_text):
    formula, types = delta(parse_concept(concept_e_text))
    assert len(formula.scopes) == len(types)
    assert len(formula.global_variables) == 10


def test_successor_constraint_needs_translation(concept_e_local_text):
    with pytest.raises(DialectError):
        sat(parse_concept(concept_e_local_text))


def test_type_cap(concept_e_text):
    with pytest.raises(ResourceExceeded) as info:
        sat(parse_concept(concept_e_text), SolverConfig(max_types=4))
    assert info.value.cap == "max_types"


def test_kb_encoding_places_individuals():
    kb = parse_kb("abox: A(a); r(a, b); not B(b)\ntbox: A <= sat(card(r inter B) >= 1)")
    result = sat(kb_to_concept(kb))
    assert result.verdict == SatVerdict.SAT
    assert len(result.model.extension("_nom_a")) == 1
    assert isinstance(kb_to_concept(kb).operands[0], Constr)


def test_global_constraints_of_a_type(concept_e_text):
    concept = parse_concept(concept_e_text)
    t = next(t for t in types_of(concept) if concept in t)
    formula = psi_t(t, 0)
    assert len(formula.conjuncts) == 3
    assert formula.scopes == (0,)
    assert solve(formula) is None


def test_top_level_global_constraints_hold_everywhere(concept_e_text):
    concept = parse_concept(concept_e_text)
    signs = uniform_signs(concept)
    assert list(signs.values()) == [True]
    pinned = next(iter(signs))
    formula, types = delta(concept)
    assert len(types) == 8
    assert all(pinned in t for t in types)
    assert uniform_signs(parse_concept("A and not sat(card(B) >= 1)")) == {
        parse_concept("sat(card(B) >= 1)"): False
    }


def test_knowledge_base_with_several_assertions():
    kb = parse_kb(
        "abox: A(a); r(a, b); not B(b)\n"
        "tbox: A <= succ(card(r inter B) >= 1)\n"
        "erc: card(A) + 1 <= card(B) or card(B) <= card(A)\n"
        "goal: A and sat(card(A) >= 2)\n"
    )
    result = sat(kb_to_concept(kb))
    assert result.verdict == SatVerdict.SAT
    model = with_nominal_individuals(result.model, kb.individuals())
    assert satisfies(model, kb).satisfied
    assert len(model.extension("A")) >= 2


def test_universal_role_through_sat():
    result = sat(conjoin(encode_universal_role("u"), parse_concept("A and sat(card(univ) >= 2)")))
    assert result.verdict == SatVerdict.SAT
    model = result.model
    assert model.size >= 2
    assert model.role("u") == frozenset((d, e) for d in model.domain for e in model.domain)


def test_role_negation_through_sat():
    concept = conjoin(encode_role_negation("r", "rc"), parse_concept("sat(card(r) >= 1) and sat(card(univ) = 2)"))
    result = sat(concept)
    assert result.verdict == SatVerdict.SAT
    model = result.model
    assert model.size == 2
    for d in model.domain:
        for e in model.domain:
            assert ((d, e) in model.role("r")) != ((d, e) in model.role("rc"))


def test_role_conjunction_through_sat():
    concept = conjoin(encode_role_conjunction("t", "r", "s"), parse_concept("sat(card(r inter s) >= 1)"))
    result = sat(concept)
    assert result.verdict == SatVerdict.SAT
    model = result.model
    assert model.role("t") == model.role("r") & model.role("s")
    assert model.role("t")


def test_role_cover_through_sat():
    concept = conjoin(encode_role_cover("r", "s"), parse_concept("sat(card(univ) = 2) and sat(r <= empty)"))
    result = sat(concept)
    assert result.verdict == SatVerdict.SAT
    model = result.model
    everything = frozenset(model.domain)
    assert all(model.successors(d, "r") | model.successors(d, "s") == everything for d in model.domain)
    instance = min(eval_pp(model, concept))
    assert model.successors(instance, "r") == frozenset()
    assert model.successors(instance, "s") == everything


def test_nominal_through_sat():
    result = sat(conjoin(encode_nominal("N"), parse_concept("sat(card(univ) >= 3)")))
    assert result.verdict == SatVerdict.SAT
    assert len(result.model.extension("N")) == 1
    assert result.model.size >= 3


def test_negated_role_assertion_through_sat():
    kb = parse_kb("abox: A(a); r(a, b); not r(a, a)")
    result = sat(kb_to_concept(kb))
    assert result.verdict == SatVerdict.SAT
    model = with_nominal_individuals(result.model, kb.individuals())
    assert satisfies(model, kb).satisfied
    a = model.individuals["a"]
    assert (a, a) not in model.role("r")
    assert sat(kb_to_concept(parse_kb("abox: r(a, a); not r(a, a)"))).verdict == SatVerdict.UNSAT


CONCEPT_PARTS = [
    "A",
    "not A",
    "B",
    "sat(card(A) >= 2)",
    "sat(card(A) = 1)",
    "sat(A <= r)",
    "sat(card(r) <= 1)",
    "sat(card(r inter B) >= 1)",
    "not sat(card(B) >= 1)",
    "sat(card(univ) <= 2)",
    "sat(r <= comp(A))",
]


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(25))
def test_sat_agrees_with_bounded_search(seed):
    rng = random.Random(seed)
    concept = parse_concept(" and ".join(rng.sample(CONCEPT_PARTS, 3)))
    result = sat(concept)
    small = concept_model(concept, 3)
    if small is not None:
        assert result.verdict == SatVerdict.SAT
    if result.verdict == SatVerdict.SAT:
        assert eval_pp(result.model, concept)
    else:
        assert small is None
