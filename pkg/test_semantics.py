"""
Tests for model-theoretic evaluation, KB checking, query matching and model documents.
"""

import pytest

from models.errors import DialectError, ModelError
from models.interpretation import Interpretation, ModelDocument
from reasoner.oracle import enumerate_models, find_model
from reasoner.semantics import ars, cq_match, eval_concept, eval_pp, eval_scc, satisfies
from syntax.parser import parse_concept, parse_kb, parse_query


def test_global_example_has_no_instance(four_a_elements, concept_e_text):
    assert eval_pp(four_a_elements, parse_concept(concept_e_text)) == frozenset()


def test_local_example_holds_everywhere(four_a_elements, concept_e_local_text):
    assert eval_scc(four_a_elements, parse_concept(concept_e_local_text)) == frozenset(range(4))


def test_global_constraint_reads_roles_at_the_element():
    interp = Interpretation.build(
        domain=range(3),
        concepts={"A": [1, 2]},
        roles={"r": [(0, 1), (0, 2)]},
    )
    assert eval_pp(interp, parse_concept("sat(A <= r)")) == frozenset({0})
    assert eval_pp(interp, parse_concept("sat(card(A) = 2)")) == frozenset(range(3))


def test_successor_constraint_counts_successors_only():
    interp = Interpretation.build(
        domain=range(4),
        concepts={"B": [1, 3]},
        roles={"r": [(0, 1), (0, 2)], "s": [(3, 3)]},
    )
    assert ars(interp, 0) == frozenset({1, 2})
    assert eval_scc(interp, parse_concept("succ(card(B) = 1)")) == frozenset({0, 3})
    assert eval_scc(interp, parse_concept("succ(card(univ) >= 2)")) == frozenset({0})


def test_dialects_are_enforced(four_a_elements, concept_e_text, concept_e_local_text):
    with pytest.raises(DialectError):
        eval_scc(four_a_elements, parse_concept(concept_e_text))
    with pytest.raises(DialectError):
        eval_pp(four_a_elements, parse_concept(concept_e_local_text))
    mixed = parse_concept("sat(card(A) >= 4) and succ(card(r) = 0)")
    assert eval_concept(four_a_elements, mixed) == frozenset(range(4))


def test_satisfies_reports_violations():
    kb = parse_kb("abox: A(a); r(a, b)\ntbox: A <= B\nerc: card(B) + 1 <= card(C)")
    good = Interpretation.build(
        domain=range(3),
        concepts={"A": [0], "B": [0], "C": [1, 2]},
        roles={"r": [(0, 1)]},
        individuals={"a": 0, "b": 1},
    )
    assert satisfies(good, kb).satisfied
    bad = Interpretation.build(
        domain=range(2),
        concepts={"A": [0]},
        roles={"r": []},
        individuals={"a": 0, "b": 1},
    )
    violations = satisfies(bad, kb).violations
    assert any(v.startswith("assertion r(a, b)") for v in violations)
    assert any(v.startswith("inclusion") for v in violations)
    assert "ERCBox fails" in violations


def test_satisfies_ecbox_and_goal(four_a_elements):
    assert satisfies(four_a_elements, parse_kb("ec: card(A) >= 4\ngoal: A")).satisfied
    assert not satisfies(four_a_elements, parse_kb("ec: div(3, card(A))")).satisfied
    assert not satisfies(four_a_elements, parse_kb("goal: B")).satisfied


def test_cq_match():
    interp = Interpretation.build(
        domain=range(3),
        concepts={"B": [2]},
        roles={"r": [(0, 1), (1, 2)]},
    )
    match = cq_match(interp, parse_query("r(x, y), r(y, z), B(z)"))
    assert match == {"x": 0, "y": 1, "z": 2}
    assert cq_match(interp, parse_query("r(x, y), B(y), r(y, z)")) is None
    assert cq_match(interp, parse_query("r(x, x)")) is None


def test_model_document_round_trip(four_a_elements):
    interp = Interpretation.build(
        domain=range(2),
        concepts={"A": [0]},
        roles={"r": [(0, 1)]},
        individuals={"a": 0},
        labels={0: "root", 1: "leaf"},
    )
    document = ModelDocument.from_interpretation(interp)
    assert document.roles == {"r": [["root", "leaf"]]}
    back = ModelDocument.model_validate_json(document.to_json()).to_interpretation()
    assert back.individuals == {"a": 0}
    assert back.successors(back.element("root"), "r") == frozenset({back.element("leaf")})


def test_model_document_rejects_unknown_labels():
    document = ModelDocument(domain=["x"], concepts={"A": ["y"]})
    with pytest.raises(ModelError):
        document.to_interpretation()


def test_interpretation_validation():
    with pytest.raises(ValueError):
        Interpretation.build(domain=[])
    with pytest.raises(ValueError):
        Interpretation.build(domain=[0], roles={"r": [(0, 1)]})


def test_enumerate_models_of_small_kb():
    models = list(enumerate_models(parse_kb("abox: A(a)"), 1))
    assert len(models) == 1
    assert models[0].individuals == {"a": 0}


def test_enumerate_models_respects_erc():
    kb = parse_kb("abox: A(a)\nerc: card(A) + 1 <= card(B)")
    models = list(enumerate_models(kb, 2))
    assert models
    assert all(len(m.extension("B")) > len(m.extension("A")) for m in models)
    assert not list(enumerate_models(parse_kb("abox: A(a)\nerc: card(A) + 1 <= card(A)"), 2))


def test_symbolic_oracle_agrees_with_enumeration():
    kb = parse_kb("abox: A(a)\ntbox: A <= succ(card(r inter B) >= 1)")
    model = find_model(kb, 2)
    assert model is not None
    assert satisfies(model, kb).satisfied
    assert find_model(parse_kb("abox: A(a); not A(a)"), 2) is None
