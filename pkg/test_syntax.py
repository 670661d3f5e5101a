"""
Tests for parsing, printing, closures, normalisation and concept encodings.
"""

import pytest

from conftest import random_interpretation
from models.concepts import (
    Card,
    CardLt,
    CNot,
    ConceptName,
    ConceptVar,
    Constr,
    IntConst,
    RoleVar,
    SetSub,
    Succ,
    top,
)
from models.errors import ParseError, SignatureError
from models.interpretation import Interpretation
from models.knowledge_base import (
    ConceptAssertion,
    ErcAnd,
    NegatedRoleAssertion,
    RoleAssertion,
    RoleAtom,
    SemiRestrictedConstraint,
)
from reasoner.semantics import eval_pp, eval_scc
from syntax.closure import closure_me, positive_members, subdescriptions
from syntax.encodings import (
    ecbox_to_concept,
    encode_nominal,
    encode_role_conjunction,
    encode_role_cover,
    encode_role_negation,
    encode_universal_role,
    kb_to_concept,
    nominal_name,
    scc_to_pp,
)
from syntax.normalize import normalize_kb, normalize_query
from syntax.parser import parse_concept, parse_constraint, parse_kb, parse_query
from syntax.render import render_concept, render_kb


def test_parse_global_constraints(concept_e_text):
    concept = parse_concept(concept_e_text)
    first, second, third = concept.operands
    assert first == Constr(CNot(CardLt(Card(ConceptVar(ConceptName("A"))), IntConst(4))))
    assert second == Constr(SetSub(ConceptVar(ConceptName("A")), RoleVar("r")))
    assert third == Constr(CNot(CardLt(IntConst(3), Card(RoleVar("r")))))


def test_parse_local_constraints(concept_e_local_text):
    concept = parse_concept(concept_e_local_text)
    assert all(isinstance(op, Succ) for op in concept.operands)


def test_render_parses_back(concept_e_text, concept_e_local_text):
    for text in (concept_e_text, concept_e_local_text, "not (A or B) and succ(card(r inter {not A}) >= 2)"):
        concept = parse_concept(text)
        assert parse_concept(render_concept(concept)) == concept


def test_top_and_bottom():
    assert parse_concept("top") == top()
    assert render_concept(parse_concept("bottom")) == "bottom"


def test_parse_kb_sections():
    kb = parse_kb(
        """
        # a small KB
        roles: s
        tbox: A <= succ(card(r inter B) >= 1)
        abox: A(a); r(a, b); not r(b, a); not B(a)
        erc: card(A) + 1 <= card(B)
        """
    )
    assert kb.individuals() == ("a", "b")
    assert kb.role_names() == ("r", "s")
    assert RoleAssertion("r", "a", "b") in kb.abox
    assert NegatedRoleAssertion("r", "b", "a") in kb.abox
    assert ConceptAssertion(parse_concept("not B"), "a") in kb.abox
    assert kb.ercbox == SemiRestrictedConstraint(((1, ConceptName("A")),), 1, ((1, ConceptName("B")),))


def test_erc_comparisons():
    at_least_two = parse_kb("erc: card(A) >= 2").ercbox
    assert at_least_two == SemiRestrictedConstraint((), 2, ((1, ConceptName("A")),))
    equal = parse_kb("erc: 2 * card(A) = card(B)").ercbox
    assert isinstance(equal, ErcAnd)
    assert equal.operands[0].lhs == ((2, ConceptName("A")),)


def test_erc_negative_offset_is_rejected():
    with pytest.raises(ParseError):
        parse_kb("erc: card(A) <= 2")


def test_erc_must_be_positive():
    with pytest.raises(ParseError):
        parse_kb("erc: not card(A) <= card(B)")


@pytest.mark.parametrize(
    "text", ["card(A) - card(B) + 1 <= card(C)", "-2 * card(A) + 1 <= card(B)", "1 <= card(B) - card(A)"]
)
def test_erc_coefficients_are_natural(text):
    with pytest.raises(ParseError) as info:
        parse_kb(f"erc: {text}")
    assert "natural" in str(info.value)


def test_erc_scaled_terms():
    scaled = parse_kb("erc: 2 * card(A) + 1 <= 3 * card(B)").ercbox
    assert scaled == SemiRestrictedConstraint(((2, ConceptName("A")),), 1, ((3, ConceptName("B")),))


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_kb("abox: A(a)\ntbox: A <= ")
    assert info.value.line == 2


def test_nonpositive_divisor():
    with pytest.raises(ParseError):
        parse_constraint("div(0, card(A))")


def test_signature_clash():
    with pytest.raises(SignatureError):
        parse_kb("abox: A(A)")


def test_ecbox_rejects_roles():
    with pytest.raises(SignatureError):
        parse_kb("ec: card(r) >= 1")


def test_parse_query_with_head():
    query = parse_query("q :- r(x, y), B(y)")
    assert query.role_atoms == (RoleAtom("r", "x", "y"),)
    assert query.variables == ("x", "y")
    assert parse_query("r(x, y), B(y)") == query


def test_render_kb_parses_back():
    kb = parse_kb("tbox: A <= succ(card(r inter B) >= 1)\nabox: A(a); r(a, b)\nerc: card(A) + 1 <= card(B)")
    assert parse_kb(render_kb(kb)) == kb


def test_closure_of_unsatisfiable_example(concept_e_text):
    closure = closure_me(parse_concept(concept_e_text))
    assert len(closure) == 10
    assert len(positive_members(closure)) == 5


def test_subdescriptions_children_first(concept_e_text):
    concept = parse_concept(concept_e_text)
    found = subdescriptions(concept)
    assert found[-1] == concept
    assert found.index(ConceptName("A")) < found.index(concept.operands[0])


def test_normalize_kb_names_complex_assertions():
    kb = parse_kb("abox: (A and B)(a)\ntbox: A <= succ(card(r inter sat(card(B) >= 1)) >= 1)")
    result = normalize_kb(kb)
    assertion = result.kb.abox[0]
    assert isinstance(assertion.concept, ConceptName)
    assert assertion.concept.name not in ("A", "B", "a", "r")
    assert result.definitions[assertion.concept.name] == parse_concept("A and B")
    assert len(result.kb.tbox) > len(kb.tbox)


def test_normalize_kb_is_idempotent_on_normal_input():
    kb = parse_kb("abox: A(a)\ntbox: A <= B")
    assert normalize_kb(kb).kb == kb


def test_normalize_query_defines_complex_atoms():
    kb = parse_kb("abox: A(a)")
    query = parse_query("(A and B)(x)")
    normalized, extended = normalize_query(query, kb)
    name = normalized.concept_atoms[0].concept
    assert isinstance(name, ConceptName)
    assert len(extended.tbox) == 2


def test_nominal_encoding(four_a_elements):
    concept = encode_nominal("A")
    assert eval_pp(four_a_elements, concept) == frozenset()
    assert nominal_name("a") == "_nom_a"


@pytest.mark.parametrize("seed", range(8))
def test_local_to_global_translation_agrees(seed):
    interp = random_interpretation(seed, size=3, roles=("r", "s"))
    concept = parse_concept("succ(card(r inter A) >= 1) and not succ(comp(B) <= s) or succ(card(univ) = 2)")
    assert eval_scc(interp, concept) == eval_pp(interp, scc_to_pp(concept, ["r", "s"]))


def test_kb_to_concept_has_one_nominal_per_individual():
    kb = parse_kb("abox: A(a); r(a, b)")
    concept = kb_to_concept(kb)
    assert encode_nominal(nominal_name("a")) in concept.operands
    assert encode_nominal(nominal_name("b")) in concept.operands


def _two_elements(**roles) -> Interpretation:
    return Interpretation.build(domain=range(2), concepts={"A": [0, 1]}, roles=roles)


def test_universal_role_encoding():
    full = [(d, e) for d in range(2) for e in range(2)]
    concept = encode_universal_role("u")
    assert eval_pp(_two_elements(u=full), concept) == frozenset({0, 1})
    assert eval_pp(_two_elements(u=full[1:]), concept) == frozenset()


def test_role_negation_encoding():
    concept = encode_role_negation("r", "rc")
    assert eval_pp(_two_elements(r=[(0, 1)], rc=[(0, 0), (1, 0), (1, 1)]), concept) == frozenset({0, 1})
    assert eval_pp(_two_elements(r=[(0, 1)], rc=[(0, 0)]), concept) == frozenset()


def test_role_conjunction_and_cover_encodings():
    interp = _two_elements(t=[(0, 1)], r=[(0, 1), (1, 1)], s=[(0, 1), (0, 0), (1, 0)])
    assert eval_pp(interp, encode_role_conjunction("t", "r", "s")) == frozenset({0, 1})
    assert eval_pp(interp, encode_role_conjunction("t", "s", "s")) == frozenset()
    assert eval_pp(interp, encode_role_cover("r", "s")) == frozenset({0, 1})
    assert eval_pp(interp, encode_role_cover("r", "t")) == frozenset()


def test_ecbox_as_concept(four_a_elements):
    assert eval_pp(four_a_elements, ecbox_to_concept(parse_constraint("card(A) >= 2"))) == frozenset(range(4))
    assert eval_pp(four_a_elements, ecbox_to_concept(parse_constraint("card(A) = 3"))) == frozenset()
