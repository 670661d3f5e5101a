"""
Shared fixtures for the carddl test suite.
"""

import json
import random

import pytest

from models.interpretation import Interpretation

# |A| >= 4, every A is an r-successor, at most three r-successors: unsatisfiable.
CONCEPT_E = "sat(card(A) >= 4) and sat(A <= r) and sat(card(r) <= 3)"
# The same requirements read locally, over role successors only.
CONCEPT_E_LOCAL = "succ(A <= r) and succ(card(r) <= 3)"


@pytest.fixture
def concept_e_text() -> str:
    return CONCEPT_E


@pytest.fixture
def concept_e_local_text() -> str:
    return CONCEPT_E_LOCAL


@pytest.fixture
def four_a_elements() -> Interpretation:
    """Four A-elements, no role edges."""
    return Interpretation.build(domain=range(4), concepts={"A": range(4)}, roles={"r": []})


@pytest.fixture
def self_loop() -> Interpretation:
    return Interpretation.build(domain=[0], concepts={"A": [0]}, roles={"r": [(0, 0)]})


@pytest.fixture
def write_file(tmp_path):
    """Write text to a file under tmp_path and return its path as a string."""
    def write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


def random_interpretation(seed: int, size: int = 3, concepts=("A", "B"), roles=("r",)) -> Interpretation:
    rng = random.Random(seed)
    domain = list(range(size))
    return Interpretation.build(
        domain=domain,
        concepts={c: [d for d in domain if rng.random() < 0.5] for c in concepts},
        roles={r: [(d, e) for d in domain for e in domain if rng.random() < 0.4] for r in roles},
    )


def last_json_line(output: str) -> dict:
    """The command's JSON response: the last output line that parses and has a command key."""
    for line in reversed(output.strip().splitlines()):
        try:
            payload = json.loads(line)
        except ValueError:
            continue
        if isinstance(payload, dict) and "command" in payload:
            return payload
    raise AssertionError(f"no JSON response in output: {output!r}")
