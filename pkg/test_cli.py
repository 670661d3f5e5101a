"""
Tests for the command layer, configuration loading and the click entry point.
"""

import json

from click.testing import CliRunner

from api.commands import EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, EXIT_RESOURCE, run_command
from api.config import load_config
from conftest import CONCEPT_E, last_json_line
from main import cli
from models.config import RunConfig
from models.interpretation import ModelDocument

SELF_LOOP_MODEL = json.dumps({"domain": ["e0"], "concepts": {"A": ["e0"]}, "roles": {"r": [["e0", "e0"]]}})
EXISTENTIAL_KB = "abox: A(a)\ntbox: top <= succ(card(r inter B) >= 1)\n"


def test_sat_verdicts(write_file):
    code, payload = run_command("sat", kb_path=write_file("e.kb", f"goal: {CONCEPT_E}\n"), config=RunConfig())
    assert code == EXIT_NEGATIVE
    assert payload["verdict"] == "UNSAT"

    model_path = write_file("model.json", "")
    code, payload = run_command(
        "sat", kb_path=write_file("g.kb", "goal: A\nec: card(A) >= 2\n"), config=RunConfig(), model_path=model_path
    )
    assert code == EXIT_OK
    assert payload["verdict"] == "SAT"
    model = ModelDocument.model_validate_json(open(model_path, encoding="utf-8").read()).to_interpretation()
    assert len(model.extension("A")) >= 2


def test_sat_without_anything_to_decide(write_file):
    code, payload = run_command("sat", kb_path=write_file("empty.kb", "# nothing\n"), config=RunConfig())
    assert code == EXIT_ERROR
    assert payload["error"] == "InvalidInputError"


def test_sat_resource_limit(write_file):
    code, payload = run_command("sat", kb_path=write_file("e.kb", f"goal: {CONCEPT_E}\n"), config=RunConfig(max_types=4))
    assert code == EXIT_RESOURCE
    assert payload["verdict"] == "RESOURCE"
    assert payload["cap"] == "max_types"


def test_consistent_with_trace(write_file):
    kb_path = write_file("c.kb", "abox: A(a)\nerc: card(A) + 1 <= card(B)\n")
    code, payload = run_command("consistent", kb_path=kb_path, config=RunConfig(trace=True))
    assert code == EXIT_OK
    assert payload["verdict"] == "CONSISTENT"
    assert payload["individuals"] == 1
    assert all(set(event) == {"step", "detail"} for event in payload["trace"])

    code, payload = run_command("consistent", kb_path=write_file("bad.kb", "abox: A(a); not A(a)\n"), config=RunConfig())
    assert code == EXIT_NEGATIVE
    assert payload["verdict"] == "INCONSISTENT"
    assert "trace" not in payload


def test_consistent_model_passes_check(write_file):
    kb_path = write_file("c.kb", "abox: A(a)\ntbox: A <= succ(card(r inter B) >= 1)\n")
    model_path = write_file("model.json", "")
    code, _ = run_command("consistent", kb_path=kb_path, config=RunConfig(), model_path=model_path)
    assert code == EXIT_OK
    code, payload = run_command("check", model_path=model_path, kb_path=kb_path)
    assert code == EXIT_OK
    assert payload["verdict"] == "SATISFIED"


def test_check_reports_violations(write_file):
    model_path = write_file("loop.json", SELF_LOOP_MODEL)
    code, payload = run_command("check", model_path=model_path, kb_path=write_file("k.kb", "tbox: A <= B\n"))
    assert code == EXIT_NEGATIVE
    assert payload["verdict"] == "VIOLATED"
    assert payload["violations"]


def test_entails(write_file):
    kb_path = write_file("k.kb", EXISTENTIAL_KB)
    code, payload = run_command(
        "entails", kb_path=kb_path, query_path=write_file("q.cq", "q :- r(x, y), B(y)\n"), config=RunConfig()
    )
    assert code == EXIT_OK
    assert payload["verdict"] == "ENTAILED"

    code, payload = run_command(
        "entails", kb_path=write_file("a.kb", "abox: A(a)\n"), query_path=write_file("b.cq", "B(x)\n"), config=RunConfig()
    )
    assert code == EXIT_NEGATIVE
    assert payload["verdict"] == "NOT_ENTAILED"
    assert "top <= not B" in payload["spoiler"]


def test_entails_query_without_concept_atoms(write_file):
    code, payload = run_command(
        "entails", kb_path=write_file("a.kb", "abox: A(a)\n"), query_path=write_file("r.cq", "r(x, y)\n"), config=RunConfig()
    )
    assert code == EXIT_NEGATIVE
    assert payload["verdict"] == "NOT_ENTAILED"


def test_sat_of_knowledge_base_with_several_assertions(write_file):
    kb_path = write_file(
        "several.kb",
        "abox: A(a); r(a, b); not B(b)\n"
        "tbox: A <= succ(card(r inter B) >= 1)\n"
        "erc: card(A) + 1 <= card(B) or card(B) <= card(A)\n"
        "goal: A and sat(card(A) >= 2)\n",
    )
    code, payload = run_command("sat", kb_path=kb_path, config=RunConfig())
    assert code == EXIT_OK
    assert payload["verdict"] == "SAT"


def test_oracle(write_file):
    kb_path = write_file("a.kb", "abox: A(a)\n")
    code, payload = run_command("oracle", kb_path=kb_path, config=RunConfig(oracle_size=1))
    assert code == EXIT_OK
    assert payload["models"] == 1
    code, payload = run_command("oracle", kb_path=kb_path, config=RunConfig(oracle_size=2), symbolic=True)
    assert code == EXIT_OK
    assert payload["verdict"] == "MODEL"
    code, payload = run_command(
        "oracle", kb_path=write_file("bad.kb", "abox: A(a)\nerc: card(A) + 1 <= card(A)\n"), config=RunConfig(oracle_size=2)
    )
    assert code == EXIT_NEGATIVE
    assert payload == {"command": "oracle", "verdict": "NO_MODEL", "max_size": 2, "models": 0}


def test_lab_operations(write_file):
    model_path = write_file("loop.json", SELF_LOOP_MODEL)
    code, payload = run_command("lab", operation="girth", model_path=model_path, config=RunConfig())
    assert (code, payload["girth"]) == (EXIT_OK, "1")
    code, payload = run_command("lab", operation="unravel", model_path=model_path, config=RunConfig(), depth=3)
    assert payload["model_size"] == 3
    assert len(payload["model"]["domain"]) == 3
    code, payload = run_command("lab", operation="loosen", model_path=model_path, config=RunConfig(), k=2)
    assert payload["model_size"] == 4
    code, payload = run_command(
        "lab", operation="duplicate", model_path=model_path, config=RunConfig(), element="e0", copies=2
    )
    assert payload["model_size"] == 3
    code, payload = run_command("lab", operation="duplicate", model_path=model_path, config=RunConfig())
    assert code == EXIT_ERROR


def test_errors_map_to_exit_codes(write_file, tmp_path):
    assert run_command("prove")[0] == EXIT_ERROR
    code, payload = run_command("consistent", kb_path=str(tmp_path / "missing.kb"), config=RunConfig())
    assert code == EXIT_ERROR
    assert payload["error"] == "FileNotFoundError"
    code, payload = run_command("consistent", kb_path=write_file("broken.kb", "abox: A(a\n"), config=RunConfig())
    assert code == EXIT_ERROR
    assert payload["error"] == "ParseError"
    code, payload = run_command("check", model_path=write_file("m.json", "{}"), kb_path=write_file("k.kb", "tbox: A <= B\n"))
    assert code == EXIT_ERROR


def test_config_from_environment(monkeypatch):
    monkeypatch.setenv("CARDDL_JOBS", "3")
    monkeypatch.setenv("CARDDL_TRACE", "yes")
    config = load_config()
    assert config.jobs == 3
    assert config.trace
    assert load_config(jobs=2).jobs == 2
    assert load_config(jobs=None).jobs == 3


def test_invalid_environment_values_are_ignored(monkeypatch):
    monkeypatch.setenv("CARDDL_MAX_TYPES", "many")
    assert load_config().max_types == RunConfig().max_types


def test_config_reads_dotenv(monkeypatch, tmp_path):
    (tmp_path / ".env").write_text("CARDDL_ORACLE_SIZE=2\n", encoding="utf-8")
    monkeypatch.chdir(tmp_path)
    # registered so teardown removes the value the .env file sets
    monkeypatch.setenv("CARDDL_ORACLE_SIZE", "1")
    monkeypatch.delenv("CARDDL_ORACLE_SIZE")
    assert load_config().oracle_size == 2


def test_cli_prints_one_json_line(write_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["consistent", write_file("c.kb", "abox: A(a)\ntbox: A <= B\n")])
    assert result.exit_code == EXIT_OK
    payload = last_json_line(result.output)
    assert payload["command"] == "consistent"
    assert payload["verdict"] == "CONSISTENT"


def test_cli_flags_reach_the_solver(write_file):
    runner = CliRunner()
    result = runner.invoke(cli, ["--max-types", "4", "sat", write_file("e.kb", f"goal: {CONCEPT_E}\n")])
    assert result.exit_code == EXIT_RESOURCE
    assert last_json_line(result.output)["cap"] == "max_types"
    result = runner.invoke(cli, ["--jobs", "0", "sat", write_file("e.kb", f"goal: {CONCEPT_E}\n")])
    assert result.exit_code == EXIT_ERROR
    assert last_json_line(result.output)["error"] == "ValidationError"
