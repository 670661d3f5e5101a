"""
Command implementations behind the CLI.

Each command reads its inputs, runs one decision procedure and returns an
exit code with a response model. run_command maps errors onto exit codes:
ResourceExceeded gives 2, any other toolkit, I/O or validation error gives 3.
"""

import logging
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ValidationError

from api.schemas import (
    CheckResponse,
    ConsistencyResponse,
    EntailmentResponse,
    ErrorResponse,
    LabResponse,
    OracleResponse,
    SatResponse,
)
from models.config import RunConfig
from models.errors import CarddlError, InvalidInputError, ResourceExceeded
from models.interpretation import Interpretation, ModelDocument
from models.knowledge_base import ConceptInclusion
from reasoner.consist import consistent
from reasoner.oracle import enumerate_models, find_model
from reasoner.qfbapa import describe
from reasoner.query import EntailmentVerdict, entails
from reasoner.satpp import SatVerdict, sat, with_nominal_individuals
from reasoner.semantics import satisfies
from reasoner.transforms import girth, k_loosening, s_duplicate, unravel
from syntax.encodings import kb_to_concept
from syntax.parser import parse_kb, parse_query
from syntax.render import render_assertion, render_concept

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_RESOURCE = 2
EXIT_ERROR = 3

Outcome = Tuple[int, BaseModel]


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_model(model: Interpretation, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(ModelDocument.from_interpretation(model).to_json() + "\n", encoding="utf-8")
        logger.info(f"Model with {model.size} elements written to {path}")


def _load_model(path: str) -> Interpretation:
    return ModelDocument.model_validate_json(_read(path)).to_interpretation()


def cmd_sat(kb_path: str, config: RunConfig, model_path: Optional[str] = None) -> Outcome:
    """Satisfiability of the file's goal together with its axioms."""
    kb = parse_kb(_read(kb_path))
    if kb.goal is None and not (kb.abox or kb.tbox or kb.ercbox or kb.ecbox):
        raise InvalidInputError("nothing to decide: the file has no goal and no axioms")
    concept = kb_to_concept(kb)
    solver_config = config.solver_config()
    result = sat(concept, solver_config)
    delta = describe(result.formula, solver_config) if config.dump_delta and result.formula else None
    if result.verdict != SatVerdict.SAT:
        return EXIT_NEGATIVE, SatResponse(command="sat", verdict=result.verdict.value, types=len(result.types), delta=delta)
    model = with_nominal_individuals(result.model, kb.individuals())
    _write_model(model, model_path)
    return EXIT_OK, SatResponse(
        command="sat", verdict=result.verdict.value, types=len(result.types), model_size=model.size, delta=delta
    )


def cmd_consistent(kb_path: str, config: RunConfig, model_path: Optional[str] = None) -> Outcome:
    """Consistency of a knowledge base."""
    kb = parse_kb(_read(kb_path))
    result = consistent(kb, config.solver_config())
    trace = [event.to_json() for event in result.trace] if config.trace else None
    if not result.consistent:
        return EXIT_NEGATIVE, ConsistencyResponse(
            command="consistent", verdict="INCONSISTENT", individuals=len(kb.individuals()), trace=trace
        )
    _write_model(result.model, model_path)
    return EXIT_OK, ConsistencyResponse(
        command="consistent",
        verdict="CONSISTENT",
        individuals=len(kb.individuals()),
        model_size=result.model.size,
        trace=trace,
    )


def cmd_entails(kb_path: str, query_path: str, config: RunConfig, model_path: Optional[str] = None) -> Outcome:
    """Entailment of a Boolean conjunctive query."""
    kb = parse_kb(_read(kb_path))
    query = parse_query(_read(query_path), roles=kb.role_names())
    result = entails(kb, query, config.solver_config())
    if result.verdict == EntailmentVerdict.ENTAILED:
        return EXIT_OK, EntailmentResponse(
            command="entails", verdict=result.verdict.value, spoilers_checked=result.checked
        )
    spoiler = [
        f"{render_concept(a.sub)} <= {render_concept(a.sup)}" if isinstance(a, ConceptInclusion) else render_assertion(a)
        for a in result.spoiler
    ]
    _write_model(result.model, model_path)
    return EXIT_NEGATIVE, EntailmentResponse(
        command="entails",
        verdict=result.verdict.value,
        spoilers_checked=result.checked,
        spoiler=spoiler,
        model_size=result.model.size,
    )


def cmd_check(model_path: str, kb_path: str, config: Optional[RunConfig] = None) -> Outcome:
    """Check a model file against a knowledge base."""
    model = _load_model(model_path)
    kb = parse_kb(_read(kb_path))
    report = satisfies(model, kb)
    if report.satisfied:
        return EXIT_OK, CheckResponse(command="check", verdict="SATISFIED")
    return EXIT_NEGATIVE, CheckResponse(command="check", verdict="VIOLATED", violations=report.violations)


def cmd_oracle(
    kb_path: str,
    config: RunConfig,
    model_path: Optional[str] = None,
    symbolic: bool = False,
) -> Outcome:
    """Bounded model search: count every model, or find one with z3."""
    kb = parse_kb(_read(kb_path))
    size = config.oracle_size
    if symbolic:
        model = find_model(kb, size, config.solver_config())
        if model is None:
            return EXIT_NEGATIVE, OracleResponse(command="oracle", verdict="NO_MODEL", max_size=size)
        _write_model(model, model_path)
        return EXIT_OK, OracleResponse(command="oracle", verdict="MODEL", max_size=size, model_size=model.size)
    count = 0
    first = None
    for model in enumerate_models(kb, size):
        count += 1
        first = first or model
    if first is None:
        return EXIT_NEGATIVE, OracleResponse(command="oracle", verdict="NO_MODEL", max_size=size, models=0)
    _write_model(first, model_path)
    return EXIT_OK, OracleResponse(
        command="oracle", verdict="MODEL", max_size=size, models=count, model_size=first.size
    )


def cmd_lab(
    operation: str,
    model_path: str,
    config: RunConfig,
    depth: int = 3,
    k: int = 2,
    element: Optional[str] = None,
    copies: int = 1,
    output_path: Optional[str] = None,
) -> Outcome:
    """Apply a model transformation to a model file."""
    model = _load_model(model_path)
    if operation == "girth":
        value = girth(model)
        return EXIT_OK, LabResponse(
            command="lab", verdict="OK", operation=operation, model_size=model.size, girth=str(value)
        )
    if operation == "unravel":
        result = unravel(model, depth)
    elif operation == "loosen":
        result = k_loosening(model, k)
    elif operation == "duplicate":
        if element is None:
            raise InvalidInputError("duplicate needs an element label")
        result = s_duplicate(model, [(model.element(element), copies)])
    else:
        raise InvalidInputError(f"unknown lab operation {operation}")
    _write_model(result, output_path)
    document = None if output_path else ModelDocument.from_interpretation(result).model_dump()
    return EXIT_OK, LabResponse(
        command="lab", verdict="OK", operation=operation, model_size=result.size, model=document
    )


COMMANDS: Dict[str, Callable[..., Outcome]] = {
    "sat": cmd_sat,
    "consistent": cmd_consistent,
    "entails": cmd_entails,
    "check": cmd_check,
    "oracle": cmd_oracle,
    "lab": cmd_lab,
}


def run_command(name: str, **kwargs) -> Tuple[int, dict]:
    """Run a command and turn its outcome, or its failure, into (exit code, JSON payload)."""
    if name not in COMMANDS:
        return EXIT_ERROR, ErrorResponse(command=name, error="UnknownCommand", detail=name).to_json()
    try:
        code, response = COMMANDS[name](**kwargs)
        return code, response.to_json()
    except ResourceExceeded as e:
        logger.warning(f"{name}: resource limit reached: {e}")
        return EXIT_RESOURCE, ErrorResponse(
            command=name, verdict="RESOURCE", error=type(e).__name__, detail=str(e), cap=e.cap
        ).to_json()
    except (CarddlError, OSError, ValidationError, ValueError, nx.NetworkXException) as e:
        logger.error(f"{name}: {e}")
        return EXIT_ERROR, ErrorResponse(command=name, error=type(e).__name__, detail=str(e)).to_json()
