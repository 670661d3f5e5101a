"""
Response models for the command layer.

Every command answers with one of these; main.py prints it as a single JSON
line with sorted keys.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class CommandResponse(BaseModel):
    """Fields shared by every response."""
    command: str
    verdict: str
    trace: Optional[List[Dict[str, str]]] = None

    def to_json(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True)


class SatResponse(CommandResponse):
    """Satisfiability verdict."""
    types: int = Field(..., ge=0)
    model_size: Optional[int] = None
    delta: Optional[Dict[str, Any]] = None


class ConsistencyResponse(CommandResponse):
    """Consistency verdict."""
    individuals: int = Field(..., ge=0)
    model_size: Optional[int] = None


class EntailmentResponse(CommandResponse):
    """Entailment verdict, with the spoiler behind a countermodel."""
    spoilers_checked: int = Field(default=0, ge=0)
    spoiler: List[str] = Field(default_factory=list)
    model_size: Optional[int] = None


class CheckResponse(CommandResponse):
    """Model check of an interpretation against a KB."""
    violations: List[str] = Field(default_factory=list)


class OracleResponse(CommandResponse):
    """Bounded model search."""
    max_size: int = Field(..., ge=1)
    models: Optional[int] = None
    model_size: Optional[int] = None


class LabResponse(CommandResponse):
    """Result of a model transformation."""
    operation: str
    model_size: int = Field(..., ge=0)
    girth: Optional[str] = None
    model: Optional[Dict[str, Any]] = None


class ErrorResponse(BaseModel):
    """Error response model."""
    command: str
    verdict: str = "ERROR"
    error: str
    detail: str
    cap: Optional[str] = None

    def to_json(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True)
