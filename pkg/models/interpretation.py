"""
Finite interpretations and their JSON document form.

Elements are small integers; labels give each element a stable string name
used in model documents and traces.
"""

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from pydantic import BaseModel, Field

from models.errors import ModelError


@dataclass(frozen=True)
class Interpretation:
    """
    Finite interpretation of concept names, role names and individuals.

    Attributes:
        domain: element ids, non-empty
        concepts: concept name -> extension
        roles: role name -> set of (source, target) pairs
        individuals: individual name -> element
        labels: element -> display label
        origin: element -> element of the interpretation this one was derived from
    """

    domain: Tuple[int, ...]
    concepts: Mapping[str, FrozenSet[int]] = field(default_factory=dict)
    roles: Mapping[str, FrozenSet[Tuple[int, int]]] = field(default_factory=dict)
    individuals: Mapping[str, int] = field(default_factory=dict)
    labels: Mapping[int, str] = field(default_factory=dict)
    origin: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.domain:
            raise ValueError("interpretation domain must be non-empty")
        members = set(self.domain)
        for name, extension in self.concepts.items():
            if not extension <= members:
                raise ValueError(f"extension of concept {name} leaves the domain")
        for name, pairs in self.roles.items():
            for source, target in pairs:
                if source not in members or target not in members:
                    raise ValueError(f"edge of role {name} leaves the domain")
        for name, element in self.individuals.items():
            if element not in members:
                raise ValueError(f"individual {name} is not interpreted in the domain")

    @classmethod
    def build(
        cls,
        domain: Iterable[int],
        concepts: Optional[Mapping[str, Iterable[int]]] = None,
        roles: Optional[Mapping[str, Iterable[Tuple[int, int]]]] = None,
        individuals: Optional[Mapping[str, int]] = None,
        labels: Optional[Mapping[int, str]] = None,
        origin: Optional[Mapping[int, int]] = None,
    ) -> "Interpretation":
        return cls(
            domain=tuple(domain),
            concepts={name: frozenset(ext) for name, ext in (concepts or {}).items()},
            roles={name: frozenset(tuple(p) for p in pairs) for name, pairs in (roles or {}).items()},
            individuals=dict(individuals or {}),
            labels=dict(labels or {}),
            origin=dict(origin or {}),
        )

    @property
    def size(self) -> int:
        return len(self.domain)

    def extension(self, name: str) -> FrozenSet[int]:
        return self.concepts.get(name, frozenset())

    def role(self, name: str) -> FrozenSet[Tuple[int, int]]:
        return self.roles.get(name, frozenset())

    @cached_property
    def _successors(self) -> Dict[str, Dict[int, FrozenSet[int]]]:
        table: Dict[str, Dict[int, set]] = {}
        for name, pairs in self.roles.items():
            per_source: Dict[int, set] = {}
            for source, target in pairs:
                per_source.setdefault(source, set()).add(target)
            table[name] = per_source
        return {name: {d: frozenset(s) for d, s in rows.items()} for name, rows in table.items()}

    def successors(self, element: int, role: str) -> FrozenSet[int]:
        return self._successors.get(role, {}).get(element, frozenset())

    @cached_property
    def named(self) -> FrozenSet[int]:
        """Elements that interpret some individual."""
        return frozenset(self.individuals.values())

    def label(self, element: int) -> str:
        return self.labels.get(element, f"e{element}")

    def element(self, label: str) -> int:
        for element in self.domain:
            if self.label(element) == label:
                return element
        raise ValueError(f"element {label} not found")

    def name_type(self, element: int) -> FrozenSet[str]:
        """Concept names the element belongs to."""
        return frozenset(name for name, ext in self.concepts.items() if element in ext)

    def restricted_to(self, concept_names: Iterable[str], role_names: Iterable[str]) -> "Interpretation":
        keep_concepts = set(concept_names)
        keep_roles = set(role_names)
        return Interpretation(
            domain=self.domain,
            concepts={n: e for n, e in self.concepts.items() if n in keep_concepts},
            roles={n: p for n, p in self.roles.items() if n in keep_roles},
            individuals=self.individuals,
            labels=self.labels,
            origin=self.origin,
        )


class ModelDocument(BaseModel):
    """JSON form of an interpretation; elements are referred to by label."""

    domain: List[str] = Field(..., min_length=1)
    concepts: Dict[str, List[str]] = Field(default_factory=dict)
    roles: Dict[str, List[List[str]]] = Field(default_factory=dict)
    individuals: Dict[str, str] = Field(default_factory=dict)

    @classmethod
    def from_interpretation(cls, interp: Interpretation) -> "ModelDocument":
        label = interp.label
        return cls(
            domain=[label(d) for d in interp.domain],
            concepts={n: sorted(label(d) for d in ext) for n, ext in sorted(interp.concepts.items())},
            roles={
                n: sorted([label(s), label(t)] for s, t in pairs)
                for n, pairs in sorted(interp.roles.items())
            },
            individuals={a: label(d) for a, d in sorted(interp.individuals.items())},
        )

    def to_interpretation(self) -> Interpretation:
        ids = {}
        for index, name in enumerate(self.domain):
            if name in ids:
                raise ModelError(f"duplicate element label {name}")
            ids[name] = index

        def lookup(name: str) -> int:
            if name not in ids:
                raise ModelError(f"unknown element label {name}")
            return ids[name]

        return Interpretation.build(
            domain=range(len(self.domain)),
            concepts={n: [lookup(x) for x in ext] for n, ext in self.concepts.items()},
            roles={n: [(lookup(p[0]), lookup(p[1])) for p in pairs] for n, pairs in self.roles.items()},
            individuals={a: lookup(x) for a, x in self.individuals.items()},
            labels={i: name for name, i in ids.items()},
        )

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True, indent=2)
