"""
Configuration models for the reasoners and the command line.

SolverConfig carries the caps every reasoner honours; RunConfig is the
command-line view, populated from flags and CARDDL_* environment variables
by api.config.load_config.
"""

from typing import Optional

from pydantic import BaseModel, Field


class SolverConfig(BaseModel):
    """Caps and knobs shared by every reasoning procedure."""

    max_venn_regions: int = Field(default=50000, gt=0)
    max_types: int = Field(default=4096, gt=0)
    timeout_ms: int = Field(default=120000, gt=0)
    sparse_multiplier: int = Field(default=2, gt=0)
    max_model_size: int = Field(default=20000, gt=0)
    max_rewritings: int = Field(default=2000, gt=0)
    max_spoilers: int = Field(default=5000, gt=0)
    max_choices: int = Field(default=10000, gt=0)
    max_erc_leaves: int = Field(default=16, gt=0)
    jobs: int = Field(default=1, gt=0)
    exhaustive_augmented: bool = False
    seed: Optional[int] = None


class RunConfig(BaseModel):
    """Options of a single command-line invocation."""

    max_venn: int = Field(default=50000, gt=0)
    max_types: int = Field(default=4096, gt=0)
    timeout: float = Field(default=120.0, gt=0)
    jobs: int = Field(default=1, gt=0)
    oracle_size: int = Field(default=3, ge=1)
    seed: int = 0
    trace: bool = False
    dump_delta: bool = False
    exhaustive: bool = False
    log_level: str = "WARNING"

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            max_venn_regions=self.max_venn,
            max_types=self.max_types,
            timeout_ms=max(1, int(self.timeout * 1000)),
            jobs=self.jobs,
            exhaustive_augmented=self.exhaustive,
            seed=self.seed,
        )
