# src/aging_ctrw/utils/schemas.py
"""
Pydantic models for scenarios and verification reports
"""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# batches, hence random streams, reserved for one output cell
STREAM_BLOCK = 1000


def _split_list(value):
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(',')]
        return [p for p in parts if p]
    return value


class Scenario(BaseModel):
    """One run configuration; unknown keys are rejected"""
    model_config = ConfigDict(extra='forbid', populate_by_name=True)

    family: Literal['brownian', 'symmetric_stable', 'poisson', 'compound_poisson'] = 'brownian'
    mu: float = Field(0.0, description="Brownian drift")
    A: float = Field(1.0, gt=0, description="Brownian variance rate")
    beta: float = Field(2.0, gt=0, le=2, description="Stability index of the outer process")
    scale: float = Field(1.0, gt=0, description="Stable scale sigma")
    lam: float = Field(1.0, gt=0, alias='lambda', description="Jump intensity")
    jump_law: Literal['normal', 'exponential'] = 'normal'
    jump_mean: float = 0.0
    jump_sd: float = Field(1.0, gt=0)
    jump_rate: float = Field(1.0, gt=0)

    alpha: float = Field(0.5, gt=0, lt=1, description="Temporal index")
    c: float = Field(1.0, gt=0, description="Subordinator scale")
    t0: List[float] = Field(default_factory=lambda: [1.0])
    t: List[float] = Field(default_factory=lambda: [1.0])
    borel_sets: List[str] = Field(default_factory=lambda: ['(1,inf)'])

    n: int = Field(100_000, ge=20)
    seed: int = Field(20240601, ge=0, lt=2 ** 64)
    quad_nodes: int = Field(16, ge=4, le=256)
    du_fraction: float = Field(1e-3, gt=0, lt=0.1)
    batch_size: int = Field(20_000, ge=1, description="Draws per random stream")

    dx: float = Field(0.2, gt=0)
    x_max: float = Field(8.0, gt=0)
    dt: Optional[float] = Field(None, gt=0)
    sigma0: float = Field(0.05, gt=0)

    a: float = Field(4.0, gt=0)
    times: List[float] = Field(default_factory=lambda: [0.5, 1.0])
    alphas: List[float] = Field(default_factory=lambda: [0.5, 0.7, 0.9, 0.99])

    out: str = 'results'
    threads: int = Field(1, ge=1)
    level: float = Field(0.01, gt=0, lt=1)

    @field_validator('t0', 't', 'times', 'alphas', mode='before')
    @classmethod
    def _float_lists(cls, value):
        return _split_list(value)

    @field_validator('borel_sets', mode='before')
    @classmethod
    def _set_list(cls, value):
        if isinstance(value, str):
            return [p.strip() for p in value.split(';') if p.strip()]
        return value

    @field_validator('t', 'times')
    @classmethod
    def _positive_times(cls, value):
        if not value or any(v <= 0 for v in value):
            raise ValueError("times must be a nonempty list of positive reals")
        return value

    @field_validator('t0')
    @classmethod
    def _nonnegative_t0(cls, value):
        if not value or any(v < 0 for v in value):
            raise ValueError("t0 must be a nonempty list of nonnegative reals")
        return value

    @field_validator('alphas')
    @classmethod
    def _alpha_grid(cls, value):
        if any(not (0 < v < 1) for v in value):
            raise ValueError("alphas must lie in (0,1)")
        return value

    @model_validator(mode='after')
    def _family_constraints(self):
        if self.family == 'symmetric_stable' and self.beta > 2:
            raise ValueError("beta must lie in (0,2]")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        return self

    @model_validator(mode='after')
    def _stream_layout(self):
        if self.n > STREAM_BLOCK * self.batch_size:
            raise ValueError(f"n / batch_size may not exceed {STREAM_BLOCK} batches")
        return self

    def canonical(self) -> Dict[str, Any]:
        """Fields that determine results; out and threads do not"""
        return self.model_dump(by_alias=True, exclude={'out', 'threads'})


class CheckReport(BaseModel):
    """Outcome of one verification check"""
    name: str
    passed: bool
    statistics: Dict[str, Any] = Field(default_factory=dict)
    tolerances: Dict[str, Any] = Field(default_factory=dict)
    inputs: Dict[str, Any] = Field(default_factory=dict)
    seeds: Dict[str, Any] = Field(default_factory=dict)
    message: str = ""


class SuiteReport(BaseModel):
    """Aggregate of several checks for one command"""
    command: str
    scenario_hash: str
    seed: int
    checks: List[CheckReport] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed_checks(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]
