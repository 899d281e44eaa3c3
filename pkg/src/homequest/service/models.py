"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class SessionCreateRequest(BaseModel):
    episode_path: Optional[str] = None
    episode: Optional[dict] = None  # inline episode JSON
    mode: str = "full"


class SessionCreateResponse(BaseModel):
    session_id: str
    observation: str


class StepRequest(BaseModel):
    command: str


class StepResponse(BaseModel):
    observation: str
    score_delta: float
    done: bool
    info: dict[str, Any]


class SessionStateResponse(BaseModel):
    session_id: str
    mode: str
    steps_taken: int
    score: float
    done: bool
    success: bool


class ValidCommandsResponse(BaseModel):
    commands: list[str]


class GenerateRequest(BaseModel):
    episodes: int = Field(gt=0)
    version: str = "v1"
    seed: int = 0
    out_dir: str
    level: Optional[int] = Field(default=None, ge=1, le=4)
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    stratify: Optional[bool] = None
    workers: int = 1


class GenerateResponse(BaseModel):
    out_dir: str
    summary: dict


class EvaluateRequest(BaseModel):
    dataset_dir: str
    agent: str = "random"  # random | heuristic
    mode: str = "full"  # full | partial
    seed: int = 0
    limit: Optional[int] = None
    level: Optional[int] = Field(default=None, ge=1, le=4)


class EvaluateResponse(BaseModel):
    report: dict
    table: str


class StatsRequest(BaseModel):
    dataset_dir: str
    observation_sample: int = 50


class StatsResponse(BaseModel):
    stats: dict


class InspectRequest(BaseModel):
    episode_path: str


class InspectResponse(BaseModel):
    summary: dict
