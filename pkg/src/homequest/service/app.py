"""FastAPI service wrapping the core package.

Sessions live in process memory: create one from an episode file (or inline
episode JSON), step it with text commands, read its score, close it. Corpus
generation, evaluation, statistics, and inspection run as bulk endpoints.
"""

from __future__ import annotations

import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException

from .. import __version__, logic
from ..agents import HeuristicAgent, RandomAgent, evaluate
from ..env import EnvSession, SessionError
from ..episode import EpisodeSpec
from ..generator import GenerationError, generate_dataset, load_manifest
from ..stats import corpus_stats
from . import models

app = FastAPI(title="homequest", version=__version__)

_sessions: dict[str, EnvSession] = {}


def _get_session(session_id: str) -> EnvSession:
    try:
        return _sessions[session_id]
    except KeyError:
        raise HTTPException(status_code=404, detail="unknown session id") from None


@app.get("/health", response_model=models.HealthResponse)
def health() -> models.HealthResponse:
    return models.HealthResponse(status="ok", version=__version__)


@app.post("/sessions", response_model=models.SessionCreateResponse)
def create_session(req: models.SessionCreateRequest) -> models.SessionCreateResponse:
    if (req.episode_path is None) == (req.episode is None):
        raise HTTPException(status_code=422,
                            detail="provide exactly one of episode_path or episode")
    try:
        if req.episode_path is not None:
            path = Path(req.episode_path)
            if not path.exists():
                raise HTTPException(status_code=404, detail=f"no episode at {path}")
            episode = EpisodeSpec.load(path)
        else:
            episode = EpisodeSpec.from_json_obj(req.episode)
        session = EnvSession(episode, req.mode)
        observation = session.reset()
    except HTTPException:
        raise
    except (SessionError, KeyError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"malformed episode: {exc}") from exc
    session_id = uuid.uuid4().hex
    _sessions[session_id] = session
    return models.SessionCreateResponse(session_id=session_id, observation=observation)


@app.post("/sessions/{session_id}/step", response_model=models.StepResponse)
def step_session(session_id: str, req: models.StepRequest) -> models.StepResponse:
    session = _get_session(session_id)
    try:
        result = session.step(req.command)
    except SessionError as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc
    return models.StepResponse(
        observation=result.observation, score_delta=result.score_delta,
        done=result.done, info=result.info)


@app.get("/sessions/{session_id}", response_model=models.SessionStateResponse)
def session_state(session_id: str) -> models.SessionStateResponse:
    session = _get_session(session_id)
    return models.SessionStateResponse(
        session_id=session_id, mode=session.observability,
        steps_taken=session.steps_taken, score=session.score(),
        done=session.done, success=session.success)


@app.get("/sessions/{session_id}/valid-commands", response_model=models.ValidCommandsResponse)
def valid_commands(session_id: str) -> models.ValidCommandsResponse:
    return models.ValidCommandsResponse(commands=_get_session(session_id).valid_commands())


@app.delete("/sessions/{session_id}")
def close_session(session_id: str) -> dict:
    _get_session(session_id)
    del _sessions[session_id]
    return {"closed": True}


@app.post("/generate", response_model=models.GenerateResponse)
def generate(req: models.GenerateRequest) -> models.GenerateResponse:
    try:
        summary = generate_dataset(
            n=req.episodes, version=req.version, out_dir=req.out_dir, seed=req.seed,
            split_ratios=req.split_ratios, target_level=req.level,
            stratify=req.stratify, workers=req.workers)
    except (GenerationError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return models.GenerateResponse(out_dir=req.out_dir, summary=summary)


@app.post("/evaluate", response_model=models.EvaluateResponse)
def run_evaluation(req: models.EvaluateRequest) -> models.EvaluateResponse:
    root = Path(req.dataset_dir)
    if not root.exists():
        raise HTTPException(status_code=404, detail=f"no dataset at {root}")
    records = load_manifest(root)
    if req.level is not None:
        records = [r for r in records if r["level"] == req.level]
    if req.limit is not None:
        records = records[: req.limit]
    episodes = [EpisodeSpec.load(root / r["path"]) for r in records]
    if req.agent == "random":
        agent = RandomAgent(seed=req.seed)
    elif req.agent == "heuristic":
        agent = HeuristicAgent()
    else:
        raise HTTPException(status_code=422, detail=f"unknown agent {req.agent!r}")
    try:
        report = evaluate(agent, episodes, req.mode)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return models.EvaluateResponse(report=report.as_dict(), table=report.format_table())


@app.post("/stats", response_model=models.StatsResponse)
def dataset_stats(req: models.StatsRequest) -> models.StatsResponse:
    root = Path(req.dataset_dir)
    if not root.exists():
        raise HTTPException(status_code=404, detail=f"no dataset at {root}")
    return models.StatsResponse(stats=corpus_stats(root, req.observation_sample))


@app.post("/inspect", response_model=models.InspectResponse)
def inspect(req: models.InspectRequest) -> models.InspectResponse:
    path = Path(req.episode_path)
    if not path.exists():
        raise HTTPException(status_code=404, detail=f"no episode at {path}")
    ep = EpisodeSpec.load(path)
    goal_formula = logic.render(ep.goal.to_formula())
    summary = {
        "seed": ep.seed,
        "version": ep.version,
        "hardness": ep.hardness,
        "split": ep.split,
        "quest_type": ep.subgoal.quest_type,
        "utterance_text": ep.utterance_text,
        "subgoal": ep.subgoal.to_json_obj(),
        "utterance": ep.utterance.to_json_obj(),
        "goal_template": ep.goal.template.name,
        "goal_binding": ep.goal.binding_map(),
        "goal_formula": goal_formula,
        "objects": len(ep.scene["objects"]),
        "trajectory_length": len(ep.trajectory),
        "expert_demo_length": len(ep.expert_demo),
        "subgoal_annotation": ep.subgoal_annotation,
    }
    return models.InspectResponse(summary=summary)
