"""Episode records and their on-disk form.

An episode file is key-sorted JSON, newline-terminated, holding the scene,
the human goal, the observed trajectory, the quest-state digest, the lifted
subgoal and utterance, the rendered instruction, the hardness level, the
split tag, and the expert demonstration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .goals import GroundGoal
from .quests import LiftedSubgoal
from .world import GroundedAction, WorldState


@dataclass(frozen=True)
class EpisodeSpec:
    seed: int
    version: str  # v1 | v2
    scene: dict  # canonical initial-state JSON object
    goal: GroundGoal
    trajectory: tuple[GroundedAction, ...]
    quest_state_digest: str
    subgoal: LiftedSubgoal
    utterance: LiftedSubgoal
    utterance_text: str
    hardness: int
    split: str
    expert_demo: tuple[GroundedAction, ...]
    subgoal_annotation: Optional[dict] = None  # v2: the pursued goal conjunct

    def initial_state(self) -> WorldState:
        return WorldState.from_json_obj(self.scene)

    def quest_type(self) -> str:
        return self.subgoal.quest_type

    def to_json_obj(self) -> dict:
        out = {
            "seed": self.seed,
            "version": self.version,
            "scene": self.scene,
            "goal": self.goal.to_json_obj(),
            "trajectory": [a.to_list() for a in self.trajectory],
            "s_T_digest": self.quest_state_digest,
            "subgoal": self.subgoal.to_json_obj(),
            "utterance": self.utterance.to_json_obj(),
            "utterance_text": self.utterance_text,
            "hardness": self.hardness,
            "split": self.split,
            "expert_demo": [a.to_list() for a in self.expert_demo],
        }
        if self.subgoal_annotation is not None:
            out["subgoal_annotation"] = self.subgoal_annotation
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":")) + "\n"

    def save(self, path: Path | str) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_json_obj(cls, data: dict) -> "EpisodeSpec":
        return cls(
            seed=data["seed"],
            version=data["version"],
            scene=data["scene"],
            goal=GroundGoal.from_json_obj(data["goal"]),
            trajectory=tuple(GroundedAction.from_list(a) for a in data["trajectory"]),
            quest_state_digest=data["s_T_digest"],
            subgoal=LiftedSubgoal.from_json_obj(data["subgoal"]),
            utterance=LiftedSubgoal.from_json_obj(data["utterance"]),
            utterance_text=data["utterance_text"],
            hardness=data["hardness"],
            split=data["split"],
            expert_demo=tuple(GroundedAction.from_list(a) for a in data["expert_demo"]),
            subgoal_annotation=data.get("subgoal_annotation"),
        )

    @classmethod
    def load(cls, path: Path | str) -> "EpisodeSpec":
        return cls.from_json_obj(json.loads(Path(path).read_text()))
