"""The interactive scored episode: observations, command parsing, success
detection, and both observability regimes.

A session replays the stored human trajectory to the quest state, puts the
robot on the floor, and then scores commands: unit cost per action (examine
and inventory are free), +100 on the first state achieving the human's
subgoal, hard stop after 40 steps. Invalid commands consume a step at unit
cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import text, world
from .episode import EpisodeSpec
from .parser import CANT_DO, CANT_UNDERSTAND, MetaAction, ParseError, parse_command
from .quests import GroundedSubgoal, grounding_set
from .world import GroundedAction, HUMAN, ROBOT, WorldState

MAX_STEPS = 40
SUCCESS_REWARD = 100


@dataclass
class StepResult:
    observation: str
    score_delta: float
    done: bool
    info: dict = field(default_factory=dict)


class SessionError(Exception):
    pass


class EnvSession:
    """One interactive episode. Not thread-safe; one command at a time."""

    def __init__(self, episode: EpisodeSpec, observability: str = "full"):
        if observability not in ("full", "partial"):
            raise SessionError(f"unknown observability {observability!r}")
        self.episode = episode
        self.observability = observability
        self.state: Optional[WorldState] = None
        self.steps_taken = 0
        self.total_cost = 0
        self.done = False
        self.success = False
        self._members: list[GroundedSubgoal] = []

    # -- lifecycle ----------------------------------------------------------

    def reset(self) -> str:
        ep = self.episode
        state = ep.initial_state()
        state = world.apply_all(state, ep.trajectory)
        if state.digest() != ep.quest_state_digest:
            raise SessionError("trajectory replay does not reproduce the quest state")
        floor = state.universe.location_of_category("floor")
        agent_at = dict(state.agent_at)
        agent_at[ROBOT] = floor
        state = WorldState(state.universe, dict(state.pos), dict(state.flags),
                           agent_at, dict(state.holding))
        self.state = state
        # the quest's referents are fixed at the quest state
        self._members = grounding_set(state, ep.subgoal).members()
        self.steps_taken = 0
        self.total_cost = 0
        self.done = False
        self.success = False
        return self._initial_observation()

    def score(self) -> float:
        return (SUCCESS_REWARD if self.success else 0) - self.total_cost

    def check_success(self, state: WorldState) -> bool:
        return any(mg.holds(state) for mg in self._members)

    # -- stepping -----------------------------------------------------------

    def step(self, command: str) -> StepResult:
        if self.state is None:
            raise SessionError("reset the session before stepping")
        if self.done:
            raise SessionError("the episode is over")
        self.steps_taken += 1
        event = "action"
        cost = 1
        try:
            parsed = parse_command(self.state, command)
            if isinstance(parsed, MetaAction):
                cost = 0
                if parsed.kind == "examine":
                    obs = self._examine_text()
                    event = "examine"
                else:
                    obs = self._inventory_text()
                    event = "inventory"
            else:
                reason = world.explain_inapplicable(self.state, parsed)
                if reason is not None:
                    obs = CANT_DO
                    event = "invalid"
                else:
                    self.state = world.apply(self.state, parsed)
                    obs = text.render_action(parsed)
                    if self.observability == "partial" and parsed.schema in (
                            "move", "open-loc", "open-rec-at-loc"):
                        obs = obs + "\n" + self._examine_text(surface_only=True)
        except ParseError as pe:
            obs = pe.message
            event = "cant-do" if pe.message == CANT_DO else "cant-understand"
        except world.UnknownObjectError:
            obs = CANT_DO
            event = "invalid"

        self.total_cost += cost
        reward = 0
        if event == "action" and self.check_success(self.state):
            reward = SUCCESS_REWARD
            self.success = True
            self.done = True
            obs += "\nYou have accomplished the quest."
        elif self.steps_taken >= MAX_STEPS:
            self.done = True
            obs += "\nYou have run out of steps."
        return StepResult(
            observation=obs,
            score_delta=reward - cost,
            done=self.done,
            info={
                "event": event,
                "steps_remaining": MAX_STEPS - self.steps_taken,
                "success": self.success,
            },
        )

    def valid_commands(self) -> list[str]:
        if self.state is None or self.done:
            return []
        return [text.render_command(a) for a in world.valid_actions(self.state, ROBOT)]

    # -- observation rendering ----------------------------------------------

    def _initial_observation(self) -> str:
        state = self.state
        uni = state.universe
        rooms = [text.location_name(loc) for loc in uni.locations if uni.category(loc) != "floor"]
        listing = ", ".join(rooms[:-1]) + f", and {rooms[-1]}"
        parts = [
            "Welcome to the world!",
            f"In the room there is the {listing}.",
            "Now you are standing on the floor.",
            "The human agent has taken these actions towards a goal:",
        ]
        for action in self.episode.trajectory:
            line = text.render_action(action, second_person=False)
            if line:
                parts.append(line)
        parts.append(f'Human stops and says, "{self.episode.utterance_text}"')
        parts.append("Now it is your turn!")
        parts.append(self._examine_text(initial=True))
        return "\n".join(parts)

    def _visible_contents(self, holder: str) -> list[str]:
        state = self.state
        if not state.is_open_if_openable(holder) and self.observability == "partial":
            return []
        return sorted(state.contents(holder))

    def _holder_line(self, holder: str, show_empty: bool = False) -> str:
        state = self.state
        inside = state.universe.spec(holder).has("has-inside")
        rel = "In" if inside else "On"
        name = text.mention(state, holder)
        things = self._visible_contents(holder)
        if not things:
            if show_empty:
                return f"{rel} the {name} you can see nothing."
            return ""
        listing = ", ".join(text.mention(state, o) for o in things)
        return f"{rel} the {name} you can see {listing}."

    def _examine_text(self, initial: bool = False, surface_only: bool = False) -> str:
        """Current-location listing; the initial full-mode observation covers
        every location. ``surface_only`` (partial auto-examine after moves)
        lists direct contents without receptacle interiors."""
        state = self.state
        uni = state.universe
        at = state.agent_at[ROBOT]
        if self.observability == "full" and initial:
            holders = list(uni.locations)
        else:
            holders = [at]
        if initial and self.observability == "partial":
            surface_only = True
        full_dump = self.observability == "full" and initial
        lines = []
        if not initial:
            lines.append(f"You are at the {text.mention(state, at)}.")
        for loc in holders:
            line = self._holder_line(loc, show_empty=full_dump)
            if line:
                lines.append(line)
            if surface_only:
                continue
            for rec in sorted(o for o in state.contents(loc)
                              if uni.spec(o).cls == "receptacle"):
                if self.observability == "partial" and not state.is_open_if_openable(loc):
                    continue
                rline = self._holder_line(rec, show_empty=full_dump)
                if rline:
                    lines.append(rline)
        if state.agent_at[HUMAN] == at or (self.observability == "full" and initial):
            where = ("here" if state.agent_at[HUMAN] == at
                     else f"at the {text.location_name(state.agent_at[HUMAN])}")
            lines.append(f"The human is {where}.")
        return "\n".join(lines) if lines else "You see nothing of note."

    def _inventory_text(self) -> str:
        held = self.state.holding.get(ROBOT)
        if held is None:
            line = "You are holding nothing."
        else:
            line = f"You are holding the {text.mention(self.state, held)}."
        return line + f'\nRecall the quest: "{self.episode.utterance_text}"'
