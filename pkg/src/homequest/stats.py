"""Corpus statistics: scene sizes, trajectory and plan lengths, demo lengths,
observation token lengths, and the level/type/split table."""

from __future__ import annotations

import json
import statistics
from collections import Counter
from pathlib import Path

from .env import EnvSession
from .episode import EpisodeSpec
from .generator import load_manifest
from .text import token_count


def _histogram(values, bin_size: int = 5) -> dict[str, int]:
    out: Counter = Counter()
    for v in values:
        lo = (v // bin_size) * bin_size
        out[f"{lo}-{lo + bin_size - 1}"] += 1
    return dict(sorted(out.items(), key=lambda kv: int(kv[0].split("-")[0])))


def corpus_stats(dataset_dir: Path | str, observation_sample: int = 50) -> dict:
    """Aggregate statistics over a generated dataset directory."""
    root = Path(dataset_dir)
    manifest = load_manifest(root)
    scene_objects = []
    scene_categories = []
    traj_lengths = []
    plan_lengths = []
    demo_lengths = []
    levels: Counter = Counter()
    types: Counter = Counter()
    splits: Counter = Counter()
    level_type: Counter = Counter()
    full_tokens = []
    partial_tokens = []

    for i, rec in enumerate(manifest):
        ep = EpisodeSpec.load(root / rec["path"])
        scene_objects.append(len(ep.scene["objects"]))
        scene_categories.append(len({r["category"] for r in ep.scene["objects"].values()}))
        traj_lengths.append(len(ep.trajectory))
        plan_lengths.append(rec.get("plan_length", len(ep.trajectory) + len(ep.expert_demo)))
        demo_lengths.append(len(ep.expert_demo))
        levels[rec["level"]] += 1
        types[rec["type"]] += 1
        splits[rec["split"]] += 1
        level_type[(rec["level"], rec["type"])] += 1
        if i < observation_sample:
            full_tokens.append(token_count(EnvSession(ep, "full").reset()))
            partial_tokens.append(token_count(EnvSession(ep, "partial").reset()))

    def mean(xs):
        return round(statistics.mean(xs), 2) if xs else None

    demo_mode = Counter(demo_lengths).most_common(1)[0][0] if demo_lengths else None
    return {
        "episodes": len(manifest),
        "scene": {
            "mean_objects": mean(scene_objects),
            "mean_categories": mean(scene_categories),
        },
        "lengths": {
            "mean_trajectory": mean(traj_lengths),
            "mean_full_plan": mean(plan_lengths),
            "mean_demo": mean(demo_lengths),
            "demo_mode": demo_mode,
            "trajectory_hist": _histogram(traj_lengths),
            "plan_hist": _histogram(plan_lengths),
            "demo_hist": _histogram(demo_lengths, bin_size=1),
        },
        "observation_tokens": {
            "mean_full": mean(full_tokens),
            "mean_partial": mean(partial_tokens),
            "sampled": len(full_tokens),
        },
        "per_level": {str(k): v for k, v in sorted(levels.items())},
        "per_type": dict(sorted(types.items())),
        "per_split": dict(sorted(splits.items())),
        "level_by_type": {
            f"level {lv}": {
                t: level_type.get((lv, t), 0) for t in sorted(types)
            } for lv in sorted(levels)
        },
    }


def format_stats(stats: dict) -> str:
    return json.dumps(stats, indent=1, sort_keys=True)
