"""Operator entry point.

Every subcommand is a thin client of the HTTP service: by default the app is
driven in-process, and --server points the same calls at a running instance
(`homequest serve`).

Exit codes: 0 success, 1 usage error, 2 generation failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click


class ServiceClient:
    """Minimal JSON-over-HTTP client; in-process unless a server is given."""

    def __init__(self, server: Optional[str] = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            from fastapi.testclient import TestClient

            from .service.app import app

            self._client = TestClient(app)

    def request(self, method: str, path: str, payload: Optional[dict] = None) -> dict:
        resp = self._client.request(method, path, json=payload)
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except Exception:
                detail = resp.text
            raise click.ClickException(f"{method} {path}: {detail}")
        return resp.json()


@click.group()
def cli():
    """Household quest benchmark tooling."""


@cli.command()
@click.option("--version", "version", type=click.Choice(["v1", "v2"]), default="v1")
@click.option("--episodes", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--level", type=click.IntRange(1, 4), default=None,
              help="Generate only this hardness level.")
@click.option("--split", "split_ratios", default="0.8,0.1,0.1", show_default=True,
              help="train,validation,test ratios")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--server", default=None, help="URL of a running service.")
def generate(version, episodes, seed, out_dir, level, split_ratios, workers, server):
    """Generate a corpus of episodes plus manifest."""
    ratios = tuple(float(x) for x in split_ratios.split(","))
    if len(ratios) != 3:
        raise click.UsageError("--split needs three comma-separated ratios")
    client = ServiceClient(server)
    body = {
        "episodes": episodes, "version": version, "seed": seed,
        "out_dir": str(Path(out_dir)), "level": level,
        "split_ratios": ratios, "workers": workers,
    }
    data = client.request("POST", "/generate", body)
    summary = data["summary"]
    click.echo(json.dumps(summary, indent=1, sort_keys=True))
    if summary.get("failures"):
        raise GenerationFailure(f"{len(summary['failures'])} episodes failed to generate")


class GenerationFailure(click.ClickException):
    exit_code = 2


@cli.command()
@click.argument("episode", type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["full", "partial"]), default="full",
              show_default=True)
@click.option("--one-trial", is_flag=True,
              help="Stop after the first give/put/state-change attempt.")
@click.option("--server", default=None)
def play(episode, mode, one_trial, server):
    """Interactive episode REPL: observations out, commands in."""
    client = ServiceClient(server)
    data = client.request("POST", "/sessions", {
        "episode_path": str(Path(episode).resolve()), "mode": mode})
    sid = data["session_id"]
    click.echo(data["observation"])
    committing = ("give ", "put ", "heat ", "cool ", "soak ", "slice ", "clean ",
                  "toggle ", "open ", "close ")
    tried = False
    done = False
    try:
        while not done:
            try:
                command = input("> ")
            except EOFError:
                click.echo("\n(end of input)")
                break
            command = command.strip()
            if command in ("quit", "exit", "stop"):
                break
            if not command:
                continue
            step = client.request("POST", f"/sessions/{sid}/step", {"command": command})
            click.echo(step["observation"])
            done = step["done"]
            if one_trial and command.startswith(committing) and step["info"]["event"] == "action":
                tried = True
            if one_trial and tried and not done:
                click.echo("(one-trial mode: stopping after the attempt)")
                break
        state = client.request("GET", f"/sessions/{sid}")
        click.echo(f"Episode over. steps={state['steps_taken']} "
                   f"score={state['score']} success={state['success']}")
    finally:
        client.request("DELETE", f"/sessions/{sid}")


@cli.command("eval")
@click.option("--data", "dataset_dir", type=click.Path(exists=True), required=True)
@click.option("--agent", type=click.Choice(["random", "heuristic"]), default="random",
              show_default=True)
@click.option("--mode", type=click.Choice(["full", "partial"]), default="full",
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--limit", type=int, default=None)
@click.option("--level", type=click.IntRange(1, 4), default=None)
@click.option("--json-out", "json_out", type=click.Path(), default=None)
@click.option("--server", default=None)
def eval_cmd(dataset_dir, agent, mode, seed, limit, level, json_out, server):
    """Evaluate a baseline agent over a generated corpus."""
    client = ServiceClient(server)
    data = client.request("POST", "/evaluate", {
        "dataset_dir": str(Path(dataset_dir).resolve()), "agent": agent,
        "mode": mode, "seed": seed, "limit": limit, "level": level,
    })
    click.echo(data["table"])
    if json_out:
        Path(json_out).write_text(json.dumps(data["report"], indent=1, sort_keys=True))


@cli.command()
@click.option("--data", "dataset_dir", type=click.Path(exists=True), required=True)
@click.option("--observation-sample", type=int, default=50, show_default=True)
@click.option("--server", default=None)
def stats(dataset_dir, observation_sample, server):
    """Histograms and the level/type/split table for a corpus."""
    client = ServiceClient(server)
    data = client.request("POST", "/stats", {
        "dataset_dir": str(Path(dataset_dir).resolve()),
        "observation_sample": observation_sample,
    })
    click.echo(json.dumps(data["stats"], indent=1, sort_keys=True))


@cli.command()
@click.argument("episode", type=click.Path(exists=True))
@click.option("--server", default=None)
def inspect(episode, server):
    """Print an episode's key fields."""
    client = ServiceClient(server)
    data = client.request("POST", "/inspect", {
        "episode_path": str(Path(episode).resolve())})
    click.echo(json.dumps(data["summary"], indent=1, sort_keys=True))


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8321, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("homequest.service.app:app", host=host, port=port, log_level="info")


@cli.command()
@click.option("--data", "dataset_dir", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--episodes", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def transcripts(dataset_dir, out_dir, episodes, seed):
    """Record command/observation transcripts for binding-fidelity checks.

    Each transcript drives the expert demo plus a few random commands through
    the native environment and freezes the (observation, score_delta, done)
    streams.
    """
    from . import rng as rngmod, text, world
    from .env import EnvSession
    from .episode import EpisodeSpec
    from .generator import load_manifest
    from .world import ROBOT

    root = Path(dataset_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = load_manifest(root)[:episodes]
    for i, rec in enumerate(records):
        ep = EpisodeSpec.load(root / rec["path"])
        session = EnvSession(ep, "full" if i % 2 == 0 else "partial")
        first = session.reset()
        rng = rngmod.substream(seed, "transcript", i)
        commands = ["examine", "inventory"]
        for a in ep.expert_demo:
            commands.append(text.render_command(a))
        commands.append("fly to the moon")
        steps = []
        for command in commands:
            if session.done:
                break
            if command not in ("examine", "inventory", "fly to the moon") and rng.random() < 0.2:
                actions = [a for a in world.valid_actions(session.state, ROBOT)
                           if a.schema not in world.META_SCHEMAS]
                command = text.render_command(actions[rng.randrange(len(actions))])
            res = session.step(command)
            steps.append({
                "command": command,
                "observation": res.observation,
                "score_delta": res.score_delta,
                "done": res.done,
            })
        payload = {
            "episode": str((root / rec["path"]).resolve()),
            "mode": session.observability,
            "initial_observation": first,
            "steps": steps,
            "final_score": session.score(),
        }
        (out / f"transcript_{i:04d}.json").write_text(
            json.dumps(payload, indent=1, sort_keys=True) + "\n")
    click.echo(f"wrote {len(records)} transcripts to {out}")


def main():
    try:
        cli(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except GenerationFailure as exc:
        exc.show()
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)


if __name__ == "__main__":
    main()
