"""HTTP service endpoints and the thin-client CLI."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from homequest import text
from homequest.cli import cli
from homequest.env import EnvSession
from homequest.generator import generate_episode
from homequest.service.app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture(scope="module")
def episode_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("eps") / "ep.json"
    generate_episode(17, "v1").episode.save(path)
    return path


@pytest.fixture(scope="module")
def dataset_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("data")
    runner = CliRunner()
    res = runner.invoke(cli, ["generate", "--version", "v1", "--episodes", "4",
                              "--seed", "3", "--out", str(out)])
    assert res.exit_code == 0, res.output
    return out


class TestSessions:
    def test_session_lifecycle(self, client, episode_file):
        r = client.post("/sessions", json={"episode_path": str(episode_file)})
        assert r.status_code == 200
        sid = r.json()["session_id"]
        obs = r.json()["observation"]
        assert "Welcome to the world!" in obs

        vc = client.get(f"/sessions/{sid}/valid-commands").json()["commands"]
        assert "examine" in vc and any(c.startswith("move to ") for c in vc)

        step = client.post(f"/sessions/{sid}/step", json={"command": "examine"}).json()
        assert step["score_delta"] == 0 and step["done"] is False

        state = client.get(f"/sessions/{sid}").json()
        assert state["steps_taken"] == 1 and state["score"] == 0

        assert client.delete(f"/sessions/{sid}").json() == {"closed": True}
        assert client.get(f"/sessions/{sid}").status_code == 404

    def test_service_stream_matches_native_env(self, client, episode_file):
        from homequest.episode import EpisodeSpec
        ep = EpisodeSpec.load(episode_file)
        native = EnvSession(ep, "full")
        native_first = native.reset()
        r = client.post("/sessions", json={"episode_path": str(episode_file),
                                           "mode": "full"})
        sid = r.json()["session_id"]
        assert r.json()["observation"] == native_first
        commands = ["examine", "inventory"] + [
            text.render_command(a) for a in ep.expert_demo]
        for c in commands:
            nat = native.step(c)
            srv = client.post(f"/sessions/{sid}/step", json={"command": c}).json()
            assert srv["observation"] == nat.observation
            assert srv["score_delta"] == nat.score_delta
            assert srv["done"] == nat.done
            if nat.done:
                break
        client.delete(f"/sessions/{sid}")

    def test_step_after_done_conflicts(self, client, episode_file):
        r = client.post("/sessions", json={"episode_path": str(episode_file)})
        sid = r.json()["session_id"]
        from homequest.episode import EpisodeSpec
        ep = EpisodeSpec.load(episode_file)
        for a in ep.expert_demo:
            client.post(f"/sessions/{sid}/step", json={"command": text.render_command(a)})
        resp = client.post(f"/sessions/{sid}/step", json={"command": "examine"})
        assert resp.status_code == 409
        client.delete(f"/sessions/{sid}")

    def test_malformed_requests(self, client, episode_file):
        assert client.post("/sessions", json={}).status_code == 422
        assert client.post("/sessions", json={
            "episode_path": "/nonexistent.json"}).status_code == 404

    def test_health(self, client):
        data = client.get("/health").json()
        assert data["status"] == "ok"


class TestBulkEndpoints:
    def test_evaluate_endpoint(self, client, dataset_dir):
        r = client.post("/evaluate", json={"dataset_dir": str(dataset_dir),
                                           "agent": "random", "seed": 1})
        assert r.status_code == 200
        report = r.json()["report"]
        assert report["agent"] == "random"
        assert sum(rep["episodes"] for rep in report["per_level"].values()) == 4

    def test_stats_endpoint(self, client, dataset_dir):
        r = client.post("/stats", json={"dataset_dir": str(dataset_dir)})
        stats = r.json()["stats"]
        assert stats["episodes"] == 4
        assert stats["scene"]["mean_objects"] > 150

    def test_inspect_endpoint(self, client, dataset_dir):
        path = dataset_dir / "episode_000000.json"
        r = client.post("/inspect", json={"episode_path": str(path)})
        assert r.status_code == 200
        assert r.json()["summary"]["hardness"] in (1, 2, 3, 4)


class TestCli:
    def test_play_scripted_transcript(self, episode_file):
        from homequest.episode import EpisodeSpec
        ep = EpisodeSpec.load(episode_file)
        commands = [text.render_command(a) for a in ep.expert_demo] + ["quit"]
        runner = CliRunner()
        res = runner.invoke(cli, ["play", str(episode_file)],
                            input="\n".join(commands) + "\n")
        assert res.exit_code == 0, res.output
        assert "Welcome to the world!" in res.output
        assert f"score={100 - len(ep.expert_demo)}" in res.output
        assert "success=True" in res.output

    def test_play_partial_hides_unvisited(self, episode_file):
        from homequest.episode import EpisodeSpec
        ep = EpisodeSpec.load(episode_file)
        runner = CliRunner()
        res = runner.invoke(cli, ["play", str(episode_file), "--mode", "partial"],
                            input="quit\n")
        assert res.exit_code == 0
        sess = EnvSession(ep, "partial")
        sess.reset()
        hidden = [o for o in sess.state.universe.movables
                  if not sess.state.accessible("robot", o)
                  and sess.state.pos.get(o, ("", ""))[1] != "floor"]
        pre_quit = res.output.split("> ")[0]
        for obj in hidden[:10]:
            assert obj not in pre_quit

    def test_eval_cli_writes_json(self, dataset_dir, tmp_path):
        out = tmp_path / "report.json"
        runner = CliRunner()
        res = runner.invoke(cli, ["eval", "--data", str(dataset_dir),
                                  "--agent", "heuristic", "--json-out", str(out)])
        assert res.exit_code == 0, res.output
        report = json.loads(out.read_text())
        assert report["agent"] == "heuristic"

    def test_stats_cli(self, dataset_dir):
        runner = CliRunner()
        res = runner.invoke(cli, ["stats", "--data", str(dataset_dir)])
        assert res.exit_code == 0
        assert "mean_trajectory" in res.output

    def test_generate_reproducible(self, tmp_path):
        runner = CliRunner()
        for d in ("a", "b"):
            res = runner.invoke(cli, ["generate", "--version", "v1", "--episodes", "2",
                                      "--seed", "11", "--out", str(tmp_path / d)])
            assert res.exit_code == 0, res.output
        for name in ("episode_000000.json", "episode_000001.json", "manifest.jsonl"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_usage_error_exit_code(self):
        import subprocess, sys
        r = subprocess.run([sys.executable, "-m", "homequest.cli", "generate",
                            "--episodes", "1"], capture_output=True, text=True)
        assert r.returncode == 1

    def test_transcripts_command(self, dataset_dir, tmp_path):
        runner = CliRunner()
        out = tmp_path / "tr"
        res = runner.invoke(cli, ["transcripts", "--data", str(dataset_dir),
                                  "--out", str(out), "--episodes", "2"])
        assert res.exit_code == 0, res.output
        files = sorted(out.glob("transcript_*.json"))
        assert len(files) == 2
        payload = json.loads(files[0].read_text())
        assert payload["steps"] and "observation" in payload["steps"][0]
