"""Teleoperation sessions: phase machine, determinism, record/replay, server."""

import json
from dataclasses import asdict

import pytest

from grasp_sim.harness import TrialConfig, run_trial
from grasp_sim.objects import load_suite, suite_by_name
from grasp_sim.teleop import (
    PHASE_DONE,
    PHASE_FREE,
    PHASE_LIFT,
    PHASE_PRIMITIVE,
    OperatorInput,
    SessionConfig,
    new_session,
    record_session,
    replay_session,
    serialize_result,
    serialize_state,
    session_step,
    state_digest,
)

SUITE = suite_by_name(load_suite())


def run_until_done(state, inputs, cap=400):
    for i in inputs:
        state = session_step(state, i)
        if state.phase == PHASE_DONE:
            break
    else:
        for _ in range(cap):
            state = session_step(state, None)
            if state.phase == PHASE_DONE:
                break
    return state


class TestSessionMachine:
    def test_idle_tick_only_advances_time(self):
        s0 = new_session(SessionConfig())
        s1 = session_step(s0, None)
        assert s1.phase == PHASE_FREE
        assert s1.tick == 1
        assert s1.world.hand.tip_frame.x == s0.world.hand.tip_frame.x
        assert s1.world.time > s0.world.time

    def test_velocity_clamped(self):
        s0 = new_session(SessionConfig())
        s1 = session_step(s0, OperatorInput(vx=99.0, vz=0.0))
        moved = s1.world.hand.tip_frame.x - s0.world.hand.tip_frame.x
        assert moved <= s0.config.max_speed * 0.033 + 1e-9

    def test_trigger_starts_primitive_and_second_trigger_ignored(self):
        s = new_session(SessionConfig())
        s = session_step(s, OperatorInput(grasp=True))
        assert s.phase == PHASE_PRIMITIVE
        before = s.step_index
        s2 = session_step(s, OperatorInput(grasp=True))
        assert s2.phase in (PHASE_PRIMITIVE, PHASE_LIFT)
        assert s2.step_index > before  # primitive kept running, no restart

    def test_phases_in_order(self):
        s = new_session(SessionConfig())
        phases = [s.phase]
        s = session_step(s, OperatorInput(grasp=True))
        phases.append(s.phase)
        for _ in range(400):
            s = session_step(s, None)
            if s.phase != phases[-1]:
                phases.append(s.phase)
            if s.phase == PHASE_DONE:
                break
        assert phases == [PHASE_FREE, PHASE_PRIMITIVE, PHASE_LIFT, PHASE_DONE]

    def test_done_session_result_matches_harness_trial(self):
        """Server path and batch path produce the identical result."""
        s = run_until_done(new_session(SessionConfig(object_name="coin", seed=5)),
                           [OperatorInput(grasp=True)])
        assert s.result is not None and s.result.success
        trial = run_trial(
            TrialConfig(gripper="f1", n_trials=1, seed=5,
                        alignment_error_deg=(0.0, 0.0)),
            0, SUITE["coin"])
        assert asdict(s.result) == asdict(trial)


class TestSerialization:
    def test_initial_frame_contents(self):
        s = session_step(new_session(SessionConfig()), None)
        frame = serialize_state(s)
        assert frame["type"] == "state"
        assert frame["phase"] == PHASE_FREE
        assert frame["format"] == 1
        assert isinstance(frame["object_mm"], list)

    def test_frame_under_size_budget(self):
        s = run_until_done(new_session(SessionConfig(object_name="banana")),
                           [OperatorInput(grasp=True)])
        frame = serialize_state(s)
        assert len(json.dumps(frame).encode()) <= 8192

    def test_result_frame(self):
        s = run_until_done(new_session(SessionConfig(object_name="coin")),
                           [OperatorInput(grasp=True)])
        res = serialize_result(s)
        assert res["type"] == "result"
        assert res["success"] is True
        assert res["classification"] == "pinch"


class TestRecordReplay:
    def test_record_then_replay_bit_identical(self, tmp_path):
        path = tmp_path / "session.jsonl"
        inputs = [None, OperatorInput(vx=0.02), None, OperatorInput(grasp=True)] + [None] * 360
        frames, state = record_session(
            SessionConfig(object_name="washer", seed=9), inputs, path)
        assert state.phase == PHASE_DONE
        replay_frames, replay_state, diverged = replay_session(path)
        assert diverged == []
        assert len(replay_frames) == len(frames)
        assert [state_digest(f) for f in replay_frames] == \
            [state_digest(f) for f in frames]
        assert asdict(replay_state.result) == asdict(state.result)

    def test_empty_log_rejected(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        from grasp_sim.geometry import ValidationError

        with pytest.raises(ValidationError):
            replay_session(path)

    def test_version_mismatch_rejected(self, tmp_path):
        path = tmp_path / "future.jsonl"
        path.write_text('{"format": 99, "kind": "session_log", "object": "coin",'
                        ' "gripper": "f1", "seed": 0}\n')
        from grasp_sim.geometry import ValidationError

        with pytest.raises(ValidationError):
            replay_session(path)

    def test_altered_seed_detected_as_divergence(self, tmp_path):
        path = tmp_path / "session.jsonl"
        record_session(SessionConfig(object_name="coin", seed=1),
                       [OperatorInput(grasp=True)] + [None] * 360, path)
        # Tamper: claim a different object so the replayed stream differs.
        lines = path.read_text().splitlines()
        header = json.loads(lines[0])
        header["object"] = "washer"
        path.write_text("\n".join([json.dumps(header)] + lines[1:]) + "\n")
        _, _, diverged = replay_session(path)
        assert diverged


class TestServer:
    @pytest.fixture()
    def client(self):
        from fastapi.testclient import TestClient

        from grasp_sim.server import create_app

        return TestClient(create_app(tick_seconds=0.0))

    def test_healthz(self, client):
        r = client.get("/healthz")
        assert r.status_code == 200
        assert r.json()["ok"] is True

    def test_ws_streams_state_frames(self, client):
        with client.websocket_connect("/ws") as ws:
            frame = ws.receive_json()
            assert frame["type"] == "state"
            assert frame["phase"] == PHASE_FREE

    def test_ws_reset_and_input(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_text(json.dumps({"type": "reset", "object": "washer",
                                     "gripper": "f1", "seed": 4}))
            ws.send_text(json.dumps({"type": "input", "vx": 0.01, "vz": 0.0,
                                     "grasp": False}))
            for _ in range(40):
                frame = ws.receive_json()
                if frame.get("type") == "state" and frame["tick"] >= 3:
                    break
            assert frame["type"] == "state"

    def test_ws_malformed_json_reports_error(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_text("{not json")
            for _ in range(40):
                msg = ws.receive_json()
                if msg.get("type") == "error":
                    break
            assert msg["type"] == "error"


class TestCrossComponentFixture:
    def test_recorded_result_matches_frozen_fixture(self):
        """The exact result bytes pinned by the console's cross-check."""
        from pathlib import Path

        fixture = json.loads(
            (Path(__file__).parent / "fixtures_coin_seed5_result.json").read_text())
        state = run_until_done(new_session(SessionConfig(object_name="coin", seed=5)),
                               [OperatorInput(grasp=True)])
        assert serialize_result(state) == fixture
