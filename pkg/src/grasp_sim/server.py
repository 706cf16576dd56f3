"""WebSocket session server for the operator console.

One session per connection. Inbound messages land in a single-slot mailbox
(latest wins); a fixed-rate loop steps the session and broadcasts state
frames, then a result frame when the session finishes. The protocol is
plain JSON, documented in the frame builders of `teleop`.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from .teleop import (
    PHASE_DONE,
    PROTOCOL_FORMAT,
    TICK_SECONDS,
    OperatorInput,
    SessionConfig,
    new_session,
    serialize_result,
    serialize_state,
    session_step,
)

FRONTEND_DIST = Path(__file__).resolve().parents[2] / "frontend" / "dist"


def create_app(tick_seconds: float = TICK_SECONDS) -> FastAPI:
    app = FastAPI(title="grasp-sim teleop")

    @app.get("/healthz")
    async def healthz():
        return {"ok": True, "format": PROTOCOL_FORMAT}

    @app.websocket("/ws")
    async def ws_session(ws: WebSocket):
        await ws.accept()
        mailbox: dict = {"input": None}
        state = new_session(SessionConfig())
        running = True

        async def reader():
            nonlocal state, running
            try:
                while running:
                    raw = await ws.receive_text()
                    try:
                        msg = json.loads(raw)
                    except json.JSONDecodeError:
                        await ws.send_text(json.dumps(
                            {"type": "error", "error": "malformed JSON"}))
                        continue
                    if msg.get("type") == "input":
                        mailbox["input"] = OperatorInput(
                            vx=float(msg.get("vx", 0.0)),
                            vz=float(msg.get("vz", 0.0)),
                            grasp=bool(msg.get("grasp", False)),
                            timestamp_ms=int(msg.get("timestamp_ms", 0)),
                        )
                    elif msg.get("type") == "reset":
                        config = SessionConfig(
                            object_name=str(msg.get("object", "coin")),
                            gripper=str(msg.get("gripper", "f1")),
                            seed=int(msg.get("seed", 0)),
                        )
                        state = new_session(config)
                        mailbox["input"] = None
                    else:
                        await ws.send_text(json.dumps(
                            {"type": "error", "error": f"unknown type {msg.get('type')!r}"}))
            except WebSocketDisconnect:
                running = False
            except RuntimeError:
                running = False

        reader_task = asyncio.create_task(reader())
        try:
            sent_result = False
            while running:
                latest, mailbox["input"] = mailbox["input"], None
                state = session_step(state, latest)
                await ws.send_text(json.dumps(serialize_state(state), sort_keys=True))
                if state.phase == PHASE_DONE and not sent_result:
                    await ws.send_text(json.dumps(serialize_result(state), sort_keys=True))
                    sent_result = True
                await asyncio.sleep(tick_seconds)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            running = False
            reader_task.cancel()

    if FRONTEND_DIST.is_dir():
        app.mount("/", StaticFiles(directory=str(FRONTEND_DIST), html=True), name="console")
    else:
        @app.get("/")
        async def index():
            return HTMLResponse(
                "<h1>grasp-sim teleop</h1><p>No frontend build found; "
                "connect to <code>/ws</code> directly.</p>")

    return app


def serve(host: str = "127.0.0.1", port: int = 8765) -> None:
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port, log_level="warning")
