"""HTTP session service for live (human-driven) sessions.

Plain JSON over HTTP plus one server-sent-events stream per session. Each
session wraps one engine; all mutation goes through the per-session lock,
so concurrent posts observe a single total order and transcript sequence
numbers stay gapless. Sessions live in memory only; with ``--persist`` the
committed memory is flushed to ``<persist>/<session_id>.memory.json`` when
a session reaches Done.

Endpoints:
    POST /sessions                      create + start a session
    POST /sessions/{id}/frames          buffer FaceFrames (3 Hz slider samples)
    POST /sessions/{id}/events          apply one engine event
    GET  /sessions/{id}/state           snapshot
    GET  /sessions/{id}/stream?from=N   SSE: transcript records with seq > N
    GET  /sessions/{id}/memory          committed associations (memory format)
"""

from __future__ import annotations

import asyncio
import json
import logging
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field

from . import engine as eng
from .core import classify_zone
from .errors import ConfigError, ProtocolError
from .memory import AffectiveMemory, record_to_dict
from .perception import FaceFrame, Lexicon, Utterance, default_lexicon, lexicon_valence
from .scenario import default_session_config, session_config_from_dict

logger = logging.getLogger(__name__)


class FrameBody(BaseModel):
    timestamp_ms: int
    valence: float
    arousal: float


class CreateSessionBody(BaseModel):
    subject_id: str = Field(min_length=1)
    config: dict[str, Any] | None = None


class PostFramesBody(BaseModel):
    frames: list[FrameBody]


class PostEventBody(BaseModel):
    type: str
    frames: list[FrameBody] | None = None
    text: str | None = None
    rating: int | None = None
    top_hits: int | None = None
    bottom_hits: int | None = None


@dataclass
class Session:
    session_id: str
    subject_id: str
    created_at: str
    cfg: eng.SessionConfig
    state: eng.SessionState
    deps: eng.EngineDeps
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    changed: asyncio.Condition = field(default_factory=asyncio.Condition)
    frame_buffer: list[FaceFrame] = field(default_factory=list)


def _to_frames(bodies: list[FrameBody]) -> tuple[FaceFrame, ...]:
    frames = []
    for b in bodies:
        frame = FaceFrame(timestamp_ms=b.timestamp_ms, valence=b.valence, arousal=b.arousal)
        if (frame.valence, frame.arousal) != (b.valence, b.arousal):
            logger.warning("frame values clamped into [-1, 1]")
        frames.append(frame)
    return tuple(frames)


def _scores_dict(scores) -> dict | None:
    if scores is None:
        return None
    return {"vision": scores.vision, "language": scores.language}


def snapshot(session: Session) -> dict:
    state, cfg = session.state, session.cfg
    current = cfg.stimuli[state.current_index]
    zone = (
        classify_zone(state.initial_scores, cfg.zone_config).value
        if state.initial_scores is not None
        else None
    )
    observation_zone = (
        classify_zone(state.last_observation, cfg.zone_config).value
        if state.last_observation is not None
        else None
    )
    return {
        "session_id": session.session_id,
        "subject_id": state.subject_id,
        "created_at": session.created_at,
        "phase": state.phase.value,
        "current_index": state.current_index,
        "stimulus_count": len(cfg.stimuli),
        "current_stimulus": {
            "id": current.id,
            "category": current.category.value,
            "duration_ms": current.duration_ms,
        },
        "extension_count": state.extension_count,
        "max_extensions": cfg.max_extensions,
        "top_k": cfg.top_k,
        "zone_config": {
            "theta_vision": cfg.zone_config.theta_vision,
            "theta_language": cfg.zone_config.theta_language,
        },
        "initial_scores": _scores_dict(state.initial_scores),
        "initial_zone": zone,
        "last_observation": _scores_dict(state.last_observation),
        "observation_zone": observation_zone,
        "rating": state.rating,
        "committed": [
            record_to_dict(r) for r in session.deps.memory.query_subject(state.subject_id)
        ],
        "last_seq": session.state.next_seq - 1,
        "done": state.phase is eng.Phase.DONE,
    }


def create_app(
    lexicon: Lexicon | None = None,
    persist_dir: str | None = None,
    allow_origins: list[str] | None = None,
) -> FastAPI:
    lexicon = lexicon or default_lexicon()
    app = FastAPI(title="affectspace session service")
    if allow_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=allow_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    @app.post("/sessions", status_code=201)
    async def create_session(body: CreateSessionBody) -> JSONResponse:
        if body.config:
            base = default_session_config()
            overrides = dict(body.config)
            if "stimuli" not in overrides:
                overrides["stimuli"] = [
                    {"id": s.id, "category": s.category.value, "duration_ms": s.duration_ms}
                    for s in base.stimuli
                ]
            try:
                cfg = session_config_from_dict(overrides, source="config override")
            except ConfigError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
        else:
            cfg = default_session_config()

        memory = AffectiveMemory()
        deps = eng.EngineDeps(
            language_valence=lambda u: lexicon_valence(u, lexicon), memory=memory
        )
        state, actions = eng.start_session(body.subject_id, cfg)
        session = Session(
            session_id=uuid.uuid4().hex,
            subject_id=body.subject_id,
            created_at=datetime.now(timezone.utc).isoformat(),
            cfg=cfg,
            state=state,
            deps=deps,
        )
        sessions[session.session_id] = session
        return JSONResponse(
            status_code=201,
            content={
                "session_id": session.session_id,
                "actions": [eng.encode_action(a) for a in actions],
                "state": snapshot(session),
            },
        )

    @app.post("/sessions/{session_id}/frames")
    async def post_frames(session_id: str, body: PostFramesBody) -> dict:
        session = get_session(session_id)
        if session.state.phase is eng.Phase.DONE:
            raise HTTPException(status_code=410, detail="session is done")
        async with session.lock:
            session.frame_buffer.extend(_to_frames(body.frames))
            buffered = len(session.frame_buffer)
        return {"buffered": buffered}

    @app.post("/sessions/{session_id}/events")
    async def post_event(session_id: str, body: PostEventBody) -> dict:
        session = get_session(session_id)
        async with session.lock:
            state = session.state
            if state.phase is eng.Phase.DONE:
                raise HTTPException(status_code=410, detail="session is done")
            try:
                event = _build_event(body, session)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            try:
                _, actions = eng.advance(state, event, session.cfg, session.deps)
            except ProtocolError as exc:
                raise HTTPException(
                    status_code=409,
                    detail={"error": str(exc), "expected": list(exc.expected)},
                ) from exc
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            session.frame_buffer.clear()
            if state.phase is eng.Phase.DONE and persist_dir:
                path = Path(persist_dir)
                path.mkdir(parents=True, exist_ok=True)
                session.deps.memory.save(path / f"{session.session_id}.memory.json")
        async with session.changed:
            session.changed.notify_all()
        return {
            "actions": [eng.encode_action(a) for a in actions],
            "state": snapshot(session),
        }

    @app.get("/sessions/{session_id}/state")
    async def get_state(session_id: str) -> dict:
        return snapshot(get_session(session_id))

    @app.get("/sessions/{session_id}/memory")
    async def get_memory(session_id: str) -> dict:
        return get_session(session_id).deps.memory.to_json_dict()

    @app.get("/sessions/{session_id}/stream")
    async def stream(
        session_id: str, request: Request, from_seq: int = Query(0, alias="from")
    ) -> StreamingResponse:
        session = get_session(session_id)

        async def gen():
            last = from_seq
            while True:
                # Snapshot under the loop's single-threaded model; transcript
                # is append-only so slicing by seq is race-free.
                records = [r for r in session.state.transcript if r["seq"] > last]
                for record in records:
                    last = record["seq"]
                    yield f"id: {record['seq']}\nevent: record\ndata: {json.dumps(record, sort_keys=True)}\n\n"
                if session.state.phase is eng.Phase.DONE:
                    yield "event: end\ndata: {}\n\n"
                    return
                if await request.is_disconnected():
                    return
                async with session.changed:
                    try:
                        await asyncio.wait_for(session.changed.wait(), timeout=1.0)
                    except asyncio.TimeoutError:
                        pass

        return StreamingResponse(gen(), media_type="text/event-stream")

    return app


def _build_event(body: PostEventBody, session: Session) -> eng.EngineEvent:
    kind = body.type
    if kind == "stimulus_finished":
        frames = _to_frames(body.frames) if body.frames else tuple(session.frame_buffer)
        return eng.StimulusFinished(frames=frames)
    if kind == "utterance_received":
        if body.text is None:
            raise ValueError("utterance_received requires 'text'")
        if body.frames is not None:
            frames = _to_frames(body.frames)
        elif session.state.phase is eng.Phase.CLARIFYING:
            frames = tuple(session.frame_buffer)
        else:
            frames = ()
        return eng.UtteranceReceived(Utterance(text=body.text, synchronous_frames=frames))
    if kind == "rating_received":
        if body.rating is None:
            raise ValueError("rating_received requires 'rating'")
        return eng.RatingReceived(rating=body.rating)
    if kind == "playback_finished":
        return eng.PlaybackFinished()
    if kind == "final_feedback":
        if body.top_hits is None or body.bottom_hits is None:
            raise ValueError("final_feedback requires 'top_hits' and 'bottom_hits'")
        return eng.FinalFeedback(top_hits=body.top_hits, bottom_hits=body.bottom_hits)
    raise ValueError(f"unknown event type {kind!r}")
