"""Local HTTP interface for interactive synthesis sessions.

Wraps the refinement protocol so a UI (or scripted client) can drive it:
create a session with schemas and one example, poll its status, answer
distinguishing-input queries, fetch the final program, and run
migrations with it.  Sessions live in memory; synthesis runs on a worker
thread and requests observe status snapshots, so create/answer return
promptly even when solving takes a while.

Endpoints: POST /sessions, GET /sessions/{id}, POST /sessions/{id}/answer,
GET /sessions/{id}/program, POST /sessions/{id}/migrate; static UI under /ui.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .datalog import Program, evaluate, print_program
from .errors import DlsynthError, SchemaMismatch, SynthesisFailure
from .instance import (
    FactBase,
    attr_positions,
    facts_to_instance,
    instance_to_facts,
    serialize_instance,
    validate_instance,
)
from .schema import Schema, parse_schema
from .synth import (
    Example,
    SynthesisOptions,
    SynthesisSession,
    _union_instances,
    build_validation_pool,
    find_distinguishing_input,
    find_second_program,
)

WORKER_GRACE_S = 0.2  # requests return "synthesizing" if work runs longer than this


class CreateSessionRequest(BaseModel):
    source_schema: dict
    target_schema: dict
    example: dict
    options: dict = {}


class AnswerRequest(BaseModel):
    output: dict


class MigrateRequest(BaseModel):
    instance: dict


@dataclass
class Session:
    id: str
    source: Schema
    target: Schema
    examples: list[Example]
    options: SynthesisOptions
    status: str = "synthesizing"  # synthesizing | awaiting_answer | done | failed
    error: str | None = None
    program: Program | None = None
    raw_program: Program | None = None
    second: Program | None = None
    pending_query: FactBase | None = None
    iterations: int = 0
    search_space: int = 0
    queries_asked: int = 0
    hole_assignment: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    worker: threading.Thread | None = None


def _query_payload(s: Schema, fb: FactBase) -> dict:
    """Distinguishing input as per-relation rows with attribute headers."""
    relations = {}
    for rel in s.record_attrs:
        facts = fb.get(rel, set())
        if not facts:
            continue
        pos = attr_positions(s, rel)
        attrs = [a for a in s.attrs(rel) if s.attr_defs[(rel, a)] in ("Int", "String")]
        rows = [[f[pos[a]] for a in attrs] for f in sorted(facts, key=repr)]
        relations[rel] = {"attributes": attrs, "rows": rows}
    return {"relations": relations}


def _refine(sess: Session) -> None:
    """One synthesis round: find a program, then look for an ambiguity to resolve."""
    try:
        core = SynthesisSession(sess.source, sess.target, sess.examples, sess.options)
        first = core.next_program()
        if first is None:
            raise SynthesisFailure("no program is consistent with the accumulated examples")
        program, model = first
        sess.iterations = core.iterations
        sess.search_space = _space(core)
        sess.raw_program = program
        sess.hole_assignment = [
            {
                "hole": h.id,
                "attribute": str(h.attr),
                "assigned": str(core.encoding.code_term[model[h.id]]),
            }
            for h in core.sketch.all_holes()
        ]
        simplified = core.verified_simplify(program)
        second = find_second_program(core, program)
        if second is None:
            sess.program = simplified
            sess.status = "done"
            return
        pool = build_validation_pool(
            sess.source, _union_instances(sess.source, [e.input for e in sess.examples])
        )
        fb = find_distinguishing_input(sess.source, sess.target, program, second[0], pool)
        if fb is None:
            sess.program = simplified
            sess.status = "done"
            return
        sess.program = simplified
        sess.second = core.verified_simplify(second[0])
        sess.pending_query = fb
        sess.status = "awaiting_answer"
    except DlsynthError as e:
        sess.status = "failed"
        sess.error = str(e)


def _space(core: SynthesisSession) -> int:
    from .sketch import search_space_size

    return search_space_size(core.sketch)


def _snapshot(sess: Session) -> dict:
    body: dict[str, Any] = {
        "id": sess.id,
        "status": sess.status,
        "examples": len(sess.examples),
        "iterations": sess.iterations,
        "search_space": sess.search_space,
        "queries_asked": sess.queries_asked,
    }
    if sess.error:
        body["error"] = sess.error
    if sess.status in ("awaiting_answer", "done") and sess.program is not None:
        body["program"] = print_program(sess.program)
    if sess.status == "awaiting_answer":
        body["second_program"] = print_program(sess.second)
        body["query"] = _query_payload(sess.source, sess.pending_query)
    return body


def create_app(ui_dir: str | None = None, audit_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="dlsynth session service")
    sessions: dict[str, Session] = {}

    def get_session(session_id: str) -> Session:
        if session_id not in sessions:
            raise HTTPException(status_code=404, detail="no such session")
        return sessions[session_id]

    def start_worker(sess: Session, fn) -> None:
        sess.status = "synthesizing"

        def run():
            fn()
            if sess.status == "done" and audit_dir:
                Path(audit_dir).mkdir(parents=True, exist_ok=True)
                (Path(audit_dir) / f"{sess.id}.json").write_text(
                    json.dumps(_snapshot(sess), indent=2)
                )

        sess.worker = threading.Thread(target=run, daemon=True)
        sess.worker.start()
        sess.worker.join(WORKER_GRACE_S)

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        try:
            source = parse_schema(json.dumps(req.source_schema))
            target = parse_schema(json.dumps(req.target_schema))
            if "input" not in req.example or "output" not in req.example:
                raise DlsynthError('example must be {"input": ..., "output": ...}')
            example = Example(req.example["input"], req.example["output"])
            validate_instance(source, example.input)
            validate_instance(target, example.output)
            opts = SynthesisOptions(**req.options)
        except (DlsynthError, TypeError) as e:
            raise HTTPException(status_code=400, detail=str(e)) from e
        sess = Session(
            id=uuid.uuid4().hex[:12],
            source=source,
            target=target,
            examples=[example],
            options=opts,
        )
        sessions[sess.id] = sess
        start_worker(sess, lambda: _refine(sess))
        return _snapshot(sess)

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return _snapshot(get_session(session_id))

    @app.post("/sessions/{session_id}/answer")
    def answer(session_id: str, req: AnswerRequest):
        sess = get_session(session_id)
        with sess.lock:
            if sess.status != "awaiting_answer":
                raise HTTPException(status_code=409, detail=f"session is {sess.status}")
            try:
                validate_instance(sess.target, req.output)
            except SchemaMismatch as e:
                raise HTTPException(status_code=400, detail=str(e)) from e
            query_input = facts_to_instance(sess.source, sess.pending_query)
            sess.examples.append(Example(query_input, req.output))
            sess.queries_asked += 1
            sess.pending_query = None
            sess.second = None
            start_worker(sess, lambda: _refine(sess))
            return _snapshot(sess)

    @app.get("/sessions/{session_id}/program")
    def program(session_id: str):
        sess = get_session(session_id)
        if sess.program is None:
            raise HTTPException(status_code=409, detail=f"session is {sess.status}")
        return {
            "text": print_program(sess.program),
            "raw_text": print_program(sess.raw_program) if sess.raw_program else None,
            "holes": sess.hole_assignment,
            "stats": {
                "iterations": sess.iterations,
                "search_space": sess.search_space,
                "examples": len(sess.examples),
                "queries_asked": sess.queries_asked,
            },
        }

    @app.post("/sessions/{session_id}/migrate")
    def migrate(session_id: str, req: MigrateRequest):
        sess = get_session(session_id)
        if sess.program is None or sess.status != "done":
            raise HTTPException(status_code=409, detail=f"session is {sess.status}")
        try:
            validate_instance(sess.source, req.instance)
        except SchemaMismatch as e:
            raise HTTPException(status_code=400, detail=str(e)) from e
        out_fb = evaluate(sess.program, instance_to_facts(sess.source, req.instance))
        migrated = facts_to_instance(sess.target, out_fb)
        return {"instance": json.loads(serialize_instance(sess.target, migrated))}

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

        @app.get("/")
        def index():
            return FileResponse(Path(ui_dir) / "index.html")

    return app


def serve(port: int = 8571, ui_dir: str | None = None, host: str = "127.0.0.1") -> None:
    """Run the service on loopback (local developer tool, no auth)."""
    import uvicorn

    uvicorn.run(create_app(ui_dir=ui_dir), host=host, port=port, log_level="warning")
