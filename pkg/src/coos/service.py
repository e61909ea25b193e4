"""HTTP session service binding the slow and fast loops.

One logical writer per session: every mutation appends to that session's
event log under a per-session lock and re-folds the snapshot, so all
requests observe a single total order of events. Scenario sets are loaded
once and shared read-only. Bodies are validated by hand so domain errors
come back as 400 with a structured ``{code, message, detail}`` body;
unknown ids give 404 and illegal lifecycle moves give 409.

With a store directory configured, each session's events are appended to
``<dir>/<session_id>.events.jsonl`` and a snapshot document is refreshed
every few events; on start the logs are replayed, which by construction
reproduces identical state.
"""

from __future__ import annotations

import itertools
import json
import os
import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import consensus as consensus_mod
from . import pclm
from .energy import Scenario, load_scenarios, normalize_set, scenario_to_dict
from .errors import DomainError
from .intent import diagnose, intent_to_dict
from .session import (
    ConflictError,
    GENERATION_SOURCE,
    NotFoundError,
    SessionEvent,
    SessionSnapshot,
    TelemetryWindow,
    check_transition,
    evaluate_drift,
    fold_events,
    next_intervention,
)
from .ternary import AxisConstraint, TernaryPoint, embed

SNAPSHOT_EVERY = 25
DEFAULT_SET_NAME = "default"
DEFAULT_BASELINE_KWH = 0.5


@dataclass
class SessionRecord:
    events: list[SessionEvent] = field(default_factory=list)
    snapshot: SessionSnapshot = field(default_factory=SessionSnapshot)
    lock: threading.RLock = field(default_factory=threading.RLock)
    elicitations: dict[str, pclm.ElicitationSession] = field(default_factory=dict)
    participant_counter: "itertools.count[int]" = field(default_factory=lambda: itertools.count(1))


class SessionStore:
    """All service state: scenario sets, sessions, telemetry, persistence."""

    def __init__(self, store_dir: Optional[str] = None):
        self.store_dir = store_dir
        self.scenario_sets: dict[str, list[Scenario]] = {}
        self.sessions: dict[str, SessionRecord] = {}
        self.window = TelemetryWindow()
        self.default_baseline_kwh = DEFAULT_BASELINE_KWH
        self._counter = itertools.count(1)
        self._global_lock = threading.Lock()
        if store_dir:
            os.makedirs(store_dir, exist_ok=True)
            self._replay_store()

    # -- scenario sets ----------------------------------------------------

    def register_scenarios(self, name: str, scenarios: list[Scenario]) -> None:
        if not scenarios:
            raise DomainError("scenario set is empty", code="empty_input")
        if any(s.point is None for s in scenarios):
            scenarios = normalize_set(scenarios)
        self.scenario_sets[name] = scenarios

    def load_scenario_file(self, path: str, name: Optional[str] = None) -> str:
        scenarios = load_scenarios(path)
        key = name or path
        self.register_scenarios(key, scenarios)
        return key

    def scenarios_for(self, snapshot: SessionSnapshot) -> list[Scenario]:
        key = snapshot.scenario_set
        if key not in self.scenario_sets:
            raise NotFoundError(f"unknown scenario set {key!r}")
        return self.scenario_sets[key]

    # -- sessions ----------------------------------------------------------

    def create_session(self, name: str, scenario_set: Optional[str]) -> str:
        key = scenario_set or DEFAULT_SET_NAME
        if key not in self.scenario_sets:
            if scenario_set and os.path.exists(scenario_set):
                key = self.load_scenario_file(scenario_set)
            else:
                raise NotFoundError(f"unknown scenario set {key!r}")
        with self._global_lock:
            sid = f"s{next(self._counter)}"
        record = SessionRecord()
        self.sessions[sid] = record
        self.append_event(
            sid, "session_created", {"session_id": sid, "name": name, "scenario_set": key}
        )
        return sid

    def get(self, session_id: str) -> SessionRecord:
        record = self.sessions.get(session_id)
        if record is None:
            raise NotFoundError(f"unknown session {session_id!r}")
        return record

    def append_event(self, session_id: str, type_: str, payload: dict) -> SessionSnapshot:
        record = self.get(session_id)
        with record.lock:
            event = SessionEvent(seq=len(record.events), type=type_, payload=payload)
            record.events.append(event)
            record.snapshot = fold_events(record.events)
            self._persist(session_id, record, event)
            return record.snapshot

    # -- persistence -------------------------------------------------------

    def _event_log_path(self, session_id: str) -> str:
        return os.path.join(self.store_dir or "", f"{session_id}.events.jsonl")

    def _persist(self, session_id: str, record: SessionRecord, event: SessionEvent) -> None:
        if not self.store_dir:
            return
        with open(self._event_log_path(session_id), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event.to_dict(), sort_keys=True, separators=(",", ":")) + "\n")
        if len(record.events) % SNAPSHOT_EVERY == 0:
            path = os.path.join(self.store_dir, f"{session_id}.snapshot.json")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(record.snapshot.to_canonical_json() + "\n")

    def _replay_store(self) -> None:
        assert self.store_dir is not None
        max_sid = 0
        for fname in sorted(os.listdir(self.store_dir)):
            if not fname.endswith(".events.jsonl"):
                continue
            sid = fname[: -len(".events.jsonl")]
            events = []
            with open(os.path.join(self.store_dir, fname), "r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        events.append(SessionEvent.from_dict(json.loads(line)))
            record = SessionRecord(events=events, snapshot=fold_events(events))
            record.participant_counter = itertools.count(len(record.snapshot.participants) + 1)
            self.sessions[sid] = record
            if sid.startswith("s") and sid[1:].isdigit():
                max_sid = max(max_sid, int(sid[1:]))
        self._counter = itertools.count(max_sid + 1)

    # -- elicitation -------------------------------------------------------

    def elicitation(self, session_id: str, participant_id: str) -> pclm.ElicitationSession:
        record = self.get(session_id)
        snapshot = record.snapshot
        if participant_id not in snapshot.participants:
            raise NotFoundError(f"unknown participant {participant_id!r}")
        scenarios = self.scenarios_for(snapshot)
        es = record.elicitations.get(participant_id)
        logged = snapshot.responses.get(participant_id, [])
        if es is None:
            es = pclm.ElicitationSession(participant_id, scenarios)
            record.elicitations[participant_id] = es
        if es.question_count < len(logged):
            es.replay(
                pclm.ComparisonResponse(
                    question_id=doc["question_id"],
                    scenario_a_id=doc["scenario_a_id"],
                    scenario_b_id=doc["scenario_b_id"],
                    winner=doc["winner"],
                )
                for doc in logged[es.question_count :]
            )
        return es


def _error_response(status: int, code: str, message: str, detail: object = None) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"code": code, "message": message, "detail": detail}
    )


def _require(body: dict, key: str) -> object:
    if not isinstance(body, dict) or key not in body:
        raise DomainError(f"missing field {key!r}", code="missing_field")
    return body[key]


def _point_doc(point: TernaryPoint) -> dict:
    return {"point": list(point.as_tuple()), "xy": list(embed(point))}


def _scenario_choice_doc(s: Scenario) -> dict:
    doc = {
        "scenario_id": s.id,
        "raw": {
            "social": s.social,
            "environmental": s.environmental,
            "economic_cost": s.economic_cost,
        },
        "generation_mix": list(s.generation_mix),
    }
    if s.normalized is not None:
        doc["normalized"] = list(s.normalized)
    if s.point is not None:
        doc["point"] = list(s.point.as_tuple())
        doc["point_xy"] = list(embed(s.point))
    return doc


def create_app(store: Optional[SessionStore] = None) -> FastAPI:
    store = store or SessionStore()
    app = FastAPI(title="coos session service", docs_url=None, redoc_url=None)
    app.state.store = store
    # the browser frontend is served from a different origin than the API
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(NotFoundError)
    async def _nf(request: Request, exc: NotFoundError):
        return _error_response(404, exc.code, str(exc), exc.detail)

    @app.exception_handler(ConflictError)
    async def _cf(request: Request, exc: ConflictError):
        return _error_response(409, exc.code, str(exc), exc.detail)

    @app.exception_handler(DomainError)
    async def _de(request: Request, exc: DomainError):
        return _error_response(400, exc.code, str(exc), exc.detail)

    def stakeholder_points(session_id: str) -> dict[str, TernaryPoint]:
        record = store.get(session_id)
        points: dict[str, TernaryPoint] = {}
        with record.lock:
            for pid, info in record.snapshot.participants.items():
                if info["role"] != "stakeholder":
                    continue
                es = store.elicitation(session_id, pid)
                points[pid] = es.estimate().map_estimate
        return points

    def consensus_payload(
        session_id: str, dims_total: int, dims_respected: int
    ) -> dict:
        record = store.get(session_id)
        with record.lock:
            points = stakeholder_points(session_id)
            if not points:
                raise DomainError("session has no stakeholder participants", code="empty_input")
            groups = diagnose(points)
            geometry = consensus_mod.build_geometry(groups)
            for c in record.snapshot.constraints:
                geometry = consensus_mod.narrow(
                    geometry, AxisConstraint(axis=c["axis"], kind=c["kind"], value=c["value"])
                )
            scenarios = store.scenarios_for(record.snapshot)
            social_choice = None
            if len(groups) >= 2:
                social_choice = consensus_mod.positionality_choice(
                    groups[0], groups[1], dims_total, dims_respected, scenarios
                )
            payload = {
                "session_id": session_id,
                "geometry": consensus_mod.geometry_to_dict(geometry),
                "social_choice": consensus_mod.choice_to_dict(social_choice)
                if social_choice
                else None,
                "dims_total": dims_total,
                "dims_minority_respected": dims_respected,
            }
            return payload

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await request.json()
        name = str(_require(body, "name"))
        scenario_set = body.get("scenario_set")
        sid = store.create_session(name, scenario_set)
        return {"session_id": sid}

    @app.get("/sessions/{sid}")
    async def get_session(sid: str):
        record = store.get(sid)
        with record.lock:
            snap = record.snapshot
            return {
                "session_id": snap.session_id,
                "name": snap.name,
                "scenario_set": snap.scenario_set,
                "phase": snap.phase,
                "participants": [
                    {"participant_id": pid, **info} for pid, info in snap.participants.items()
                ],
                "agreed_scenario_id": snap.agreed_scenario_id,
                "constraints": snap.constraints,
                "event_count": snap.event_count,
            }

    @app.post("/sessions/{sid}/advance")
    async def advance(sid: str, request: Request):
        body = await request.json()
        to = str(_require(body, "to"))
        actor_id = str(_require(body, "actor_id"))
        record = store.get(sid)
        with record.lock:
            snap = record.snapshot
            actor = snap.participants.get(actor_id)
            if actor is None:
                raise NotFoundError(f"unknown participant {actor_id!r}")
            if actor["role"] != "facilitator":
                raise ConflictError(
                    f"participant {actor_id} is not a facilitator", code="forbidden_role"
                )
            check_transition(snap.phase, to)
            payload = {"from": snap.phase, "to": to, "actor_id": actor_id}
            if to == "ConsensusAchieved":
                agreed = body.get("agreed_scenario_id")
                if agreed is None:
                    raise ConflictError(
                        "ConsensusAchieved requires an agreed_scenario_id",
                        code="missing_agreed_scenario",
                    )
                scenarios = store.scenarios_for(snap)
                if int(agreed) not in {s.id for s in scenarios}:
                    raise NotFoundError(f"unknown scenario id {agreed}")
                payload["agreed_scenario_id"] = int(agreed)
            new_snap = store.append_event(sid, "advanced", payload)
            return {"session_id": sid, "phase": new_snap.phase}

    @app.post("/sessions/{sid}/participants")
    async def add_participant(sid: str, request: Request):
        body = await request.json()
        display_name = str(_require(body, "display_name"))
        role = str(_require(body, "role"))
        if role not in ("facilitator", "stakeholder"):
            raise DomainError(f"role must be facilitator or stakeholder, got {role!r}", code="bad_role")
        record = store.get(sid)
        with record.lock:
            if record.snapshot.phase not in ("Convening", "RolesAssigned"):
                raise ConflictError(
                    f"participants can only join during Convening or RolesAssigned, "
                    f"not {record.snapshot.phase}",
                    code="wrong_phase",
                )
            pid = f"p{next(record.participant_counter)}"
            store.append_event(
                sid,
                "participant_added",
                {"participant_id": pid, "display_name": display_name, "role": role},
            )
            return {"participant_id": pid}

    @app.get("/sessions/{sid}/participants/{pid}/question")
    async def next_question(sid: str, pid: str):
        record = store.get(sid)
        with record.lock:
            if record.snapshot.phase != "Facilitating":
                raise ConflictError(
                    f"questions are only served while Facilitating, not {record.snapshot.phase}",
                    code="wrong_phase",
                )
            es = store.elicitation(sid, pid)
            est = es.estimate()
            pair = es.next_question()
            if pair is None:
                return {
                    "done": True,
                    "asked_count": es.question_count,
                    "converged": est.converged,
                }
            scenarios = {s.id: s for s in store.scenarios_for(record.snapshot)}
            return {
                "done": False,
                "question_id": es.next_question_id(),
                "choice_a": _scenario_choice_doc(scenarios[pair[0]]),
                "choice_b": _scenario_choice_doc(scenarios[pair[1]]),
                "asked_count": es.question_count,
                "converged": est.converged,
            }

    @app.post("/sessions/{sid}/participants/{pid}/question/{qid}/answer")
    async def answer(sid: str, pid: str, qid: str, request: Request):
        body = await request.json()
        winner = str(_require(body, "winner"))
        if winner not in ("A", "B"):
            raise DomainError(f"winner must be 'A' or 'B', got {winner!r}", code="bad_winner")
        record = store.get(sid)
        with record.lock:
            if record.snapshot.phase != "Facilitating":
                raise ConflictError(
                    f"answers are only accepted while Facilitating, not {record.snapshot.phase}",
                    code="wrong_phase",
                )
            es = store.elicitation(sid, pid)
            logged = record.snapshot.responses.get(pid, [])
            for doc in logged:
                if doc["question_id"] == qid:
                    if doc["winner"] == winner:
                        return {"status": "duplicate", "question_id": qid}
                    raise ConflictError(
                        f"question {qid} already answered with {doc['winner']}",
                        code="conflicting_answer",
                    )
            if qid != es.next_question_id():
                raise NotFoundError(f"unknown question {qid!r}")
            pair = es.next_question()
            if pair is None:
                raise ConflictError("question pool exhausted", code="pool_exhausted")
            response = es.record_answer(winner)
            store.append_event(
                sid,
                "answer_recorded",
                {
                    "participant_id": pid,
                    "question_id": response.question_id,
                    "scenario_a_id": response.scenario_a_id,
                    "scenario_b_id": response.scenario_b_id,
                    "winner": winner,
                },
            )
            est = es.estimate()
            return {
                "status": "recorded",
                "question_id": response.question_id,
                "asked_count": es.question_count,
                "converged": est.converged,
            }

    @app.get("/sessions/{sid}/participants/{pid}/preference")
    async def preference(sid: str, pid: str):
        record = store.get(sid)
        with record.lock:
            es = store.elicitation(sid, pid)
            est = es.estimate()
            return {
                "participant_id": pid,
                "map_estimate": list(est.map_estimate.as_tuple()),
                "map_xy": list(embed(est.map_estimate)),
                "credible_region_diameter": est.credible_region_diameter,
                "converged": est.converged,
                "response_count": es.question_count,
            }

    @app.get("/sessions/{sid}/intent")
    async def intent(sid: str):
        points = stakeholder_points(sid)
        if not points:
            raise DomainError("session has no stakeholder participants", code="empty_input")
        groups = diagnose(points)
        return {"session_id": sid, **intent_to_dict(groups, points)}

    @app.get("/sessions/{sid}/consensus")
    async def consensus(sid: str, dims_total: int = 3, dims_respected: int = 1):
        return consensus_payload(sid, dims_total, dims_respected)

    @app.post("/sessions/{sid}/constraints")
    async def add_constraint(sid: str, request: Request):
        body = await request.json()
        axis = str(_require(body, "axis"))
        kind = str(_require(body, "kind"))
        value = float(_require(body, "value"))
        AxisConstraint(axis=axis, kind=kind, value=value)  # validate before recording
        record = store.get(sid)
        with record.lock:
            store.append_event(
                sid, "constraint_added", {"axis": axis, "kind": kind, "value": value}
            )
        return consensus_payload(sid, 3, 1)

    @app.post("/telemetry")
    async def telemetry(request: Request):
        body = await request.json()
        source = str(_require(body, "source"))
        series = _require(body, "series")
        if not isinstance(series, list) or not series:
            raise DomainError("series must be a non-empty list", code="bad_telemetry")
        if source == GENERATION_SOURCE:
            samples = []
            for entry in series:
                t = float(_require(entry, "t"))
                mix = (
                    float(_require(entry, "solar")),
                    float(_require(entry, "hydro")),
                    float(_require(entry, "grid")),
                )
                samples.append((t, mix))
            store.window.append_generation(samples)
        else:
            samples = [
                (float(_require(entry, "t")), float(_require(entry, "kwh"))) for entry in series
            ]
            store.window.append_consumption(source, samples)
        return {"status": "ok", "source": source, "appended": len(series)}

    @app.get("/sessions/{sid}/alerts")
    async def alerts(sid: str):
        record = store.get(sid)
        with record.lock:
            snap = record.snapshot
            if snap.alert is not None:
                return {"alerts": [snap.alert]}
            if snap.phase != "Implementing" or snap.agreed_scenario_id is None:
                return {"alerts": []}
            scenarios = {s.id: s for s in store.scenarios_for(snap)}
            agreed = scenarios.get(snap.agreed_scenario_id)
            if agreed is None:
                raise NotFoundError(f"unknown scenario id {snap.agreed_scenario_id}")
            alert = evaluate_drift(agreed.generation_mix, store.window)
            if alert is None:
                return {"alerts": []}
            doc = {
                "alert_id": f"drift-{snap.event_count}",
                "distance": alert.distance,
                "observed_mix": list(alert.observed_mix),
                "agreed_mix": list(alert.agreed_mix),
            }
            store.append_event(sid, "alert_raised", doc)
            return {"alerts": [store.get(sid).snapshot.alert]}

    @app.get("/sessions/{sid}/participants/{pid}/interventions")
    async def interventions(sid: str, pid: str):
        record = store.get(sid)
        with record.lock:
            if pid not in record.snapshot.participants:
                raise NotFoundError(f"unknown participant {pid!r}")
            result = next_intervention(pid, store.window, store.default_baseline_kwh)
            if not result.ready:
                return {"status": "not_ready", "intervention": None}
            if result.message is None:
                return {"status": "ok", "intervention": None}
            m = result.message
            return {
                "status": "ok",
                "intervention": {
                    "participant_id": m.participant_id,
                    "tier": m.tier,
                    "ratio": m.ratio,
                    "message_key": m.message_key,
                },
            }

    @app.get("/sessions/{sid}/scenarios")
    async def session_scenarios(sid: str):
        record = store.get(sid)
        scenarios = store.scenarios_for(record.snapshot)
        return {"count": len(scenarios), "scenarios": [scenario_to_dict(s) for s in scenarios]}

    return app
