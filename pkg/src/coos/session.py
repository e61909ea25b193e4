"""Event-sourced consensus session core.

A session walks a five-phase lifecycle: Convening, RolesAssigned,
Facilitating, ConsensusAchieved, Implementing. Only the facilitator moves
it, only one step forward at a time, and the single backward edge is the
re-convene from Implementing back to Convening (which clears the agreed
scenario and any active drift alert). Session state is never stored
directly: it is a pure fold over an append-only event list, so replaying
the log always reproduces the same snapshot, byte for byte.

Also here: the pure fast-loop rules coupling telemetry to the session.
Drift compares the rolling mean generation mix against the agreed
scenario's mix (L1 distance, strict threshold). Interventions compare a
participant's last-day consumption against a trailing-baseline mean and
escalate through three tiers proportional to overconsumption.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import DomainError

PHASES = (
    "Convening",
    "RolesAssigned",
    "Facilitating",
    "ConsensusAchieved",
    "Implementing",
)

FORWARD_EDGES = {
    ("Convening", "RolesAssigned"),
    ("RolesAssigned", "Facilitating"),
    ("Facilitating", "ConsensusAchieved"),
    ("ConsensusAchieved", "Implementing"),
}
RECONVENE_EDGE = ("Implementing", "Convening")

DRIFT_THRESHOLD = 0.2
DRIFT_WINDOW_HOURS = 168.0  # rolling 7-day mean
INTERVENTION_TIERS = (1.0, 1.2, 1.5)  # ratio > t1 -> tier 1, > t2 -> tier 2, > t3 -> tier 3
BASELINE_WINDOW_HOURS = 672.0  # trailing 28-day mean
INTERVENTION_LOOKBACK_HOURS = 24.0


class NotFoundError(DomainError):
    def __init__(self, message: str):
        super().__init__(message, code="not_found")


class ConflictError(DomainError):
    def __init__(self, message: str, *, code: str = "conflict", detail: object = None):
        super().__init__(message, code=code, detail=detail)


def check_transition(current: str, to: str) -> None:
    """Reject anything but the four chain edges and the re-convene edge."""
    if to not in PHASES:
        raise DomainError(f"unknown phase {to!r}", code="bad_phase")
    if (current, to) in FORWARD_EDGES or (current, to) == RECONVENE_EDGE:
        return
    raise ConflictError(
        f"illegal transition {current} -> {to}",
        code="illegal_transition",
        detail={"current": current, "requested": to},
    )


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    type: str
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "type": self.type, "payload": self.payload}

    @staticmethod
    def from_dict(doc: dict) -> "SessionEvent":
        return SessionEvent(seq=int(doc["seq"]), type=str(doc["type"]), payload=dict(doc["payload"]))


@dataclass
class SessionSnapshot:
    """The folded view of one session's event log."""

    session_id: str = ""
    name: str = ""
    scenario_set: str = ""
    phase: str = "Convening"
    participants: dict = field(default_factory=dict)  # pid -> {display_name, role}
    responses: dict = field(default_factory=dict)  # pid -> [response dicts]
    constraints: list = field(default_factory=list)
    agreed_scenario_id: Optional[int] = None
    alert: Optional[dict] = None
    event_count: int = 0

    def to_canonical_json(self) -> str:
        doc = {
            "session_id": self.session_id,
            "name": self.name,
            "scenario_set": self.scenario_set,
            "phase": self.phase,
            "participants": self.participants,
            "responses": self.responses,
            "constraints": self.constraints,
            "agreed_scenario_id": self.agreed_scenario_id,
            "alert": self.alert,
            "event_count": self.event_count,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def fold_events(events: Sequence[SessionEvent]) -> SessionSnapshot:
    """Pure fold; the only way session state comes into existence."""
    snap = SessionSnapshot()
    for ev in events:
        p = ev.payload
        if ev.type == "session_created":
            snap.session_id = p["session_id"]
            snap.name = p["name"]
            snap.scenario_set = p["scenario_set"]
        elif ev.type == "participant_added":
            snap.participants[p["participant_id"]] = {
                "display_name": p["display_name"],
                "role": p["role"],
            }
            snap.responses.setdefault(p["participant_id"], [])
        elif ev.type == "advanced":
            snap.phase = p["to"]
            if p["to"] == "ConsensusAchieved":
                snap.agreed_scenario_id = p["agreed_scenario_id"]
            if (p.get("from"), p["to"]) == RECONVENE_EDGE:
                snap.agreed_scenario_id = None
                snap.alert = None
                snap.constraints = []
        elif ev.type == "answer_recorded":
            snap.responses.setdefault(p["participant_id"], []).append(
                {
                    "question_id": p["question_id"],
                    "scenario_a_id": p["scenario_a_id"],
                    "scenario_b_id": p["scenario_b_id"],
                    "winner": p["winner"],
                }
            )
        elif ev.type == "constraint_added":
            snap.constraints.append(
                {"axis": p["axis"], "kind": p["kind"], "value": p["value"]}
            )
        elif ev.type == "alert_raised":
            snap.alert = {
                "alert_id": p["alert_id"],
                "distance": p["distance"],
                "observed_mix": p["observed_mix"],
                "agreed_mix": p["agreed_mix"],
            }
        else:
            raise DomainError(f"unknown event type {ev.type!r}", code="bad_event")
        snap.event_count = ev.seq + 1
    return snap


# --- telemetry ----------------------------------------------------------------

GENERATION_SOURCE = "generation"
MIX_TOL = 1e-9


@dataclass
class TelemetryWindow:
    """Rolling per-source energy series.

    ``consumption`` maps a participant id to ``(t_hours, kwh)`` samples;
    ``generation_mix`` holds ``(t_hours, (solar, hydro, grid))`` fractions.
    Timestamps must be strictly increasing per source.
    """

    consumption: dict[str, list[tuple[float, float]]] = field(default_factory=dict)
    generation_mix: list[tuple[float, tuple[float, float, float]]] = field(default_factory=list)

    def append_consumption(self, participant_id: str, samples: Sequence[tuple[float, float]]) -> None:
        series = self.consumption.setdefault(participant_id, [])
        last = series[-1][0] if series else float("-inf")
        for t, kwh in samples:
            if t <= last:
                raise DomainError(
                    f"timestamps must be strictly increasing per source (got {t} after {last})",
                    code="bad_telemetry",
                )
            if kwh < 0:
                raise DomainError("consumption must be >= 0", code="bad_telemetry")
            series.append((float(t), float(kwh)))
            last = t

    def append_generation(
        self, samples: Sequence[tuple[float, tuple[float, float, float]]]
    ) -> None:
        last = self.generation_mix[-1][0] if self.generation_mix else float("-inf")
        for t, mix in samples:
            if t <= last:
                raise DomainError(
                    f"timestamps must be strictly increasing per source (got {t} after {last})",
                    code="bad_telemetry",
                )
            if len(mix) != 3 or abs(sum(mix) - 1.0) > MIX_TOL or any(v < 0 for v in mix):
                raise DomainError(
                    f"generation mix must be three nonnegative fractions summing to 1, got {mix}",
                    code="bad_telemetry",
                )
            self.generation_mix.append((float(t), (float(mix[0]), float(mix[1]), float(mix[2]))))
            last = t


@dataclass(frozen=True)
class ReconveneAlert:
    distance: float
    observed_mix: tuple[float, float, float]
    agreed_mix: tuple[float, float, float]


def rolling_mean_mix(
    window: TelemetryWindow, span_hours: float = DRIFT_WINDOW_HOURS
) -> Optional[tuple[float, float, float]]:
    if not window.generation_mix:
        return None
    t_end = window.generation_mix[-1][0]
    recent = [mix for t, mix in window.generation_mix if t > t_end - span_hours]
    if not recent:
        return None
    n = len(recent)
    return (
        sum(m[0] for m in recent) / n,
        sum(m[1] for m in recent) / n,
        sum(m[2] for m in recent) / n,
    )


def evaluate_drift(
    agreed_mix: Sequence[float],
    window: TelemetryWindow,
    threshold: float = DRIFT_THRESHOLD,
    span_hours: float = DRIFT_WINDOW_HOURS,
) -> Optional[ReconveneAlert]:
    """Alert when the rolling mean generation mix drifts strictly beyond
    the L1 threshold from the agreed scenario's mix."""
    if agreed_mix is None:
        raise DomainError("no agreed scenario to evaluate drift against", code="no_agreed_scenario")
    observed = rolling_mean_mix(window, span_hours)
    if observed is None:
        return None
    distance = sum(abs(a - o) for a, o in zip(agreed_mix, observed))
    if distance > threshold:
        return ReconveneAlert(
            distance=distance,
            observed_mix=observed,
            agreed_mix=(float(agreed_mix[0]), float(agreed_mix[1]), float(agreed_mix[2])),
        )
    return None


@dataclass(frozen=True)
class InterventionMessage:
    participant_id: str
    tier: int
    ratio: float
    message_key: str


@dataclass(frozen=True)
class InterventionResult:
    ready: bool
    message: Optional[InterventionMessage] = None


def next_intervention(
    participant_id: str,
    window: TelemetryWindow,
    default_baseline_kwh: Optional[float] = None,
    tiers: tuple[float, float, float] = INTERVENTION_TIERS,
) -> InterventionResult:
    """Tiered conservation nudge proportional to overconsumption.

    Ratio is the last-24h mean over a trailing 28-day baseline (or the
    session default when history is too short). Below baseline means no
    message; not enough telemetry signals not-ready rather than erroring.
    """
    series = window.consumption.get(participant_id, [])
    if not series:
        return InterventionResult(ready=False)
    t_end = series[-1][0]
    t_start = series[0][0]
    if t_end - t_start < INTERVENTION_LOOKBACK_HOURS - 1:
        return InterventionResult(ready=False)
    recent = [kwh for t, kwh in series if t > t_end - INTERVENTION_LOOKBACK_HOURS]
    if not recent:
        return InterventionResult(ready=False)
    baseline_samples = [
        kwh
        for t, kwh in series
        if t_end - INTERVENTION_LOOKBACK_HOURS - BASELINE_WINDOW_HOURS
        < t
        <= t_end - INTERVENTION_LOOKBACK_HOURS
    ]
    if baseline_samples:
        baseline = sum(baseline_samples) / len(baseline_samples)
    elif default_baseline_kwh is not None and default_baseline_kwh > 0:
        baseline = default_baseline_kwh
    else:
        return InterventionResult(ready=False)
    if baseline <= 0:
        return InterventionResult(ready=False)
    ratio = (sum(recent) / len(recent)) / baseline
    tier = 0
    for i, bound in enumerate(tiers, start=1):
        if ratio > bound:
            tier = i
    if tier == 0:
        return InterventionResult(ready=True, message=None)
    return InterventionResult(
        ready=True,
        message=InterventionMessage(
            participant_id=participant_id,
            tier=tier,
            ratio=ratio,
            message_key=f"energy.conserve.tier{tier}",
        ),
    )
