import itertools

import pytest

from coos.errors import DomainError
from coos.session import (
    ConflictError,
    PHASES,
    ReconveneAlert,
    SessionEvent,
    TelemetryWindow,
    check_transition,
    evaluate_drift,
    fold_events,
    next_intervention,
)


class TestTransitionMatrix:
    LEGAL = {
        ("Convening", "RolesAssigned"),
        ("RolesAssigned", "Facilitating"),
        ("Facilitating", "ConsensusAchieved"),
        ("ConsensusAchieved", "Implementing"),
        ("Implementing", "Convening"),
    }

    def test_exhaustive_25_pairs(self):
        accepted = set()
        for current, to in itertools.product(PHASES, PHASES):
            try:
                check_transition(current, to)
                accepted.add((current, to))
            except ConflictError:
                pass
        assert accepted == self.LEGAL

    def test_unknown_phase_rejected(self):
        with pytest.raises(DomainError):
            check_transition("Convening", "Nirvana")


def _events(*specs):
    return [SessionEvent(seq=i, type=t, payload=p) for i, (t, p) in enumerate(specs)]


class TestFold:
    def test_replay_reproduces_identical_bytes(self):
        events = _events(
            ("session_created", {"session_id": "s1", "name": "demo", "scenario_set": "default"}),
            ("participant_added", {"participant_id": "p1", "display_name": "F", "role": "facilitator"}),
            ("participant_added", {"participant_id": "p2", "display_name": "S", "role": "stakeholder"}),
            ("advanced", {"from": "Convening", "to": "RolesAssigned", "actor_id": "p1"}),
            ("advanced", {"from": "RolesAssigned", "to": "Facilitating", "actor_id": "p1"}),
            (
                "answer_recorded",
                {
                    "participant_id": "p2",
                    "question_id": "q0",
                    "scenario_a_id": 1,
                    "scenario_b_id": 2,
                    "winner": "A",
                },
            ),
            ("constraint_added", {"axis": "a", "kind": "min", "value": 0.2}),
        )
        a = fold_events(events).to_canonical_json()
        b = fold_events(events).to_canonical_json()
        assert a == b
        round_tripped = [SessionEvent.from_dict(e.to_dict()) for e in events]
        assert fold_events(round_tripped).to_canonical_json() == a

    def test_reconvene_clears_agreement_and_alert(self):
        events = _events(
            ("session_created", {"session_id": "s1", "name": "demo", "scenario_set": "default"}),
            ("advanced", {"from": "Convening", "to": "RolesAssigned", "actor_id": "p1"}),
            ("advanced", {"from": "RolesAssigned", "to": "Facilitating", "actor_id": "p1"}),
            (
                "advanced",
                {
                    "from": "Facilitating",
                    "to": "ConsensusAchieved",
                    "actor_id": "p1",
                    "agreed_scenario_id": 17,
                },
            ),
            ("advanced", {"from": "ConsensusAchieved", "to": "Implementing", "actor_id": "p1"}),
            (
                "alert_raised",
                {
                    "alert_id": "drift-5",
                    "distance": 0.8,
                    "observed_mix": [0.9, 0.1, 0.0],
                    "agreed_mix": [0.5, 0.5, 0.0],
                },
            ),
        )
        snap = fold_events(events)
        assert snap.phase == "Implementing"
        assert snap.agreed_scenario_id == 17
        assert snap.alert is not None
        events = events + _events(
            ("advanced", {"from": "Implementing", "to": "Convening", "actor_id": "p1"})
        )
        events[-1] = SessionEvent(seq=len(events) - 1, type=events[-1].type, payload=events[-1].payload)
        snap = fold_events(events)
        assert snap.phase == "Convening"
        assert snap.agreed_scenario_id is None
        assert snap.alert is None


class TestTelemetryWindow:
    def test_timestamps_strictly_increasing(self):
        w = TelemetryWindow()
        w.append_consumption("p1", [(0.0, 1.0), (1.0, 1.2)])
        with pytest.raises(DomainError):
            w.append_consumption("p1", [(1.0, 0.9)])

    def test_mix_must_sum_to_one(self):
        w = TelemetryWindow()
        with pytest.raises(DomainError):
            w.append_generation([(0.0, (0.5, 0.4, 0.0))])
        w.append_generation([(0.0, (0.5, 0.5, 0.0))])


class TestDrift:
    def _window(self, mix, hours=10):
        w = TelemetryWindow()
        w.append_generation([(float(t), mix) for t in range(hours)])
        return w

    def test_hand_oracle_alert(self):
        # |0.9-0.5| + |0.1-0.5| + 0 = 0.8 > 0.2
        alert = evaluate_drift((0.5, 0.5, 0.0), self._window((0.9, 0.1, 0.0)))
        assert isinstance(alert, ReconveneAlert)
        assert alert.distance == pytest.approx(0.8)

    def test_zero_drift_no_alert(self):
        assert evaluate_drift((0.5, 0.5, 0.0), self._window((0.5, 0.5, 0.0))) is None

    def test_boundary_is_strict(self):
        # distance exactly 0.2 must not alert
        alert = evaluate_drift((0.5, 0.5, 0.0), self._window((0.6, 0.4, 0.0)))
        assert alert is None

    def test_rolling_window_limits_history(self):
        w = TelemetryWindow()
        # old drifted samples beyond the 7-day window, recent matching ones
        w.append_generation([(float(t), (0.9, 0.1, 0.0)) for t in range(0, 100)])
        w.append_generation([(float(t), (0.5, 0.5, 0.0)) for t in range(100, 300)])
        assert evaluate_drift((0.5, 0.5, 0.0), w) is None

    def test_no_telemetry_no_alert(self):
        assert evaluate_drift((0.5, 0.5, 0.0), TelemetryWindow()) is None

    def test_missing_agreement_is_domain_error(self):
        with pytest.raises(DomainError):
            evaluate_drift(None, self._window((0.5, 0.5, 0.0)))


class TestInterventions:
    def _window_with_ratio(self, ratio):
        w = TelemetryWindow()
        base = 1.0
        samples = [(float(t), base) for t in range(0, 672)]
        samples += [(float(672 + t), base * ratio) for t in range(24)]
        w.append_consumption("p1", samples)
        return w

    @pytest.mark.parametrize(
        "ratio,tier", [(0.8, None), (1.3, 2), (1.6, 3), (1.1, 1), (1.0, None)]
    )
    def test_tier_mapping(self, ratio, tier):
        result = next_intervention("p1", self._window_with_ratio(ratio))
        assert result.ready
        if tier is None:
            assert result.message is None
        else:
            assert result.message is not None
            assert result.message.tier == tier
            assert result.message.ratio == pytest.approx(ratio)
            assert result.message.message_key == f"energy.conserve.tier{tier}"

    def test_not_ready_without_telemetry(self):
        assert not next_intervention("p9", TelemetryWindow()).ready

    def test_not_ready_with_short_history_and_no_default(self):
        w = TelemetryWindow()
        w.append_consumption("p1", [(float(t), 1.0) for t in range(10)])
        assert not next_intervention("p1", w).ready

    def test_default_baseline_used_for_short_history(self):
        w = TelemetryWindow()
        w.append_consumption("p1", [(float(t), 1.3) for t in range(1, 25)])
        result = next_intervention("p1", w, default_baseline_kwh=1.0)
        assert result.ready
        assert result.message is not None
        assert result.message.tier == 2
