"""Paired-comparison preference learning over the scenario cloud.

Each participant repeatedly judges two scenarios; a Bayesian grid posterior
over value-weight triples is updated after every answer. The response model
is linear scoring with logistic noise: a participant with weights ``w``
prefers scenario A over B with probability ``sigmoid(BETA * w . (xA - xB))``
where ``xA``, ``xB`` are the scenarios' ternary points. The posterior lives
on a fixed triangular grid (step 0.005, 20,301 nodes), which keeps the MAP
exact, credible regions trivial, and every number auditable.

Question selection is greedy information gain: each call draws a fresh
seeded pool of 200 unasked candidate pairs and picks the one whose answer
is expected to shrink the posterior entropy the most. The expected
posterior-entropy reduction equals the mutual information between the
answer and the weights, so it is computed cheaply as
``H(p_answer) - sum_w P(w) H(answer | w)`` over the grid nodes that carry
essentially all of the current mass.

A note on identifiability: because scenario points and weights both live
on the simplex, every pair's decision boundary passes through the simplex
center, so the deterministic part of an answer constrains only the
direction of ``w`` from the center. The distance from the center is
carried by the answer probabilities themselves, which is why the logistic
response model with a fixed ``BETA`` matters: synthetic responders must
sample from it (seeded) for weight recovery to be well-posed.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, replace
from typing import IO, Iterable, Optional, Sequence

import numpy as np

from .energy import Scenario
from .errors import DomainError
from .ternary import TernaryPoint

BETA = 10.0
GRID_STEP = 0.005
GRID_DENOMINATOR = 200  # 1 / GRID_STEP
POOL_SIZE = 200
MAX_QUESTIONS = 30
CONVERGENCE_DIAMETER = 0.1
CREDIBLE_MASS = 0.9
SUPPORT_MASS = 1.0 - 1e-9  # grid coverage used when scoring candidates
SELECT_MAX_NODES = 4096  # stride-subsample larger supports when scoring

RESPONSES_SCHEMA = "coos.responses"
RESPONSES_VERSION = 1

_GRID_CACHE: Optional[np.ndarray] = None


def weight_grid() -> np.ndarray:
    """The (N, 3) array of grid nodes, lexicographic in the first two
    integer coordinates."""
    global _GRID_CACHE
    if _GRID_CACHE is None:
        d = GRID_DENOMINATOR
        nodes = [
            (i / d, j / d, (d - i - j) / d) for i in range(d + 1) for j in range(d + 1 - i)
        ]
        grid = np.array(nodes, dtype=float)
        grid.setflags(write=False)
        _GRID_CACHE = grid
    return _GRID_CACHE


@dataclass(frozen=True)
class ComparisonResponse:
    question_id: str
    scenario_a_id: int
    scenario_b_id: int
    winner: str  # "A" or "B"
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if self.winner not in ("A", "B"):
            raise DomainError(f"winner must be 'A' or 'B', got {self.winner!r}", code="bad_response")
        if self.scenario_a_id == self.scenario_b_id:
            raise DomainError("compared scenarios must be distinct", code="bad_response")


@dataclass(frozen=True)
class PreferenceModel:
    """A participant's posterior over value-weight triples.

    ``posterior`` is a read-only array aligned with :func:`weight_grid`;
    updates return new models.
    """

    participant_id: str
    posterior: np.ndarray
    response_log: tuple[ComparisonResponse, ...] = ()


def new_model(participant_id: str) -> PreferenceModel:
    n = weight_grid().shape[0]
    posterior = np.full(n, 1.0 / n)
    posterior.setflags(write=False)
    return PreferenceModel(participant_id=participant_id, posterior=posterior)


def _point_index(scenarios: Sequence[Scenario]) -> dict[int, np.ndarray]:
    index: dict[int, np.ndarray] = {}
    for s in scenarios:
        if s.point is None:
            raise DomainError(
                f"scenario {s.id} has no ternary point; normalize the set first",
                code="unnormalized_scenarios",
            )
        index[s.id] = np.array(s.point.as_tuple())
    return index


def _expit(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def pair_likelihood(diff: np.ndarray) -> np.ndarray:
    """P(A wins | w) for every grid node, given xA - xB."""
    return _expit(BETA * (weight_grid() @ diff))


def posterior_update(
    model: PreferenceModel, response: ComparisonResponse, scenarios: Sequence[Scenario]
) -> PreferenceModel:
    """Multiply in one answer's likelihood and renormalize."""
    points = _point_index(scenarios)
    for sid in (response.scenario_a_id, response.scenario_b_id):
        if sid not in points:
            raise DomainError(f"unknown scenario id {sid}", code="unknown_scenario")
    diff = points[response.scenario_a_id] - points[response.scenario_b_id]
    lik_a = pair_likelihood(diff)
    lik = lik_a if response.winner == "A" else 1.0 - lik_a
    post = model.posterior * lik
    total = post.sum()
    if total <= 0.0:
        raise DomainError("posterior mass vanished; inconsistent response", code="degenerate_posterior")
    post = post / total
    post.setflags(write=False)
    return replace(model, posterior=post, response_log=model.response_log + (response,))


def _binary_entropy(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, 1.0)
    out = np.zeros_like(p)
    mask = (p > 0.0) & (p < 1.0)
    pm = p[mask]
    out[mask] = -(pm * np.log(pm) + (1.0 - pm) * np.log1p(-pm))
    return out


def participant_seed(participant_id: str) -> int:
    """Stable, process-independent seed for a participant's question flow."""
    return zlib.crc32(participant_id.encode("utf-8")) & 0x7FFFFFFF


def _sample_candidates(
    ids: Sequence[int],
    asked: set[tuple[int, int]],
    seed: int,
    sequence_index: int,
    pool_size: int,
) -> list[tuple[int, int]]:
    n = len(ids)
    total_pairs = n * (n - 1) // 2
    open_total = total_pairs - len(asked)
    if open_total <= 0:
        return []
    if open_total <= pool_size:
        return sorted(
            (ids[i], ids[j])
            for i in range(n)
            for j in range(i + 1, n)
            if (ids[i], ids[j]) not in asked
        )
    rng = np.random.default_rng((seed, sequence_index))
    chosen: set[tuple[int, int]] = set()
    # Rejection sampling terminates fast because open pairs dominate; the
    # try cap guards pathological asked-sets.
    tries = 0
    cap = pool_size * 200
    while len(chosen) < pool_size and tries < cap:
        i = int(rng.integers(0, n))
        j = int(rng.integers(0, n))
        tries += 1
        if i == j:
            continue
        a, b = (ids[i], ids[j]) if ids[i] < ids[j] else (ids[j], ids[i])
        if (a, b) in asked or (a, b) in chosen:
            continue
        chosen.add((a, b))
    return sorted(chosen)


def _support_indices(posterior: np.ndarray) -> np.ndarray:
    """Nodes carrying essentially all mass, strided down to a budget.

    Nodes are ranked by mass (stable), truncated at the coverage target,
    then stride-subsampled so candidate scoring touches at most
    SELECT_MAX_NODES nodes while still spanning every mass level (under a
    uniform posterior the stable order is the grid order, so the stride
    covers the simplex evenly).
    """
    order = np.argsort(-posterior, kind="stable")
    cum = np.cumsum(posterior[order])
    take = int(np.searchsorted(cum, SUPPORT_MASS)) + 1
    support = order[:take]
    if support.size > SELECT_MAX_NODES:
        stride = int(np.ceil(support.size / SELECT_MAX_NODES))
        support = support[::stride]
    return support


def select_question(
    model: PreferenceModel,
    scenarios: Sequence[Scenario],
    asked: Iterable[tuple[int, int]],
    seed: Optional[int] = None,
    pool_size: int = POOL_SIZE,
) -> Optional[tuple[int, int]]:
    """Pick the candidate pair with maximal expected entropy reduction.

    Candidates are a fresh seeded draw of unasked pairs; ties break toward
    the lowest ``(id_a, id_b)``. Returns ``None`` once every pair has been
    asked. Deterministic given (posterior, seed, asked set).
    """
    if seed is None:
        seed = participant_seed(model.participant_id)
    points = _point_index(scenarios)
    ids = sorted(points.keys())
    if len(ids) < 2:
        raise DomainError("need at least two scenarios to compare", code="empty_input")
    asked_set = {(min(a, b), max(a, b)) for a, b in asked}
    candidates = _sample_candidates(ids, asked_set, seed, len(asked_set), pool_size)
    if not candidates:
        return None

    support = _support_indices(model.posterior)
    grid = weight_grid()[support].astype(np.float32)
    weights = model.posterior[support].astype(np.float32)
    weights = weights / weights.sum()
    diffs = np.stack([points[a] - points[b] for a, b in candidates]).astype(np.float32)
    lik = _expit(np.float32(BETA) * (grid @ diffs.T))  # (support, P)
    p_answer = weights @ lik
    conditional = weights @ _binary_entropy(lik)
    gain = _binary_entropy(p_answer) - conditional
    best = int(np.argmax(gain))  # first max wins; candidates sorted ascending
    return candidates[best]


@dataclass(frozen=True)
class Estimate:
    map_estimate: TernaryPoint
    credible_region_diameter: float
    converged: bool


def estimate(model: PreferenceModel) -> Estimate:
    """MAP weight triple, 90%-credible L1 diameter, and convergence flag.

    The MAP is the highest-mass grid node; exact ties fall back to the
    posterior mean. The credible region is the smallest grid subset holding
    90% of the mass; because coordinate differences sum to zero, its L1
    diameter equals twice the largest per-coordinate range.
    """
    grid = weight_grid()
    post = model.posterior
    peak = post.max()
    tied = np.flatnonzero(post == peak)
    if tied.size == 1:
        node = grid[tied[0]]
        map_point = TernaryPoint(node[0], node[1], node[2])
    else:
        mean = post @ grid
        mean = mean / mean.sum()
        map_point = TernaryPoint(mean[0], mean[1], mean[2])

    order = np.argsort(-post, kind="stable")
    cum = np.cumsum(post[order])
    take = int(np.searchsorted(cum, CREDIBLE_MASS)) + 1
    subset = grid[order[:take]]
    ranges = subset.max(axis=0) - subset.min(axis=0)
    diameter = float(2.0 * ranges.max())

    converged = diameter < CONVERGENCE_DIAMETER or len(model.response_log) >= MAX_QUESTIONS
    return Estimate(map_estimate=map_point, credible_region_diameter=diameter, converged=converged)


class ElicitationSession:
    """Mutable per-participant wrapper tying the posterior, log, and
    question flow together; used by the service and CLI loops."""

    def __init__(
        self,
        participant_id: str,
        scenarios: Sequence[Scenario],
        seed: Optional[int] = None,
        pool_size: int = POOL_SIZE,
        max_questions: int = MAX_QUESTIONS,
    ):
        self.participant_id = participant_id
        self.scenarios = list(scenarios)
        self.seed = participant_seed(participant_id) if seed is None else seed
        self.pool_size = pool_size
        self.max_questions = max_questions
        self.model = new_model(participant_id)
        self._current: Optional[tuple[int, int]] = None  # cache; derived state

    def asked_pairs(self) -> set[tuple[int, int]]:
        return {
            (min(r.scenario_a_id, r.scenario_b_id), max(r.scenario_a_id, r.scenario_b_id))
            for r in self.model.response_log
        }

    @property
    def question_count(self) -> int:
        return len(self.model.response_log)

    def next_question_id(self) -> str:
        return f"q{self.question_count}"

    def next_question(self) -> Optional[tuple[int, int]]:
        if self.question_count >= self.max_questions:
            return None
        if self._current is None:
            self._current = select_question(
                self.model,
                self.scenarios,
                self.asked_pairs(),
                seed=self.seed,
                pool_size=self.pool_size,
            )
        return self._current

    def record_answer(self, winner: str, timestamp: float = 0.0) -> ComparisonResponse:
        pair = self.next_question()
        if pair is None:
            raise DomainError("no open question to answer", code="pool_exhausted")
        response = ComparisonResponse(
            question_id=self.next_question_id(),
            scenario_a_id=pair[0],
            scenario_b_id=pair[1],
            winner=winner,
            timestamp=timestamp,
        )
        self.model = posterior_update(self.model, response, self.scenarios)
        self._current = None
        return response

    def replay(self, responses: Iterable[ComparisonResponse]) -> None:
        for r in responses:
            self.model = posterior_update(self.model, r, self.scenarios)
            self._current = None

    def estimate(self) -> Estimate:
        return estimate(self.model)


# --- response log serialization ----------------------------------------------


def write_responses(fh: IO[str], participant_id: str, responses: Sequence[ComparisonResponse]) -> None:
    header = {
        "schema": RESPONSES_SCHEMA,
        "version": RESPONSES_VERSION,
        "participant_id": participant_id,
        "count": len(responses),
    }
    fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
    for r in responses:
        doc = {
            "question_id": r.question_id,
            "scenario_a_id": r.scenario_a_id,
            "scenario_b_id": r.scenario_b_id,
            "winner": r.winner,
            "timestamp": r.timestamp,
        }
        fh.write(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")


def read_responses(fh: IO[str]) -> tuple[str, list[ComparisonResponse]]:
    header_line = fh.readline()
    if not header_line.strip():
        raise DomainError("response log is empty", code="bad_response_file")
    header = json.loads(header_line)
    if header.get("schema") != RESPONSES_SCHEMA:
        raise DomainError("not a response log file", code="bad_response_file")
    responses = []
    for line in fh:
        if line.strip():
            d = json.loads(line)
            responses.append(
                ComparisonResponse(
                    question_id=str(d["question_id"]),
                    scenario_a_id=int(d["scenario_a_id"]),
                    scenario_b_id=int(d["scenario_b_id"]),
                    winner=str(d["winner"]),
                    timestamp=float(d.get("timestamp", 0.0)),
                )
            )
    return str(header.get("participant_id", "")), responses


def model_from_responses(
    participant_id: str, responses: Sequence[ComparisonResponse], scenarios: Sequence[Scenario]
) -> PreferenceModel:
    """Offline re-estimation: identical log implies identical posterior."""
    model = new_model(participant_id)
    for r in responses:
        model = posterior_update(model, r, scenarios)
    return model


def synthetic_winner(
    weights: Sequence[float],
    diff: Sequence[float],
    rng: np.random.Generator,
) -> str:
    """One seeded draw from the logistic response model; the reference
    responder for recovery tests and demos."""
    margin = float(np.dot(weights, diff))
    p_a = 1.0 / (1.0 + np.exp(-BETA * margin))
    return "A" if rng.random() < p_a else "B"
