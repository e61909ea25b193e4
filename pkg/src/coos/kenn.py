"""Fast-loop cooperation analytics.

``KennModel`` is a small network whose connectivity encodes domain
structure instead of being fully connected: each of six psychological
determinants (cost-benefit, risk cognition, social norms, responsibility,
and two configurable ones) owns a block that sees only its own features
plus the shared trait inputs, and emits a scalar determinant score. The
cooperation rate is the logistic of a nonnegative-weighted combination of
the six scores, so a score can never flip sign in the output and stays
interpretable. Blocks are separate parameter arrays, which makes the
cross-group weight count structurally zero: there is nothing to mask at
training time because the connections do not exist.

Training is deterministic full-batch gradient descent on squared error
with a step-halving schedule (grow the step on an accepted move, halve and
retry on a loss increase), so recorded losses never increase. Since the
original experiment corpus is not available, :func:`generate_synthetic_corpus`
builds a stand-in: a hidden random model labels random feature vectors,
and recovery of that generator is the test target.

Also here: :func:`cross_point`, the bisection solver for the crossing of a
utility curve and a norm curve, used as a one-dimensional decision model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Callable, Sequence

import numpy as np

from .errors import BracketingError, DomainError

FEATURE_COUNT = 33
GROUP_COUNT = 6
BLOCK_HIDDEN = 4

MODEL_SCHEMA = "coos.kenn-model"
MODEL_VERSION = 1
CORPUS_SCHEMA = "coos.kenn-corpus"
CORPUS_VERSION = 1


@dataclass(frozen=True)
class FeatureSchema:
    """Feature-to-determinant assignment plus shared trait inputs.

    Exactly six determinant groups covering exactly 33 features, each
    feature in one group; ``actionable`` lists the features interventions
    may set.
    """

    groups: tuple[tuple[str, tuple[str, ...]], ...]
    trait_features: tuple[str, ...]
    actionable: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.groups) != GROUP_COUNT:
            raise DomainError(
                f"expected {GROUP_COUNT} determinant groups, got {len(self.groups)}",
                code="bad_schema",
            )
        names = [f for _, feats in self.groups for f in feats]
        if len(names) != FEATURE_COUNT:
            raise DomainError(
                f"expected {FEATURE_COUNT} features, got {len(names)}", code="bad_schema"
            )
        if len(set(names)) != len(names):
            raise DomainError("feature names must be unique across groups", code="bad_schema")
        if len(set(self.trait_features)) != len(self.trait_features):
            raise DomainError("trait names must be unique", code="bad_schema")
        overlap = set(self.trait_features) & set(names)
        if overlap:
            raise DomainError(f"traits overlap features: {sorted(overlap)}", code="bad_schema")
        unknown = set(self.actionable) - set(names)
        if unknown:
            raise DomainError(f"actionable features not in schema: {sorted(unknown)}", code="bad_schema")

    @property
    def group_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.groups)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(f for _, feats in self.groups for f in feats)

    def feature_index(self, feature: str) -> int:
        try:
            return self.feature_names.index(feature)
        except ValueError:
            raise DomainError(f"unknown feature {feature!r}", code="unknown_feature")

    def group_slices(self) -> list[np.ndarray]:
        """Per-group indices into the canonical feature vector."""
        out = []
        offset = 0
        for _, feats in self.groups:
            out.append(np.arange(offset, offset + len(feats)))
            offset += len(feats)
        return out


def default_schema() -> FeatureSchema:
    """The shipped schema: four conventional determinants plus two
    configurable ones (mutual expectation and group identity by default)."""
    return FeatureSchema(
        groups=(
            (
                "cost_benefit",
                (
                    "payoff_self",
                    "payoff_group",
                    "marginal_return",
                    "endowment_size",
                    "repetition_expected",
                    "exit_cost",
                ),
            ),
            (
                "risk_cognition",
                (
                    "loss_probability",
                    "loss_magnitude",
                    "outcome_variance",
                    "information_ambiguity",
                    "time_horizon",
                    "threshold_visibility",
                ),
            ),
            (
                "social_norms",
                (
                    "injunctive_norm_strength",
                    "descriptive_norm_strength",
                    "norm_salience",
                    "sanction_probability",
                    "sanction_severity",
                    "communication_allowed",
                ),
            ),
            (
                "responsibility",
                (
                    "personal_causation",
                    "outcome_visibility",
                    "role_obligation",
                    "diffusion_inverse",
                    "moral_framing",
                ),
            ),
            (
                "mutual_expectation",
                (
                    "expected_cooperation",
                    "reputation_tracking",
                    "reciprocity_history",
                    "trust_signal",
                    "commitment_device",
                ),
            ),
            (
                "group_identity",
                (
                    "ingroup_overlap",
                    "identity_salience",
                    "intergroup_competition",
                    "shared_fate",
                    "boundary_clarity",
                ),
            ),
        ),
        trait_features=(
            "neuroticism",
            "extraversion",
            "openness",
            "agreeableness",
            "conscientiousness",
            "gender",
        ),
        actionable=(
            "norm_salience",
            "sanction_probability",
            "communication_allowed",
            "moral_framing",
            "expected_cooperation",
            "reputation_tracking",
            "trust_signal",
            "identity_salience",
            "shared_fate",
        ),
    )


@dataclass(frozen=True)
class CooperationRecord:
    features: tuple[float, ...]
    traits: tuple[float, ...]
    rate: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.rate <= 1.0):
            raise DomainError(f"cooperation rate must be in [0, 1], got {self.rate!r}", code="bad_record")


@dataclass(frozen=True)
class DeterminantScores:
    names: tuple[str, ...]
    raw: tuple[float, ...]
    normalized: tuple[float, ...]  # logistic of raw, for radar display


@dataclass
class _Block:
    w1: np.ndarray  # (BLOCK_HIDDEN, n_group + n_traits)
    b1: np.ndarray  # (BLOCK_HIDDEN,)
    w2: np.ndarray  # (BLOCK_HIDDEN,)
    b2: float


@dataclass
class KennModel:
    schema: FeatureSchema
    blocks: list[_Block]
    comb_u: np.ndarray  # (6,), combination weights are softplus(comb_u)
    comb_b: float

    def combination_weights(self) -> np.ndarray:
        return _softplus(self.comb_u)

    def cross_group_weight_count(self) -> int:
        """Connections from a feature into a foreign block; structurally
        zero because blocks only allocate weights for their own features."""
        slices = self.schema.group_slices()
        n_traits = len(self.schema.trait_features)
        count = 0
        for g, block in enumerate(self.blocks):
            expected = len(slices[g]) + n_traits
            count += max(0, block.w1.shape[1] - expected) * block.w1.shape[0]
        return count


def _softplus(z: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, z)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init_model(
    schema: FeatureSchema,
    seed: int,
    scale: float = 0.5,
    comb_mean: float = 0.3,
    comb_sd: float = 0.3,
) -> KennModel:
    rng = np.random.default_rng(seed)
    n_traits = len(schema.trait_features)
    blocks = []
    for _, feats in schema.groups:
        fan_in = len(feats) + n_traits
        blocks.append(
            _Block(
                w1=rng.normal(0.0, scale / math.sqrt(fan_in), size=(BLOCK_HIDDEN, fan_in)),
                b1=rng.normal(0.0, 0.1, size=BLOCK_HIDDEN),
                w2=rng.normal(0.0, scale, size=BLOCK_HIDDEN),
                b2=float(rng.normal(0.0, 0.1)),
            )
        )
    comb_u = rng.normal(comb_mean, comb_sd, size=GROUP_COUNT)
    comb_b = float(rng.normal(0.0, 0.1))
    return KennModel(schema=schema, blocks=blocks, comb_u=comb_u, comb_b=comb_b)


def _block_inputs(schema: FeatureSchema, x: np.ndarray, t: np.ndarray) -> list[np.ndarray]:
    slices = schema.group_slices()
    return [np.concatenate([x[:, idx], t], axis=1) for idx in slices]


def forward_batch(model: KennModel, x: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized forward pass: (rates (n,), determinant scores (n, 6))."""
    if x.ndim != 2 or x.shape[1] != FEATURE_COUNT:
        raise DomainError(f"feature matrix must be (n, {FEATURE_COUNT})", code="bad_record")
    if t.shape != (x.shape[0], len(model.schema.trait_features)):
        raise DomainError("trait matrix shape mismatch", code="bad_record")
    scores = np.empty((x.shape[0], GROUP_COUNT))
    for g, (block, z) in enumerate(zip(model.blocks, _block_inputs(model.schema, x, t))):
        h = np.tanh(z @ block.w1.T + block.b1)
        scores[:, g] = h @ block.w2 + block.b2
    u = _softplus(model.comb_u)
    rates = _sigmoid(scores @ u + model.comb_b)
    return rates, scores


def predict(model: KennModel, record: CooperationRecord) -> tuple[float, DeterminantScores]:
    """Cooperation rate in (0, 1) plus the six determinant scores."""
    if len(record.features) != FEATURE_COUNT:
        raise DomainError(
            f"expected {FEATURE_COUNT} features, got {len(record.features)}", code="bad_record"
        )
    if len(record.traits) != len(model.schema.trait_features):
        raise DomainError(
            f"expected {len(model.schema.trait_features)} traits, got {len(record.traits)}",
            code="bad_record",
        )
    x = np.array([record.features], dtype=float)
    t = np.array([record.traits], dtype=float)
    rates, scores = forward_batch(model, x, t)
    raw = tuple(float(v) for v in scores[0])
    normalized = tuple(float(v) for v in _sigmoid(scores[0]))
    return float(rates[0]), DeterminantScores(
        names=model.schema.group_names, raw=raw, normalized=normalized
    )


def corpus_matrices(
    corpus: Sequence[CooperationRecord], schema: FeatureSchema
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = np.array([r.features for r in corpus], dtype=float)
    t = np.array([r.traits for r in corpus], dtype=float)
    y = np.array([r.rate for r in corpus], dtype=float)
    if x.shape[1] != FEATURE_COUNT:
        raise DomainError("corpus feature width mismatch", code="bad_record")
    if t.shape[1] != len(schema.trait_features):
        raise DomainError("corpus trait width mismatch", code="bad_record")
    return x, t, y


# --- parameter flattening (shared by the optimizer and gradient checks) -------


def flatten_params(model: KennModel) -> np.ndarray:
    parts: list[np.ndarray] = []
    for block in model.blocks:
        parts.extend([block.w1.ravel(), block.b1.ravel(), block.w2.ravel(), np.array([block.b2])])
    parts.append(model.comb_u.ravel())
    parts.append(np.array([model.comb_b]))
    return np.concatenate(parts)


def unflatten_params(schema: FeatureSchema, flat: np.ndarray) -> KennModel:
    n_traits = len(schema.trait_features)
    blocks = []
    pos = 0

    def take(count: int) -> np.ndarray:
        nonlocal pos
        out = flat[pos : pos + count]
        pos += count
        return out

    for _, feats in schema.groups:
        fan_in = len(feats) + n_traits
        w1 = take(BLOCK_HIDDEN * fan_in).reshape(BLOCK_HIDDEN, fan_in).copy()
        b1 = take(BLOCK_HIDDEN).copy()
        w2 = take(BLOCK_HIDDEN).copy()
        b2 = float(take(1)[0])
        blocks.append(_Block(w1=w1, b1=b1, w2=w2, b2=b2))
    comb_u = take(GROUP_COUNT).copy()
    comb_b = float(take(1)[0])
    if pos != flat.size:
        raise DomainError("parameter vector length mismatch", code="bad_model")
    return KennModel(schema=schema, blocks=blocks, comb_u=comb_u, comb_b=comb_b)


def loss_and_grad(
    model: KennModel, x: np.ndarray, t: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean squared error of the rate and its analytic gradient, flattened
    in :func:`flatten_params` order."""
    n = x.shape[0]
    inputs = _block_inputs(model.schema, x, t)
    hidden = []
    scores = np.empty((n, GROUP_COUNT))
    for g, (block, z) in enumerate(zip(model.blocks, inputs)):
        h = np.tanh(z @ block.w1.T + block.b1)
        hidden.append(h)
        scores[:, g] = h @ block.w2 + block.b2
    u = _softplus(model.comb_u)
    logits = scores @ u + model.comb_b
    rates = _sigmoid(logits)
    err = rates - y
    loss = float((err ** 2).mean())

    g_logit = (2.0 / n) * err * rates * (1.0 - rates)  # (n,)
    grad_parts: list[np.ndarray] = []
    for g, (block, z, h) in enumerate(zip(model.blocks, inputs, hidden)):
        g_score = g_logit * u[g]  # (n,)
        g_h = np.outer(g_score, block.w2)  # (n, H)
        g_pre = g_h * (1.0 - h ** 2)
        grad_w1 = g_pre.T @ z
        grad_b1 = g_pre.sum(axis=0)
        grad_w2 = h.T @ g_score
        grad_b2 = g_score.sum()
        grad_parts.extend([grad_w1.ravel(), grad_b1, grad_w2, np.array([grad_b2])])
    grad_u = (g_logit @ scores) * _sigmoid(model.comb_u)  # softplus' = sigmoid
    grad_b = g_logit.sum()
    grad_parts.append(grad_u)
    grad_parts.append(np.array([grad_b]))
    return loss, np.concatenate(grad_parts)


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 8000
    learning_rate: float = 0.2
    holdout_fraction: float = 0.2
    step_growth: float = 1.05
    step_shrink: float = 0.5


@dataclass(frozen=True)
class TrainReport:
    final_loss: float
    train_r: float
    heldout_r: float
    iterations: int
    accepted_steps: int
    loss_history: tuple[float, ...] = ()  # loss after each accepted step; non-increasing


def pearson_r(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float((da ** 2).sum()) * float((db ** 2).sum()))
    if denom == 0.0:
        return 0.0
    return float((da * db).sum() / denom)


def train(
    corpus: Sequence[CooperationRecord],
    schema: FeatureSchema,
    config: TrainConfig = TrainConfig(),
    seed: int = 0,
) -> tuple[KennModel, TrainReport]:
    """Deterministic full-batch descent; same inputs and seed give the same
    model, byte for byte.

    The step size grows a little on every accepted move and halves on a
    rejected one (the move is discarded), so the recorded loss sequence is
    non-increasing.
    """
    if len(corpus) == 0:
        raise DomainError("empty training corpus", code="empty_input")
    x, t, y = corpus_matrices(corpus, schema)
    n = x.shape[0]
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_holdout = int(round(n * config.holdout_fraction)) if n >= 5 else 0
    holdout_idx = perm[:n_holdout]
    train_idx = perm[n_holdout:]
    xt, tt, yt = x[train_idx], t[train_idx], y[train_idx]

    model = init_model(schema, seed=seed)
    params = flatten_params(model)
    loss, grad = loss_and_grad(model, xt, tt, yt)
    lr = config.learning_rate
    accepted = 0
    history = [loss]
    for _ in range(config.iterations):
        candidate = params - lr * grad
        cand_model = unflatten_params(schema, candidate)
        cand_loss, cand_grad = loss_and_grad(cand_model, xt, tt, yt)
        if cand_loss <= loss:
            params, loss, grad, model = candidate, cand_loss, cand_grad, cand_model
            lr *= config.step_growth
            accepted += 1
            history.append(loss)
        else:
            lr *= config.step_shrink

    train_rates, _ = forward_batch(model, xt, tt)
    train_r = pearson_r(train_rates, yt)
    if n_holdout > 0:
        held_rates, _ = forward_batch(model, x[holdout_idx], t[holdout_idx])
        heldout_r = pearson_r(held_rates, y[holdout_idx])
    else:
        heldout_r = train_r
    return model, TrainReport(
        final_loss=loss,
        train_r=train_r,
        heldout_r=heldout_r,
        iterations=config.iterations,
        accepted_steps=accepted,
        loss_history=tuple(history),
    )


@dataclass(frozen=True)
class InterventionEffect:
    feature: str
    level: float
    mean_delta: float


def rank_interventions(
    model: KennModel,
    corpus: Sequence[CooperationRecord],
    interventions: dict[str, float],
) -> list[InterventionEffect]:
    """Mean change in predicted cooperation rate when each actionable
    feature is pinned to its intervention level, largest gain first."""
    if len(corpus) == 0:
        raise DomainError("empty corpus", code="empty_input")
    schema = model.schema
    actionable = set(schema.actionable)
    for feature in interventions:
        if feature not in actionable:
            raise DomainError(
                f"feature {feature!r} is not actionable", code="not_actionable"
            )
    x, t, _ = corpus_matrices(corpus, schema)
    baseline, _ = forward_batch(model, x, t)
    effects = []
    for feature, level in interventions.items():
        x_mod = x.copy()
        x_mod[:, schema.feature_index(feature)] = level
        rates, _ = forward_batch(model, x_mod, t)
        effects.append(
            InterventionEffect(
                feature=feature, level=float(level), mean_delta=float((rates - baseline).mean())
            )
        )
    effects.sort(key=lambda e: (-e.mean_delta, e.feature))
    return effects


GENERATOR_TRAIT_SCALE = 0.35
GENERATOR_SCORE_SD = 0.55


def _make_generator(schema: FeatureSchema, seed: int) -> KennModel:
    """A hidden generator whose six determinants all matter comparably.

    Traits are damped to act as moderators rather than dominating shared
    inputs, and each block's score is centered and rescaled to a common
    spread on a probe batch; this keeps every determinant identifiable
    from rate data and the clean rates spread over (0, 1) without
    saturating the logistic.
    """
    generator = init_model(schema, seed=seed ^ 0x5EED, scale=0.6, comb_mean=0.6, comb_sd=0.1)
    n_traits = len(schema.trait_features)
    for block in generator.blocks:
        block.w1[:, -n_traits:] *= GENERATOR_TRAIT_SCALE
    probe_rng = np.random.default_rng(seed ^ 0xCA1B)
    probe_x = probe_rng.standard_normal((512, FEATURE_COUNT))
    probe_t = probe_rng.standard_normal((512, n_traits))
    _, scores = forward_batch(generator, probe_x, probe_t)
    for g, block in enumerate(generator.blocks):
        sd = float(scores[:, g].std())
        mean = float(scores[:, g].mean())
        k = GENERATOR_SCORE_SD / sd if sd > 0 else 1.0
        block.w2 *= k
        block.b2 = k * (block.b2 - mean)
    return generator


def generate_synthetic_corpus(
    schema: FeatureSchema, seed: int, n: int, noise_sd: float = 0.05
) -> tuple[list[CooperationRecord], KennModel]:
    """Stand-in corpus: a hidden random generator model labels random
    inputs; returns (records, generator)."""
    if n < 1:
        raise DomainError("need n >= 1 records", code="bad_corpus_size")
    rng = np.random.default_rng(seed)
    generator = _make_generator(schema, seed)
    x = rng.standard_normal((n, FEATURE_COUNT))
    traits = rng.standard_normal((n, len(schema.trait_features)))
    for i, name in enumerate(schema.trait_features):
        if name == "gender":
            traits[:, i] = rng.integers(0, 2, size=n) * 2.0 - 1.0
    clean, _ = forward_batch(generator, x, traits)
    noisy = clean if noise_sd == 0.0 else np.clip(clean + rng.normal(0.0, noise_sd, size=n), 0.0, 1.0)
    records = [
        CooperationRecord(
            features=tuple(float(v) for v in x[i]),
            traits=tuple(float(v) for v in traits[i]),
            rate=float(noisy[i]),
        )
        for i in range(n)
    ]
    return records, generator


def cross_point(
    u: Callable[[float], float],
    n: Callable[[float], float],
    lo: float,
    hi: float,
    value_tol: float = 1e-9,
    width_tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Bisection for the crossing of a utility curve and a norm curve.

    Requires a strict sign change of ``u - n`` over [lo, hi]; stops when the
    gap at the midpoint is below ``value_tol`` or the bracket is narrower
    than ``width_tol``.
    """
    if not (lo < hi):
        raise DomainError("need lo < hi", code="bad_bracket")
    f_lo = u(lo) - n(lo)
    f_hi = u(hi) - n(hi)
    if not (f_lo * f_hi < 0.0):
        raise BracketingError(
            f"no strict sign change of u - n over [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = u(mid) - n(mid)
        if abs(f_mid) < value_tol or (hi - lo) < width_tol:
            return mid
        if (f_mid > 0.0) == (f_hi > 0.0):
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


# --- serialization ------------------------------------------------------------


def schema_to_dict(schema: FeatureSchema) -> dict:
    return {
        "groups": [{"name": name, "features": list(feats)} for name, feats in schema.groups],
        "trait_features": list(schema.trait_features),
        "actionable": list(schema.actionable),
    }


def schema_from_dict(doc: dict) -> FeatureSchema:
    return FeatureSchema(
        groups=tuple((g["name"], tuple(g["features"])) for g in doc["groups"]),
        trait_features=tuple(doc["trait_features"]),
        actionable=tuple(doc["actionable"]),
    )


def model_to_dict(model: KennModel) -> dict:
    return {
        "schema": MODEL_SCHEMA,
        "version": MODEL_VERSION,
        "feature_schema": schema_to_dict(model.schema),
        "blocks": [
            {
                "w1": [list(row) for row in block.w1],
                "b1": list(block.b1),
                "w2": list(block.w2),
                "b2": block.b2,
            }
            for block in model.blocks
        ],
        "comb_u": list(model.comb_u),
        "comb_b": model.comb_b,
    }


def model_from_dict(doc: dict) -> KennModel:
    if doc.get("schema") != MODEL_SCHEMA:
        raise DomainError("not a model document", code="bad_model_file")
    if doc.get("version") != MODEL_VERSION:
        raise DomainError(f"unsupported model version {doc.get('version')!r}", code="bad_model_file")
    schema = schema_from_dict(doc["feature_schema"])
    blocks = [
        _Block(
            w1=np.array(b["w1"], dtype=float),
            b1=np.array(b["b1"], dtype=float),
            w2=np.array(b["w2"], dtype=float),
            b2=float(b["b2"]),
        )
        for b in doc["blocks"]
    ]
    return KennModel(
        schema=schema,
        blocks=blocks,
        comb_u=np.array(doc["comb_u"], dtype=float),
        comb_b=float(doc["comb_b"]),
    )


def save_model(path: str, model: KennModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_model(path: str) -> KennModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def write_corpus(fh: IO[str], corpus: Sequence[CooperationRecord], schema: FeatureSchema) -> None:
    header = {
        "schema": CORPUS_SCHEMA,
        "version": CORPUS_VERSION,
        "count": len(corpus),
        "feature_schema": schema_to_dict(schema),
    }
    fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
    for r in corpus:
        doc = {"features": list(r.features), "traits": list(r.traits), "rate": r.rate}
        fh.write(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")


def read_corpus(fh: IO[str]) -> tuple[list[CooperationRecord], FeatureSchema]:
    header_line = fh.readline()
    if not header_line.strip():
        raise DomainError("corpus file is empty", code="bad_corpus_file")
    header = json.loads(header_line)
    if header.get("schema") != CORPUS_SCHEMA:
        raise DomainError("not a corpus file", code="bad_corpus_file")
    schema = schema_from_dict(header["feature_schema"])
    records = []
    for line in fh:
        if line.strip():
            d = json.loads(line)
            records.append(
                CooperationRecord(
                    features=tuple(float(v) for v in d["features"]),
                    traits=tuple(float(v) for v in d["traits"]),
                    rate=float(d["rate"]),
                )
            )
    return records, schema


def interventions_table(effects: Sequence[InterventionEffect]) -> str:
    """Plain-text ranking table (the CLI and service dashboard view)."""
    lines = [f"{'rank':>4}  {'feature':<28} {'level':>8}  {'mean delta rate':>16}"]
    lines.append("-" * len(lines[0]))
    for i, e in enumerate(effects, start=1):
        lines.append(f"{i:>4}  {e.feature:<28} {e.level:>8.3f}  {e.mean_delta:>+16.6f}")
    return "\n".join(lines) + "\n"
