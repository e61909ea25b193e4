"""Command-line driver.

Subcommands cover batch and headless use of every part of the toolkit:
``simulate`` and ``normalize`` produce scenario sets, ``ask``/``estimate``
run paired-comparison elicitation, ``intent``/``consensus``/``choose``
compute the group geometry, the ``kenn-*`` family trains and applies the
cooperation model, ``export-ternary`` and ``report`` render boards and
figures, and ``serve`` starts the HTTP service.

Exit codes: 0 on success, 1 on domain or data errors, 2 on usage errors.
Every randomized step takes ``--seed`` (default 0); identical inputs and
seeds produce byte-identical output files, including SVG.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import consensus as consensus_mod
from . import energy, kenn, pclm
from .errors import DomainError
from .intent import IntentGroup, diagnose, intent_to_dict
from .ternary import AxisConstraint, Segment, TernaryPoint, embed
from .ternary_svg import (
    BoardPoint,
    BoardRegion,
    BoardSegment,
    TernaryBoard,
    render_board,
    scenario_cloud_board,
)

MAJORITY_COLOR = "#c0392b"  # red dots group
MINORITY_COLOR = "#2980b9"  # blue dots group


def _dump_json(path: str, doc: object) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _parse_constraint(text: str) -> AxisConstraint:
    for op, kind in ((">=", "min"), ("<=", "max")):
        if op in text:
            axis, value = text.split(op, 1)
            return AxisConstraint(axis=axis.strip(), kind=kind, value=float(value.strip()))
    raise DomainError(f"constraint must look like 'a>=0.4' or 'b<=0.5', got {text!r}", code="bad_constraint")


def _groups_from_intent_doc(doc: dict) -> list[IntentGroup]:
    groups = []
    for g in doc.get("groups", []):
        pt = g["aggregation_point"]
        groups.append(
            IntentGroup(
                group_id=int(g["group_id"]),
                member_ids=tuple(g.get("member_ids", [])),
                aggregation_point=TernaryPoint(pt[0], pt[1], pt[2]),
                size=int(g["size"]),
                is_majority=bool(g["is_majority"]),
            )
        )
    if not groups:
        raise DomainError("intent document has no groups", code="empty_input")
    return groups


# --- subcommand implementations ------------------------------------------------


def _cmd_simulate(args: argparse.Namespace) -> int:
    if args.config:
        config = energy.sweep_config_from_dict(_load_json(args.config))
    else:
        config = energy.default_sweep_config()
    scenarios = energy.sweep(config)
    if args.normalize:
        scenarios = energy.normalize_set(scenarios)
    energy.save_scenarios(args.out, scenarios)
    print(f"wrote {len(scenarios)} scenarios to {args.out}")
    return 0


def _cmd_normalize(args: argparse.Namespace) -> int:
    scenarios = energy.load_scenarios(args.input)
    normalized = energy.normalize_set(scenarios)
    energy.save_scenarios(args.out, normalized)
    print(f"normalized {len(normalized)} scenarios to {args.out}")
    return 0


def _format_choice(tag: str, s: energy.Scenario) -> str:
    norm = s.normalized or (float("nan"),) * 3
    return (
        f"  [{tag}] scenario {s.id}: circulation {s.social:.3f}, "
        f"renewables {s.environmental:.3f}, cost/household {s.economic_cost:.0f}\n"
        f"      normalized (social, environmental, economic) = "
        f"({norm[0]:.3f}, {norm[1]:.3f}, {norm[2]:.3f})"
    )


def _cmd_ask(args: argparse.Namespace) -> int:
    scenarios = energy.load_scenarios(args.scenarios)
    if any(s.point is None for s in scenarios):
        scenarios = energy.normalize_set(scenarios)
    session = pclm.ElicitationSession(
        args.participant, scenarios, seed=args.seed, max_questions=args.max_questions
    )
    by_id = {s.id: s for s in scenarios}
    print(f"paired comparison session for {args.participant!r}; answer 'a' or 'b', 'q' to stop")
    while True:
        est = session.estimate()
        if est.converged:
            print("converged; stopping")
            break
        pair = session.next_question()
        if pair is None:
            print("question pool exhausted; stopping")
            break
        print(f"question {session.question_count + 1}: which do you prefer?")
        print(_format_choice("a", by_id[pair[0]]))
        print(_format_choice("b", by_id[pair[1]]))
        line = sys.stdin.readline()
        if not line:
            print("end of input; stopping")
            break
        answer = line.strip().lower()
        if answer in ("q", "quit"):
            break
        if answer not in ("a", "b"):
            print("please answer 'a' or 'b'")
            continue
        session.record_answer("A" if answer == "a" else "B")
    with open(args.out, "w", encoding="utf-8") as fh:
        pclm.write_responses(fh, args.participant, list(session.model.response_log))
    est = session.estimate()
    m = est.map_estimate
    print(
        f"recorded {session.question_count} answers; estimate "
        f"(social, environmental, economic) = ({m.a:.3f}, {m.b:.3f}, {m.c:.3f})"
    )
    return 0


def _estimate_doc(participant_id: str, model: pclm.PreferenceModel) -> dict:
    est = pclm.estimate(model)
    return {
        "participant_id": participant_id,
        "map_estimate": list(est.map_estimate.as_tuple()),
        "map_xy": list(embed(est.map_estimate)),
        "credible_region_diameter": est.credible_region_diameter,
        "converged": est.converged,
        "response_count": len(model.response_log),
    }


def _cmd_estimate(args: argparse.Namespace) -> int:
    scenarios = energy.load_scenarios(args.scenarios)
    if any(s.point is None for s in scenarios):
        scenarios = energy.normalize_set(scenarios)
    with open(args.responses, "r", encoding="utf-8") as fh:
        participant_id, responses = pclm.read_responses(fh)
    model = pclm.model_from_responses(participant_id, responses, scenarios)
    _dump_json(args.out, _estimate_doc(participant_id, model))
    print(f"wrote estimate for {participant_id!r} to {args.out}")
    return 0


def _cmd_intent(args: argparse.Namespace) -> int:
    points: dict[str, TernaryPoint] = {}
    for path in args.estimates:
        doc = _load_json(path)
        pt = doc["map_estimate"]
        points[str(doc["participant_id"])] = TernaryPoint(pt[0], pt[1], pt[2])
    groups = diagnose(points, seed=args.seed)
    _dump_json(args.out, intent_to_dict(groups, points))
    print(f"diagnosed {len(groups)} groups from {len(points)} participants")
    return 0


def _geometry_with_constraints(groups: list[IntentGroup], constraints: list[str]):
    geometry = consensus_mod.build_geometry(groups)
    for text in constraints:
        geometry = consensus_mod.narrow(geometry, _parse_constraint(text))
    return geometry


def _cmd_consensus(args: argparse.Namespace) -> int:
    if args.intent:
        groups = _groups_from_intent_doc(_load_json(args.intent))
    elif args.estimates:
        points = {}
        for path in args.estimates:
            doc = _load_json(path)
            pt = doc["map_estimate"]
            points[str(doc["participant_id"])] = TernaryPoint(pt[0], pt[1], pt[2])
        groups = diagnose(points, seed=args.seed)
    else:
        raise DomainError("no participants: pass --intent or estimate files", code="empty_input")
    geometry = _geometry_with_constraints(groups, args.constraint or [])
    doc = {"geometry": consensus_mod.geometry_to_dict(geometry), "social_choice": None}
    if len(groups) >= 2:
        scenarios = energy.load_scenarios(args.scenarios)
        if any(s.point is None for s in scenarios):
            scenarios = energy.normalize_set(scenarios)
        choice = consensus_mod.positionality_choice(
            groups[0], groups[1], args.dims_total, args.dims_respected, scenarios
        )
        doc["social_choice"] = consensus_mod.choice_to_dict(choice)
        doc["dims_total"] = args.dims_total
        doc["dims_minority_respected"] = args.dims_respected
    _dump_json(args.out, doc)
    if args.svg:
        svg = render_board(_geometry_board(doc))
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg)
    print(f"wrote consensus geometry to {args.out}")
    return 0


def _cmd_choose(args: argparse.Namespace) -> int:
    groups = _groups_from_intent_doc(_load_json(args.intent))
    if len(groups) < 2:
        raise DomainError("positionality choice needs at least two groups", code="empty_input")
    scenarios = energy.load_scenarios(args.scenarios)
    if any(s.point is None for s in scenarios):
        scenarios = energy.normalize_set(scenarios)
    choice = consensus_mod.positionality_choice(
        groups[0], groups[1], args.dims_total, args.dims_respected, scenarios
    )
    _dump_json(args.out, consensus_mod.choice_to_dict(choice))
    print(
        f"target ({choice.target_point.a:.3f}, {choice.target_point.b:.3f}, "
        f"{choice.target_point.c:.3f}) -> scenario {choice.chosen_scenario_id}"
    )
    return 0


def _geometry_board(doc: dict) -> TernaryBoard:
    geometry = doc["geometry"]
    board = TernaryBoard(title="consensus board")
    region = geometry["candidate_region"]["vertices"]
    if region:
        from .ternary import SimplexRegion

        board.regions.append(
            BoardRegion(
                region=SimplexRegion.from_points([TernaryPoint(*v) for v in region]),
                fill="#9e9e9e",
                opacity=0.45,
            )
        )
    for seg in geometry["conflict_segments"]:
        board.segments.append(
            BoardSegment(
                segment=Segment(TernaryPoint(*seg["start"]), TernaryPoint(*seg["end"])),
                stroke="#333333",
                width=1.5,
            )
        )
    for pair in geometry["compromise_paths"]:
        for path in pair["paths"]:
            for seg in path["segments"]:
                board.segments.append(
                    BoardSegment(
                        segment=Segment(TernaryPoint(*seg["start"]), TernaryPoint(*seg["end"])),
                        stroke="#7f8c8d",
                        width=1.0,
                        dashed=True,
                    )
                )
    ref = geometry["reference_point"]
    board.points.append(
        BoardPoint(TernaryPoint(*ref), radius=5.0, fill="#27ae60", label="reference")
    )
    for g in geometry["groups"]:
        color = MAJORITY_COLOR if g["is_majority"] else MINORITY_COLOR
        label = f"group {g['group_id']} (n={g['size']})"
        board.points.append(
            BoardPoint(TernaryPoint(*g["aggregation_point"]), radius=6.0, fill=color, label=label)
        )
    if doc.get("social_choice"):
        target = doc["social_choice"]["target_point"]
        board.points.append(
            BoardPoint(TernaryPoint(*target), radius=5.0, fill="#8e44ad", label="proposal")
        )
    return board


def _cmd_export_ternary(args: argparse.Namespace) -> int:
    if args.geometry:
        svg = render_board(_geometry_board(_load_json(args.geometry)))
    elif args.scenarios:
        scenarios = energy.load_scenarios(args.scenarios)
        if any(s.point is None for s in scenarios):
            scenarios = energy.normalize_set(scenarios)
        board = scenario_cloud_board(
            [s.point for s in scenarios if s.point is not None], title="scenario cloud"
        )
        svg = render_board(board)
    else:
        raise DomainError("pass --scenarios or --geometry", code="empty_input")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.out}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    from .report import render_report

    scenarios = energy.load_scenarios(args.scenarios)
    created = render_report(args.out_dir, scenarios)
    for path in created:
        print(f"wrote {path}")
    return 0


def _cmd_kenn_synth(args: argparse.Namespace) -> int:
    schema = kenn.default_schema()
    corpus, generator = kenn.generate_synthetic_corpus(
        schema, seed=args.seed, n=args.n, noise_sd=args.noise_sd
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        kenn.write_corpus(fh, corpus, schema)
    if args.generator_out:
        kenn.save_model(args.generator_out, generator)
    print(f"wrote {len(corpus)} records to {args.out}")
    return 0


def _cmd_kenn_train(args: argparse.Namespace) -> int:
    with open(args.corpus, "r", encoding="utf-8") as fh:
        corpus, schema = kenn.read_corpus(fh)
    config = kenn.TrainConfig(iterations=args.iterations)
    model, report = kenn.train(corpus, schema, config=config, seed=args.seed)
    kenn.save_model(args.out, model)
    print(
        f"trained on {len(corpus)} records: train R = {report.train_r:.4f}, "
        f"held-out R = {report.heldout_r:.4f}, final loss = {report.final_loss:.6f}"
    )
    return 0


def _cmd_kenn_predict(args: argparse.Namespace) -> int:
    model = kenn.load_model(args.model)
    doc = _load_json(args.record)
    record = kenn.CooperationRecord(
        features=tuple(float(v) for v in doc["features"]),
        traits=tuple(float(v) for v in doc["traits"]),
        rate=float(doc.get("rate", 0.0)),
    )
    rate, scores = kenn.predict(model, record)
    _dump_json(
        args.out,
        {
            "cooperation_rate": rate,
            "determinants": {
                name: {"raw": raw, "normalized": norm}
                for name, raw, norm in zip(scores.names, scores.raw, scores.normalized)
            },
        },
    )
    print(f"predicted cooperation rate {rate:.4f}")
    return 0


def _cmd_kenn_interventions(args: argparse.Namespace) -> int:
    model = kenn.load_model(args.model)
    with open(args.corpus, "r", encoding="utf-8") as fh:
        corpus, _ = kenn.read_corpus(fh)
    interventions = {str(k): float(v) for k, v in _load_json(args.interventions).items()}
    effects = kenn.rank_interventions(model, corpus, interventions)
    _dump_json(
        args.out,
        [
            {"feature": e.feature, "level": e.level, "mean_delta": e.mean_delta}
            for e in effects
        ],
    )
    table = kenn.interventions_table(effects)
    if args.table:
        with open(args.table, "w", encoding="utf-8") as fh:
            fh.write(table)
    print(table, end="")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import SessionStore, create_app

    store = SessionStore(store_dir=args.store)
    if args.scenarios:
        store.load_scenario_file(args.scenarios, name="default")
    app = create_app(store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coos", description="community consensus toolkit (slow loop + fast loop)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a parameter sweep, write scenarios as JSON Lines")
    p.add_argument("--config", help="sweep config JSON (defaults to the shipped 20,000-point sweep)")
    p.add_argument("--out", required=True)
    p.add_argument("--normalize", action="store_true", help="also normalize and project")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("normalize", help="min-max normalize a raw scenario set")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("ask", help="interactive terminal paired-comparison session")
    p.add_argument("--scenarios", required=True)
    p.add_argument("--participant", required=True)
    p.add_argument("--out", required=True, help="response log (JSON Lines)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-questions", type=int, default=pclm.MAX_QUESTIONS)
    p.set_defaults(func=_cmd_ask)

    p = sub.add_parser("estimate", help="recompute a preference estimate from a response log")
    p.add_argument("--scenarios", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("intent", help="cluster preference estimates into intent groups")
    p.add_argument("estimates", nargs="+", help="estimate JSON files")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_intent)

    p = sub.add_parser("consensus", help="build the consensus geometry (JSON + SVG board)")
    p.add_argument("estimates", nargs="*", help="estimate JSON files (alternative to --intent)")
    p.add_argument("--intent", help="intent JSON from the intent subcommand")
    p.add_argument("--scenarios", help="normalized scenario set for the social choice")
    p.add_argument("--constraint", action="append", help="e.g. 'a>=0.4' (repeatable)")
    p.add_argument("--dims-total", type=int, default=3)
    p.add_argument("--dims-respected", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_consensus)

    p = sub.add_parser("choose", help="positionality-weighted social choice")
    p.add_argument("--intent", required=True)
    p.add_argument("--scenarios", required=True)
    p.add_argument("--dims-total", type=int, default=3)
    p.add_argument("--dims-respected", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_choose)

    p = sub.add_parser("export-ternary", help="render a scenario cloud or geometry board as SVG")
    p.add_argument("--scenarios")
    p.add_argument("--geometry")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_ternary)

    p = sub.add_parser("report", help="figures + CSV summary for a scenario set")
    p.add_argument("--scenarios", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("kenn-synth", help="generate a synthetic cooperation corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=700)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-sd", type=float, default=0.05)
    p.add_argument("--generator-out", help="also save the hidden generator model")
    p.set_defaults(func=_cmd_kenn_synth)

    p = sub.add_parser("kenn-train", help="train the cooperation model on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=4000)
    p.set_defaults(func=_cmd_kenn_train)

    p = sub.add_parser("kenn-predict", help="predict cooperation rate + determinant scores")
    p.add_argument("--model", required=True)
    p.add_argument("--record", required=True, help="JSON with 'features' and 'traits'")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_kenn_predict)

    p = sub.add_parser("kenn-interventions", help="rank intervention effects over a corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--interventions", required=True, help="JSON object: feature -> level")
    p.add_argument("--out", required=True)
    p.add_argument("--table", help="also write the plain-text ranking table")
    p.set_defaults(func=_cmd_kenn_interventions)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8642)
    p.add_argument("--scenarios", help="normalized scenario set registered as 'default'")
    p.add_argument("--store", help="event-log persistence directory")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
