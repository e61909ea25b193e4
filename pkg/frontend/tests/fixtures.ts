import type { ConsensusDoc, IntentDoc, QuestionDoc, PreferenceDoc } from "../src/types.js";

/** Hand-built payloads shaped exactly like the service's JSON. */

export function consensusFixture(): ConsensusDoc {
  return {
    session_id: "s1",
    dims_total: 3,
    dims_minority_respected: 1,
    social_choice: {
      target_point: [0.3, 0.5, 0.2],
      target_xy: [-0.1, 0.05],
      chosen_scenario_id: 7,
      weights_used: [7, 21],
      dimension_ratio_used: 3,
    },
    geometry: {
      reference_point: [0.48, 0.32, 0.2],
      reference_point_xy: [0.02, 0.11],
      groups: [
        {
          group_id: 0,
          size: 7,
          is_majority: true,
          aggregation_point: [0.6, 0.2, 0.2],
          aggregation_xy: [0.0, 0.4],
        },
        {
          group_id: 1,
          size: 3,
          is_majority: false,
          aggregation_point: [0.2, 0.5, 0.3],
          aggregation_xy: [-0.17, -0.25],
        },
      ],
      conflict_segments: [
        {
          start: [0.6, 0.2, 0.2],
          end: [0.48, 0.32, 0.2],
          start_xy: [0.0, 0.4],
          end_xy: [0.02, 0.11],
          held_coordinate: null,
        },
        {
          start: [0.2, 0.5, 0.3],
          end: [0.48, 0.32, 0.2],
          start_xy: [-0.17, -0.25],
          end_xy: [0.02, 0.11],
          held_coordinate: null,
        },
      ],
      compromise_paths: [
        {
          from_group: 0,
          to_group: 1,
          paths: [
            {
              via: [0.3, 0.5, 0.2],
              via_xy: [-0.1, 0.05],
              held_axes: ["c", "b"],
              total_length: 0.52,
              segments: [
                {
                  start: [0.6, 0.2, 0.2],
                  end: [0.3, 0.5, 0.2],
                  start_xy: [0.0, 0.4],
                  end_xy: [-0.1, 0.05],
                  held_coordinate: "c",
                },
                {
                  start: [0.3, 0.5, 0.2],
                  end: [0.2, 0.5, 0.3],
                  start_xy: [-0.1, 0.05],
                  end_xy: [-0.17, -0.25],
                  held_coordinate: "b",
                },
              ],
            },
            {
              via: [0.5, 0.2, 0.3],
              via_xy: [0.08, 0.2],
              held_axes: ["b", "c"],
              total_length: 0.61,
              segments: [
                {
                  start: [0.6, 0.2, 0.2],
                  end: [0.5, 0.2, 0.3],
                  start_xy: [0.0, 0.4],
                  end_xy: [0.08, 0.2],
                  held_coordinate: "b",
                },
                {
                  start: [0.5, 0.2, 0.3],
                  end: [0.2, 0.5, 0.3],
                  start_xy: [0.08, 0.2],
                  end_xy: [-0.17, -0.25],
                  held_coordinate: "c",
                },
              ],
            },
          ],
        },
      ],
      candidate_region: {
        vertices: [
          [0.6, 0.2, 0.2],
          [0.3, 0.5, 0.2],
          [0.2, 0.5, 0.3],
        ],
        vertices_xy: [
          [0.0, 0.4],
          [-0.1, 0.05],
          [-0.17, -0.25],
        ],
        area: 0.042,
      },
      applied_constraints: [],
    },
  };
}

export function intentFixture(): IntentDoc {
  return {
    session_id: "s1",
    groups: [
      {
        group_id: 0,
        member_ids: ["p2", "p3"],
        size: 2,
        is_majority: true,
        aggregation_point: [0.6, 0.2, 0.2],
        aggregation_xy: [0.0, 0.4],
        members: [
          { participant_id: "p2", point: [0.62, 0.19, 0.19], xy: [0.01, 0.42] },
          { participant_id: "p3", point: [0.58, 0.21, 0.21], xy: [-0.01, 0.38] },
        ],
      },
      {
        group_id: 1,
        member_ids: ["p4"],
        size: 1,
        is_majority: false,
        aggregation_point: [0.2, 0.5, 0.3],
        aggregation_xy: [-0.17, -0.25],
        members: [{ participant_id: "p4", point: [0.2, 0.5, 0.3], xy: [-0.17, -0.25] }],
      },
    ],
  };
}

export function questionFixture(): QuestionDoc {
  return {
    done: false,
    question_id: "q0",
    asked_count: 0,
    converged: false,
    choice_a: {
      scenario_id: 4,
      raw: { social: 0.3, environmental: 0.7, economic_cost: 120000 },
      generation_mix: [0.4, 0.3, 0.3],
      normalized: [0.4, 0.9, 0.2],
      point: [0.27, 0.6, 0.13],
      point_xy: [-0.2, 0.1],
    },
    choice_b: {
      scenario_id: 9,
      raw: { social: 0.5, environmental: 0.2, economic_cost: 90000 },
      generation_mix: [0.1, 0.2, 0.7],
      normalized: [0.8, 0.1, 0.7],
      point: [0.5, 0.06, 0.44],
      point_xy: [0.25, 0.15],
    },
  };
}

export function preferenceFixture(): PreferenceDoc {
  return {
    participant_id: "p2",
    map_estimate: [0.34, 0.33, 0.33],
    map_xy: [0.004, 0.01],
    credible_region_diameter: 1.8,
    converged: false,
    response_count: 0,
  };
}
