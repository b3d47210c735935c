#!/usr/bin/env python3
"""Writes the synthetic 20-case MoVid-layout benchmark and its two configs.

    python3 tools/fixtures/make_bench_fixture.py tests/data/bench
    build/tools/motionagent bench --config tests/data/bench/record.json \
        --dataset tests/data/bench/movid_20.jsonl --format movid \
        --out /tmp/record_report.json --record-dir tests/data/bench/cassettes
    build/tools/motionagent bench --config tests/data/bench/replay.json \
        --dataset tests/data/bench/movid_20.jsonl --format movid \
        --out tests/data/bench/golden_report.json
"""

import json
import sys
from pathlib import Path

# (category, question, truth, answers from analyzers A, B, C)
CASES = [
    ("Body", "Which body part leads the movement?", "the right arm",
     "the right arm", "the right arm", "the left leg"),
    ("Body", "Which limb stays still?", "the left leg",
     "the left leg", "the right leg", "the right leg"),
    ("Body", "What part of the body bends most?", "the knees bend deeply",
     "the knees bend deeply", "the hips", "the knees bend deeply"),
    ("Body", "Which hand holds the object?", "the left hand",
     "the right hand", "the right hand", "the right hand"),
    ("Seq", "What does the person do after standing up?", "walks forward then waves",
     "walks forward then waves", "walks forward then waves", "sits down"),
    ("Seq", "What happens first?", "a jump",
     "a jump", "a squat", "a jump"),
    ("Seq", "What is the final action?", "sits on the floor",
     "sits on the floor", "lies down", "lies down"),
    ("Seq", "Which action comes between the two turns?", "a short pause",
     "a kick", "a kick", "a short pause"),
    ("Dir", "Which way does the person walk?", "to the left",
     "to the left", "to the left", "to the right"),
    ("Dir", "Which direction is the turn?", "clockwise",
     "clockwise", "counterclockwise", "clockwise"),
    ("Dir", "Where does the person look at the end?", "upward at the ceiling",
     "upward at the ceiling", "down", "down"),
    ("Dir", "Which way is the lunge?", "forward",
     "backward", "backward", "backward"),
    ("Rea", "Why does the person stretch the arms?", "to warm up before running",
     "to warm up before running", "to warm up before running", "to dance"),
    ("Rea", "What is the person likely preparing for?", "a high jump",
     "a high jump", "a sprint", "a high jump"),
    ("Rea", "Why does the person slow down?", "they are tired after the climb",
     "they are tired after the climb", "to stop", "to stop"),
    ("Rea", "What sport does this resemble?", "tennis serve",
     "golf swing", "golf swing", "golf swing"),
    ("Hall", "Does the person ride a bicycle?", "no the person walks",
     "no the person walks", "no the person walks", "yes riding"),
    ("Hall", "Is the person holding an umbrella?", "no",
     "no", "yes an umbrella", "no"),
    ("Hall", "Does the person swim?", "no the person jogs in place",
     "no the person jogs in place", "yes swimming", "yes swimming"),
    # No motion model accepts video-only media, so every round fails and
    # the case is reported as failed.
    ("Hall", "Is there a dog in the clip?", "no", None, None, None),
]

ANALYZERS = {"A": 0.8, "B": 0.5, "C": 0.4}


def case_rows():
    counters = {}
    for cat, question, truth, *answers in CASES:
        counters[cat] = counters.get(cat, 0) + 1
        case_id = f"mv-{cat.lower()}-{counters[cat]:02d}"
        if answers[0] is None:
            media = {"id": case_id, "video": f"clips/{case_id}.mp4"}
        else:
            media = {"id": case_id, "motion": f"clips/{case_id}.npy"}
        yield {
            "case_id": case_id,
            "category": cat,
            "media": media,
            "question": question,
            "ground_truth": truth,
        }, answers


def record_config(rows):
    steps = {m: [] for m in ANALYZERS}
    for row, answers in rows:
        for model, answer in zip(ANALYZERS, answers):
            if answer is not None:
                steps[model].append({"match": '"' + row["case_id"] + '"', "text": answer})
    backends = [
        {"id": "planner", "kind": "reasoner", "transport": "template"},
        {"id": "judge", "kind": "judge", "transport": "template"},
    ]
    for model in ANALYZERS:
        backends.append({"id": model, "kind": "motion_specialist", "transport": "mock",
                         "responses": {"analyze": steps[model]}})
    return {
        "description": "synthetic benchmark, recording run",
        "seed": 20240601,
        "round_budget": 3,
        "rubric_version": "v1",
        "fan_out": {"deadline_ms": 5000, "quorum": 1},
        "aggregation": "confidence",
        "confidence_table": {
            "default": 0.3,
            "entries": [{"model_id": m, "modality": "motion", "confidence": c} for m, c in ANALYZERS.items()],
        },
        "backends": backends,
        "roles": {"planner": "planner", "verifier": "planner", "generator": "planner",
                  "analyzers": list(ANALYZERS), "judge": "judge"},
    }


def replay_config(record):
    cfg = json.loads(json.dumps(record))
    cfg["description"] = "synthetic benchmark, replay run"
    cfg["backends"] = [
        {"id": b["id"], "kind": b["kind"], "transport": "replay", "cassette": f"cassettes/{b['id']}.jsonl"}
        for b in record["backends"]
    ]
    return cfg


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/data/bench")
    out.mkdir(parents=True, exist_ok=True)
    rows = list(case_rows())
    with open(out / "movid_20.jsonl", "w") as f:
        for row, _ in rows:
            f.write(json.dumps(row, sort_keys=True) + "\n")
    record = record_config(rows)
    (out / "record.json").write_text(json.dumps(record, indent=2) + "\n")
    (out / "replay.json").write_text(json.dumps(replay_config(record), indent=2) + "\n")


if __name__ == "__main__":
    main()
