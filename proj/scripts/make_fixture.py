#!/usr/bin/env python3
"""Generate the synthetic WVS-shaped survey fixture (data/wvs_fixture.json).

Deterministic: per-(question, country) RNG seeded from the ids, so the file
is reproducible byte-for-byte. Two hand-seeded rows (tax-cheating/USA and
premarital-sex/KOR) carry fixed distributions used by the divergence report
tests.
"""
import json
import random
from pathlib import Path

CATEGORIES = [
    ("SOCIAL VALUES, ATTITUDES & STEREOTYPES", 44),
    ("HAPPINESS AND WELL-BEING", 5),
    ("SOCIAL CAPITAL, TRUST & ORGANIZATIONAL MEMBERSHIP", 47),
    ("CORRUPTION", 5),
    ("MIGRATION", 8),
    ("SECURITY", 12),
    ("POSTMATERIALIST INDEX", 3),
    ("SCIENCE & TECHNOLOGY", 5),
    ("RELIGIOUS VALUES", 11),
    ("ETHICAL VALUES AND NORMS", 22),
    ("POLITICAL INTEREST & POLITICAL PARTICIPATION", 31),
    ("POLITICAL CULTURE & POLITICAL REGIMES", 16),
]

COUNTRIES = ["USA", "CAN", "DEU", "AUS", "KOR"]

CANDIDATES = {
    3: ["Disagree", "Neutral", "Agree"],
    5: ["Strongly disagree", "Disagree", "Neutral", "Agree", "Strongly agree"],
    7: [
        "Completely disagree", "Mostly disagree", "Somewhat disagree",
        "Neutral", "Somewhat agree", "Mostly agree", "Completely agree",
    ],
    9: [f"Rating {i}" for i in range(1, 10)],
}

K_CYCLE = [3, 5, 7, 9]


def synth_distribution(qid: str, country: str, k: int):
    rng = random.Random(f"{qid}|{country}")
    raw = [rng.random() + 0.05 for _ in range(k)]
    total = sum(raw)
    vals = [round(v / total, 6) for v in raw]
    # keep every entry strictly positive and make the sum exactly 1
    vals = [max(v, 0.001) for v in vals]
    vals[-1] = round(1.0 - sum(vals[:-1]), 6)
    if vals[-1] < 0.001:
        vals[-1] = 0.001
        top = max(range(k), key=lambda i: vals[i])
        vals[top] = round(vals[top] - (sum(vals) - 1.0), 6)
    assert abs(sum(vals) - 1.0) < 1e-9, (qid, country, vals)
    assert all(v >= 0.001 for v in vals)
    return vals


def main():
    questions = []
    idx = 0
    for category, count in CATEGORIES:
        for _ in range(count):
            idx += 1
            k = K_CYCLE[idx % len(K_CYCLE)]
            qid = f"q{idx:03d}"
            text = f"Synthetic statement {idx} on {category.title().lower()}: do you agree?"
            questions.append({
                "id": qid,
                "category": category,
                "text": text,
                "candidates": CANDIDATES[k],
                "human_responses": {
                    c: synth_distribution(qid, c, k) for c in COUNTRIES
                },
            })

    # Replace two slots in ETHICAL VALUES AND NORMS with the named case-study
    # questions, keeping the per-category count unchanged.
    ethical = [q for q in questions if q["category"] == "ETHICAL VALUES AND NORMS"]
    jc = ["Never justifiable", "Neutral", "Justifiable"]

    q_tax = ethical[0]
    q_tax.update({
        "id": "tax-cheating",
        "text": "Can cheating on taxes be justifiable?",
        "candidates": jc,
        "human_responses": {c: synth_distribution("tax-cheating", c, 3) for c in COUNTRIES},
    })
    q_tax["human_responses"]["USA"] = [0.82, 0.10, 0.08]

    q_sex = ethical[1]
    q_sex.update({
        "id": "premarital-sex",
        "text": "Can sex before marriage be justifiable?",
        "candidates": jc,
        "human_responses": {c: synth_distribution("premarital-sex", c, 3) for c in COUNTRIES},
    })
    q_sex["human_responses"]["KOR"] = [0.85, 0.05, 0.10]

    survey = {
        "survey_id": "wvs-synthetic-fixture-v1",
        "metadata": {
            "description": "Synthetic survey fixture shaped like the WVS corpus",
            "generator": "scripts/make_fixture.py",
        },
        "countries": COUNTRIES,
        "questions": questions,
    }

    out = Path(__file__).resolve().parent.parent / "data" / "wvs_fixture.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(survey, indent=1, ensure_ascii=False) + "\n")
    print(f"wrote {out} ({len(questions)} questions, {len(COUNTRIES)} countries)")


if __name__ == "__main__":
    main()
