"""Freeze service responses for the calculator's test suite.

Scores scripted inputs through the real scoring service (in-process test
client) and writes the documents plus request/response pairs the vitest
suite replays. Regenerate after any wire-format change:

    python3 frontend/scripts/generate_fixtures.py
"""

import itertools
import json
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from lesionkit.logistic import fit_logistic
from lesionkit.nomogram import build_nomogram, paper_fixture_nomogram, to_document
from lesionkit.pipeline import dump_json
from lesionkit.service import create_app

OUT = Path(__file__).parent.parent / "tests" / "fixtures" / "ui_fixtures.json"


def fitted_doc():
    """Small calibrated nomogram with one continuous axis, fixed data."""
    rng = np.random.default_rng(1234)
    n = 240
    margin = rng.integers(1, 6, size=n).astype(float)
    concavity = rng.uniform(0.0, 0.35, size=n)
    logit = 0.8 * margin + 6.0 * concavity - 3.2
    y = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-logit))).astype(float)
    model = fit_logistic(np.column_stack([margin, concavity]), y,
                         names=["margin", "concavity"])
    nomo = build_nomogram(
        model,
        {"margin": (1.0, 5.0), "concavity": (0.0, 0.35)},
        task="biopsy",
        levels={"margin": ("circumscribed", "angular", "indistinct",
                           "microlobulated", "spiculated")},
        bands=({"label": "biopsy advised", "min_probability": 0.5},),
        provenance={"fixture": "calculator test nomogram"},
    )
    return to_document(nomo, "biopsy-demo-fitted")


def scripted_inputs():
    biopsy_levels = {
        "shape": ["irregular", "oval", "round"],
        "orientation": ["parallel", "not_parallel"],
        "margin": ["circumscribed", "angular", "indistinct", "microlobulated", "spiculated"],
        "posterior": ["enhancement", "none", "shadowing"],
        "calcifications": ["in_mass", "outside_mass", "none"],
    }
    combos = list(itertools.islice(itertools.product(*biopsy_levels.values()), 0, 240, 24))[:10]
    for combo in combos:
        yield "biopsy-fixture", dict(zip(biopsy_levels, combo))
    # controlled pair differing only in margin, for the what-if sign check
    base = {"shape": "oval", "orientation": "parallel", "posterior": "none",
            "calcifications": "none"}
    yield "biopsy-fixture", {**base, "margin": "circumscribed"}
    yield "biopsy-fixture", {**base, "margin": "spiculated"}
    malignancy_levels = {
        "orientation": ["parallel", "not_parallel"],
        "margin": ["circumscribed", "angular", "indistinct", "microlobulated", "spiculated"],
        "calcifications": ["in_mass", "outside_mass", "none"],
    }
    for combo in itertools.islice(itertools.product(*malignancy_levels.values()), 0, 30, 6):
        yield "malignancy-fixture", dict(zip(malignancy_levels, combo))
    yield "biopsy-demo-fitted", {"margin": "spiculated", "concavity": 0.21}
    yield "biopsy-demo-fitted", {"margin": "circumscribed", "concavity": 0.02}
    yield "biopsy-demo-fitted", {"margin": "indistinct", "concavity": 0.3}


def main():
    artifact_dir = OUT.parent / "artifacts"
    artifact_dir.mkdir(parents=True, exist_ok=True)
    docs = {
        "biopsy-fixture": to_document(paper_fixture_nomogram("biopsy"), "biopsy-fixture"),
        "malignancy-fixture": to_document(paper_fixture_nomogram("malignancy"), "malignancy-fixture"),
        "biopsy-demo-fitted": fitted_doc(),
    }
    for doc_id, doc in docs.items():
        (artifact_dir / f"nomogram_{doc_id}.json").write_text(dump_json(doc))

    client = TestClient(create_app(artifact_dir))
    scored = []
    for doc_id, features in scripted_inputs():
        response = client.post(f"/nomograms/{doc_id}/score", json={"features": features})
        response.raise_for_status()
        scored.append({
            "nomogram_id": doc_id,
            "features": features,
            "response": response.json(),
        })
    summaries = client.get("/nomograms").json()

    OUT.write_text(json.dumps(
        {"docs": docs, "summaries": summaries, "scored": scored},
        indent=1, sort_keys=True,
    ) + "\n")
    print(f"{OUT}: {len(scored)} scored inputs across {len(docs)} nomograms")


if __name__ == "__main__":
    main()
