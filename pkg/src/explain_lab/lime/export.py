"""
JSON form of an explanation:

    {"bias": [...], "weights": [{"feature_index", "class", "weight"}, ...],
     "meta": {"sigma", "n_samples", "seed", ...}}

with weights sorted by decreasing magnitude
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from explain_lab.errors import FormatError
from explain_lab.models import LinearExplanation


def explanation_to_dict(explanation: LinearExplanation, meta: dict[str, Any] | None = None) -> dict[str, Any]:
    dz, n_classes = explanation.w.shape
    entries = [
        {"feature_index": int(j), "class": int(c), "weight": float(explanation.w[j, c])}
        for j in range(dz)
        for c in range(n_classes)
    ]
    # stable sort keeps (feature, class) order among equal magnitudes
    entries.sort(key=lambda e: -abs(e["weight"]))
    return {
        "bias": [float(v) for v in explanation.b],
        "n_features": dz,
        "weights": entries,
        "meta": dict(meta or {}),
    }


def explanation_to_json(explanation: LinearExplanation, meta: dict[str, Any] | None = None) -> str:
    return json.dumps(explanation_to_dict(explanation, meta), indent=2)


def explanation_from_json(text: str) -> tuple[LinearExplanation, dict[str, Any]]:
    try:
        doc = json.loads(text)
        bias = np.asarray(doc["bias"], dtype=np.float64)
        w = np.zeros((int(doc["n_features"]), bias.shape[0]))
        for entry in doc["weights"]:
            w[entry["feature_index"], entry["class"]] = entry["weight"]
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise FormatError(f"not an explanation document: {e}") from e
    return LinearExplanation(bias, w), doc.get("meta", {})
