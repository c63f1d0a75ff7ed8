"""JSON run reports and their schema."""
from __future__ import annotations

import json
import math
from dataclasses import asdict
from importlib import resources

from . import __version__
from .data import CamcfConfig, Dataset, SelectionResult
from .io import fingerprint
from .pipeline import PHASES

SCHEMA_VERSION = 1


def load_schema() -> dict:
    return json.loads(resources.files("camcf").joinpath("report_schema.json").read_text())


def _clean(v):
    if isinstance(v, float) and math.isnan(v):
        return None
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if hasattr(v, "item") and not isinstance(v, (str, bytes)):
        return _clean(v.item())
    return v


def _category_entry(dataset, hood, with_timings):
    t = hood.target
    return {
        "label_index": t.label_index,
        "label_name": dataset.label_names[t.label_index],
        "category_value": t.category_value,
        "support": int(t.indicator.sum()),
        "delta1": float(hood.delta1),
        "skeleton": [
            {"label_index": n.label_index, "category_value": n.category_value, "score": float(s)}
            for n, s in hood.skeleton.members
        ],
        "pc": list(hood.pc),
        "sp": list(hood.sp),
        "recovered": list(hood.recovered),
        "final_cmb": list(hood.final_cmb),
        "trace": {
            "sets": {p: list(hood.trace.sets[p]) for p in PHASES},
            "ci_tests": dict(hood.trace.ci_tests),
            "durations_ms": dict(hood.trace.durations_ms) if with_timings else None,
            "capped_tests": hood.trace.capped_tests,
        },
    }


def build_report(
    command: str,
    dataset: Dataset,
    config: CamcfConfig,
    result: SelectionResult,
    *,
    path=None,
    evaluation: dict | None = None,
    total_ms: float | None = None,
    with_timings: bool = True,
) -> dict:
    hoods = [result.per_category[k] for k in sorted(result.per_category)]
    timings = None
    if with_timings:
        timings = {p: sum(h.trace.durations_ms[p] for h in hoods) for p in PHASES}
        timings["total"] = total_ms if total_ms is not None else sum(timings.values())
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "camcf", "version": __version__},
        "command": command,
        "config": asdict(config),
        "dataset": {
            "path": None if path is None else str(path),
            "fingerprint": fingerprint(dataset),
            "n_samples": dataset.n_samples,
            "n_features": dataset.n_features,
            "n_labels": dataset.n_labels,
            "feature_names": list(dataset.feature_names),
            "label_names": list(dataset.label_names),
            "discretized": list(dataset.discretized),
        },
        "categories": [_category_entry(dataset, h, with_timings) for h in hoods],
        "selected": {
            "indices": list(result.global_selected),
            "names": result.selected_names(dataset),
        },
        "phase_snapshots": {p: list(result.per_phase_snapshots[p]) for p in PHASES},
        "evaluation": evaluation,
        "timings_ms": timings,
    }
    return _clean(report)


def validate_report(report: dict) -> None:
    import jsonschema

    jsonschema.validate(report, load_schema())


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def loads(text: str) -> dict:
    return json.loads(text)
