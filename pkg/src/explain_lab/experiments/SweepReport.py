from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, NamedTuple

import numpy as np
import pandas as pd

from explain_lab.errors import FormatError, NumericError, ParameterError

COLUMNS = ["experiment", "condition", "model", "trial", "metric", "value"]


class ReportRow(NamedTuple):
    experiment: str
    condition: float
    model: str
    trial: int
    metric: str
    value: float

    @property
    def key(self) -> tuple[str, float, str, int, str]:
        return (self.experiment, self.condition, self.model, self.trial, self.metric)


class Failure(NamedTuple):
    experiment: str
    condition: float
    trial: int
    error: str


@dataclass
class SweepReport:
    """
    Tabular `(experiment, condition, model, trial, metric, value)` records of
    a sweep. Keys are unique and values finite; failed trials leave no rows
    and are listed under `failures` instead.
    """

    seed: int = 0
    config_hash: str = ""
    timestamp: str = ""
    rows: list[ReportRow] = field(default_factory=list)
    failures: list[Failure] = field(default_factory=list)
    _keys: set = field(default_factory=set, repr=False)

    def add(
        self,
        experiment: str,
        condition: float,
        model: str,
        trial: int,
        metric: str,
        value: float,
    ) -> None:
        """
        Raise
        -----
        `ParameterError` on a duplicate key, `NumericError` on a non-finite value
        """

        row = ReportRow(experiment, float(condition), model, int(trial), metric, float(value))
        if not math.isfinite(row.value):
            raise NumericError(f"non-finite value for {row.key}")
        if row.key in self._keys:
            raise ParameterError(f"duplicate report key {row.key}")
        self._keys.add(row.key)
        self.rows.append(row)

    def extend(self, rows: Iterable[ReportRow]) -> None:
        for row in rows:
            self.add(*row)

    def fail(self, experiment: str, condition: float, trial: int, error: str) -> None:
        self.failures.append(Failure(experiment, float(condition), int(trial), error))

    @property
    def failed(self) -> bool:
        return bool(self.failures)

    def sorted_rows(self) -> list[ReportRow]:
        return sorted(self.rows, key=lambda r: r.key)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.sorted_rows(), columns=COLUMNS)

    def values(self, **match: Any) -> list[float]:
        """
        Values of rows whose fields equal every keyword, in canonical order
        """

        return [
            r.value for r in self.sorted_rows() if all(getattr(r, k) == v for k, v in match.items())
        ]

    def mean(self, **match: Any) -> float:
        values = self.values(**match)
        if not values:
            raise ParameterError(f"no report rows match {match}")
        return float(np.mean(values))

    def metadata(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "config_hash": self.config_hash,
            "timestamp": self.timestamp,
            "failures": [f._asdict() for f in sorted(self.failures)],
        }

    def to_csv(self) -> str:
        return self.to_frame().to_csv(index=False, float_format="%.17g")

    def write(self, directory: Path | str, stem: str = "report") -> tuple[Path, Path]:
        """
        Write `<stem>.csv` and its `<stem>.json` metadata sidecar
        """

        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = directory / f"{stem}.csv"
        json_path = directory / f"{stem}.json"
        csv_path.write_text(self.to_csv())
        json_path.write_text(json.dumps(self.metadata(), indent=2))
        return csv_path, json_path

    @classmethod
    def read(cls, csv_path: Path | str, json_path: Path | str | None = None) -> "SweepReport":
        csv_path = Path(csv_path)
        if not csv_path.exists():
            raise FileNotFoundError(f"no such file: {csv_path}")
        frame = pd.read_csv(csv_path, float_precision="round_trip")
        if list(frame.columns) != COLUMNS:
            raise FormatError(f"report header must be {','.join(COLUMNS)}", csv_path, 0)
        meta: dict[str, Any] = {}
        json_path = Path(json_path) if json_path else csv_path.with_suffix(".json")
        if json_path.exists():
            meta = json.loads(json_path.read_text())
        report = cls(meta.get("seed", 0), meta.get("config_hash", ""), meta.get("timestamp", ""))
        for record in frame.itertuples(index=False):
            report.add(
                str(record.experiment),
                float(record.condition),
                str(record.model),
                int(record.trial),
                str(record.metric),
                float(record.value),
            )
        for f in meta.get("failures", []):
            report.fail(f["experiment"], f["condition"], f["trial"], f["error"])
        return report


def summarize(report: SweepReport) -> pd.DataFrame:
    """
    Mean and sample standard deviation (ddof=1, 0 for one trial) over trials
    """

    frame = report.to_frame()
    columns = ["experiment", "condition", "model", "metric", "mean", "std", "n"]
    if frame.empty:
        return pd.DataFrame(columns=columns)
    grouped = frame.groupby(["experiment", "condition", "model", "metric"], sort=True)["value"]
    summary = grouped.agg(mean="mean", std=lambda v: float(v.std(ddof=1)) if len(v) > 1 else 0.0, n="count")
    return summary.reset_index()[columns]
