from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Callable, Iterator, Sequence

from tqdm import tqdm

from explain_lab.errors import ExplainLabError
from explain_lab.models import TrainConfig
from explain_lab.numkit import Rng

from .SweepConfig import SweepConfig
from .SweepReport import Failure, ReportRow, SweepReport

logger = logging.getLogger(__name__)


def trial_rng(seed: int, experiment: str, *keys: int | str | float) -> Rng:
    """
    Stream for one `(experiment, ..., trial)` cell; float conditions are keyed
    by their repr so the stream does not depend on the grid they sit in
    """

    parts = [repr(float(k)) if isinstance(k, float) else k for k in keys]
    return Rng(seed).derive(experiment, *parts)


def stream_seed(rng: Rng) -> int:
    return int(rng.integers(0, 2**62))


def train_config_for(config: SweepConfig, rng: Rng) -> TrainConfig:
    return config.train.model_copy(update={"seed": stream_seed(rng), "progress": False})


class ConditionRows:
    def __init__(self, experiment: str, condition: float, trial: int) -> None:
        self.experiment = experiment
        self.condition = float(condition)
        self.trial = trial
        self.rows: list[ReportRow] = []

    def add(self, model: str, metric: str, value: float) -> None:
        self.rows.append(
            ReportRow(self.experiment, self.condition, model, self.trial, metric, float(value))
        )


class TrialRecorder:
    """
    Rows and failures of a single trial. Rows of a condition are kept only if
    the whole condition succeeds.
    """

    def __init__(self, experiment: str, trial: int) -> None:
        self.experiment = experiment
        self.trial = trial
        self.rows: list[ReportRow] = []
        self.failures: list[Failure] = []

    def add(self, condition: float, model: str, metric: str, value: float) -> None:
        self.rows.append(
            ReportRow(self.experiment, float(condition), model, self.trial, metric, float(value))
        )

    @contextmanager
    def condition(self, condition: float) -> Iterator[ConditionRows]:
        pending = ConditionRows(self.experiment, condition, self.trial)
        try:
            yield pending
        except ExplainLabError as e:
            logger.warning(
                "%s trial %d condition %s failed: %s", self.experiment, self.trial, condition, e
            )
            self.failures.append(Failure(self.experiment, float(condition), self.trial, str(e)))
        else:
            self.rows.extend(pending.rows)

    def fail_all(self, conditions: Sequence[float], error: Exception) -> None:
        logger.warning("%s trial %d failed: %s", self.experiment, self.trial, error)
        for condition in conditions:
            self.failures.append(Failure(self.experiment, float(condition), self.trial, str(error)))


def run_trials(
    experiment: str,
    config: SweepConfig,
    conditions: Sequence[float],
    trial_fn: Callable[[int, TrialRecorder], None],
) -> SweepReport:
    """
    Run `trial_fn(trial, recorder)` for every trial on up to `config.jobs`
    threads and merge the results in canonical order.

    An `ExplainLabError` escaping a trial marks every condition of that trial
    as failed; other exceptions propagate.
    """

    def one(trial: int) -> TrialRecorder:
        recorder = TrialRecorder(experiment, trial)
        logger.debug("%s trial %d started", experiment, trial)
        try:
            trial_fn(trial, recorder)
        except ExplainLabError as e:
            recorder.rows.clear()
            recorder.failures.clear()
            recorder.fail_all(conditions, e)
        logger.debug("%s trial %d finished with %d rows", experiment, trial, len(recorder.rows))
        return recorder

    trials = config.selected_trials()
    logger.info("%s: %d trials over %d conditions, %d jobs", experiment, len(trials), len(conditions), config.jobs)
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        recorders = list(
            tqdm(pool.map(one, trials), total=len(trials), desc=experiment, disable=not config.progress)
        )

    report = SweepReport(
        seed=config.seed,
        config_hash=config.config_hash(),
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    for recorder in recorders:
        report.extend(recorder.rows)
        for failure in recorder.failures:
            report.fail(*failure)
    if report.failed:
        logger.warning("%s: %d failed trial conditions", experiment, len(report.failures))
    return report
