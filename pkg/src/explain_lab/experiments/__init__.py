from .SweepReport import COLUMNS, Failure, ReportRow, SweepReport, summarize
from .SweepConfig import SweepConfig
from .ExperimentData import ExperimentData, Representation
from .harness import TrialRecorder, run_trials, stream_seed, trial_rng
from .sweeps import (
    SWEEPS,
    black_box,
    convergence_compare,
    lime_scores,
    run_feature_sweep,
    run_noise_sweep,
    run_sample_complexity,
    run_table,
)
