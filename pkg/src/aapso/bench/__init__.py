from .config import ExperimentConfig, load_config
from .experiment import RunRecord, load_records, run_experiment
from .report import Report, summarize

__all__ = [
    "ExperimentConfig", "load_config", "RunRecord", "load_records",
    "run_experiment", "Report", "summarize",
]
