"""
Experiment runner

Config-driven scenarios over the accretive toolkit: each bundled config
names a scenario tag, the runner measures it and the report writer emits
CSV rows, a JSON summary and a run log.
"""

from .config import ConfigError, EBMScenario, ExperimentConfig, load_config, load_ebm_config, load_ebm_scenario
from .ebm import build_model, run_ebm, uniqueness_experiment
from .report_writer import ReportRow, ReportWriter, aggregate_reports, configure_logging
from .scenarios import ExperimentOutcome, RunContext, run_experiment

__version__ = "1.0.0"

__all__ = [
    'ConfigError', 'EBMScenario', 'ExperimentConfig', 'load_config', 'load_ebm_config', 'load_ebm_scenario',
    'build_model', 'run_ebm', 'uniqueness_experiment',
    'ReportRow', 'ReportWriter', 'aggregate_reports', 'configure_logging',
    'ExperimentOutcome', 'RunContext', 'run_experiment',
]
