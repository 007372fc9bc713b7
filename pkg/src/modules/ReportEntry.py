from dataclasses import dataclass, field
from typing import Optional

from .GridCell import GridCell

TIMING_KEYS = ("train_time_ms", "time_ms")


@dataclass(frozen=True)
class ReportEntry:
    """
    Aggregated results of one configuration.

    Args:
        cell (GridCell): The configuration, if it is a grid point.
        label (dict): Extra identifying keys (model, contamination level, step, ...).
        per_run (tuple): One dict of metrics per run. Failed runs carry an "error" key.
        mean (dict): Mean of every numeric metric over the successful runs.
        std (dict): Sample standard deviation (0 for a single run).
        median (dict): Median of every numeric metric.
    """
    cell: Optional[GridCell] = None
    label: dict = field(default_factory=dict)
    per_run: tuple = ()
    mean: dict = field(default_factory=dict)
    std: dict = field(default_factory=dict)
    median: dict = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return sum(1 for run in self.per_run if "error" in run)

    def to_dict(self, timing: bool = True) -> dict:
        def strip(stats: dict) -> dict:
            return stats if timing else {k: v for k, v in stats.items() if k not in TIMING_KEYS}
        return {
            "cell": self.cell.to_dict() if self.cell is not None else None,
            "label": dict(self.label),
            "per_run": [strip(run) for run in self.per_run],
            "mean": strip(self.mean),
            "std": strip(self.std),
            "median": strip(self.median),
            "failures": self.failures,
        }
