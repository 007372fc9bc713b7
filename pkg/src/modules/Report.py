from dataclasses import dataclass, field
from typing import Optional, Tuple

from .GridCell import GridCell
from .ReportEntry import ReportEntry

#Config
import broadlearn.config as cfg


@dataclass(frozen=True)
class Report:
    """
    Results of an experiment: one entry per configuration, the selected configuration,
    the experiment settings and where it ran.

    Usage:
        report.to_dict(timing=False)  # identical across reruns with the same seed
    """
    kind: str
    config: dict
    entries: Tuple[ReportEntry, ...] = ()
    metric: str = "rmse"
    best: Optional[GridCell] = None
    environment: dict = field(default_factory=dict)
    wall_ms: float = 0.0

    def to_dict(self, timing: bool = True) -> dict:
        document = {
            "version": cfg.REPORT_FORMAT_VERSION,
            "kind": self.kind,
            "metric": self.metric,
            "config": self.config,
            "per_run": [entry.to_dict(timing)["per_run"] for entry in self.entries],
            "mean": [entry.to_dict(timing)["mean"] for entry in self.entries],
            "std": [entry.to_dict(timing)["std"] for entry in self.entries],
            "entries": [entry.to_dict(timing) for entry in self.entries],
            "best": self.best.to_dict() if self.best is not None else None,
            "environment": self.environment,
        }
        if timing:
            document["wall_ms"] = self.wall_ms
        return document

    def summary_rows(self) -> list:
        """Flat rows (one per entry) for the CSV summary."""
        rows = []
        for entry in self.entries:
            row = dict(entry.label)
            if entry.cell is not None:
                row.update(entry.cell.to_dict())
            row.update({f"mean_{k}": v for k, v in entry.mean.items()})
            row.update({f"std_{k}": v for k, v in entry.std.items()})
            row.update({f"median_{k}": v for k, v in entry.median.items()})
            row["failures"] = entry.failures
            rows.append(row)
        return rows
