import time
from typing import Dict, Any, Optional
import logging
from dataclasses import dataclass, field
from contextlib import contextmanager
import json

from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile

logger = logging.getLogger(__name__)

@dataclass
class StageRecord:
    stage: str
    started: float = field(default_factory=time.perf_counter)
    seconds: Optional[float] = None
    success: bool = True
    error: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def finish(self, success: bool = True, error: Optional[str] = None):
        self.seconds = time.perf_counter() - self.started
        self.success = success
        self.error = error

    def to_dict(self) -> Dict[str, Any]:
        return {
            "stage": self.stage,
            "seconds": self.seconds,
            "success": self.success,
            "error": self.error,
            "metadata": self.metadata,
        }

class MetricsCollector:
    """Stage timings kept as records and mirrored into a private prometheus registry."""

    def __init__(self):
        self.records: Dict[str, StageRecord] = {}
        self.registry = CollectorRegistry()
        self.stage_seconds = Histogram(
            "theta_kit_stage_seconds", "Time spent per stage", ["stage"], registry=self.registry
        )
        self.stage_failures = Counter(
            "theta_kit_stage_failures_total", "Stages that raised", ["stage"], registry=self.registry
        )

    @contextmanager
    def measure(self, name: str, stage: str, metadata: Optional[Dict[str, Any]] = None):
        record = StageRecord(stage=stage, metadata=metadata or {})
        self.records[name] = record
        try:
            yield record
            record.finish(success=True)
        except Exception as e:
            record.finish(success=False, error=str(e))
            self.stage_failures.labels(stage=stage).inc()
            raise
        finally:
            self.stage_seconds.labels(stage=stage).observe(record.seconds or 0.0)

    def get_metrics(self) -> Dict[str, Dict[str, Any]]:
        return {name: record.to_dict() for name, record in self.records.items()}

    def log_metrics(self):
        logger.debug(f"Metrics: {json.dumps(self.get_metrics(), indent=2)}")

    def write_textfile(self, path: str):
        write_to_textfile(path, self.registry)

class RunMetrics:
    def __init__(self):
        self.collector = MetricsCollector()
        self._counter = 0

    def measure_stage(self, stage: str, metadata: Optional[Dict[str, Any]] = None):
        # several nodes of one run may share a stage name
        self._counter += 1
        return self.collector.measure(f"{stage}#{self._counter}", stage, metadata)

    def measure_run(self, command: str, metadata: Optional[Dict[str, Any]] = None):
        return self.collector.measure(f"run_{command}", f"run_{command}", metadata)

    def get_run_metrics(self) -> Dict[str, Dict[str, Any]]:
        return self.collector.get_metrics()

    def log_run_metrics(self):
        self.collector.log_metrics()
