# --- workers.py ---
import dataclasses
import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path

from checkpoints import save_head_model
from embeddings import EmbeddedSplit
from emotion_data import LabelSchema
from head import TrainConfig, TrainedModel, predict, train_head
from metrics import EvalReport, classification_report

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, str], None]


# --- Job Description ---
@dataclass(frozen=True)
class SeedJob:
    """Everything one seed's training run needs; picklable for worker processes."""

    seed: int
    train: EmbeddedSplit
    dev: EmbeddedSplit
    schema: LabelSchema
    config: TrainConfig
    out_path: Path | None = None


@dataclass(frozen=True)
class SeedResult:
    seed: int
    model: TrainedModel
    dev_report: EvalReport
    checkpoint: Path | None


def run_seed(job: SeedJob) -> SeedResult:
    """Trains one head, evaluates it on dev and writes its checkpoint."""
    config = dataclasses.replace(job.config, seed=job.seed)
    model = train_head(job.train, job.dev, config, job.schema)
    _, preds = predict(model, job.dev.X)
    report = classification_report(preds, job.dev.Y, job.schema)
    if job.out_path is not None:
        save_head_model(model, job.out_path)
    return SeedResult(seed=job.seed, model=model, dev_report=report, checkpoint=job.out_path)


# --- Multi-Seed Runner ---
class SeedRunner:
    """
    Runs a list of seed jobs, sequentially or fanned out to worker processes.

    Jobs share no mutable state, so results do not depend on the worker count.
    Results are returned in job order.

    Attributes:
        jobs: The seed jobs to run.
        workers: Process count; 1 runs everything in this process.
        progress: Optional callback (percent complete, message).
    """

    def __init__(self, jobs: Sequence[SeedJob], workers: int = 1, progress: ProgressCallback | None = None):
        self.jobs = list(jobs)
        self.workers = workers
        self.progress = progress
        self._is_running = True  # Flag to control cancellation

    def stop(self):
        """Sets the flag to stop before the next job starts."""
        logger.info("Requesting SeedRunner stop...")
        self._is_running = False

    def _report(self, done: int, message: str) -> None:
        percent = int(done / len(self.jobs) * 100) if self.jobs else 100
        logger.info("[%3d%%] %s", percent, message)
        if self.progress is not None:
            self.progress(percent, message)

    def run(self) -> list[SeedResult]:
        if not self.jobs:
            return []
        if self.workers <= 1:
            return self._run_sequential()
        return self._run_pool()

    def _run_sequential(self) -> list[SeedResult]:
        results = []
        for done, job in enumerate(self.jobs, start=1):
            if not self._is_running:
                self._report(done - 1, "[Cancelled] remaining seeds skipped")
                break
            result = run_seed(job)
            results.append(result)
            self._report(done, f"seed {job.seed}: dev macro F1 {result.dev_report.macro_f1:.4f}")
        return results

    def _run_pool(self) -> list[SeedResult]:
        by_index: dict[int, SeedResult] = {}
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            futures = {pool.submit(run_seed, job): i for i, job in enumerate(self.jobs)}
            for done, future in enumerate(as_completed(futures), start=1):
                if not self._is_running:
                    for pending in futures:
                        pending.cancel()
                    self._report(done - 1, "[Cancelled] pending seeds dropped")
                    break
                i = futures[future]
                result = future.result()
                by_index[i] = result
                self._report(done, f"seed {result.seed}: dev macro F1 {result.dev_report.macro_f1:.4f}")
        return [by_index[i] for i in sorted(by_index)]
