"""Running learners over a stream and comparing their traces"""

import asyncio
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Sequence

import pandas as pd

from .errors import TraceFormatError
from .learners import LearnerConfig, learner_init, learner_step
from .metrics import TraceRecord, aggregate_tmll, scored_records, tmll
from .models.base import ModelSpec
from .streams import Batch
from .traces import TraceStore

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    """Outcome of one learner over the whole stream"""
    learner: str
    success: bool
    output: str
    error: str | None = None
    metadata: Dict[str, Any] | None = None

    def __str__(self) -> str:
        if self.success:
            return f"{self.learner}: {self.output}"
        else:
            return f"{self.learner}: Error: {self.error}"


def run_learner(model: ModelSpec, cfg: LearnerConfig, batches: Sequence[Batch], store: TraceStore,
                seed: int = 0) -> RunResult:
    """Step one learner through the stream, appending a trace row per batch"""
    name = cfg.display_name
    path = store.trace_path(name)
    completed = 0
    try:
        state = learner_init(model, cfg)
        with store.writer(name) as writer:
            for batch in batches:
                state, report = learner_step(state, batch)
                score = tmll(model, state.posterior, batch.test, seed=seed) if len(batch.test) else None
                writer.write(TraceRecord(
                    t=batch.t,
                    learner=name,
                    elbo=report.elbo,
                    ess=report.ess,
                    expected_rho=report.expected_rho,
                    tmll=score,
                    summary=report.summary,
                    test_size=len(batch.test),
                ))
                completed += 1
                logger.info(f"{name} t={batch.t} elbo={report.elbo:.4f} rho={report.expected_rho}")
    except Exception as e:
        logger.error(f"Learner {name} failed after {completed} step(s): {e}", exc_info=True)
        return RunResult(name, False, "", error=f"{type(e).__name__}: {e}",
                         metadata={"steps": completed, "trace": str(path)})

    return RunResult(name, True, f"{completed} step(s) written to {path}",
                     metadata={"steps": completed, "trace": str(path)})


async def run_learners(model: ModelSpec, learners: Sequence[LearnerConfig], batches: Sequence[Batch],
                       store: TraceStore, seed: int = 0) -> List[RunResult]:
    """Run every learner concurrently over the same immutable stream"""
    tasks = []
    for cfg in learners:
        print(f"Starting {cfg.display_name}...")
        tasks.append(asyncio.to_thread(run_learner, model, cfg, batches, store, seed))
    return list(await asyncio.gather(*tasks))


def compare_traces(trace_dir: str | Path) -> pd.DataFrame:
    """Aggregated TMLL per learner, written to summary.csv and summary.txt"""
    store = TraceStore(trace_dir)
    paths = store.list_traces()
    if not paths:
        raise TraceFormatError("no trace files found", str(trace_dir))

    rows = []
    lengths = {}
    for path in paths:
        records = store.load_records(path)
        lengths[path.name] = len(records)
        try:
            total = aggregate_tmll(records)
            scored = len(scored_records(records))
        except TraceFormatError as e:
            raise TraceFormatError(str(e), str(path))
        rows.append({"learner": records[0].learner, "steps": len(records), "scored_steps": scored,
                     "aggregated_tmll": total})

    if len(set(lengths.values())) > 1:
        raise TraceFormatError(f"traces cover different numbers of steps: {lengths}", str(trace_dir))

    summary = pd.DataFrame(rows)
    best = summary["aggregated_tmll"].idxmax()
    summary["best"] = ["*" if i == best else "" for i in summary.index]

    directory = Path(trace_dir)
    summary.to_csv(directory / "summary.csv", index=False)
    (directory / "summary.txt").write_text(summary.to_string(index=False) + "\n")
    return summary
