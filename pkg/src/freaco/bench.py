"""Multi-run experiment harness with deterministic aggregation.

Runs each problem ``runs`` times (run r gets seed ``base_seed + r``),
collects the final best values and the full per-iteration traces, and
summarizes them as average / median / sample standard deviation / best,
mean evaluation count and the error averaged over every run and
iteration (best-so-far minus the recorded optimum).

Runs are independent; when FREACO_THREADS allows it they execute in a
process pool, and results are merged by run index so the summary does
not depend on completion order.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .engine import RunResult, SolverConfig, run
from .errors import ExperimentError
from .problems import Problem


@dataclass(frozen=True)
class ExperimentSpec:
    problems: tuple[Problem, ...]
    runs: int = 30
    config: SolverConfig = SolverConfig()
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "problems", tuple(self.problems))
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


@dataclass(frozen=True)
class ProblemSummary:
    name: str
    known_optimum: float | None
    avg_best: float
    median_best: float
    sd_best: float
    f_best: float
    mean_eval_count: float
    mean_error: float | None  # None when no optimum is recorded
    trace: np.ndarray  # runs x t_max, row r = run with seed base_seed + r

    def __post_init__(self):
        trace = np.asarray(self.trace, dtype=float)
        trace.setflags(write=False)
        object.__setattr__(self, "trace", trace)


@dataclass(frozen=True)
class ExperimentSummary:
    problems: tuple[ProblemSummary, ...]
    runs: int
    base_seed: int
    config: SolverConfig


def _solve_one(args) -> RunResult:
    problem, config = args
    return run(problem, config)


def thread_budget() -> int:
    """Worker cap for parallel runs, from FREACO_THREADS (default: all cores)."""
    raw = os.environ.get("FREACO_THREADS", "")
    if raw.strip():
        budget = int(raw)
        if budget < 1:
            raise ValueError("FREACO_THREADS must be >= 1")
        return budget
    return os.cpu_count() or 1


def _run_problem(problem: Problem, spec: ExperimentSpec) -> list[RunResult]:
    jobs = [
        (problem, replace(spec.config, seed=spec.base_seed + r))
        for r in range(spec.runs)
    ]
    workers = min(thread_budget(), spec.runs)
    if workers > 1 and spec.runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_solve_one, job) for job in jobs]
            results = []
            for r, future in enumerate(futures):
                try:
                    results.append(future.result())
                except Exception as exc:
                    raise ExperimentError(problem.name, r) from exc
            return results
    results = []
    for r, job in enumerate(jobs):
        try:
            results.append(_solve_one(job))
        except Exception as exc:
            raise ExperimentError(problem.name, r) from exc
    return results


def summarize_runs(problem: Problem, results: list[RunResult]) -> ProblemSummary:
    finals = np.array([r.trace[-1] for r in results])
    trace = np.vstack([r.trace for r in results])
    optimum = problem.known_optimum
    return ProblemSummary(
        name=problem.name,
        known_optimum=optimum,
        avg_best=float(finals.mean()),
        median_best=float(np.median(finals)),
        sd_best=float(finals.std(ddof=1)) if len(results) > 1 else 0.0,
        f_best=float(finals.min()),
        mean_eval_count=float(np.mean([r.eval_count for r in results])),
        mean_error=None if optimum is None else float(np.mean(trace - optimum)),
        trace=trace,
    )


def run_experiment(spec: ExperimentSpec) -> ExperimentSummary:
    summaries = []
    for problem in spec.problems:
        summaries.append(summarize_runs(problem, _run_problem(problem, spec)))
    return ExperimentSummary(
        problems=tuple(summaries),
        runs=spec.runs,
        base_seed=spec.base_seed,
        config=spec.config,
    )


# ---------------------------------------------------------------------------
# Export

SUMMARY_COLUMNS = ("name", "avg", "mdn", "sd", "fbest", "evals", "mean_error")
TRACE_COLUMNS = ("problem", "run", "iter", "best_so_far")


def _summary_rows(summary: ExperimentSummary):
    for p in summary.problems:
        yield (
            p.name,
            repr(p.avg_best),
            repr(p.median_best),
            repr(p.sd_best),
            repr(p.f_best),
            repr(p.mean_eval_count),
            "" if p.mean_error is None else repr(p.mean_error),
        )


def summary_csv_text(summary: ExperimentSummary) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    writer.writerows(_summary_rows(summary))
    return buf.getvalue()


def _summary_dict(summary: ExperimentSummary) -> dict:
    return {
        "runs": summary.runs,
        "base_seed": summary.base_seed,
        "config": asdict(summary.config),
        "problems": [
            {
                "name": p.name,
                "known_optimum": p.known_optimum,
                "avg_best": p.avg_best,
                "median_best": p.median_best,
                "sd_best": p.sd_best,
                "f_best": p.f_best,
                "mean_eval_count": p.mean_eval_count,
                "mean_error": p.mean_error,
                "trace": p.trace.tolist(),
            }
            for p in summary.problems
        ],
    }


def export(summary: ExperimentSummary, format: str, path):
    """Write the summary to ``path`` as 'csv', 'json' or 'trace-csv'.

    CSV columns: name, avg, mdn, sd, fbest, evals, mean_error (one row
    per problem).  JSON holds everything including the trace matrices.
    The trace CSV has one row per (problem, run, iteration).  All files
    are UTF-8 with '.' as the decimal point.
    """
    if format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(summary_csv_text(summary))
    elif format == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(_summary_dict(summary), fh, indent=2)
            fh.write("\n")
    elif format == "trace-csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TRACE_COLUMNS)
            for p in summary.problems:
                for r, row in enumerate(p.trace):
                    for t, value in enumerate(row, start=1):
                        writer.writerow((p.name, r, t, repr(float(value))))
    else:
        raise ValueError(f"unknown export format {format!r}")


def load_summary_json(path) -> ExperimentSummary:
    """Inverse of ``export(..., 'json', ...)``."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    problems = tuple(
        ProblemSummary(
            name=p["name"],
            known_optimum=p["known_optimum"],
            avg_best=p["avg_best"],
            median_best=p["median_best"],
            sd_best=p["sd_best"],
            f_best=p["f_best"],
            mean_eval_count=p["mean_eval_count"],
            mean_error=p["mean_error"],
            trace=np.asarray(p["trace"], dtype=float),
        )
        for p in data["problems"]
    )
    return ExperimentSummary(
        problems=problems,
        runs=data["runs"],
        base_seed=data["base_seed"],
        config=SolverConfig(**data["config"]),
    )
