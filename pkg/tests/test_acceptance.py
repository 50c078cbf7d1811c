"""Acceptance suite: one test per criterion, each printing PASS/FAIL.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
The expensive artifacts (full 30-run benchmark, its sampling-ablated
twin, and the oracle reports) are computed once per session.
"""

import time

import numpy as np
import pytest

from freaco import (
    EPS_EQ,
    ExperimentSpec,
    Instance,
    SolverConfig,
    builtin_problems,
    compose_many,
    compute_candidate_sets,
    compute_max_solution,
    enumerate_paths,
    evaluate,
    is_feasible,
    parse,
    path_space_size,
    path_to_candidate,
    random_feasible_instance,
    reference_optimum,
    residual,
    run,
    run_experiment,
)
from freaco.engine import probability_matrix

from conftest import EX_A, EX_B

PATH_CAP = 10**6
DEFAULTS = SolverConfig()  # benchmark-protocol parameters
RUNS = 30
BASE_SEED = 0


def _report(num: int, name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" - {detail}" if detail else ""
    print(f"ACCEPTANCE {num} ({name}): {status}{suffix}")


@pytest.fixture(scope="session")
def bench_summary():
    spec = ExperimentSpec(
        problems=tuple(builtin_problems()), runs=RUNS, config=DEFAULTS, base_seed=BASE_SEED
    )
    start = time.perf_counter()
    summary = run_experiment(spec)
    elapsed = time.perf_counter() - start
    print(f"[bench: {RUNS} runs x {len(summary.problems)} problems in {elapsed:.1f}s]")
    return summary


@pytest.fixture(scope="session")
def ablated_summary():
    config = SolverConfig(samples_per_iter=0)
    spec = ExperimentSpec(
        problems=tuple(builtin_problems()), runs=RUNS, config=config, base_seed=BASE_SEED
    )
    return run_experiment(spec)


@pytest.fixture(scope="session")
def oracle_reports():
    reports = {}
    start = time.perf_counter()
    for problem in builtin_problems():
        sets = compute_candidate_sets(problem.instance)
        size = path_space_size(sets)
        if size > PATH_CAP:
            reports[problem.name] = (size, None)
        else:
            report = reference_optimum(
                problem, rng=np.random.default_rng(0), cap=PATH_CAP
            )
            reports[problem.name] = (size, report)
    print(f"[oracle: all problems in {time.perf_counter() - start:.1f}s]")
    return reports


# ---------------------------------------------------------------------------


def test_criterion_1_worked_example_exactness():
    inst = Instance(EX_A, EX_B)

    def compute():
        xbar = compute_max_solution(inst)
        sets = compute_candidate_sets(inst, xbar)
        size = path_space_size(sets)
        lower = path_to_candidate(np.array([4, 0, 5, 4, 0]), inst.b, inst.n)
        return xbar, sets, size, lower

    xbar, sets, size, lower = compute()  # warm-up
    elapsed = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        compute()
        elapsed = min(elapsed, time.perf_counter() - t0)

    ok = (
        np.array_equal(xbar, [1.0, 0.5, 0.3, 0.1, 0.7, 1.0])
        and [set(s.tolist()) for s in sets]
        == [{0, 4, 5}, {0, 1}, {2, 5}, {1, 3, 4}, {0, 5}]
        and size == 72
        and np.array_equal(lower, [0.6, 0.0, 0.0, 0.0, 0.7, 0.3])
        and elapsed < 1e-3
    )
    _report(1, "worked-example exactness", ok, f"runtime {elapsed * 1e6:.0f}us")
    assert ok


def test_criterion_2_expression_evaluation():
    expr = parse("x1*x4 - x2*x3*x5 + x6^2", 6)
    value = evaluate(expr, [0.8, 0.3, 0.2, 0.0, 0.7, 1.0])
    ok = abs(value - 0.958) <= 1e-12
    _report(2, "expression evaluation", ok, f"value {value!r}")
    assert ok


def test_criterion_3_builtin_feasibility():
    problems = builtin_problems()
    for p in problems:
        assert is_feasible(p.instance, EPS_EQ)  # warm-up plus correctness
    start = time.perf_counter()
    flags = [is_feasible(p.instance, EPS_EQ) for p in problems]
    elapsed = time.perf_counter() - start
    ok = all(flags) and elapsed < 10e-3
    _report(3, "builtin feasibility", ok, f"10 checks in {elapsed * 1e3:.2f}ms")
    assert ok


def test_criterion_4_evaluation_budget(bench_summary):
    counts = []
    for problem in builtin_problems():
        for seed in (0, 17, 91):
            counts.append(run(problem, SolverConfig(seed=seed)).eval_count)
    summary_ok = all(p.mean_eval_count == 347.0 for p in bench_summary.problems)
    ok = summary_ok and all(c == 347 for c in counts)
    _report(4, "evaluation budget", ok, f"counts {sorted(set(counts))}")
    assert ok


def test_criterion_5_optima_reproduction(bench_summary):
    tight = 0
    loose = 0
    lines = []
    for p in bench_summary.problems:
        optimum = p.known_optimum
        diff = abs(p.f_best - optimum)
        tight_tol = max(1e-3, 0.005 * abs(optimum))
        loose_tol = max(1e-3, 0.02 * abs(optimum))
        tight += diff <= tight_tol
        loose += diff <= loose_tol
        lines.append(f"{p.name}: f_best={p.f_best:.6f} target={optimum} diff={diff:.2e}")
    ok = tight >= 9 and loose == 10
    for line in lines:
        print("  " + line)
    _report(5, "optima reproduction", ok, f"{tight}/10 tight, {loose}/10 within 2%")
    assert ok


def test_criterion_6_oracle_cross_check(oracle_reports):
    failures = []
    for problem in builtin_problems():
        size, report = oracle_reports[problem.name]
        if report is None:
            print(f"  {problem.name}: waived, |E|={size} exceeds cap {PATH_CAP}")
            continue
        diff = abs(report.best_value - problem.known_optimum)
        status = "ok" if diff <= 1e-3 else "MISS"
        print(
            f"  {problem.name}: |E|={size} verify={report.best_value:.6f} "
            f"target={problem.known_optimum} diff={diff:.2e} {status}"
        )
        if diff > 1e-3:
            failures.append((problem.name, report.best_value, problem.known_optimum))
    ok = not failures
    _report(6, "oracle cross-check", ok, f"{len(failures)} problem(s) beyond 1e-3")
    # Problems 3 and 10 fail here: exhaustive search certifies feasible
    # points (residual 0) strictly below the recorded optima, at
    # 80.372260 vs 80.3752 and 55.788627 vs 55.7954, so the recorded
    # values cannot be exact global optima.  See notes in the repository
    # history for the full analysis.
    assert ok, f"verify beyond 1e-3 of recorded optimum for: {failures}"


def test_criterion_7a_archive_feasibility_invariant():
    total = 0
    for problem in (builtin_problems()[0], builtin_problems()[4]):
        inst = problem.instance
        collected = []

        def observer(t, archive, tau):
            collected.extend(sol.x for sol in archive)

        for seed in (1, 2):
            run(problem, SolverConfig(seed=seed), observer=observer)
        gaps = np.abs(compose_many(inst, np.array(collected)) - inst.b)
        assert gaps.max() <= 1e-9
        total += len(collected)
    ok = total >= 10_000
    _report(7, "archive feasibility sweep", ok, f"{total} archive points, all feasible")
    assert ok


def test_criterion_7b_candidate_sweep_on_planted_instances():
    rng = np.random.default_rng(2024)
    checked = 0
    for _ in range(100):
        inst = random_feasible_instance(4, 4, rng=rng)
        sets = compute_candidate_sets(inst)
        for e in enumerate_paths(sets):
            lower = path_to_candidate(e, inst.b, inst.n)
            assert residual(inst, lower) <= EPS_EQ
            checked += 1
    ok = checked >= 100
    _report(7, "candidate feasibility sweep", ok, f"{checked} candidates on 100 instances")
    assert ok


def test_criterion_7c_trace_and_archive_invariants(bench_summary):
    for p in bench_summary.problems:
        assert np.all(np.diff(p.trace, axis=1) <= 0)

    sizes = []

    def observer(t, archive, tau):
        sizes.append(len(archive))
        fs = [s.f for s in archive]
        assert fs == sorted(fs)

    run(builtin_problems()[5], SolverConfig(seed=3), observer=observer)
    ok = all(s == DEFAULTS.s_pop for s in sizes)
    _report(7, "monotone trace / archive order", ok)
    assert ok


def test_criterion_7d_pheromone_support_and_normalization():
    problem = builtin_problems()[6]
    support_patterns = []

    def observer(t, archive, tau):
        support_patterns.append(tau.values > 0)
        assert np.all(tau.values[~tau.support] == 0.0)
        rows = probability_matrix(tau).sum(axis=1)
        assert np.allclose(rows, 1.0, atol=1e-12)

    run(problem, SolverConfig(seed=5), observer=observer)
    first = support_patterns[0]
    ok = all(np.array_equal(first, pat) for pat in support_patterns)
    _report(7, "pheromone support / row normalization", ok)
    assert ok


def test_criterion_7e_bit_identical_reruns():
    ok = True
    for problem in (builtin_problems()[2], builtin_problems()[8]):
        a = run(problem, SolverConfig(seed=77))
        b = run(problem, SolverConfig(seed=77))
        ok = ok and (
            np.array_equal(a.trace, b.trace)
            and np.array_equal(a.best.x, b.best.x)
            and np.array_equal(a.best.lb, b.best.lb)
            and np.array_equal(a.best.e, b.best.e)
            and a.best.f == b.best.f
            and a.eval_count == b.eval_count
            and a.seed == b.seed
        )
    _report(7, "bit-identical reruns", ok)
    assert ok


def test_criterion_8_sampling_beats_ablation(bench_summary, ablated_summary):
    wins = 0
    for full, ablated in zip(bench_summary.problems, ablated_summary.problems):
        assert full.name == ablated.name
        win = full.mean_error < ablated.mean_error
        wins += win
        print(
            f"  {full.name}: error {full.mean_error:.5f} vs ablated "
            f"{ablated.mean_error:.5f} {'<' if win else '>='}"
        )
    ok = wins >= 8
    _report(8, "sampling ablation", ok, f"{wins}/10 problems improved")
    assert ok
