"""freaco: ant-colony optimization under max-min relational constraints.

Minimizes a nonlinear objective over the solution set of a fuzzy
relational equation system ``A phi x = b`` (max-min composition) by
pairing a combinatorial pheromone walk over the system's candidate
structure with Gaussian archive sampling inside the feasible boxes it
selects.  Includes a brute-force verification oracle, a benchmark
harness and a command-line interface (``freaco``).
"""

from .bench import (
    ExperimentSpec,
    ExperimentSummary,
    ProblemSummary,
    export,
    load_summary_json,
    run_experiment,
)
from .engine import (
    ArchiveSolution,
    PheromoneMatrix,
    RunResult,
    SolverConfig,
    run,
)
from .errors import (
    DimensionMismatchError,
    EvalDomainError,
    ExperimentError,
    ExprParseError,
    FreacoError,
    InfeasibleInstanceError,
    InvalidInstanceError,
    InvalidPathError,
    PathSpaceTooLargeError,
)
from .expr import Expr, evaluate, evaluate_many, parse, render
from .fre import (
    EPS_EQ,
    Cell,
    Instance,
    cell_of,
    clamp_to_cell,
    compose_many,
    compute_candidate_sets,
    compute_max_solution,
    candidate_matrix,
    is_feasible,
    max_min_compose,
    path_space_size,
    path_to_candidate,
    residual,
    violated_rows,
)
from .oracle import (
    OracleReport,
    enumerate_paths,
    random_feasible_instance,
    reference_optimum,
)
from .problems import (
    Problem,
    builtin_problem,
    builtin_problems,
    load_problem_file,
    make_problem,
    problem_from_dict,
)

__version__ = "0.1.0"

__all__ = [
    "ArchiveSolution",
    "Cell",
    "DimensionMismatchError",
    "EPS_EQ",
    "EvalDomainError",
    "ExperimentError",
    "ExperimentSpec",
    "ExperimentSummary",
    "Expr",
    "ExprParseError",
    "FreacoError",
    "InfeasibleInstanceError",
    "Instance",
    "InvalidInstanceError",
    "InvalidPathError",
    "OracleReport",
    "PathSpaceTooLargeError",
    "PheromoneMatrix",
    "Problem",
    "ProblemSummary",
    "RunResult",
    "SolverConfig",
    "builtin_problem",
    "builtin_problems",
    "candidate_matrix",
    "cell_of",
    "clamp_to_cell",
    "compose_many",
    "compute_candidate_sets",
    "compute_max_solution",
    "enumerate_paths",
    "evaluate",
    "evaluate_many",
    "export",
    "is_feasible",
    "load_problem_file",
    "load_summary_json",
    "make_problem",
    "max_min_compose",
    "parse",
    "path_space_size",
    "path_to_candidate",
    "problem_from_dict",
    "random_feasible_instance",
    "reference_optimum",
    "render",
    "residual",
    "run",
    "run_experiment",
    "violated_rows",
]
