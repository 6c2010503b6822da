"""Low star-discrepancy point sets via permuted Halton sequences.

The package builds generalized Halton point sets, measures their star
discrepancy exactly or by threshold-accepting lower bounds, evolves digit
permutations that shrink it, and finds the smallest point count reaching a
target value.
"""
from .discrepancy import (
    DEFAULT_CELL_BUDGET,
    EXACT,
    LOWER_BOUND,
    BudgetExceededError,
    DiscrepancyBound,
    Grid,
    GridPoint,
    box_counts,
    exact_star_discrepancy,
    grid_local_value,
    local_discrepancy,
)
from .estimator import TAConfig, TARunResult, ta_best_of, ta_run
from .fileio import (
    FileFormatError,
    load_points,
    load_vector,
    save_points,
    save_vector,
)
from .inverse import (
    InverseConfig,
    InverseProblem,
    InverseResult,
    ParetoArchive,
    ParetoEntry,
    bisection_evaluate,
    dominates,
    nsga2_select,
    run_inverse,
)
from .optimizer import (
    Archive,
    GAConfig,
    GAResult,
    Individual,
    evaluate_fitness,
    final_evaluation,
    genotype_digest,
    make_offspring,
    mutate_genotype,
    mutate_permutation,
    pmx,
    reevaluate_parents,
    run_ga,
    tournament_select,
)
from .sequence import (
    MAX_DIMENSION,
    GeneratingVector,
    Genotype,
    Permutation,
    PointSet,
    first_primes,
    generate,
    genotype_to_vector,
    halton_point,
    radical_inverse,
    random_genotype,
    vector_to_genotype,
)

__version__ = "0.1.0"

__all__ = [
    "MAX_DIMENSION",
    "DEFAULT_CELL_BUDGET",
    "EXACT",
    "LOWER_BOUND",
    "Permutation",
    "GeneratingVector",
    "Genotype",
    "PointSet",
    "first_primes",
    "radical_inverse",
    "halton_point",
    "generate",
    "genotype_to_vector",
    "vector_to_genotype",
    "random_genotype",
    "BudgetExceededError",
    "DiscrepancyBound",
    "Grid",
    "GridPoint",
    "box_counts",
    "local_discrepancy",
    "grid_local_value",
    "exact_star_discrepancy",
    "TAConfig",
    "TARunResult",
    "ta_run",
    "ta_best_of",
    "GAConfig",
    "GAResult",
    "Individual",
    "Archive",
    "pmx",
    "mutate_permutation",
    "mutate_genotype",
    "make_offspring",
    "tournament_select",
    "evaluate_fitness",
    "final_evaluation",
    "genotype_digest",
    "reevaluate_parents",
    "run_ga",
    "InverseProblem",
    "InverseConfig",
    "InverseResult",
    "ParetoEntry",
    "ParetoArchive",
    "dominates",
    "bisection_evaluate",
    "nsga2_select",
    "run_inverse",
    "FileFormatError",
    "save_vector",
    "load_vector",
    "save_points",
    "load_points",
]
