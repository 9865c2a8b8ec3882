"""Truncated matrix trigonometric moment problem: solvability, determinacy,
the Nevanlinna-type description of all solutions, and solution measures."""

from .errors import (
    ComputationError,
    MomentFileError,
    MomentProblemError,
    NotSolvableError,
    ParameterError,
    SingularBlockError,
)
from .hilbert import ProblemSpace, embed, embedding_operator, factor_gram, problem_space
from .isometry import IsometryRep, build_isometry, defect_numbers, is_determinate
from .moments import (
    AtomicMeasure,
    MomentSequence,
    ToeplitzForm,
    build_toeplitz,
    check_solvable,
    load_measure,
    load_moments,
    moments_from_measure,
    save_measure,
    save_moments,
)
from .nevanlinna import (
    HerglotzSample,
    NevanlinnaCoefficients,
    SchurParameter,
    coefficients_at,
    evaluate_M,
    evaluate_M_block,
    evaluate_M_resolvent,
    herglotz_values,
    taylor_moments,
)
from .schur_linalg import BlockOperator, block_inverse, resolvent_contraction, schur_complement
from .solutions import DistributionSamples, canonical_solution, recover_distribution, verify_solution

__version__ = "0.1.0"
