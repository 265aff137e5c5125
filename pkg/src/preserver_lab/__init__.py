"""Exact Gaussian-rational tools for maps preserving idempotency of Jordan products."""

from .equality import DistinguishResult, ProbeBudgetExhausted, distinguish, equal_via_probes, prop_1234_checks
from .jordan import RankOneOp, classify, eigen_probe, is_idempotent, is_nonzero_idempotent, jordan
from .matrix import Matrix, Rng, jordan_block
from .reconstruct import (
    CanonicalMap,
    MapOracle,
    OracleContractError,
    StepViolation,
    alpha_reduce,
    make_canonical,
    make_corrupted,
    reconstruct,
    verify_preserving,
)
from .scalar import Scalar
from .structure import build_t_set, corner_trace_check, solve_sylvester, tripotent_decompose
from .suites import SUITES, run_suite
from .witnesses import witness_distinguish_idem, witness_involution, witness_square_zero

__version__ = "0.1.0"

__all__ = [
    "CanonicalMap",
    "DistinguishResult",
    "MapOracle",
    "Matrix",
    "OracleContractError",
    "ProbeBudgetExhausted",
    "RankOneOp",
    "Rng",
    "SUITES",
    "Scalar",
    "StepViolation",
    "alpha_reduce",
    "build_t_set",
    "classify",
    "corner_trace_check",
    "distinguish",
    "eigen_probe",
    "equal_via_probes",
    "is_idempotent",
    "is_nonzero_idempotent",
    "jordan",
    "jordan_block",
    "make_canonical",
    "make_corrupted",
    "prop_1234_checks",
    "reconstruct",
    "run_suite",
    "solve_sylvester",
    "tripotent_decompose",
    "verify_preserving",
    "witness_distinguish_idem",
    "witness_involution",
    "witness_square_zero",
]
