"""Multifractal cascade / MRM / MRW simulation and scaling-function estimation."""

from ._core import (
    MfracError,
    ScalingModel,
    asymptotic_rate,
    cone_overlap,
    critical_exponents,
    ks_normal_test,
    moment_gap,
    psi,
    psi_prime,
    sample_cascade,
    sample_fgn,
    sample_mrm,
    sample_mrw,
    structure_function,
    verify_json,
    zeta,
    zeta_curve,
    zeta_h,
)

__all__ = [
    "MfracError",
    "ScalingModel",
    "asymptotic_rate",
    "cone_overlap",
    "critical_exponents",
    "ks_normal_test",
    "moment_gap",
    "psi",
    "psi_prime",
    "sample_cascade",
    "sample_fgn",
    "sample_mrm",
    "sample_mrw",
    "structure_function",
    "verify_json",
    "zeta",
    "zeta_curve",
    "zeta_h",
]

__version__ = getattr(__import__("multifrac._core", fromlist=["__version__"]), "__version__", "dev")
