"""Karlin random sup-measures: simulation, exact limit sampling and closed forms."""

from ._core import (
    CapacityError,
    DomainError,
    IntervalSet,
    SimRun,
    extremal_cdf,
    frechet_cdf,
    joint_cdf,
    limit_sample,
    mstar_theta,
    pattern_limit,
    qbeta_pmf,
    qbeta_quantile,
    qbeta_tail,
    riemann_zeta,
    run_suite,
    simulate,
    suite_names,
    tail_dependence,
    tau_z,
    theta,
)

__all__ = [
    "CapacityError",
    "DomainError",
    "IntervalSet",
    "SimRun",
    "extremal_cdf",
    "frechet_cdf",
    "joint_cdf",
    "limit_sample",
    "mstar_theta",
    "pattern_limit",
    "qbeta_pmf",
    "qbeta_quantile",
    "qbeta_tail",
    "riemann_zeta",
    "run_suite",
    "simulate",
    "suite_names",
    "tail_dependence",
    "tau_z",
    "theta",
]
