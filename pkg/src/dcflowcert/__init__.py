"""Certificates for secure DC load flow.

Decides, constructively, whether a unipolar DC distribution network has a
load-flow solution inside its voltage/current security limits, recovers
that solution, and certifies uniqueness via Jacobian nonsingularity over
the security region.
"""

from .errors import DimensionError, NoConvergence, SchemaError, TopologyError
from .netmodel import (
    Branch,
    Bus,
    BusKind,
    Condition1Verdict,
    Network,
    SecurityLimits,
    check_condition1,
    parse_network,
    scale_injections,
    serialize_network,
)
from .loadflow import (
    NewtonConfig,
    SecurityMode,
    SecurityReport,
    VoltageProfile,
    check_security,
    jacobian,
    newton_solve,
    residual,
)
from .cvxsolver import (
    ConvexProgram,
    Phase1Result,
    SolveOutcome,
    SolveStatus,
    SolverConfig,
    constraint_violations,
    phase1,
    solve,
)
from .existence import (
    ExistenceCertificate,
    ExistenceConfig,
    ExistenceRun,
    ExistenceStatus,
    P1Instance,
    TightnessReport,
    build_p1,
    refine_and_check,
    run_existence,
    solve_p1,
    verify_tightness,
)
from .uniqueness import (
    Counterexample,
    CertificateMethod,
    FalsifyConfig,
    IntervalJacobian,
    UniquenessCertificate,
    UniquenessStatus,
    certify_or_falsify,
    falsify_p2,
    gershgorin_certificate,
    interval_jacobian,
    midpoint_radius_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "Bus",
    "BusKind",
    "CertificateMethod",
    "Condition1Verdict",
    "ConvexProgram",
    "Counterexample",
    "DimensionError",
    "ExistenceCertificate",
    "ExistenceConfig",
    "ExistenceRun",
    "ExistenceStatus",
    "FalsifyConfig",
    "IntervalJacobian",
    "Network",
    "NewtonConfig",
    "NoConvergence",
    "P1Instance",
    "Phase1Result",
    "SchemaError",
    "SecurityLimits",
    "SecurityMode",
    "SecurityReport",
    "SolveOutcome",
    "SolveStatus",
    "SolverConfig",
    "TightnessReport",
    "TopologyError",
    "UniquenessCertificate",
    "UniquenessStatus",
    "VoltageProfile",
    "build_p1",
    "certify_or_falsify",
    "check_condition1",
    "check_security",
    "constraint_violations",
    "falsify_p2",
    "gershgorin_certificate",
    "interval_jacobian",
    "jacobian",
    "midpoint_radius_certificate",
    "newton_solve",
    "parse_network",
    "phase1",
    "refine_and_check",
    "residual",
    "run_existence",
    "scale_injections",
    "serialize_network",
    "solve",
    "solve_p1",
    "verify_tightness",
]
