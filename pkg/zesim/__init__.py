"""
zesim - No-signalling assisted zero-error simulation cost of quantum channels.

Usage: zesim sigma --kalpha 1.0471975512
"""

__version__ = "0.1.0"
__author__ = "zesim developers"

from zesim.models import (
    ZesimConfig,
    ZesimError,
    ConfigError,
    PayloadError,
    SolverOptions,
    Tolerances,
    load_config,
)
from zesim.sdpcore import SdpProblem, SdpSolution, SolveStatus, SolverError, solve
from zesim.graphspace import (
    Channel,
    NCBGraph,
    QnscMap,
    classical_graph,
    compose_qnsc,
    delta_ell,
    graph_feasibility,
    graph_of_channel,
    graph_power,
    kalpha,
    qnsc_check,
    tensor_graph,
)
from zesim.simcost import (
    Certificate,
    CertificateKind,
    InfeasibleGraphError,
    s0ns_bounds,
    sigma_channel,
    sigma_graph,
    sigma_graph_dual,
    sigma_graph_primal,
    sigma_minus,
    verify_certificate,
)
from zesim.sweep import SweepEngine, sweep_grid

__all__ = [
    # Models
    "ZesimConfig",
    "ZesimError",
    "ConfigError",
    "PayloadError",
    "SolverOptions",
    "Tolerances",
    "load_config",
    # SDP
    "SdpProblem",
    "SdpSolution",
    "SolveStatus",
    "SolverError",
    "solve",
    # Graphs and channels
    "Channel",
    "NCBGraph",
    "QnscMap",
    "classical_graph",
    "compose_qnsc",
    "delta_ell",
    "graph_feasibility",
    "graph_of_channel",
    "graph_power",
    "kalpha",
    "qnsc_check",
    "tensor_graph",
    # Costs
    "Certificate",
    "CertificateKind",
    "InfeasibleGraphError",
    "s0ns_bounds",
    "sigma_channel",
    "sigma_graph",
    "sigma_graph_dual",
    "sigma_graph_primal",
    "sigma_minus",
    "verify_certificate",
    # Sweep
    "SweepEngine",
    "sweep_grid",
]
