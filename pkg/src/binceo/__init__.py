"""Two-link binary CEO problem under log-loss: exact bounds and a
compound LDGM-LDPC coding pipeline measuring the empirical gap to them."""

from binceo.bounds import (
    GeneralChannel,
    LagrangianPoint,
    NoisePair,
    RdTuple,
    Region,
    TestChannelPair,
    conv,
    grid_optimum,
    h_b,
    joint_table,
    info_measures,
    mu_max,
    rd_bound,
    rd_curve,
)

__version__ = "0.1.0"

__all__ = [
    "GeneralChannel",
    "LagrangianPoint",
    "NoisePair",
    "RdTuple",
    "Region",
    "TestChannelPair",
    "conv",
    "grid_optimum",
    "h_b",
    "joint_table",
    "info_measures",
    "mu_max",
    "rd_bound",
    "rd_curve",
    "__version__",
]
