"""Full-duplex decode-and-forward relaying: simulation and closed-form analysis."""

from .core import (
    ChannelBlock,
    ProtocolKind,
    RngStream,
    SystemParams,
    db_to_linear,
    link_outage,
    linear_to_db,
    sample_block,
    sample_blocks,
)
from .miso import (
    MisoBlockSpec,
    effective_snr,
    eigenvalues_closed_form,
    gram_eigenvalues_oracle,
    mutual_info_block,
)
from .analytic import (
    AnalyticCurve,
    LinkOutageSet,
    avg_snr,
    cdf_hypoexp,
    cdf_isdf,
    cdf_sdf,
    cooperation_fraction,
    link_outages,
    p_out_protocol,
    p_out_sd,
    p_out_sr,
    pdf_isdf,
    pdf_sdf,
)
from .protocol import (
    BlockOutcome,
    EmpiricalDistribution,
    SimulationReport,
    decide_cooperation,
    run_block,
    simulate,
    sup_distance,
    sweep_rate,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelBlock",
    "ProtocolKind",
    "RngStream",
    "SystemParams",
    "db_to_linear",
    "link_outage",
    "linear_to_db",
    "sample_block",
    "sample_blocks",
    "MisoBlockSpec",
    "effective_snr",
    "eigenvalues_closed_form",
    "gram_eigenvalues_oracle",
    "mutual_info_block",
    "AnalyticCurve",
    "LinkOutageSet",
    "avg_snr",
    "cdf_hypoexp",
    "cdf_isdf",
    "cdf_sdf",
    "cooperation_fraction",
    "link_outages",
    "p_out_protocol",
    "p_out_sd",
    "p_out_sr",
    "pdf_isdf",
    "pdf_sdf",
    "BlockOutcome",
    "EmpiricalDistribution",
    "SimulationReport",
    "decide_cooperation",
    "run_block",
    "simulate",
    "sup_distance",
    "sweep_rate",
]
