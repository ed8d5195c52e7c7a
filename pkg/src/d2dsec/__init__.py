"""Max-min secure downlink beamforming with amplify-and-forward D2D cooperation."""

from .channel import ChannelRealization, NodePositions, generate_realization
from .config import SystemConfig, load_config
from .optimizer import SchemeId, run, verify
from .rates import DesignVariables, RateReport, report

__all__ = [
    "ChannelRealization",
    "DesignVariables",
    "NodePositions",
    "RateReport",
    "SchemeId",
    "SystemConfig",
    "generate_realization",
    "load_config",
    "report",
    "run",
    "verify",
]
