"""Deterministic baseband simulator for a coordinated chirp + OFDM link:
waveform synthesis, fractional-delay Doppler channels, bistatic sensing,
sensing-aided channel estimation with successive interference cancellation,
time-domain chirp cancellation, OFDM demodulation with coded and uncoded
BER, a pilot-aided conventional-OFDM baseline, and a Monte-Carlo harness.
"""

from .config import SPEED_OF_LIGHT, SystemConfig, desk_config, fullscale_config
from .scenario import ScenarioSpec, TargetSpec, load_scenario, parse_scenario

__all__ = [
    "SPEED_OF_LIGHT",
    "SystemConfig",
    "desk_config",
    "fullscale_config",
    "ScenarioSpec",
    "TargetSpec",
    "load_scenario",
    "parse_scenario",
]

__version__ = "0.1.0"
