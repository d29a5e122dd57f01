"""Photon-counting Leggett-Garg and no-signaling-in-time witnesses."""

from ._macrolight import (
    CapacityError,
    ConfigError,
    EmptyPostSelection,
    NotEnoughPhotons,
    Scheme,
    WitnessReport,
    __version__,
    correlation,
    find_critical_n,
    kmax,
    lgi_k,
    prob_one_port,
    prob_three_port,
    prob_two_port,
    v12,
    v123,
)

__all__ = [
    "CapacityError",
    "ConfigError",
    "EmptyPostSelection",
    "NotEnoughPhotons",
    "Scheme",
    "WitnessReport",
    "__version__",
    "correlation",
    "find_critical_n",
    "kmax",
    "lgi_k",
    "prob_one_port",
    "prob_three_port",
    "prob_two_port",
    "v12",
    "v123",
]
