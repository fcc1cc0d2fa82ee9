"""Recursive rescaling decoder and threshold simulator for the hexagonal color code."""

from .decoder import DecodeResult, DecoderConfig, base_ml_decode, decode
from .lattice import LatticeHierarchy, LatticeLevel, build_hierarchy, get_level, verify_rescalable
from .montecarlo import estimate_threshold, run_batch, run_trial, sweep, wilson_interval

__all__ = [
    "DecodeResult",
    "DecoderConfig",
    "LatticeHierarchy",
    "LatticeLevel",
    "base_ml_decode",
    "build_hierarchy",
    "decode",
    "estimate_threshold",
    "get_level",
    "run_batch",
    "run_trial",
    "sweep",
    "verify_rescalable",
    "wilson_interval",
]
