"""Pivoted-QR fronthaul compression and uplink link-level simulation."""

from ._core import (
    ConfigError,
    DecodeError,
    Error,
    InfeasibleBudget,
    InvalidInput,
    RankDeficient,
    compress_user,
    compression_ratio,
    decompress,
    pivoted_qr,
    qam_demodulate,
    qam_modulate,
    qr_reconstruct,
    run_sweep,
    sweep_csv,
    truncated_svd,
)

__all__ = [
    "ConfigError",
    "DecodeError",
    "Error",
    "InfeasibleBudget",
    "InvalidInput",
    "RankDeficient",
    "compress_user",
    "compression_ratio",
    "decompress",
    "pivoted_qr",
    "qam_demodulate",
    "qam_modulate",
    "qr_reconstruct",
    "run_sweep",
    "sweep_csv",
    "truncated_svd",
]
