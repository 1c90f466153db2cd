"""MIMO autoencoder and classical baseline simulator."""

from ._core import (
    AeSystem,
    Constellation,
    DivergenceError,
    FormatError,
    InvalidInputError,
    SerPoint,
    ae_ser_sweep,
    alamouti_encode,
    alamouti_ml_detect,
    baseline_ser_sweep,
    build_system,
    detect,
    extract_openloop_codebook,
    extract_siso_constellation,
    load_constellation,
    load_system,
    pseudo_inverse,
    q_function,
    sample_channel,
    save_constellation,
    save_system,
    ser_analytic,
    ser_montecarlo,
    set_blas_threads,
    solve_allocation,
    svd,
    train,
    train_siso_shaping,
)

__version__ = "0.1.0"

__all__ = [
    "AeSystem",
    "Constellation",
    "DivergenceError",
    "FormatError",
    "InvalidInputError",
    "SerPoint",
    "ae_ser_sweep",
    "alamouti_encode",
    "alamouti_ml_detect",
    "baseline_ser_sweep",
    "build_system",
    "detect",
    "extract_openloop_codebook",
    "extract_siso_constellation",
    "load_constellation",
    "load_system",
    "pseudo_inverse",
    "q_function",
    "sample_channel",
    "save_constellation",
    "save_system",
    "ser_analytic",
    "ser_montecarlo",
    "set_blas_threads",
    "solve_allocation",
    "svd",
    "train",
    "train_siso_shaping",
]
