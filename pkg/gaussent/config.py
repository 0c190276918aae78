"""Configuration."""

from functools import lru_cache
from typing import Literal

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    app_name: str = "GaussEnt-LOCC"
    debug: bool = False
    log_level: str = "INFO"

    # Numerical tolerances
    positivity_tol: float = 1e-10
    boundary_tol: float = 1e-12
    symmetry_tol: float = 1e-9
    grid_boundary_tol: float = 1e-9
    clamp_tol: float = 1e-10
    parity_tol: float = 1e-9
    phase_tol: float = 1e-12
    displacement_tol: float = 1e-6

    # Random state generation
    random_state_scale: float = 0.5
    random_state_attempts: int = 100

    # Fock oracle
    default_cutoff: int = 30
    cutoff_padding: int = 6
    leakage_threshold: float = 1e-8
    psd_tol: float = 1e-8
    max_squeezing: float = 3.0

    # Conditioned moments: "sigma_trace" normalizes by Tr(sigma1), "plain_difference" does not
    parity_normalization: Literal["sigma_trace", "plain_difference"] = "sigma_trace"

    # LOCC protocol simulation
    default_seed: int = 1729
    n_local_shots: int = 100_000
    n_parity_shots: int = 100_000
    parity_batch_size: int = 10_000
    bootstrap_resamples: int = 200
    boundary_sigmas: float = 3.0
    symmetry_sigmas: float = 4.0
    quadrature_grid_points: int = 2001
    socket_host: str = "127.0.0.1"
    channel_timeout: float = 30.0
    transcript_timestamps: bool = False

    model_config = {"env_file": ".env", "env_file_encoding": "utf-8", "env_prefix": "GAUSSENT_"}


@lru_cache
def get_settings() -> Settings:
    return Settings()
