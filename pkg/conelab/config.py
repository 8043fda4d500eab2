"""
Configuration module for conelab.
Loads numerical settings from environment variables (prefix CONELAB_) and .env.

Every tolerance, sweep count and grid size used by the numeric kernels lives here,
so a run can be reproduced from its environment alone.
"""

from functools import lru_cache
from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical settings loaded from environment variables."""

    model_config = SettingsConfigDict(env_prefix="CONELAB_", env_file=".env", env_file_encoding="utf-8")

    # Spectral decisions
    positivity_factor: float = 1e-12  # eps = factor * (1 + max|lambda|)
    multiplicity_gap: float = 1e-9
    eigen_backend: Literal["jacobi", "lapack"] = "jacobi"
    jacobi_threshold: float = 1e-13
    jacobi_max_sweeps: int = 50

    # Operator norm estimation
    op_norm_restarts: int = 64
    op_norm_iterations: int = 200
    op_norm_step_tol: float = 1e-10

    # Residual sampling
    derivation_samples: int = 64
    residual_seed: int = 20240601

    # Quadrature and differentiation
    quadrature_nodes: int = 32
    quadrature_tol: float = 1e-11
    quadrature_max_nodes: int = 512
    simpson_intervals: int = 2048
    group_simpson_intervals: int = 64
    fd_step: float = 1e-5

    # ODE integration
    rk4_steps: int = 1000
    lift_abort_tolerance: float = 1e-4

    # Experiments
    minimality_pairs: int = 20
    minimality_intervals: int = 2048
    group_competitors: int = 10
    group_norm_restarts: int = 2  # per Simpson node, on top of the unit and the previous maximizer
    quotient_samples: int = 100
    sine_modes: int = 4

    # Logging
    log_level: str = "INFO"


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
