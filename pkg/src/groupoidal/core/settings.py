from __future__ import annotations

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="GROUPOIDAL_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Comparison tolerances. Exact (rational) inputs never use these.
    tolerance: float = Field(1e-12, gt=0)
    psd_tolerance: float = Field(1e-10, gt=0)
    unitary_tolerance: float = Field(1e-10, gt=0)
    # Cocycle values in (tolerance, regularity_band) mark a float cocycle as non-regular.
    regularity_band: float = Field(1e-6, gt=0)

    # Rank decisions for the index pairing: singular values <= rank_threshold are zero,
    # the smallest retained one must clear rank_gap.
    rank_threshold: float = Field(1e-9, gt=0)
    rank_gap: float = Field(1e-6, gt=0)

    default_window: int = Field(8, ge=0)
    sample_budget: int = Field(200, ge=1)
    seed: int = 0

    spectral_flow_steps: int = Field(64, ge=2)
    spectral_flow_max_steps: int = Field(1024, ge=2)
    quadrature_points: int = Field(64, ge=1)

    # Empty z-choices in the H-valued inner product: raise when True, log and use 0 otherwise.
    strict_empty_classes: bool = False

    max_workers: int = Field(1, ge=1)
    log_level: str = "INFO"
    metrics_textfile: str | None = None


settings = Settings()
