import os

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    app_name: str = "parrom"
    log_level: str = Field(default="INFO", validation_alias="PARROM_LOG_LEVEL")
    threads: int = Field(
        default_factory=lambda: os.cpu_count() or 1, ge=1, validation_alias="PARROM_THREADS"
    )

    quad_abs_tol: float = 1e-10
    quad_rel_tol: float = 1e-6
    quad_max_panels: int = 2000

    cheb_min_degree: int = 16
    cheb_max_degree: int = 4096
    cheb_tail_tol: float = 1e-10
    fallback_samples: int = 1024
    grid_points_per_axis: int = 33
    grid_local_starts: int = 5

    mateq_residual_tol: float = 1e-10
    rcond_warning: float = 1e-12
    shift_rcond_tol: float = 1e-14


settings = Settings()
