"""Configuration settings for the library and CLI."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Library settings, overridable through ATOMLASER_* environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="ATOMLASER_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = Field(default="INFO", description="Root log level")
    log_json: bool = Field(default=False, description="Render logs as JSON lines")

    # Branch selection
    branch_theta: float = Field(
        default=0.5,
        gt=0,
        description="Thermal branch is used for r < theta * r_th",
    )

    # Quadrature
    quad_abs_tol: float = Field(default=1e-12, gt=0)
    quad_rel_tol: float = Field(default=1e-10, gt=0)
    quad_limit: int = Field(default=200, ge=10, description="Subintervals per piece")
    support_floor: float = Field(
        default=1e-14,
        gt=0,
        description="Relative density that ends the adaptive support",
    )
    support_tail: float = Field(
        default=1e-10,
        gt=0,
        description="Relative tail mass that stops support growth",
    )

    # Master-equation oracle
    tail_mass_limit: float = Field(default=1e-8, gt=0)
    sub_threshold_cutoff: int = Field(default=40, ge=4)
    min_cutoff: int = Field(default=4, ge=1)
    cutoff_growth: float = Field(default=1.5, gt=1)
    max_cutoff: int = Field(default=4000, ge=4)
    heavy_cutoff: int = Field(
        default=400,
        description="Cutoffs above this are table-scale and need the heavy flag",
    )
    iterative_dimension: int = Field(
        default=100_000,
        description="Sector size above which the iterative solver is used",
    )

    # Output and execution
    profile_points: int = Field(default=401, ge=3)
    workers: int = Field(default=1, ge=1)

    # Regime warnings
    generating_warn_product: float = Field(default=50.0)
    gaussian_warn_saturation: float = Field(default=10.0)

    # Application metadata
    app_name: str = "atomlaser"
    app_version: str = "0.1.0"


# Global settings instance
settings = Settings()
