
# perfweld runtime settings.
#
# Values come from PERFWELD_* environment variables or a local .env file and
# are validated when first read, so a bad PERFWELD_JOBS or log level fails at
# startup instead of in the middle of a learning-curve sweep.
#
# Read them through get_settings(); nothing else in the package touches
# os.environ.

from functools import lru_cache
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Tag written into every model bundle. Bump on incompatible layout changes.
MODEL_FORMAT_TAG = "perfweld-model/1"


class Settings(BaseSettings):
    """
    All perfweld runtime configuration.

    Every field has a default; the environment only overrides.
    """

    model_config = SettingsConfigDict(
        env_prefix="PERFWELD_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # ------------------------------------------------------------------
    # Logging
    # ------------------------------------------------------------------
    log_level: str = Field(default="INFO")
    log_format: str = Field(default="console")

    # ------------------------------------------------------------------
    # Datasets
    # ------------------------------------------------------------------
    response_name: str = Field(default="time_seconds")

    # ------------------------------------------------------------------
    # Experiments
    # ------------------------------------------------------------------
    jobs: int = Field(default=1, ge=1)
    default_seeds: int = Field(default=5, ge=1)
    recipes_dir: Path | None = Field(default=None)
    runs_dir: Path = Field(default=Path("./runs"))

    # ------------------------------------------------------------------
    # Bench harness - tuned constants
    # ------------------------------------------------------------------
    bench_repetitions: int = Field(default=5, ge=1)
    bench_warmup: int = Field(default=1, ge=0)
    # A measurement is trusted only above this multiple of the clock resolution.
    timer_resolution_factor: float = Field(default=100.0, gt=0)
    # Largest interior edge the cache simulator agrees to trace.
    trace_limit: int = Field(default=64, ge=1)

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        allowed = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        upper = v.upper()
        if upper not in allowed:
            raise ValueError(f"log_level must be one of {allowed}, got: {v}")
        return upper

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        allowed = {"json", "console"}
        if v.lower() not in allowed:
            raise ValueError(f"log_format must be one of {allowed}, got: {v}")
        return v.lower()


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Process-wide Settings. Tests clear the cache after changing the environment."""
    return Settings()
