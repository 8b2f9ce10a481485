import logging
import os
import sys
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

load_dotenv()


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mass: float = Field(
        default=1e-12, description="Allowed deviation of total probability mass from 1")
    cost: float = Field(
        default=1e-9, description="Slack used when comparing costs against thresholds")
    tail: float = Field(
        default=1e-10, description="Residual mass cut from negative binomial tails")
    tie_break: Literal["smallest", "largest"] = Field(
        default="smallest", description="Which cycle length wins equal shortest-path costs")
    max_grid_doublings: int = Field(
        default=20, description="How often the exact grid may grow before giving up")


class Settings(BaseModel):
    threads: int = Field(default=1, ge=1)
    log_level: str = "WARNING"
    archive_dir: str = "generated"
    sim_chunk: int = Field(default=100_000, ge=1)

    @classmethod
    def from_env(cls) -> "Settings":
        return cls(
            threads=int(os.getenv("SSPOLICY_THREADS", "1")),
            log_level=os.getenv("SSPOLICY_LOG_LEVEL", "WARNING"),
            archive_dir=os.getenv("SSPOLICY_ARCHIVE_DIR", "generated"),
            sim_chunk=int(os.getenv("SSPOLICY_SIM_CHUNK", "100000")),
        )


settings = Settings.from_env()


def configure_logging(level: str = None) -> None:
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        format='%(asctime)s | %(levelname)s | %(message)s',
        datefmt='%H:%M:%S',
        stream=sys.stderr,
        force=True,
    )
