from enum import Enum
from typing import Any

from pydantic import BaseModel, Field

from charpoly import config


class OutputFormat(str, Enum):
    csv = "csv"
    json = "json"


class RunConfig(BaseModel):
    command: str
    potential: str = "0,0.5"
    n: int = Field(10, ge=1)
    seed: int = config.DEFAULT_SEED
    tol: float = Field(config.QUADRATURE_TOL, gt=0, lt=1)
    format: OutputFormat = OutputFormat.csv
    threads: int = Field(1, ge=1)
    out: str | None = None
    params: dict[str, Any] = {}
