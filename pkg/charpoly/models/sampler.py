from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from charpoly import config


class SamplerMethod(str, Enum):
    gaussian_direct = "direct"
    metropolis_loggas = "metropolis"


class SamplerSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    method: SamplerMethod = SamplerMethod.gaussian_direct
    burn_in: int = Field(200, ge=0)
    thinning: int = Field(5, ge=1)
    step: float = Field(0.2, gt=0)
    seed: int = Field(config.DEFAULT_SEED, ge=0)
    chains: int = Field(4, ge=1)
    walkers: int = Field(64, ge=1)  # metropolis walkers per chain
