from charpoly.models.ensemble import (  # noqa: F401
    GAUSSIAN,
    EnsembleConfig,
    Potential,
    QuadratureSpec,
)
from charpoly.models.runconfig import OutputFormat, RunConfig  # noqa: F401
from charpoly.models.sampler import SamplerMethod, SamplerSpec  # noqa: F401
