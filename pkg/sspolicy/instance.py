import logging
from typing import List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .config import Tolerances
from .demand import DemandModel, DistributionSpec, Pmf, build_pmf

logger = logging.getLogger(__name__)


class Instance(BaseModel):
    """A finite-horizon lot-sizing problem with backlogging and a fixed ordering cost."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    horizon: int = Field(ge=1, description="Number of periods T")
    h: float = Field(gt=0, description="Holding cost per unit of end-of-period stock")
    p: float = Field(gt=0, description="Backlog penalty per unit short at period end")
    K: float = Field(ge=0, description="Fixed cost charged whenever an order is placed")
    demand: DemandModel
    tolerances: Tolerances = Field(default_factory=Tolerances)
    initial_inventory: int = 0
    name: Optional[str] = None
    specs: Optional[List[DistributionSpec]] = Field(
        default=None, description="Distribution specs the demand model was built from, if any")

    @model_validator(mode="after")
    def _check_demand(self):
        if self.demand.horizon != self.horizon:
            raise ValueError(
                f"demand model covers {self.demand.horizon} periods, horizon is {self.horizon}")
        self.demand.freeze()
        return self

    @classmethod
    def from_pmfs(cls, pmfs: Sequence[Pmf], h: float, p: float, K: float, **extra) -> "Instance":
        return cls(horizon=len(pmfs), h=h, p=p, K=K, demand=DemandModel(pmfs), **extra)

    @classmethod
    def from_specs(cls, specs: Sequence[DistributionSpec], h: float, p: float, K: float,
                   tolerances: Tolerances = None, **extra) -> "Instance":
        tolerances = tolerances or Tolerances()
        pmfs = [build_pmf(spec, tolerances) for spec in specs]
        return cls.from_pmfs(pmfs, h, p, K, tolerances=tolerances, specs=list(specs), **extra)

    @property
    def critical_fractile(self) -> float:
        return self.p / (self.h + self.p)
