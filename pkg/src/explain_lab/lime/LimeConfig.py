from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from explain_lab.lime.KernelSpec import KernelSpec


class LimeConfig(BaseModel):
    """
    Parameters
    ----------
    `kernel` `KernelSpec` Locality weighting
    `n_samples` `int` Neighbourhood size, including the instance itself; must exceed `dz`
    `perturb_scale` `float` Std of the raw-input jitter as a fraction of the input range
    `l1_penalty` `float` L1 weight of the complexity penalty
    `max_features` `int | None` Select this many features on the L1 path, then refit ridge
    `ridge_penalty` `float` Squared-L2 weight of the complexity penalty
    `input_range` `tuple[float, float]` Valid range of raw inputs; perturbations are clipped to it
    `seed` `int` Seed of the perturbations
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kernel: KernelSpec = KernelSpec()
    n_samples: int = Field(1000, ge=2)
    perturb_scale: float = Field(0.25, ge=0)
    l1_penalty: float = Field(0.0, ge=0)
    max_features: int | None = Field(None, ge=1)
    ridge_penalty: float = Field(1e-2, ge=0)
    input_range: tuple[float, float] = (0.0, 1.0)
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _one_sparsity_driver(self) -> "LimeConfig":
        if self.l1_penalty > 0 and self.max_features is not None:
            raise ValueError("set either l1_penalty or max_features, not both")
        if self.input_range[0] >= self.input_range[1]:
            raise ValueError("input_range must be increasing")
        return self
