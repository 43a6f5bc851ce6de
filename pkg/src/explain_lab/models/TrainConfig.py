from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class TrainConfig(BaseModel):
    """
    Optimisation and architecture settings shared by every model kind
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    learning_rate: float = Field(0.05, gt=0)
    momentum: float = Field(0.9, ge=0, lt=1)
    batch_size: int = Field(64, ge=1)
    epochs: int = Field(30, ge=0)
    l2_penalty: float = Field(1e-4, ge=0)
    seed: int = Field(0, ge=0)
    eval_every: int = Field(1, ge=1)
    n_components: int = Field(16, ge=1)
    hidden_sizes: tuple[int, ...] = (256, 128)
    check_invariants: bool = False
    progress: bool = False
