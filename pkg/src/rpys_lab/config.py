"""Analysis configuration: every knob has a default and travels with the
session so results stay reproducible."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .segments import Scale


@dataclass(frozen=True)
class Config:
    threshold: float = 0.75      # clustering similarity threshold, (0, 1]
    window: int = 5              # median window for deviations, odd
    pair_dedup: bool = True      # count a (publication, cluster) pair once
    min_len: int = 5             # minimum segment length, years
    scale: Scale = Scale.LOG1P   # segmentation fitting scale
    min_deviation: float = 0.0   # default peak filter

    def __post_init__(self):
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError(f"window must be a positive odd integer, got {self.window}")
        if self.min_len < 1:
            raise ValueError(f"min_len must be >= 1, got {self.min_len}")
        if not isinstance(self.scale, Scale):
            object.__setattr__(self, "scale", Scale(self.scale))

    def to_dict(self) -> dict:
        data = asdict(self)
        data["scale"] = self.scale.value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        known = {f: data[f] for f in cls.__dataclass_fields__ if f in data}
        if "scale" in known:
            known["scale"] = Scale(known["scale"])
        return cls(**known)
