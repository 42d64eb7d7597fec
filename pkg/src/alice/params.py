"""Flow parameters shared by the filtering, clustering, fabric and selection phases."""

from __future__ import annotations

from dataclasses import dataclass

from alice.errors import ConfigRangeError

POSITIVE_SCORE = "positive_score"
TOP_K = "top_k"
TRANSITIVE = "transitive"
DIRECT = "direct"
RANK_MAX = "max"
RANK_MIN = "min"


@dataclass(frozen=True)
class SelectPolicy:
    kind: str = POSITIVE_SCORE
    k: int | None = None

    def __post_init__(self):
        if self.kind not in (POSITIVE_SCORE, TOP_K):
            raise ConfigRangeError(f"unknown selection policy {self.kind!r}")
        if self.kind == TOP_K and (self.k is None or self.k < 1):
            raise ConfigRangeError("the top_k policy needs k >= 1")


@dataclass(frozen=True)
class FlowParams:
    max_io: int
    max_efpgas: int
    selected_outputs: tuple[str, ...] = ()
    fabric_w_min: int = 2
    fabric_w_max: int = 20
    io_per_side_unit: int = 16
    alpha: float = 1.0
    beta: float = 1.0
    select_policy: SelectPolicy = SelectPolicy()
    rank_order: str = RANK_MAX
    impact: str = TRANSITIVE
    max_clusters: int = 100_000

    def __post_init__(self):
        positive = {
            "max_io": self.max_io,
            "max_efpgas": self.max_efpgas,
            "fabric.w_min": self.fabric_w_min,
            "fabric.w_max": self.fabric_w_max,
            "fabric.io_per_side_unit": self.io_per_side_unit,
            "limits.max_clusters": self.max_clusters,
        }
        for key, value in positive.items():
            if value < 1:
                raise ConfigRangeError(f"{key} must be a positive integer, got {value}")
        if self.fabric_w_min > self.fabric_w_max:
            raise ConfigRangeError(
                f"fabric.w_min ({self.fabric_w_min}) exceeds fabric.w_max ({self.fabric_w_max})"
            )
        if self.alpha < 0 or self.beta < 0:
            raise ConfigRangeError("score.alpha and score.beta must be non-negative")
        if self.alpha + self.beta <= 0:
            raise ConfigRangeError("score.alpha + score.beta must be positive")
        if self.rank_order not in (RANK_MAX, RANK_MIN):
            raise ConfigRangeError(f"score.rank_order must be 'max' or 'min', got {self.rank_order!r}")
        if self.impact not in (TRANSITIVE, DIRECT):
            raise ConfigRangeError(f"filter.impact must be 'transitive' or 'direct', got {self.impact!r}")
