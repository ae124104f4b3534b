import math
from pathlib import Path
from typing import Self

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class BinConfig(BaseModel):
    """Degree binning: `tau` singleton bins followed by bins growing at rate `omega`."""

    tau: int = Field(default=2, description="Number of singleton bins")
    omega: float = Field(default=2.0, description="Growth rate of bin widths (> 1)")

    @field_validator("tau")
    @classmethod
    def validate_tau(cls, v: int) -> int:
        if v < 1:
            raise ValueError("tau must be at least 1")
        return v

    @field_validator("omega")
    @classmethod
    def validate_omega(cls, v: float) -> float:
        if not math.isfinite(v) or v <= 1:
            raise ValueError("omega must be a finite real greater than 1")
        return v

    # Frozen so the config can key caches and be shared across worker threads.
    model_config = ConfigDict(frozen=True)

    @classmethod
    def single_bin(cls, max_degree: float = 1e7) -> "BinConfig":
        """Bins {1} and {2..max_degree}: every vertex with wedges shares one bin."""
        return cls(tau=1, omega=max(float(max_degree), 2.0))


class EngineConfig(BaseModel):
    spill_records: int = Field(
        default=200_000,
        description="Records a mapper buffers before spilling a sorted run to disk",
    )
    merge_fan_in: int = Field(
        default=64, description="Maximum number of sorted runs merged in one pass"
    )
    map_workers: int = Field(default=4, description="Concurrent mapper threads")
    reduce_workers: int = Field(default=4, description="Concurrent reducer threads")
    max_values_per_key: int | None = Field(
        default=None,
        description="Reducer memory budget; a key with more values aborts the job",
    )
    gather_limit: int = Field(
        default=1_000_000,
        description=(
            "Largest client-side object (wedges per bin, wedge centers, closure "
            "hashes) shipped to a job before the optional gather is skipped"
        ),
    )
    tmp_dir: Path | None = Field(
        default=None, description="Directory for spill files (defaults to system tmp)"
    )

    @field_validator(
        "spill_records", "map_workers", "reduce_workers", "gather_limit"
    )
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("engine limits must be positive")
        return v

    @field_validator("merge_fan_in")
    @classmethod
    def validate_fan_in(cls, v: int) -> int:
        if v < 2:
            raise ValueError("merge_fan_in must be at least 2")
        return v

    @field_validator("max_values_per_key")
    @classmethod
    def validate_budget(cls, v: int | None) -> int | None:
        if v is not None and v <= 0:
            raise ValueError("max_values_per_key must be positive when set")
        return v

    model_config = ConfigDict(frozen=True)


class RunConfig(BaseModel):
    """Parameters of one sampling-pipeline run."""

    input: Path | None = Field(default=None, description="Edge list file")
    out: Path = Field(default=Path("out"), description="Output directory")
    tau: int = Field(default=2)
    omega: float = Field(default=2.0)
    k: int = Field(default=10_000, description="Samples per bin")
    seed: int = Field(default=0)
    reducers: int = Field(default=64, description="Reduce partitions per job")
    splits: int = Field(default=8, description="Input splits per job")
    skip_2b: bool = Field(default=False, description="Skip gathering wedge centers")
    skip_3a: bool = Field(default=False, description="Skip gathering closure hashes")
    keep_intermediates: bool = Field(default=False)
    validate_input: bool = Field(
        default=False, description="Reject self-edges and duplicate edges"
    )
    exhaustive: bool = Field(
        default=False,
        description="Test mode: sample every wedge exactly once (exact results)",
    )
    delta: float = Field(
        default=0.001, description="Per-bin failure probability used in reports"
    )

    @field_validator("k", "reducers", "splits")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("k, reducers and splits must be positive")
        return v

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        if v < 0:
            raise ValueError("seed must be non-negative")
        return v

    @field_validator("delta")
    @classmethod
    def validate_delta(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("delta must lie in (0, 1)")
        return v

    @model_validator(mode="after")
    def validate_bins(self) -> Self:
        # Same rules as BinConfig.
        BinConfig(tau=self.tau, omega=self.omega)
        return self

    @property
    def bins(self) -> BinConfig:
        return BinConfig(tau=self.tau, omega=self.omega)


class SkgConfig(BaseModel):
    """Noisy Stochastic Kronecker (Graph500-style) generator parameters."""

    scale: int = Field(default=16, description="Recursion levels; 2**scale vertices")
    edge_factor: int = Field(default=16, description="Candidate edges per vertex")
    matrix: tuple[tuple[float, float], tuple[float, float]] = Field(
        default=((0.57, 0.19), (0.19, 0.05)),
        description="2x2 generator matrix, entries summing to 1",
    )
    noise: float = Field(default=0.1, description="Per-level noise amplitude")
    permute_vertices: bool = Field(
        default=True, description="Relabel vertices with a seeded permutation"
    )
    block_edges: int = Field(
        default=1 << 20, description="Candidate edges generated per RNG block"
    )

    @field_validator("scale", "edge_factor", "block_edges")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("scale, edge_factor and block_edges must be positive")
        return v

    @field_validator("noise")
    @classmethod
    def validate_noise(cls, v: float) -> float:
        if not 0 <= v < 0.5:
            raise ValueError("noise must lie in [0, 0.5)")
        return v

    @model_validator(mode="after")
    def validate_matrix(self) -> Self:
        (a, b), (c, d) = self.matrix
        if min(a, b, c, d) < 0:
            raise ValueError("generator matrix entries must be non-negative")
        if not math.isclose(a + b + c + d, 1.0, abs_tol=1e-9):
            raise ValueError("generator matrix entries must sum to 1")
        if self.noise > 0 and self.noise > min((a + d) / 2, b, c):
            raise ValueError(
                "noise exceeds min((a+d)/2, b, c); perturbed entries would go negative"
            )
        return self

    model_config = ConfigDict(frozen=True)


class LoggingConfig(BaseModel):
    level: str = Field(default="info")

    @field_validator("level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        if v.lower() not in ["debug", "info", "warning", "error", "critical"]:
            raise ValueError("Invalid log level")
        return v.lower()


class Config(BaseModel):
    engine: EngineConfig = Field(default_factory=EngineConfig)
    run: RunConfig = Field(default_factory=RunConfig)
    skg: SkgConfig = Field(default_factory=SkgConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    model_config = ConfigDict(extra="forbid")  # Prevent unknown fields
