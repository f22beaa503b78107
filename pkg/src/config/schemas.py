"""
Configuration schema: one pydantic model per section of the config file.

Every key has the benchmark's published value as its default, so an empty
config file reproduces the reference setup.
"""

from typing import List, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.ingest.schemas import DEFAULT_THETA_CANDIDATES
from src.synth.schemas import SyntheticSpec
from src.training.schemas import TrainConfig

ModelKind = Literal["grud", "transformer"]
Task = Literal["classification", "forecasting"]


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DataSection(Section):
    peaks_path: str = Field(default="output/synthetic/manifest.csv",
                            description="Manifest CSV (record_id,path) or long peak table (record_id,peak_time)")
    prepared_dir: str = Field(default="output/prepared", description="Where prepare writes dataset.csv/json")
    exclude_records: List[str] = Field(default_factory=list, description="Record ids dropped before theta selection")


class WindowSection(Section):
    T: int = Field(default=60, ge=1, description="Context length and stride (seconds)")
    H: int = Field(default=10, ge=1, description="Label horizon (seconds)")
    theta_candidates: List[float] = Field(default_factory=lambda: list(DEFAULT_THETA_CANDIDATES), min_length=1)
    min_positive_records: int = Field(default=3, ge=0)
    min_positive_windows: int = Field(default=40, ge=0)


class SplitSection(Section):
    ratios: List[float] = Field(default_factory=lambda: [0.70, 0.15, 0.15])
    seed: int = 0

    @field_validator("ratios")
    @classmethod
    def _three_ratios(cls, value):
        if len(value) != 3 or any(r <= 0 for r in value) or abs(sum(value) - 1.0) > 1e-9:
            raise ValueError(f"ratios must be three positive numbers summing to 1, got {value}")
        return value


class GrudSection(Section):
    hidden_dim: int = Field(default=64, gt=0)


class TransformerSection(Section):
    d_model: int = Field(default=64, gt=0)
    layers: int = Field(default=2, gt=0)
    heads: int = Field(default=4, gt=0)
    ffn_dim: int = Field(default=256, gt=0)
    layer_norm: bool = True


class ModelSection(Section):
    kinds: List[ModelKind] = Field(default_factory=lambda: ["grud", "transformer"], min_length=1)
    tasks: List[Task] = Field(default_factory=lambda: ["classification", "forecasting"], min_length=1)
    grud: GrudSection = Field(default_factory=GrudSection)
    transformer: TransformerSection = Field(default_factory=TransformerSection)
    hidden_sweep: List[int] = Field(default_factory=lambda: [32, 64, 128], min_length=1,
                                    description="Hidden sizes of the classification capacity sweep")
    run_capacity_sweep: bool = True
    sweep_seeds: List[int] = Field(default_factory=lambda: [0], min_length=1)
    sweep_transformer: bool = Field(default=False, description="Also sweep Transformer d_model")

    @field_validator("hidden_sweep")
    @classmethod
    def _positive_sizes(cls, value):
        if any(h <= 0 for h in value):
            raise ValueError(f"hidden sizes must be positive, got {value}")
        return value


class CalibrationSection(Section):
    enabled: bool = Field(default=True, description="Temperature scaling on validation logits")
    beta: float = Field(default=2.0, gt=0, description="F-beta used for the operating point")
    report_betas: List[float] = Field(default_factory=lambda: [1.0, 2.0])


class EvaluationSection(Section):
    n_bootstrap: int = Field(default=1000, ge=1)
    bootstrap_seed: int = 0
    ece_bins: int = Field(default=10, ge=1)
    coverage_level: float = Field(default=0.9, gt=0, lt=1)
    workers: int = Field(default=1, ge=1, description="Threads for bootstrap draws")


class SyntheticSection(SyntheticSpec):
    model_config = ConfigDict(extra="forbid")
    out_dir: str = "output/synthetic"

    def spec(self) -> SyntheticSpec:
        return SyntheticSpec(**self.model_dump(exclude={"out_dir"}))


class OutputSection(Section):
    runs_dir: str = "output/runs"
    workers: int = Field(default=1, ge=1, description="Threads used for the training grid")


class TrainingSection(TrainConfig):
    model_config = ConfigDict(extra="forbid")

    def train_config(self) -> TrainConfig:
        return TrainConfig(**self.model_dump())


class BenchSettings(Section):
    """The whole config file."""
    data: DataSection = Field(default_factory=DataSection)
    windows: WindowSection = Field(default_factory=WindowSection)
    split: SplitSection = Field(default_factory=SplitSection)
    models: ModelSection = Field(default_factory=ModelSection)
    training: TrainingSection = Field(default_factory=TrainingSection)
    calibration: CalibrationSection = Field(default_factory=CalibrationSection)
    evaluation: EvaluationSection = Field(default_factory=EvaluationSection)
    synthetic: SyntheticSection = Field(default_factory=SyntheticSection)
    output: OutputSection = Field(default_factory=OutputSection)
