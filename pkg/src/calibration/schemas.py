"""
Calibration sidecar written per classification run.
"""

from typing import Dict, Optional

from pydantic import BaseModel, Field


class CalibrationResult(BaseModel):
    temperature: float = Field(gt=0)
    threshold: Optional[float] = Field(default=None, ge=0, le=1, description="None when no validation positive exists")
    beta: float = Field(default=2.0, gt=0)
    calibrated: bool = True
    thresholds_by_beta: Dict[str, Optional[float]] = Field(default_factory=dict)
