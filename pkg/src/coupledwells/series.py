"""Labeled time series, the common output type of the experiment drivers."""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TimeSeries:
    """Ordered (time, value) samples with an identifying label.

    times : seconds, sorted ascending
    values : dimensionless samples
    uncertainty : optional per-point standard error
    """

    label: str
    times: np.ndarray
    values: np.ndarray
    uncertainty: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")
        if self.uncertainty is not None:
            unc = np.asarray(self.uncertainty, dtype=float)
            if unc.shape != self.times.shape:
                raise ValueError("uncertainty must match times length")
            object.__setattr__(self, "uncertainty", unc)
        if self.times.size > 1 and np.any(np.diff(self.times) < 0):
            raise ValueError("times must be sorted ascending")

    def __len__(self) -> int:
        return self.times.size
