"""Z-score standardization fitted on training data only."""

from dataclasses import dataclass

import numpy as np

SIGMA_FLOOR = 1e-12


@dataclass
class Standardizer:
    """Per-column mean/scale; constant columns keep scale 1 so transforms stay finite."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, values):
        values = np.asarray(values, dtype=float)
        mean = values.mean(axis=0)
        scale = values.std(axis=0)
        scale = np.where(scale < SIGMA_FLOOR, 1.0, scale)
        return cls(mean=np.atleast_1d(mean), scale=np.atleast_1d(scale))

    def transform(self, values):
        return (np.asarray(values, dtype=float) - self.mean) / self.scale

    def inverse_transform(self, values):
        return np.asarray(values, dtype=float) * self.scale + self.mean
