"""Flat feature vectors exchanged between the pipelines and the clusterer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ACOUSTIC = "acoustic"
VISUAL = "visual"
MODALITIES = (ACOUSTIC, VISUAL)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """A flat real-valued vector tagged with the modality that produced it.

    Acoustic vectors are a spectrum's frequencies followed by its amplitudes,
    so their length is always even (2n for an n-bin spectrum).  Visual
    vectors are flattened dominant-color triples, length 3C.
    """

    values: np.ndarray
    modality: str

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("feature vector must be a non-empty 1-D sequence")
        object.__setattr__(self, "values", values)
        if self.modality not in MODALITIES:
            raise ValueError(f"unknown modality {self.modality!r}")
        if self.modality == ACOUSTIC and values.size % 2 != 0:
            raise ValueError("acoustic feature vectors have even length")

    def __len__(self) -> int:
        return int(self.values.size)
