"""Synthetic adapter with analytically known saliency, used as ground truth.

The model's score for class 0 is the mean intensity of the top-left image
quadrant; the feature maps are the four quadrant indicators.  Only masking
away the top-left quadrant can change the score, so the correct explanation
is known in closed form.
"""

from __future__ import annotations

import numpy as np

from .errors import CapabilityError, InvalidArgumentError
from .model import AdapterCapabilities, FeatureMaps, ModelAdapter, PredictionVector

__all__ = ["PlantedQuadrantAdapter"]

_SCORE_FLOOR = 1e-6


class PlantedQuadrantAdapter(ModelAdapter):
    """Two-class model: P(class 0) = clipped mean of the top-left quadrant."""

    def __init__(
        self,
        input_hw: int = 32,
        map_side: int = 8,
        channels: int = 3,
        has_gradients: bool = True,
    ):
        if input_hw % 2 or map_side % 2:
            raise InvalidArgumentError("input and map sides must be even")
        self.input_hw = input_hw
        self.map_side = map_side
        self.channels = channels
        self._caps = AdapterCapabilities(
            has_gradients=has_gradients,
            max_batch=4096,
            input_dims=(input_hw, input_hw, channels),
            num_classes=2,
        )
        half = map_side // 2
        maps = np.zeros((map_side, map_side, 4))
        maps[:half, :half, 0] = 1.0  # top-left (the scoring quadrant)
        maps[:half, half:, 1] = 1.0
        maps[half:, :half, 2] = 1.0
        maps[half:, half:, 3] = 1.0
        self._maps = maps

    @property
    def capabilities(self) -> AdapterCapabilities:
        return self._caps

    def _score(self, image: np.ndarray) -> float:
        half = self.input_hw // 2
        s = float(image[:half, :half, :].mean())
        return min(max(s, _SCORE_FLOOR), 1.0 - _SCORE_FLOOR)

    def predict(self, images) -> list[PredictionVector]:
        out = []
        for im in images:
            im = self._check_image(im)
            s = self._score(im)
            out.append(PredictionVector(np.array([s, 1.0 - s])))
        return out

    def feature_maps(self, image: np.ndarray) -> FeatureMaps:
        self._check_image(image)
        return FeatureMaps(self._maps.copy(), layer_name="quadrants")

    def input_gradient(self, image: np.ndarray, target_class: int) -> np.ndarray:
        if not self._caps.has_gradients:
            raise CapabilityError("gradients disabled for this adapter instance")
        image = self._check_image(image)
        if target_class not in (0, 1):
            raise InvalidArgumentError("target_class must be 0 or 1")
        half = self.input_hw // 2
        raw = float(image[:half, :half, :].mean())
        grad = np.zeros_like(image)
        if not _SCORE_FLOOR < raw < 1.0 - _SCORE_FLOOR:
            return grad  # clipped region: score locally constant
        s = raw
        # L = -ln p_t; dL/ds = -1/s for class 0, +1/(1-s) for class 1.
        dl_ds = -1.0 / s if target_class == 0 else 1.0 / (1.0 - s)
        grad[:half, :half, :] = dl_ds / (half * half * self.channels)
        return grad
