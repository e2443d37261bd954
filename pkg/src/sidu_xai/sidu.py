"""SIDU explanation pipeline plus a simplified randomized-mask baseline.

The pipeline: binarize last-conv feature maps, upsample them to input
resolution, score each masked image with the model, weight every mask by
similarity-difference times uniqueness, and average the weighted masks into
one heatmap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import InvalidArgumentError
from .model import FeatureMaps, ModelAdapter, PredictionVector, predict_batched
from .numerics import bilinear_resize, minmax_normalize, vector_distance

__all__ = [
    "Norm",
    "SiduConfig",
    "RiseConfig",
    "MaskSet",
    "WeightVector",
    "ExplanationMap",
    "binarize_maps",
    "build_mask_set",
    "masked_images",
    "similarity_difference",
    "uniqueness",
    "feature_weights",
    "explain_sidu",
    "explain_rise",
]


class Norm(str, Enum):
    L2 = "l2"
    L1 = "l1"


@dataclass(frozen=True)
class SiduConfig:
    tau: float = 0.5
    sigma: float = 0.25
    norm: Norm = Norm.L2

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise InvalidArgumentError(f"tau must be in (0, 1), got {self.tau}")
        if not self.sigma > 0:
            raise InvalidArgumentError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class RiseConfig:
    num_masks: int = 2000
    grid: int = 7
    keep_prob: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.num_masks < 1:
            raise InvalidArgumentError("num_masks must be >= 1")
        if self.grid < 2:
            raise InvalidArgumentError("grid must be >= 2")
        if not 0.0 < self.keep_prob < 1.0:
            raise InvalidArgumentError("keep_prob must be in (0, 1)")


@dataclass
class MaskSet:
    """Binary masks at feature-map resolution and their upsampled versions."""

    binary: np.ndarray  # (N, n, n), values in {0, 1}
    upsampled: np.ndarray  # (N, H, W), values in [0, 1]


@dataclass
class WeightVector:
    sd: np.ndarray
    uniq: np.ndarray
    weights: np.ndarray


@dataclass
class ExplanationMap:
    heatmap: np.ndarray  # (H, W), nonnegative
    predicted_class: int
    method: str  # "sidu" | "rise"
    config_snapshot: SiduConfig | RiseConfig


def binarize_maps(fm: FeatureMaps, tau: float) -> np.ndarray:
    """Threshold each feature map at tau after per-map min-max normalization.

    Strict inequality: an entry equal to tau maps to 0.  A constant map
    normalizes to all zeros and therefore yields an all-zero mask.
    """
    if not 0.0 < tau < 1.0:
        raise InvalidArgumentError(f"tau must be in (0, 1), got {tau}")
    maps = fm.maps
    n = maps.shape[2]
    binary = np.empty((n, maps.shape[0], maps.shape[1]))
    for i in range(n):
        binary[i] = (minmax_normalize(maps[:, :, i]) > tau).astype(np.float64)
    return binary


def build_mask_set(fm: FeatureMaps, target_h: int, target_w: int, cfg: SiduConfig) -> MaskSet:
    """Binarize the feature maps and bilinearly upsample them to (target_h, target_w)."""
    binary = binarize_maps(fm, cfg.tau)
    upsampled = np.stack([bilinear_resize(b, target_h, target_w) for b in binary])
    return MaskSet(binary=binary, upsampled=np.clip(upsampled, 0.0, 1.0))


def masked_images(image: np.ndarray, masks: MaskSet) -> np.ndarray:
    """Point-wise multiply the image by each upsampled mask (broadcast over channels)."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3:
        raise InvalidArgumentError("image must be rank-3 (H, W, C)")
    if masks.upsampled.shape[1:] != image.shape[:2]:
        raise InvalidArgumentError(
            f"mask dims {masks.upsampled.shape[1:]} do not match image dims {image.shape[:2]}"
        )
    return image[None] * masks.upsampled[:, :, :, None]


def similarity_difference(
    p_org: PredictionVector | np.ndarray,
    p_i: PredictionVector | np.ndarray,
    sigma: float,
    norm: Norm = Norm.L2,
) -> float:
    """Gaussian-kernel similarity exp(-d / (2 sigma^2)) between prediction vectors.

    Lies in (0, 1]; equals 1 iff the vectors are identical; increases with
    sigma for fixed vectors.
    """
    if not sigma > 0:
        raise InvalidArgumentError(f"sigma must be positive, got {sigma}")
    a = p_org.scores if isinstance(p_org, PredictionVector) else np.asarray(p_org)
    b = p_i.scores if isinstance(p_i, PredictionVector) else np.asarray(p_i)
    d = vector_distance(a, b, Norm(norm).value)
    return float(math.exp(-d / (2.0 * sigma * sigma)))


def uniqueness(all_preds, norm: Norm = Norm.L2) -> np.ndarray:
    """U_i = sum over j of the distance between prediction vectors i and j."""
    vecs = [
        p.scores if isinstance(p, PredictionVector) else np.asarray(p, dtype=np.float64)
        for p in all_preds
    ]
    if not vecs:
        raise InvalidArgumentError("uniqueness of an empty prediction set is undefined")
    stacked = np.stack(vecs)
    diff = stacked[:, None, :] - stacked[None, :, :]
    if Norm(norm) is Norm.L2:
        dist = np.sqrt(np.sum(diff**2, axis=2))
    else:
        dist = np.sum(np.abs(diff), axis=2)
    return dist.sum(axis=1)


def feature_weights(
    p_org: PredictionVector, all_preds, cfg: SiduConfig
) -> WeightVector:
    """Per-mask weights: similarity difference times uniqueness."""
    sd = np.array(
        [similarity_difference(p_org, p, cfg.sigma, cfg.norm) for p in all_preds]
    )
    uniq = uniqueness(all_preds, cfg.norm)
    return WeightVector(sd=sd, uniq=uniq, weights=sd * uniq)


def explain_sidu(
    adapter: ModelAdapter, image: np.ndarray, cfg: SiduConfig | None = None
) -> ExplanationMap:
    """Full pipeline from feature maps to the weighted-average heatmap.

    The reduction is an ordered sum over mask index, so the result is
    independent of batch partitioning and internal scheduling.
    """
    cfg = cfg or SiduConfig()
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape[:2]
    fm = adapter.feature_maps(image)
    masks = build_mask_set(fm, h, w, cfg)
    masked = masked_images(image, masks)
    p_org = adapter.predict([image])[0]
    preds = predict_batched(adapter, list(masked))
    wv = feature_weights(p_org, preds, cfg)
    n = len(preds)
    heatmap = np.einsum("i,ihw->hw", wv.weights, masks.upsampled) / n
    return ExplanationMap(
        heatmap=heatmap,
        predicted_class=p_org.argmax,
        method="sidu",
        config_snapshot=cfg,
    )


def _rise_masks(cfg: RiseConfig, h: int, w: int) -> np.ndarray:
    """Coarse Bernoulli grids, bilinearly upsampled with a random sub-cell shift."""
    rng = np.random.default_rng(cfg.seed)
    cell_h = math.ceil(h / cfg.grid)
    cell_w = math.ceil(w / cfg.grid)
    up_h = (cfg.grid + 1) * cell_h
    up_w = (cfg.grid + 1) * cell_w
    masks = np.empty((cfg.num_masks, h, w))
    for i in range(cfg.num_masks):
        grid = (rng.random((cfg.grid, cfg.grid)) < cfg.keep_prob).astype(np.float64)
        up = bilinear_resize(grid, up_h, up_w)
        dy = int(rng.integers(0, cell_h))
        dx = int(rng.integers(0, cell_w))
        masks[i] = up[dy : dy + h, dx : dx + w]
    return np.clip(masks, 0.0, 1.0)


def explain_rise(
    adapter: ModelAdapter, image: np.ndarray, cfg: RiseConfig | None = None
) -> ExplanationMap:
    """Randomized-mask baseline: expectation of score-weighted random masks."""
    cfg = cfg or RiseConfig()
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape[:2]
    p_org = adapter.predict([image])[0]
    c = p_org.argmax
    masks = _rise_masks(cfg, h, w)
    probed = image[None] * masks[:, :, :, None]
    preds = predict_batched(adapter, list(probed))
    scores = np.array([p.scores[c] for p in preds])
    heatmap = np.einsum("i,ihw->hw", scores, masks) / (cfg.num_masks * cfg.keep_prob)
    return ExplanationMap(
        heatmap=heatmap, predicted_class=c, method="rise", config_snapshot=cfg
    )
