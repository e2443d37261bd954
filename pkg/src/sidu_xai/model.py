"""Model-adapter boundary: what the explanation pipeline needs from a CNN.

Adapters expose probability vectors, last-convolution-layer feature maps and
(optionally) input gradients.  Two concrete adapters ship here: a
deterministic built-in reference CNN with a hand-written backward pass, and a
file-backed adapter that resolves queries by content hash into stored tensor
files.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    AdapterError,
    CapabilityError,
    InvalidArgumentError,
    ManifestError,
    RecordNotFoundError,
)
from .numerics import softmax
from .tensorio import image_hash, read_tensor_file

__all__ = [
    "PredictionVector",
    "FeatureMaps",
    "AdapterCapabilities",
    "ModelAdapter",
    "ReferenceCNN",
    "build_reference_cnn",
    "FileAdapter",
    "build_file_adapter",
    "predict_batched",
]


@dataclass
class PredictionVector:
    """A probability vector over classes, optionally with labels."""

    scores: np.ndarray
    class_labels: list[str] | None = None

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.ndim != 1 or self.scores.size < 1:
            raise InvalidArgumentError("scores must be a non-empty rank-1 vector")
        if self.scores.min() < -1e-9 or self.scores.max() > 1 + 1e-9:
            raise InvalidArgumentError("scores must lie in [0, 1]")
        if abs(float(self.scores.sum()) - 1.0) > 1e-6:
            raise InvalidArgumentError(
                f"scores must sum to 1 within 1e-6, got {self.scores.sum()}"
            )

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.scores))


@dataclass
class FeatureMaps:
    """Last-convolution-layer output of shape n x n x N."""

    maps: np.ndarray
    layer_name: str = ""

    def __post_init__(self):
        self.maps = np.asarray(self.maps, dtype=np.float64)
        if self.maps.ndim != 3:
            raise InvalidArgumentError("feature maps must be rank-3 (n, n, N)")
        if not np.all(np.isfinite(self.maps)):
            raise InvalidArgumentError("feature maps must be finite")

    @property
    def num_maps(self) -> int:
        return self.maps.shape[2]


@dataclass(frozen=True)
class AdapterCapabilities:
    has_gradients: bool
    max_batch: int
    input_dims: tuple[int, int, int] | None  # (height, width, channels)
    num_classes: int

    def __post_init__(self):
        if self.max_batch < 1:
            raise InvalidArgumentError("max_batch must be >= 1")


class ModelAdapter(ABC):
    """Deterministic black-box model contract.

    ``predict`` must be bit-reproducible: identical batches give identical
    outputs across calls and concurrent callers.  Implementations must be
    safe for concurrent read-only use.
    """

    @property
    @abstractmethod
    def capabilities(self) -> AdapterCapabilities:
        ...

    @abstractmethod
    def predict(self, images) -> list[PredictionVector]:
        ...

    @abstractmethod
    def feature_maps(self, image: np.ndarray) -> FeatureMaps:
        ...

    def input_gradient(self, image: np.ndarray, target_class: int) -> np.ndarray:
        raise CapabilityError(f"{type(self).__name__} does not provide input gradients")

    def _check_image(self, image: np.ndarray) -> np.ndarray:
        image = np.asarray(image, dtype=np.float64)
        dims = self.capabilities.input_dims
        if dims is not None and tuple(image.shape) != tuple(dims):
            raise InvalidArgumentError(
                f"image dims {image.shape} do not match adapter input dims {dims}"
            )
        if image.ndim != 3:
            raise InvalidArgumentError("image must be rank-3 (H, W, C)")
        return image


def predict_batched(adapter: ModelAdapter, images) -> list[PredictionVector]:
    """Predict an arbitrarily long sequence, splitting at the adapter's max_batch."""
    max_batch = adapter.capabilities.max_batch
    out: list[PredictionVector] = []
    images = list(images)
    for start in range(0, len(images), max_batch):
        out.extend(adapter.predict(images[start : start + max_batch]))
    return out


# ---------------------------------------------------------------------------
# Reference CNN
# ---------------------------------------------------------------------------

_SM64_GAMMA = 0x9E3779B97F4A7C15
_SM64_M1 = 0xBF58476D1CE4E5B9
_SM64_M2 = 0x94D049BB133111EB
_U64 = (1 << 64) - 1


def _splitmix64_uniform(seed: int, count: int) -> np.ndarray:
    """``count`` doubles in [0, 1) from the SplitMix64 stream seeded at ``seed``."""
    out = np.empty(count, dtype=np.float64)
    x = seed & _U64
    for i in range(count):
        x = (x + _SM64_GAMMA) & _U64
        z = x
        z = ((z ^ (z >> 30)) * _SM64_M1) & _U64
        z = ((z ^ (z >> 27)) * _SM64_M2) & _U64
        z ^= z >> 31
        out[i] = (z >> 11) * 2.0**-53
    return out


def _conv3x3(x: np.ndarray, kernels: np.ndarray) -> np.ndarray:
    """Same-size 3x3 convolution; x: (B, H, W, Cin), kernels: (Cout, 3, 3, Cin)."""
    b, h, w, _ = x.shape
    xp = np.pad(x, ((0, 0), (1, 1), (1, 1), (0, 0)))
    out = np.zeros((b, h, w, kernels.shape[0]))
    for dy in range(3):
        for dx in range(3):
            out += np.einsum(
                "byxi,oi->byxo", xp[:, dy : dy + h, dx : dx + w, :], kernels[:, dy, dx, :]
            )
    return out


def _conv3x3_input_grad(grad_out: np.ndarray, kernels: np.ndarray, in_channels: int) -> np.ndarray:
    """Gradient of _conv3x3 w.r.t. its (unpadded) input."""
    b, h, w, _ = grad_out.shape
    gp = np.zeros((b, h + 2, w + 2, in_channels))
    for dy in range(3):
        for dx in range(3):
            gp[:, dy : dy + h, dx : dx + w, :] += np.einsum(
                "byxo,oi->byxi", grad_out, kernels[:, dy, dx, :]
            )
    return gp[:, 1 : 1 + h, 1 : 1 + w, :]


def _maxpool2(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """2x2 max pool with argmax indices (first max in row-major block order)."""
    b, h, w, c = x.shape
    blocks = (
        x.reshape(b, h // 2, 2, w // 2, 2, c)
        .transpose(0, 1, 3, 2, 4, 5)
        .reshape(b, h // 2, w // 2, 4, c)
    )
    idx = blocks.argmax(axis=3)
    out = np.take_along_axis(blocks, idx[:, :, :, None, :], axis=3)[:, :, :, 0, :]
    return out, idx


def _maxpool2_backward(grad_out: np.ndarray, idx: np.ndarray, in_shape) -> np.ndarray:
    b, h, w, c = in_shape
    gb = np.zeros((b, h // 2, w // 2, 4, c))
    np.put_along_axis(gb, idx[:, :, :, None, :], grad_out[:, :, :, None, :], axis=3)
    return (
        gb.reshape(b, h // 2, w // 2, 2, 2, c)
        .transpose(0, 1, 3, 2, 4, 5)
        .reshape(b, h, w, c)
    )


class ReferenceCNN(ModelAdapter):
    """Deterministic desk-scale CNN: 32x32x3 -> conv8 -> pool -> conv16 -> GAP -> 10.

    Weights are drawn from SplitMix64 as uniform(-0.1, 0.1) in a fixed order
    (conv1 kernels, conv2 kernels, dense weights, each row-major); biases are
    the constant +0.05 so ReLUs start mostly active.  The second convolution's
    ReLU output is the "last convolution layer" (16 x 16 x 16).  A hand-written
    backward pass provides input gradients of the cross-entropy loss.
    """

    INPUT_DIMS = (32, 32, 3)
    NUM_CLASSES = 10
    LAYER_NAME = "conv2_relu"

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & _U64
        n1 = 8 * 3 * 3 * 3
        n2 = 16 * 3 * 3 * 8
        nd = 10 * 16
        draws = _splitmix64_uniform(self.seed, n1 + n2 + nd) * 0.2 - 0.1
        self.k1 = draws[:n1].reshape(8, 3, 3, 3)
        self.k2 = draws[n1 : n1 + n2].reshape(16, 3, 3, 8)
        self.dense_w = draws[n1 + n2 :].reshape(10, 16)
        self.b1 = np.full(8, 0.05)
        self.b2 = np.full(16, 0.05)
        self.dense_b = np.full(10, 0.05)
        self._caps = AdapterCapabilities(
            has_gradients=True,
            max_batch=256,
            input_dims=self.INPUT_DIMS,
            num_classes=self.NUM_CLASSES,
        )

    @property
    def capabilities(self) -> AdapterCapabilities:
        return self._caps

    def _forward(self, x: np.ndarray) -> dict:
        z1 = _conv3x3(x, self.k1) + self.b1
        a1 = np.maximum(z1, 0.0)
        pooled, pool_idx = _maxpool2(a1)
        z2 = _conv3x3(pooled, self.k2) + self.b2
        a2 = np.maximum(z2, 0.0)
        gap = a2.mean(axis=(1, 2))
        logits = gap @ self.dense_w.T + self.dense_b
        probs = softmax(logits)
        return {
            "x": x,
            "z1": z1,
            "pooled": pooled,
            "pool_idx": pool_idx,
            "z2": z2,
            "a2": a2,
            "probs": probs,
        }

    def predict(self, images) -> list[PredictionVector]:
        images = [self._check_image(im) for im in images]
        if len(images) > self._caps.max_batch:
            raise InvalidArgumentError(
                f"batch of {len(images)} exceeds max_batch {self._caps.max_batch}"
            )
        if not images:
            return []
        probs = self._forward(np.stack(images))["probs"]
        return [PredictionVector(row) for row in probs]

    def feature_maps(self, image: np.ndarray) -> FeatureMaps:
        image = self._check_image(image)
        cache = self._forward(image[None])
        return FeatureMaps(cache["a2"][0], layer_name=self.LAYER_NAME)

    def input_gradient(self, image: np.ndarray, target_class: int) -> np.ndarray:
        image = self._check_image(image)
        if not 0 <= target_class < self.NUM_CLASSES:
            raise InvalidArgumentError(f"target_class {target_class} out of range")
        cache = self._forward(image[None])
        d_logits = cache["probs"].copy()
        d_logits[0, target_class] -= 1.0
        d_gap = d_logits @ self.dense_w
        _, n, n2, _ = cache["a2"].shape
        d_a2 = np.broadcast_to(d_gap[:, None, None, :] / (n * n2), cache["a2"].shape)
        d_z2 = d_a2 * (cache["z2"] > 0)
        d_pooled = _conv3x3_input_grad(d_z2, self.k2, in_channels=8)
        d_a1 = _maxpool2_backward(d_pooled, cache["pool_idx"], (1, 32, 32, 8))
        d_z1 = d_a1 * (cache["z1"] > 0)
        d_x = _conv3x3_input_grad(d_z1, self.k1, in_channels=3)
        return d_x[0]

    def min_preactivation_magnitude(self, image: np.ndarray) -> float:
        """Smallest |pre-activation| in the network; near-zero means a ReLU kink."""
        cache = self._forward(self._check_image(image)[None])
        return float(min(np.abs(cache["z1"]).min(), np.abs(cache["z2"]).min()))

    def score_lipschitz_bound(self) -> float:
        """Upper bound K such that a single-pixel change of delta moves every
        class score by at most K * delta (product of per-layer max row sums;
        ReLU/pool/GAP are 1-Lipschitz, softmax is 1/2-Lipschitz)."""
        l1 = np.abs(self.k1).sum(axis=(1, 2, 3)).max()
        l2 = np.abs(self.k2).sum(axis=(1, 2, 3)).max()
        ld = np.abs(self.dense_w).sum(axis=1).max()
        return float(0.5 * l1 * l2 * ld)


def build_reference_cnn(seed: int = 0) -> ReferenceCNN:
    return ReferenceCNN(seed)


# ---------------------------------------------------------------------------
# File-backed adapter
# ---------------------------------------------------------------------------


class FileAdapter(ModelAdapter):
    """Resolves predict/feature_maps by content-hash lookup into tensor files.

    The manifest is a JSON object mapping hex image hashes to
    ``{"prediction": path, "feature_maps": path}`` (paths relative to the
    manifest).  An optional ``_meta`` entry may carry ``input_dims`` and
    ``num_classes``; otherwise they are inferred from the first record.
    Gradients are never available.
    """

    def __init__(self, manifest_path: str | Path):
        self.manifest_path = Path(manifest_path)
        try:
            doc = json.loads(self.manifest_path.read_text())
        except FileNotFoundError:
            raise ManifestError(f"manifest not found: {self.manifest_path}")
        except json.JSONDecodeError as exc:
            raise ManifestError(f"malformed manifest {self.manifest_path}: {exc}")
        if not isinstance(doc, dict):
            raise ManifestError("manifest root must be a JSON object")

        meta = doc.get("_meta", {})
        self._records: dict[str, dict] = {}
        for key, value in doc.items():
            if key.startswith("_"):
                continue
            if not isinstance(value, dict) or "prediction" not in value:
                raise ManifestError(f"manifest entry {key!r} must map to a record object")
            self._records[key] = value

        input_dims = meta.get("input_dims")
        num_classes = meta.get("num_classes")
        if num_classes is None:
            if self._records:
                first = next(iter(self._records.values()))
                num_classes = read_tensor_file(self._resolve(first["prediction"])).size
            else:
                num_classes = 1
        self._caps = AdapterCapabilities(
            has_gradients=False,
            max_batch=int(meta.get("max_batch", 64)),
            input_dims=tuple(input_dims) if input_dims else None,
            num_classes=int(num_classes),
        )
        self._layer_name = str(meta.get("layer_name", "stored"))

    @property
    def capabilities(self) -> AdapterCapabilities:
        return self._caps

    def _resolve(self, rel: str) -> Path:
        p = Path(rel)
        return p if p.is_absolute() else self.manifest_path.parent / p

    def _lookup(self, image: np.ndarray, kind: str) -> np.ndarray:
        h = image_hash(image)
        record = self._records.get(h)
        if record is None or kind not in record:
            raise RecordNotFoundError(h, kind)
        try:
            return read_tensor_file(self._resolve(record[kind]))
        except OSError as exc:
            raise AdapterError(f"failed reading stored {kind} for hash {h}: {exc}")

    def predict(self, images) -> list[PredictionVector]:
        images = [self._check_image(im) for im in images]
        if len(images) > self._caps.max_batch:
            raise InvalidArgumentError(
                f"batch of {len(images)} exceeds max_batch {self._caps.max_batch}"
            )
        return [PredictionVector(self._lookup(im, "prediction")) for im in images]

    def feature_maps(self, image: np.ndarray) -> FeatureMaps:
        image = self._check_image(image)
        return FeatureMaps(self._lookup(image, "feature_maps"), layer_name=self._layer_name)


def build_file_adapter(manifest_path: str | Path) -> FileAdapter:
    return FileAdapter(manifest_path)
