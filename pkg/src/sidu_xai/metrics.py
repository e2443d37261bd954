"""Evaluation mathematics: causal insertion/deletion curves, fixation-map
construction, and the three saliency-vs-fixation comparison metrics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from .errors import InvalidArgumentError, UndefinedCorrelationError
from .model import ModelAdapter, predict_batched
from .numerics import gaussian_blur, minmax_normalize

__all__ = [
    "CurveMode",
    "Baseline",
    "InsertionStart",
    "CausalCurve",
    "FixationSet",
    "SaliencyComparison",
    "curve_auc",
    "deletion_curve",
    "insertion_curve",
    "deletion_probe",
    "insertion_probe",
    "fixations_to_heatmap",
    "auc_fixation",
    "auc_positive_mask",
    "kl_div",
    "scc",
]

# Guard inside the KL log; deliberately far below the normalization
# regularizer so that identical maps score ~0 instead of -X*reg.
_KL_LOG_GUARD = 1e-300


class CurveMode(str, Enum):
    INSERTION = "insertion"
    DELETION = "deletion"


class Baseline(str, Enum):
    ZERO = "zero"
    CHANNEL_MEAN = "channel_mean"


class InsertionStart(str, Enum):
    BLUR = "blur"
    ZERO = "zero"


@dataclass
class CausalCurve:
    points: list[tuple[float, float]]  # (fraction of pixels, class probability)
    auc: float
    mode: CurveMode

    def to_csv(self, path: str | Path) -> None:
        lines = ["fraction,probability"]
        lines += [f"{f!r},{p!r}" for f, p in self.points]
        lines.append(f"# auc={self.auc!r}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path, mode: CurveMode = CurveMode.DELETION) -> "CausalCurve":
        lines = Path(path).read_text().strip().splitlines()
        if not lines or lines[0] != "fraction,probability":
            raise InvalidArgumentError(f"bad curve CSV header in {path}")
        points = []
        auc = None
        for line in lines[1:]:
            if line.startswith("# auc="):
                auc = float(line[len("# auc=") :])
            else:
                f, p = line.split(",")
                points.append((float(f), float(p)))
        if auc is None:
            auc = curve_auc(points)
        return cls(points=points, auc=auc, mode=mode)


@dataclass
class FixationSet:
    """Recorded eye fixations for one image: (subject, x, y) triples."""

    width: int
    height: int
    points: list[tuple[str, int, int]]
    image: str = ""

    def __post_init__(self):
        for subject, x, y in self.points:
            if not (0 <= x < self.width and 0 <= y < self.height):
                raise InvalidArgumentError(
                    f"fixation ({x}, {y}) by {subject!r} outside {self.width}x{self.height}"
                )

    def pixel_mask(self) -> np.ndarray:
        """Boolean (H, W) mask of fixated pixels (multiple hits collapse)."""
        mask = np.zeros((self.height, self.width), dtype=bool)
        for _, x, y in self.points:
            mask[y, x] = True
        return mask

    @classmethod
    def from_json(cls, doc: dict) -> "FixationSet":
        return cls(
            width=int(doc["width"]),
            height=int(doc["height"]),
            points=[(str(f["subject"]), int(f["x"]), int(f["y"])) for f in doc["fixations"]],
            image=str(doc.get("image", "")),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "FixationSet":
        return cls.from_json(json.loads(Path(path).read_text()))

    def to_json(self) -> dict:
        return {
            "image": self.image,
            "width": self.width,
            "height": self.height,
            "fixations": [
                {"subject": s, "x": x, "y": y} for s, x, y in self.points
            ],
        }


@dataclass
class SaliencyComparison:
    auc: float
    kl_div: float
    scc: float


def curve_auc(points) -> float:
    """Trapezoidal area under (fraction, probability) points."""
    fractions = np.array([f for f, _ in points], dtype=np.float64)
    probs = np.array([p for _, p in points], dtype=np.float64)
    if len(points) < 2 or np.any(np.diff(fractions) <= 0):
        raise InvalidArgumentError("fractions must be strictly increasing")
    return float(np.trapezoid(probs, fractions))


def _heatmap_array(heatmap) -> np.ndarray:
    arr = getattr(heatmap, "heatmap", heatmap)
    return np.asarray(arr, dtype=np.float64)


def _pixel_order(heatmap: np.ndarray) -> np.ndarray:
    """Flat pixel indices by descending saliency; ties resolve row-major."""
    return np.argsort(-heatmap.ravel(), kind="stable")


def _step_counts(total: int, steps: int) -> list[int]:
    per_step = math.ceil(total / steps)
    return [min(k * per_step, total) for k in range(steps + 1)]


def deletion_probe(image: np.ndarray, order: np.ndarray, count: int, baseline_value: np.ndarray) -> np.ndarray:
    """Image with the top ``count`` ranked pixels replaced by the baseline value."""
    flat = image.reshape(-1, image.shape[2]).copy()
    flat[order[:count]] = baseline_value
    return flat.reshape(image.shape)


def insertion_probe(image: np.ndarray, order: np.ndarray, count: int, start_image: np.ndarray) -> np.ndarray:
    """Start image with the top ``count`` ranked pixels restored to the original."""
    flat = start_image.reshape(-1, image.shape[2]).copy()
    flat[order[:count]] = image.reshape(-1, image.shape[2])[order[:count]]
    return flat.reshape(image.shape)


def _run_curve(adapter, image, probes, fractions, mode) -> CausalCurve:
    clean_pred = adapter.predict([image])[0]
    c = clean_pred.argmax
    preds = predict_batched(adapter, probes)
    points = [(f, float(p.scores[c])) for f, p in zip(fractions, preds)]
    return CausalCurve(points=points, auc=curve_auc(points), mode=mode)


def deletion_curve(
    adapter: ModelAdapter,
    image: np.ndarray,
    heatmap,
    steps: int = 100,
    baseline: Baseline = Baseline.CHANNEL_MEAN,
) -> CausalCurve:
    """Track the predicted-class probability as top-saliency pixels are removed."""
    if steps < 2:
        raise InvalidArgumentError("steps must be >= 2")
    image = np.asarray(image, dtype=np.float64)
    hm = _heatmap_array(heatmap)
    if hm.shape != image.shape[:2]:
        raise InvalidArgumentError("heatmap dims must match image spatial dims")
    if Baseline(baseline) is Baseline.ZERO:
        baseline_value = np.zeros(image.shape[2])
    else:
        baseline_value = image.mean(axis=(0, 1))
    order = _pixel_order(hm)
    counts = _step_counts(hm.size, steps)
    probes = [deletion_probe(image, order, cnt, baseline_value) for cnt in counts]
    fractions = [k / steps for k in range(steps + 1)]
    return _run_curve(adapter, image, probes, fractions, CurveMode.DELETION)


def insertion_curve(
    adapter: ModelAdapter,
    image: np.ndarray,
    heatmap,
    steps: int = 100,
    start: InsertionStart = InsertionStart.BLUR,
    blur_sigma_px: float = 10.0,
) -> CausalCurve:
    """Track the predicted-class probability as top-saliency pixels are restored."""
    if steps < 2:
        raise InvalidArgumentError("steps must be >= 2")
    image = np.asarray(image, dtype=np.float64)
    hm = _heatmap_array(heatmap)
    if hm.shape != image.shape[:2]:
        raise InvalidArgumentError("heatmap dims must match image spatial dims")
    if InsertionStart(start) is InsertionStart.ZERO:
        start_image = np.zeros_like(image)
    else:
        start_image = np.stack(
            [gaussian_blur(image[:, :, k], blur_sigma_px) for k in range(image.shape[2])],
            axis=2,
        )
    order = _pixel_order(hm)
    counts = _step_counts(hm.size, steps)
    probes = [insertion_probe(image, order, cnt, start_image) for cnt in counts]
    fractions = [k / steps for k in range(steps + 1)]
    return _run_curve(adapter, image, probes, fractions, CurveMode.INSERTION)


def fixations_to_heatmap(fx: FixationSet, sigma_px: float) -> np.ndarray:
    """Gaussian-blurred sum of unit impulses at fixation points, scaled to [0, 1]."""
    if not fx.points:
        raise InvalidArgumentError("fixation set is empty")
    impulses = np.zeros((fx.height, fx.width))
    for _, x, y in fx.points:
        impulses[y, x] += 1.0
    return minmax_normalize(gaussian_blur(impulses, sigma_px))


def auc_positive_mask(saliency: np.ndarray, positives: np.ndarray) -> float:
    """ROC AUC of a saliency map against a boolean positive-pixel mask.

    Thresholds sweep the distinct saliency values; a pixel counts as
    predicted-positive when its saliency is strictly above the threshold.
    """
    saliency = np.asarray(saliency, dtype=np.float64)
    positives = np.asarray(positives, dtype=bool)
    if saliency.shape != positives.shape:
        raise InvalidArgumentError("saliency and positive-mask dims must match")
    n_pos = int(positives.sum())
    n_neg = positives.size - n_pos
    if n_pos == 0:
        raise InvalidArgumentError("no positive pixels")
    if n_neg == 0:
        raise InvalidArgumentError("all pixels are positive; ROC needs negatives")
    pos_vals = saliency[positives]
    neg_vals = saliency[~positives]
    points = [(0.0, 0.0), (1.0, 1.0)]
    for t in np.unique(saliency):
        tpr = float(np.count_nonzero(pos_vals > t)) / n_pos
        fpr = float(np.count_nonzero(neg_vals > t)) / n_neg
        points.append((fpr, tpr))
    points.sort()
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    return float(np.trapezoid(ys, xs))


def auc_fixation(em: np.ndarray, fx: FixationSet) -> float:
    """ROC AUC of a saliency map treated as a classifier of fixated pixels."""
    em = np.asarray(em, dtype=np.float64)
    if em.shape != (fx.height, fx.width):
        raise InvalidArgumentError(
            f"saliency dims {em.shape} do not match fixation dims "
            f"({fx.height}, {fx.width})"
        )
    return auc_positive_mask(em, fx.pixel_mask())


def kl_div(fm: np.ndarray, em: np.ndarray, reg: float = 1e-7) -> float:
    """KL divergence of the explanation map from the fixation map (reference).

    Both maps are normalized by (sum + reg).  The log denominator carries a
    tiny fixed guard rather than reg itself, so identical maps score ~0.
    Terms with FM(x) = 0 contribute nothing.
    """
    fm = np.asarray(fm, dtype=np.float64)
    em = np.asarray(em, dtype=np.float64)
    if fm.shape != em.shape:
        raise InvalidArgumentError("maps must have identical dims")
    if fm.min() < 0 or em.min() < 0:
        raise InvalidArgumentError("maps must be nonnegative")
    if not reg > 0:
        raise InvalidArgumentError("reg must be positive")
    fm_n = fm / (fm.sum() + reg)
    em_n = em / (em.sum() + reg)
    support = fm_n > 0
    terms = fm_n[support] * np.log(fm_n[support] / (em_n[support] + _KL_LOG_GUARD))
    return float(terms.sum())


def scc(em: np.ndarray, fm: np.ndarray) -> float:
    """Spearman correlation: average-rank transform, then Pearson on the ranks."""
    em = np.asarray(em, dtype=np.float64).ravel()
    fm = np.asarray(fm, dtype=np.float64).ravel()
    if em.shape != fm.shape:
        raise InvalidArgumentError("maps must have identical dims")
    if em.size < 2:
        raise InvalidArgumentError("need at least 2 pixels")
    if np.all(em == em[0]) or np.all(fm == fm[0]):
        raise UndefinedCorrelationError("correlation undefined for a constant map")
    re = rankdata(em)
    rf = rankdata(fm)
    if np.array_equal(re, rf):
        return 1.0  # contract: scc(x, x) = 1 exactly
    re = re - re.mean()
    rf = rf - rf.mean()
    return float((re @ rf) / math.sqrt((re @ re) * (rf @ rf)))
