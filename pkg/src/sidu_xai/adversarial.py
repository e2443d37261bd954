"""FGSM attack and the two robustness experiment drivers.

The first experiment compares explanations of attacked images against human
fixation heatmaps; the second measures how far explanations of attacked
images drift from the explanations of the clean images.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import CapabilityError, InvalidArgumentError
from .metrics import (
    FixationSet,
    auc_fixation,
    auc_positive_mask,
    fixations_to_heatmap,
    kl_div,
    scc,
)
from .model import ModelAdapter
from .sidu import ExplanationMap

__all__ = [
    "AttackConfig",
    "RobustnessRecord",
    "RobustnessReport",
    "fgsm",
    "run_fixation_robustness",
    "run_drift_robustness",
    "DEFAULT_EPSILONS",
]

# Noise levels used by the adversarial experiments.
DEFAULT_EPSILONS = (0.007, 0.05, 0.1)

ExplainFn = Callable[[ModelAdapter, np.ndarray], ExplanationMap]


@dataclass(frozen=True)
class AttackConfig:
    epsilon: float
    target_class: int | None = None  # default: predicted class on the clean image
    clip_min: float = 0.0
    clip_max: float = 1.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise InvalidArgumentError("epsilon must be >= 0")
        if not self.clip_min < self.clip_max:
            raise InvalidArgumentError("clip_min must be below clip_max")


def fgsm(adapter: ModelAdapter, image: np.ndarray, cfg: AttackConfig) -> np.ndarray:
    """Single-step attack: image + epsilon * sign(input gradient), clipped.

    Untargeted by default: the loss is cross-entropy against the clean
    image's predicted class, so the step raises the loss of the current
    decision.  sign(0) = 0 leaves a pixel unchanged.
    """
    if not adapter.capabilities.has_gradients:
        raise CapabilityError("FGSM needs an adapter with input gradients")
    image = np.asarray(image, dtype=np.float64)
    target = cfg.target_class
    if target is None:
        target = adapter.predict([image])[0].argmax
    grad = adapter.input_gradient(image, target)
    adv = image + cfg.epsilon * np.sign(grad)
    return np.clip(adv, cfg.clip_min, cfg.clip_max)


@dataclass
class RobustnessRecord:
    method: str
    epsilon: float
    mean_kl: float
    mean_scc: float
    mean_auc: float


@dataclass
class RobustnessReport:
    records: list[RobustnessRecord]
    reference: str  # "fixation_maps" | "clean_explanations"

    def to_csv(self, path: str | Path) -> None:
        lines = ["method,epsilon,mean_kl,mean_scc,mean_auc"]
        for r in self.records:
            lines.append(
                f"{r.method},{r.epsilon!r},{r.mean_kl!r},{r.mean_scc!r},{r.mean_auc!r}"
            )
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path, reference: str = "") -> "RobustnessReport":
        lines = Path(path).read_text().strip().splitlines()
        if not lines or lines[0] != "method,epsilon,mean_kl,mean_scc,mean_auc":
            raise InvalidArgumentError(f"bad report CSV header in {path}")
        records = []
        for line in lines[1:]:
            method, eps, kl, s, a = line.split(",")
            records.append(
                RobustnessRecord(method, float(eps), float(kl), float(s), float(a))
            )
        return cls(records=records, reference=reference)

    def to_json(self, path: str | Path) -> None:
        doc = {
            "reference": self.reference,
            "records": [
                {
                    "method": r.method,
                    "epsilon": r.epsilon,
                    "mean_kl": r.mean_kl,
                    "mean_scc": r.mean_scc,
                    "mean_auc": r.mean_auc,
                }
                for r in self.records
            ],
        }
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def run_fixation_robustness(
    adapter: ModelAdapter,
    samples: list[tuple[np.ndarray, FixationSet]],
    methods: dict[str, ExplainFn],
    epsilons=DEFAULT_EPSILONS,
    fixation_sigma_px: float = 24.0,
    reg: float = 1e-7,
    clip_min: float = 0.0,
    clip_max: float = 1.0,
) -> RobustnessReport:
    """Score explanations of attacked images against human fixation heatmaps.

    One record per (method, epsilon): mean KL, SCC and AUC over all samples.
    """
    if not samples:
        raise InvalidArgumentError("no samples supplied")
    fixation_maps = [fixations_to_heatmap(fx, fixation_sigma_px) for _, fx in samples]
    records = []
    for eps in epsilons:
        cfg = AttackConfig(epsilon=eps, clip_min=clip_min, clip_max=clip_max)
        attacked = [fgsm(adapter, image, cfg) for image, _ in samples]
        for name, explain in methods.items():
            kls, sccs, aucs = [], [], []
            for adv, (_, fx), fm_heat in zip(attacked, samples, fixation_maps):
                em = explain(adapter, adv).heatmap
                kls.append(kl_div(fm_heat, em, reg))
                sccs.append(scc(em, fm_heat))
                aucs.append(auc_fixation(em, fx))
            records.append(
                RobustnessRecord(
                    method=name,
                    epsilon=eps,
                    mean_kl=float(np.mean(kls)),
                    mean_scc=float(np.mean(sccs)),
                    mean_auc=float(np.mean(aucs)),
                )
            )
    return RobustnessReport(records=records, reference="fixation_maps")


def run_drift_robustness(
    adapter: ModelAdapter,
    images: list[np.ndarray],
    methods: dict[str, ExplainFn],
    epsilon: float = 0.1,
    positive_quantile: float = 0.9,
    reg: float = 1e-7,
    clip_min: float = 0.0,
    clip_max: float = 1.0,
) -> RobustnessReport:
    """Compare each method's explanation of the attacked image with its clean one.

    The clean explanation is the KL reference; for AUC it is reduced to a
    positive-pixel set by top-quantile thresholding (scale-invariant), the
    same reduction for every method.
    """
    if not images:
        raise InvalidArgumentError("no images supplied")
    cfg = AttackConfig(epsilon=epsilon, clip_min=clip_min, clip_max=clip_max)
    records = []
    for name, explain in methods.items():
        kls, sccs, aucs = [], [], []
        for image in images:
            clean = explain(adapter, image).heatmap
            adv = explain(adapter, fgsm(adapter, image, cfg)).heatmap
            kls.append(kl_div(clean, adv, reg))
            sccs.append(scc(adv, clean))
            positives = clean >= np.quantile(clean, positive_quantile)
            aucs.append(auc_positive_mask(adv, positives))
        records.append(
            RobustnessRecord(
                method=name,
                epsilon=epsilon,
                mean_kl=float(np.mean(kls)),
                mean_scc=float(np.mean(sccs)),
                mean_auc=float(np.mean(aucs)),
            )
        )
    return RobustnessReport(records=records, reference="clean_explanations")
