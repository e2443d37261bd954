"""Batch command-line front end: explain, eval-causal, eval-fixation, attack,
selftest.  All outputs are files; runs with equal seed and config produce
byte-identical artifact trees.

Exit codes: 0 success, 1 internal failure, 2 usage/input error.
"""

from __future__ import annotations

import functools
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np
from PIL import Image, UnidentifiedImageError

from . import __version__
from .adversarial import (
    DEFAULT_EPSILONS,
    AttackConfig,
    fgsm,
    run_drift_robustness,
    run_fixation_robustness,
)
from .colormap import COLOR_TABLE
from .errors import (
    CapabilityError,
    InvalidArgumentError,
    ManifestError,
    RecordNotFoundError,
    SiduError,
    TensorFormatError,
)
from .metrics import (
    Baseline,
    FixationSet,
    InsertionStart,
    SaliencyComparison,
    auc_fixation,
    deletion_curve,
    fixations_to_heatmap,
    insertion_curve,
    kl_div,
    scc,
)
from .model import ModelAdapter, build_file_adapter, build_reference_cnn
from .numerics import bilinear_resize, minmax_normalize
from .selftest import run_selftest
from .sidu import RiseConfig, SiduConfig, Norm, explain_rise, explain_sidu
from .tensorio import write_tensor_file

# Full-scale numbers from the original large-model experiments, emitted as
# report footers for context; desk-scale runs are not expected to match them.
_FULL_SCALE_CAUSAL_FOOTER = (
    "# full-scale reference (ResNet-50, ImageNet, 2000 images): "
    "sidu insertion 0.65801, deletion 0.13424"
)
_FULL_SCALE_FIXATION_FOOTER = (
    "# full-scale reference (ResNet-50, ImageNet eye-tracking set): "
    "sidu mean KL 4.3027, SCC 0.3314, AUC 0.7708"
)


@dataclass
class RunConfig:
    model_type: str = "builtin"  # "builtin" | "file"
    model_seed: int = 0
    manifest: str | None = None
    method: str = "sidu"  # "sidu" | "rise"
    sidu: SiduConfig = field(default_factory=SiduConfig)
    rise: RiseConfig = field(default_factory=RiseConfig)
    steps: int = 100
    baseline: Baseline = Baseline.CHANNEL_MEAN
    start: InsertionStart = InsertionStart.BLUR
    reg: float = 1e-7
    fixation_sigma_px: float | None = None  # default: 24 px scaled from 224
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS
    drift_epsilon: float = 0.1
    positive_quantile: float = 0.9
    clip_min: float = 0.0
    clip_max: float = 1.0
    dataset: str | None = None
    output: str = "out"

    @classmethod
    def load(cls, config_path: str | None) -> "RunConfig":
        cfg = cls()
        if config_path is None:
            return cfg
        try:
            doc = json.loads(Path(config_path).read_text())
        except FileNotFoundError:
            raise InvalidArgumentError(f"config file not found: {config_path}")
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"malformed config {config_path}: {exc}")
        model = doc.get("model", {})
        cfg.model_type = model.get("type", cfg.model_type)
        cfg.model_seed = int(model.get("seed", cfg.model_seed))
        cfg.manifest = model.get("manifest", cfg.manifest)
        cfg.method = doc.get("method", cfg.method)
        if "sidu" in doc:
            s = doc["sidu"]
            cfg.sidu = SiduConfig(
                tau=float(s.get("tau", 0.5)),
                sigma=float(s.get("sigma", 0.25)),
                norm=Norm(s.get("norm", "l2")),
            )
        if "rise" in doc:
            r = doc["rise"]
            cfg.rise = RiseConfig(
                num_masks=int(r.get("num_masks", 2000)),
                grid=int(r.get("grid", 7)),
                keep_prob=float(r.get("keep_prob", 0.5)),
                seed=int(r.get("seed", 0)),
            )
        m = doc.get("metrics", {})
        cfg.steps = int(m.get("steps", cfg.steps))
        cfg.baseline = Baseline(m.get("baseline", cfg.baseline.value))
        cfg.start = InsertionStart(m.get("start", cfg.start.value))
        cfg.reg = float(m.get("reg", cfg.reg))
        if "fixation_sigma_px" in m and m["fixation_sigma_px"] is not None:
            cfg.fixation_sigma_px = float(m["fixation_sigma_px"])
        a = doc.get("attack", {})
        cfg.epsilons = tuple(float(e) for e in a.get("epsilons", cfg.epsilons))
        cfg.drift_epsilon = float(a.get("drift_epsilon", cfg.drift_epsilon))
        cfg.positive_quantile = float(a.get("positive_quantile", cfg.positive_quantile))
        cfg.clip_min = float(a.get("clip_min", cfg.clip_min))
        cfg.clip_max = float(a.get("clip_max", cfg.clip_max))
        cfg.dataset = doc.get("dataset", cfg.dataset)
        cfg.output = doc.get("output", cfg.output)
        return cfg

    def build_adapter(self) -> ModelAdapter:
        if self.model_type == "builtin":
            return build_reference_cnn(self.model_seed)
        if self.model_type == "file":
            if not self.manifest:
                raise InvalidArgumentError("file model requires a manifest path")
            return build_file_adapter(self.manifest)
        raise InvalidArgumentError(f"unknown model type {self.model_type!r}")

    def methods(self) -> dict:
        return {
            "sidu": lambda adapter, image: explain_sidu(adapter, image, self.sidu),
            "rise": lambda adapter, image: explain_rise(adapter, image, self.rise),
        }

    def selected_methods(self) -> dict:
        all_methods = self.methods()
        if self.method not in all_methods:
            raise InvalidArgumentError(f"unknown method {self.method!r}")
        return {self.method: all_methods[self.method]}

    def fixation_sigma(self, height: int) -> float:
        if self.fixation_sigma_px is not None:
            return self.fixation_sigma_px
        return 24.0 * height / 224.0


def load_image(path: str | Path, input_dims) -> np.ndarray:
    """Decode an 8-bit RGB PNG, resize to the adapter's input dims, scale to [0, 1]."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            if img.format != "PNG":
                raise InvalidArgumentError(f"{path}: only PNG images are accepted, got {img.format}")
            if img.mode != "RGB":
                raise InvalidArgumentError(f"{path}: only 8-bit RGB PNGs are accepted, got mode {img.mode}")
            arr = np.asarray(img, dtype=np.float64) / 255.0
    except UnidentifiedImageError:
        raise InvalidArgumentError(f"{path}: not a decodable image")
    if input_dims is not None:
        h, w, c = input_dims
        if c != 3:
            raise InvalidArgumentError(f"adapter expects {c} channels; PNG ingestion is RGB only")
        if arr.shape[:2] != (h, w):
            arr = np.stack([bilinear_resize(arr[:, :, k], h, w) for k in range(3)], axis=2)
    return arr


def write_overlay_png(image01: np.ndarray, heatmap: np.ndarray, path: str | Path) -> None:
    """Min-max normalize the heatmap, map through the fixed color table and
    alpha-blend 0.5 over the image."""
    hm = minmax_normalize(heatmap)
    idx = np.clip(np.round(hm * 255.0).astype(np.intp), 0, 255)
    table = np.asarray(COLOR_TABLE, dtype=np.float64)
    color = table[idx]
    base = np.clip(image01 * 255.0, 0.0, 255.0)
    out = np.clip(np.round(0.5 * base + 0.5 * color), 0, 255).astype(np.uint8)
    Image.fromarray(out).save(path, format="PNG")


def save_image_png(image01: np.ndarray, path: str | Path) -> None:
    arr = np.clip(np.round(image01 * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr).save(path, format="PNG")


def _dataset_images(cfg: RunConfig) -> list[Path]:
    if not cfg.dataset:
        raise InvalidArgumentError("no dataset directory configured")
    root = Path(cfg.dataset)
    if not root.is_dir():
        raise InvalidArgumentError(f"dataset directory not found: {root}")
    paths = sorted(root.glob("*.png"))
    if not paths:
        raise InvalidArgumentError(f"dataset directory {root} contains no PNG images")
    return paths


def _fixations_for(image_path: Path) -> FixationSet:
    fx_path = image_path.with_suffix(".fixations.json")
    if not fx_path.exists():
        raise InvalidArgumentError(f"missing fixation file for {image_path.name}: {fx_path}")
    return FixationSet.from_file(fx_path)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (
            InvalidArgumentError,
            ManifestError,
            TensorFormatError,
            CapabilityError,
            RecordNotFoundError,
            FileNotFoundError,
        ) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except SiduError as exc:
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _common_options(fn):
    fn = click.option("--config", "config_path", type=str, default=None, help="JSON config file.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Override the builtin model and mask seeds.")(fn)
    fn = click.option("--out", type=str, default=None, help="Output directory.")(fn)
    fn = click.option("--method", type=click.Choice(["sidu", "rise"]), default=None)(fn)
    return fn


def _make_config(config_path, seed, out, method, dataset=None, epsilons=()) -> RunConfig:
    cfg = RunConfig.load(config_path)
    if seed is not None:
        cfg.model_seed = seed
        cfg.rise = RiseConfig(
            num_masks=cfg.rise.num_masks,
            grid=cfg.rise.grid,
            keep_prob=cfg.rise.keep_prob,
            seed=seed,
        )
    if out is not None:
        cfg.output = out
    if method is not None:
        cfg.method = method
    if dataset is not None:
        cfg.dataset = dataset
    if epsilons:
        cfg.epsilons = tuple(epsilons)
    return cfg


@click.group()
@click.version_option(version=__version__, prog_name="sidu-xai")
def main():
    """Visual explanations for black-box CNNs and their evaluation stack."""


@main.command("explain")
@click.argument("image_path", type=click.Path(exists=True, dir_okay=False))
@_common_options
@handle_errors
def cmd_explain(image_path, config_path, seed, out, method):
    """Write the raw explanation heatmap and a color overlay for one image."""
    cfg = _make_config(config_path, seed, out, method)
    adapter = cfg.build_adapter()
    image = load_image(image_path, adapter.capabilities.input_dims)
    explain = cfg.selected_methods()[cfg.method]
    em = explain(adapter, image)
    out_dir = Path(cfg.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(image_path).stem
    write_tensor_file(em.heatmap, out_dir / f"{stem}_heatmap.stf")
    write_overlay_png(image, em.heatmap, out_dir / f"{stem}_overlay.png")
    score = adapter.predict([image])[0].scores[em.predicted_class]
    click.echo(f"predicted_class={em.predicted_class} score={score:.6f}")


@main.command("eval-causal")
@click.option("--dataset", type=str, default=None, help="Directory of PNG images.")
@_common_options
@handle_errors
def cmd_eval_causal(dataset, config_path, seed, out, method):
    """Insertion/deletion curves per image plus a summary CSV per method."""
    cfg = _make_config(config_path, seed, out, method, dataset=dataset)
    adapter = cfg.build_adapter()
    paths = _dataset_images(cfg)
    out_dir = Path(cfg.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for name, explain in cfg.selected_methods().items():
        ins_aucs, del_aucs = [], []
        for path in paths:
            image = load_image(path, adapter.capabilities.input_dims)
            em = explain(adapter, image)
            ins = insertion_curve(adapter, image, em, steps=cfg.steps, start=cfg.start)
            dele = deletion_curve(adapter, image, em, steps=cfg.steps, baseline=cfg.baseline)
            ins.to_csv(out_dir / f"{path.stem}_{name}_insertion.csv")
            dele.to_csv(out_dir / f"{path.stem}_{name}_deletion.csv")
            ins_aucs.append(ins.auc)
            del_aucs.append(dele.auc)
        rows.append((name, float(np.mean(ins_aucs)), float(np.mean(del_aucs))))
    lines = ["method,mean_insertion_auc,mean_deletion_auc"]
    lines += [f"{n},{i!r},{d!r}" for n, i, d in rows]
    lines.append(_FULL_SCALE_CAUSAL_FOOTER)
    (out_dir / "causal_summary.csv").write_text("\n".join(lines) + "\n")
    for n, i, d in rows:
        click.echo(f"{n}: mean insertion AUC {i:.5f} (higher better), mean deletion AUC {d:.5f} (lower better)")


@main.command("eval-fixation")
@click.option("--dataset", type=str, default=None, help="Directory of PNGs with <stem>.fixations.json files.")
@_common_options
@handle_errors
def cmd_eval_fixation(dataset, config_path, seed, out, method):
    """Compare explanation heatmaps with human fixation heatmaps (KL/SCC/AUC)."""
    cfg = _make_config(config_path, seed, out, method, dataset=dataset)
    adapter = cfg.build_adapter()
    paths = _dataset_images(cfg)
    out_dir = Path(cfg.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, explain in cfg.selected_methods().items():
        lines = ["image,kl_div,scc,auc"]
        kls, sccs, aucs = [], [], []
        for path in paths:
            image = load_image(path, adapter.capabilities.input_dims)
            fx = _fixations_for(path)
            fm_heat = fixations_to_heatmap(fx, cfg.fixation_sigma(fx.height))
            em = explain(adapter, image).heatmap
            comp = SaliencyComparison(
                auc=auc_fixation(em, fx),
                kl_div=kl_div(fm_heat, em, cfg.reg),
                scc=scc(em, fm_heat),
            )
            kls.append(comp.kl_div)
            sccs.append(comp.scc)
            aucs.append(comp.auc)
            lines.append(f"{path.stem},{comp.kl_div!r},{comp.scc!r},{comp.auc!r}")
        lines.append(
            f"mean,{float(np.mean(kls))!r},{float(np.mean(sccs))!r},{float(np.mean(aucs))!r}"
        )
        lines.append(_FULL_SCALE_FIXATION_FOOTER)
        (out_dir / f"fixation_{name}.csv").write_text("\n".join(lines) + "\n")
        click.echo(
            f"{name}: mean KL {np.mean(kls):.4f}, SCC {np.mean(sccs):.4f}, AUC {np.mean(aucs):.4f}"
        )


@main.command("attack")
@click.option("--dataset", type=str, default=None, help="Directory of PNG images.")
@click.option("--epsilon", "epsilons", type=float, multiple=True, help="Noise level; repeatable.")
@_common_options
@handle_errors
def cmd_attack(dataset, epsilons, config_path, seed, out, method):
    """Write adversarial images and both robustness reports."""
    cfg = _make_config(config_path, seed, out, method, dataset=dataset, epsilons=epsilons)
    adapter = cfg.build_adapter()
    if not adapter.capabilities.has_gradients:
        raise CapabilityError(
            "the configured model cannot supply input gradients (file-backed models "
            "store only predictions and feature maps); attacks need the builtin model"
        )
    paths = _dataset_images(cfg)
    out_dir = Path(cfg.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    images, samples = [], []
    height = adapter.capabilities.input_dims[0]
    for path in paths:
        image = load_image(path, adapter.capabilities.input_dims)
        images.append(image)
        samples.append((image, _fixations_for(path)))
        for eps in cfg.epsilons:
            adv = fgsm(
                adapter,
                image,
                AttackConfig(epsilon=eps, clip_min=cfg.clip_min, clip_max=cfg.clip_max),
            )
            save_image_png(adv, out_dir / f"{path.stem}_eps{eps}.png")
    methods = cfg.selected_methods()
    fix_report = run_fixation_robustness(
        adapter,
        samples,
        methods,
        epsilons=cfg.epsilons,
        fixation_sigma_px=cfg.fixation_sigma(height),
        reg=cfg.reg,
        clip_min=cfg.clip_min,
        clip_max=cfg.clip_max,
    )
    fix_report.to_csv(out_dir / "fixation_robustness.csv")
    fix_report.to_json(out_dir / "fixation_robustness.json")
    drift_report = run_drift_robustness(
        adapter,
        images,
        methods,
        epsilon=cfg.drift_epsilon,
        positive_quantile=cfg.positive_quantile,
        reg=cfg.reg,
        clip_min=cfg.clip_min,
        clip_max=cfg.clip_max,
    )
    drift_report.to_csv(out_dir / "drift_robustness.csv")
    drift_report.to_json(out_dir / "drift_robustness.json")
    click.echo(f"wrote adversarial images and robustness reports to {out_dir}")


@main.command("selftest")
@handle_errors
def cmd_selftest():
    """Run the embedded oracle suite and print a pass/fail table."""
    results = run_selftest()
    width = max(len(name) for name, _, _ in results)
    failures = 0
    for name, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        line = f"{name:<{width}}  {status}"
        if detail:
            line += f"  {detail}"
        click.echo(line)
        failures += 0 if passed else 1
    click.echo(f"{len(results) - failures}/{len(results)} oracles passed")
    if failures:
        sys.exit(1)


if __name__ == "__main__":
    main()
