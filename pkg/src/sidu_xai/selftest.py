"""Embedded oracle suite: independent recomputations of every derived value
the implementation is expected to reproduce.

Each check recomputes its expected result from first principles (brute-force
loops, finite differences, enumeration) and compares the live implementation
against it.  The CLI's ``selftest`` command runs the whole registry.
"""

from __future__ import annotations

import math

import numpy as np

from . import adversarial, metrics, numerics, sidu
from .model import PredictionVector, build_reference_cnn
from .planted import PlantedQuadrantAdapter

__all__ = ["ORACLES", "run_selftest", "straight_line_sidu"]


def straight_line_sidu(adapter, image, tau: float = 0.5, sigma: float = 0.25) -> np.ndarray:
    """Unbatched, loop-based reimplementation of the whole explanation pipeline.

    Kept deliberately naive (per-mask predicts, explicit distance loops) so it
    can serve as an independent oracle for the production path.
    """
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape[:2]
    fmaps = adapter.feature_maps(image).maps
    n_masks = fmaps.shape[2]

    upsampled = []
    for i in range(n_masks):
        m = fmaps[:, :, i]
        lo, hi = m.min(), m.max()
        norm = np.zeros_like(m) if hi == lo else (m - lo) / (hi - lo)
        upsampled.append(numerics.bilinear_resize((norm > tau).astype(float), h, w))

    p_org = adapter.predict([image])[0].scores
    preds = []
    for m in upsampled:
        masked = image * m[:, :, None]
        preds.append(adapter.predict([masked])[0].scores)

    def dist(a, b):
        return math.sqrt(sum((float(x) - float(y)) ** 2 for x, y in zip(a, b)))

    heat = np.zeros((h, w))
    for i in range(n_masks):
        sd = math.exp(-dist(p_org, preds[i]) / (2.0 * sigma * sigma))
        u = sum(dist(preds[i], preds[j]) for j in range(n_masks))
        heat += sd * u * upsampled[i]
    return heat / n_masks


def _bright_quadrant_image(rng, side=32, channels=3) -> np.ndarray:
    """Image bright only in the top-left quadrant, with faint noise elsewhere."""
    img = rng.uniform(0.0, 0.05, size=(side, side, channels))
    half = side // 2
    img[:half, :half, :] = rng.uniform(0.7, 1.0, size=(half, half, channels))
    return img


# ---------------------------------------------------------------------------
# oracle checks (each raises AssertionError on failure)
# ---------------------------------------------------------------------------


def check_bilinear_against_bruteforce():
    src = np.array([[0.0, 1.0], [1.0, 0.0]])
    out = numerics.bilinear_resize(src, 4, 4)
    for oy in range(4):
        for ox in range(4):
            sy = min(max((oy + 0.5) * 2 / 4 - 0.5, 0.0), 1.0)
            sx = min(max((ox + 0.5) * 2 / 4 - 0.5, 0.0), 1.0)
            y0, x0 = int(math.floor(sy)), int(math.floor(sx))
            y1, x1 = min(y0 + 1, 1), min(x0 + 1, 1)
            wy, wx = sy - y0, sx - x0
            expected = (
                src[y0, x0] * (1 - wy) * (1 - wx)
                + src[y0, x1] * (1 - wy) * wx
                + src[y1, x0] * wy * (1 - wx)
                + src[y1, x1] * wy * wx
            )
            assert abs(out[oy, ox] - expected) <= 1e-12, (oy, ox, out[oy, ox], expected)


def check_gaussian_impulse_profile():
    sigma = 2.0
    img = np.zeros((41, 41))
    img[20, 20] = 1.0
    out = numerics.gaussian_blur(img, sigma)
    direct = np.zeros_like(img)
    r = math.ceil(3 * sigma)
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            direct[20 + dy, 20 + dx] = math.exp(-(dx * dx + dy * dy) / (2 * sigma * sigma))
    direct /= direct.sum()
    assert np.max(np.abs(out - direct)) <= 1e-9
    assert abs(out.sum() - 1.0) <= 1e-12  # interior-supported impulse keeps mass


def check_softmax_hand():
    out = numerics.softmax(np.array([math.log(1.0), math.log(3.0)]))
    assert np.max(np.abs(out - [0.25, 0.75])) <= 1e-12


def check_l2_hand():
    assert abs(numerics.l2_distance([1.0, 0.0], [0.0, 1.0]) - math.sqrt(2)) <= 1e-12


def check_refcnn_feature_shape():
    cnn = build_reference_cnn(seed=7)
    img = np.random.default_rng(1).uniform(0, 1, size=(32, 32, 3))
    fm = cnn.feature_maps(img)
    assert fm.maps.shape == (16, 16, 16), fm.maps.shape
    assert len(cnn.predict([img])[0].scores) == 10


def check_refcnn_gradient_finite_difference():
    cnn = build_reference_cnn(seed=11)
    rng = np.random.default_rng(2)
    img = rng.uniform(0.05, 0.95, size=(32, 32, 3))
    if cnn.min_preactivation_magnitude(img) < 1e-6:
        raise AssertionError("seeded image lands on a ReLU kink; re-seed the oracle")
    target = 3
    grad = cnn.input_gradient(img, target)
    step = 1e-4
    worst = 0.0
    for _ in range(20):
        y, x, k = rng.integers(0, 32), rng.integers(0, 32), rng.integers(0, 3)
        hi = img.copy()
        hi[y, x, k] += step
        lo = img.copy()
        lo[y, x, k] -= step
        loss_hi = -math.log(cnn.predict([hi])[0].scores[target])
        loss_lo = -math.log(cnn.predict([lo])[0].scores[target])
        fd = (loss_hi - loss_lo) / (2 * step)
        worst = max(worst, abs(fd - grad[y, x, k]))
    assert worst <= 1e-5, worst


def check_refcnn_gradient_target_ordering():
    # The loss gradient for an unlikely target class dominates the one for the
    # model's own (low-loss) top class.
    cnn = build_reference_cnn(seed=13)
    rng = np.random.default_rng(3)
    img = rng.uniform(0, 1, size=(32, 32, 3))
    scores = cnn.predict([img])[0].scores
    top = int(np.argmax(scores))
    worst = int(np.argmin(scores))
    g_top = np.abs(cnn.input_gradient(img, top)).sum()
    g_worst = np.abs(cnn.input_gradient(img, worst)).sum()
    assert g_worst > g_top, (g_worst, g_top)


def check_mask_bump_geometry():
    from .model import FeatureMaps

    maps = np.zeros((8, 8, 1))
    maps[3, 3, 0] = 1.0
    ms = sidu.build_mask_set(FeatureMaps(maps), 32, 32, sidu.SiduConfig())
    flat_arg = int(np.argmax(ms.upsampled[0]))
    y, x = divmod(flat_arg, 32)
    assert 12 <= y < 16 and 12 <= x < 16, (y, x)


def check_sd_hand():
    got = sidu.similarity_difference(
        np.array([1.0, 0.0]), np.array([0.0, 1.0]), sigma=0.5
    )
    assert abs(got - math.exp(-math.sqrt(2) / 0.5)) <= 1e-12, got


def check_sd_default_config():
    cfg = sidu.SiduConfig()
    got = sidu.similarity_difference(
        np.array([1.0, 0.0]), np.array([0.0, 1.0]), cfg.sigma, cfg.norm
    )
    expected = math.exp(-math.sqrt(2) / (2 * 0.25 * 0.25))
    assert abs(got - expected) <= 1e-12, got


def check_uniqueness_hand():
    u = sidu.uniqueness(
        [np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([1.0, 0.0])]
    )
    expected = [math.sqrt(2), 2 * math.sqrt(2), math.sqrt(2)]
    assert np.max(np.abs(u - expected)) <= 1e-12, u


def check_feature_weights_bruteforce():
    rng = np.random.default_rng(5)
    raw = rng.uniform(0.1, 1.0, size=(5, 6))
    vecs = raw / raw.sum(axis=1, keepdims=True)
    p_org, preds = vecs[0], list(vecs[1:])
    cfg = sidu.SiduConfig()
    wv = sidu.feature_weights(PredictionVector(p_org), preds, cfg)

    def d(a, b):
        return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))

    for i in range(4):
        sd = math.exp(-d(p_org, preds[i]) / (2 * cfg.sigma**2))
        u = sum(d(preds[i], preds[j]) for j in range(4))
        assert abs(wv.weights[i] - sd * u) <= 1e-9, i


def check_sidu_planted_localization():
    adapter = PlantedQuadrantAdapter()
    rng = np.random.default_rng(6)
    for _ in range(5):
        img = _bright_quadrant_image(rng)
        em = sidu.explain_sidu(adapter, img)
        y, x = divmod(int(np.argmax(em.heatmap)), 32)
        assert y < 16 and x < 16, (y, x)
        fm = adapter.feature_maps(img)
        masks = sidu.build_mask_set(fm, 32, 32, sidu.SiduConfig())
        preds = adapter.predict(list(sidu.masked_images(img, masks)))
        wv = sidu.feature_weights(adapter.predict([img])[0], preds, sidu.SiduConfig())
        assert int(np.argmax(wv.weights)) == 0, wv.weights


def check_rise_planted_concentration():
    adapter = PlantedQuadrantAdapter()
    img = _bright_quadrant_image(np.random.default_rng(7))
    em = sidu.explain_rise(adapter, img, sidu.RiseConfig(num_masks=2000, seed=9))
    hm = em.heatmap
    tl = hm[:16, :16].mean()
    others = [hm[:16, 16:].mean(), hm[16:, :16].mean(), hm[16:, 16:].mean()]
    assert all(tl > o for o in others), (tl, others)


def check_causal_planted_breakpoints():
    adapter = PlantedQuadrantAdapter()
    img = _bright_quadrant_image(np.random.default_rng(8))
    oracle = np.zeros((32, 32))
    oracle[:16, :16] = 1.0

    deletion = metrics.deletion_curve(adapter, img, oracle, steps=4, baseline=metrics.Baseline.ZERO)
    zero_img_score = adapter.predict([np.zeros_like(img)])[0].scores[0]
    # once the scoring quadrant is fully deleted (fraction 0.25) the score is
    # the baseline-image score and stays flat
    for frac, prob in deletion.points[1:]:
        assert abs(prob - zero_img_score) <= 1e-9, (frac, prob)

    insertion = metrics.insertion_curve(adapter, img, oracle, steps=4, start=metrics.InsertionStart.ZERO)
    full_score = adapter.predict([img])[0].scores[0]
    for frac, prob in insertion.points[1:]:
        assert abs(prob - full_score) <= 1e-9, (frac, prob)

    reversed_ins = metrics.insertion_curve(adapter, img, -oracle, steps=4, start=metrics.InsertionStart.ZERO)
    assert insertion.auc > reversed_ins.auc


def check_curve_auc_hand():
    assert abs(metrics.curve_auc([(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)]) - 0.75) <= 1e-12
    assert abs(metrics.curve_auc([(0.0, 0.0), (1.0, 1.0)]) - 0.5) <= 1e-12


def check_fixation_two_maxima():
    fx = metrics.FixationSet(
        width=33, height=33, points=[("s1", 5, 5), ("s1", 27, 27)]
    )
    heat = metrics.fixations_to_heatmap(fx, sigma_px=1.5)
    for y, x in ((5, 5), (27, 27)):
        patch = heat[y - 2 : y + 3, x - 2 : x + 3].copy()
        center = patch[2, 2]
        patch[2, 2] = -1.0
        assert center > patch.max(), (y, x)


def check_auc_fixation_enumeration():
    em = np.array([[0.9, 0.1], [0.8, 0.2]])
    fx = metrics.FixationSet(width=2, height=2, points=[("s", 0, 0), ("s", 0, 1)])
    assert metrics.auc_fixation(em, fx) == 1.0


def check_kl_hand():
    fm = np.array([[0.75, 0.25]])
    em = np.array([[0.25, 0.75]])
    got = metrics.kl_div(fm, em, reg=1e-300)
    assert abs(got - 0.5 * math.log(3.0)) <= 1e-9, got


def check_scc_tie_case():
    # Tie-averaged ranks: [1, 2.5, 2.5, 4] vs [1, 3, 2, 4]; Pearson of the
    # ranks is 4.5 / sqrt(4.5 * 5), hand-checked and confirmed by
    # scipy.stats.spearmanr.
    expected = 4.5 / math.sqrt(4.5 * 5.0)
    got = metrics.scc(np.array([1.0, 2.0, 2.0, 3.0]), np.array([1.0, 3.0, 2.0, 4.0]))
    assert abs(got - expected) <= 1e-9, got


def check_fgsm_loss_increase():
    cnn = build_reference_cnn(seed=17)
    rng = np.random.default_rng(10)
    deltas = []
    for _ in range(20):
        img = rng.uniform(0, 1, size=(32, 32, 3))
        target = cnn.predict([img])[0].argmax
        adv = adversarial.fgsm(cnn, img, adversarial.AttackConfig(epsilon=0.05))
        loss_clean = -math.log(cnn.predict([img])[0].scores[target])
        loss_adv = -math.log(cnn.predict([adv])[0].scores[target])
        deltas.append(loss_adv - loss_clean)
    assert float(np.median(deltas)) > 0, np.median(deltas)


def check_end_to_end_equation_oracle():
    cnn = build_reference_cnn(seed=21)
    img = np.random.default_rng(11).uniform(0, 1, size=(32, 32, 3))
    fast = sidu.explain_sidu(cnn, img).heatmap
    slow = straight_line_sidu(cnn, img)
    assert np.max(np.abs(fast - slow)) <= 1e-9


ORACLES = [
    ("bilinear-bruteforce", check_bilinear_against_bruteforce),
    ("gaussian-impulse", check_gaussian_impulse_profile),
    ("softmax-hand", check_softmax_hand),
    ("l2-hand", check_l2_hand),
    ("refcnn-feature-shape", check_refcnn_feature_shape),
    ("refcnn-gradient-fd", check_refcnn_gradient_finite_difference),
    ("refcnn-gradient-ordering", check_refcnn_gradient_target_ordering),
    ("mask-bump-geometry", check_mask_bump_geometry),
    ("sd-hand", check_sd_hand),
    ("sd-default-config", check_sd_default_config),
    ("uniqueness-hand", check_uniqueness_hand),
    ("feature-weights-bruteforce", check_feature_weights_bruteforce),
    ("sidu-planted-localization", check_sidu_planted_localization),
    ("rise-planted-concentration", check_rise_planted_concentration),
    ("causal-planted-breakpoints", check_causal_planted_breakpoints),
    ("curve-auc-hand", check_curve_auc_hand),
    ("fixation-two-maxima", check_fixation_two_maxima),
    ("auc-fixation-enumeration", check_auc_fixation_enumeration),
    ("kl-hand", check_kl_hand),
    ("scc-tie-case", check_scc_tie_case),
    ("fgsm-loss-increase", check_fgsm_loss_increase),
    ("end-to-end-equation-oracle", check_end_to_end_equation_oracle),
]


def run_selftest() -> list[tuple[str, bool, str]]:
    """Run every oracle; returns (name, passed, detail) per check."""
    results = []
    for name, fn in ORACLES:
        try:
            fn()
            results.append((name, True, ""))
        except Exception as exc:  # report, don't abort the suite
            results.append((name, False, f"{type(exc).__name__}: {exc}"))
    return results
