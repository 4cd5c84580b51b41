"""Experiment harness behind the CLI.

Every ``cmd_*`` function returns a :class:`RunReport` whose ``passed`` flag
drives the process exit status.  Timing fields aside, all outputs are
deterministic.
"""

from __future__ import annotations

import logging
import math
import time

import numpy as np

from .basis import OpeConfig, gram_matrix
from .corpus import crop_to_multiple
from .featuremap import FeatureMap, flip, flip_spatial, random_feature_map
from .imageio import bicubic_resize, flip_image, psnr
from .projector import encode_image, encode_pixels
from .renderer import EnsembleMode, op_count, render_image
from .report import RunReport

log = logging.getLogger(__name__)

ABLATION_MODES = (EnsembleMode.FULL, EnsembleMode.NO_EXT, EnsembleMode.NO_INTERP, EnsembleMode.NONE)


def _mean(values):
    values = list(values)
    return float(np.mean(values)) if values else math.nan


def cmd_ortho_check(n_max: int, m: int = 512, tolerance: float = 1e-8) -> RunReport:
    """Gram matrices of the OPE basis for n = 0..n_max under midpoint quadrature.

    Passes when every deviation from the identity is strictly below
    ``tolerance``.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    rep = RunReport("ortho-check", params={"n_max": n_max, "m": m, "tolerance": tolerance})
    worst = 0.0
    for n in range(n_max + 1):
        g = gram_matrix(n, m)
        off = g - np.diag(np.diag(g))
        max_off = float(np.abs(off).max())
        max_diag = float(np.abs(np.diag(g) - 1.0).max())
        worst = max(worst, max_off, max_diag)
        rep.add(n=n, dim=g.shape[0], max_offdiag=max_off, max_diag_dev=max_diag)
    rep.aggregates["max_deviation"] = worst
    rep.passed = worst < tolerance
    return rep


def cmd_roundtrip(images, r_list, n_list, mode=EnsembleMode.FULL, threads: int = 1, tie_db: float = 0.05) -> RunReport:
    """Encode each image at factor r with max frequency n, render back, score PSNR.

    ``images`` is a list of (name, image) pairs; images are trimmed to a
    multiple of r.  Aggregates hold the mean PSNR matrix, the best n per r,
    and whether n = r - 1 is within ``tie_db`` of the best.
    """
    mode = EnsembleMode.parse(mode)
    rep = RunReport(
        "roundtrip",
        params={"r_list": list(r_list), "n_list": list(n_list), "mode": mode.value, "images": len(images)},
    )
    table = {}
    for name, img in images:
        for r in r_list:
            hr = crop_to_multiple(img, r)
            for n in n_list:
                t0 = time.perf_counter()
                fm = encode_image(hr, r, OpeConfig(n))
                out = render_image(fm, hr.shape[0], hr.shape[1], mode, threads=threads)
                ms = (time.perf_counter() - t0) * 1e3
                score = psnr(out, hr)
                table.setdefault(r, {}).setdefault(n, []).append(score)
                rep.add(image=name, r=r, n=n, mode=mode.value, psnr_db=score, time_ms=ms)

    mean = {r: {n: _mean(v) for n, v in row.items()} for r, row in table.items()}
    argmax = {}
    nyquist = {}
    for r, row in mean.items():
        best_n = max(row, key=lambda n: row[n])
        argmax[r] = best_n
        if (r - 1) in row:
            nyquist[r] = bool(row[r - 1] >= row[best_n] - tie_db)
    rep.aggregates["mean_psnr"] = {str(r): {str(n): v for n, v in row.items()} for r, row in mean.items()}
    rep.aggregates["argmax_n"] = {str(r): n for r, n in argmax.items()}
    rep.aggregates["nyquist_n_is_best"] = {str(r): ok for r, ok in nyquist.items()}
    rep.aggregates["total_time_ms"] = float(sum(it["time_ms"] for it in rep.items))
    return rep


def sine_witness(n: int = 1, size: int = 1) -> FeatureMap:
    """Feature map whose only non-DC coefficient is sin along x times sin along y.

    A naive cell reversal leaves the sine coefficient unchanged, so its
    rendering differs from the mirrored rendering by a full sine amplitude.
    """
    cfg = OpeConfig(max(n, 1))
    data = np.zeros((size, size, 3, cfg.dim), dtype=np.float32)
    data[..., 0] = 0.5
    data[..., 2 * cfg.axis_dim + 2] = 0.2  # basis (2, 2): sin(pi x) sin(pi y)
    return FeatureMap(data, cfg)


def _flip_rows(rep, name, fm, H, W, gt=None, threads=1):
    worst = 0.0
    base = render_image(fm, H, W, threads=threads, clamp=False)
    for axis in ("x", "y"):
        mirrored = flip_image(base, axis)
        for variant, transform in (("parity", flip), ("spatial", flip_spatial)):
            flipped = render_image(transform(fm, axis), H, W, threads=threads, clamp=False)
            dev = float(np.abs(flipped - mirrored).max())
            row = dict(image=name, variant=variant, axis=axis, H=H, W=W, max_abs_dev=dev)
            if gt is not None:
                gt_flipped = flip_image(gt, axis)
                row["psnr_render_of_flip"] = psnr(np.clip(flipped, 0, 1), gt_flipped)
                row["psnr_flip_of_render"] = psnr(np.clip(mirrored, 0, 1), gt_flipped)
            rep.add(**row)
            if variant == "parity":
                worst = max(worst, dev)
    return worst


def cmd_flip_check(image, r: int = 4, n: int = 3, tolerance: float = 1e-5, name: str = "image", threads: int = 1) -> RunReport:
    """Check that rendering commutes with mirroring.

    The parity-corrected flip must agree with the mirrored rendering within
    ``tolerance``; the purely spatial flip is reported alongside, plus a
    single-sine witness feature map where the spatial flip visibly fails.
    """
    rep = RunReport("flip-check", params={"r": r, "n": n, "tolerance": tolerance})
    hr = crop_to_multiple(np.asarray(image, dtype=np.float64), r)
    fm = encode_image(hr, r, OpeConfig(n))
    worst = _flip_rows(rep, name, fm, hr.shape[0], hr.shape[1], gt=hr, threads=threads)

    witness = sine_witness(n)
    worst = max(worst, _flip_rows(rep, "sine-witness", witness, 16, 16, threads=threads))
    spatial_witness = max(
        it["max_abs_dev"] for it in rep.items if it["image"] == "sine-witness" and it["variant"] == "spatial"
    )
    rep.aggregates["max_dev_parity"] = worst
    rep.aggregates["max_dev_spatial"] = max(it["max_abs_dev"] for it in rep.items if it["variant"] == "spatial")
    rep.aggregates["witness_dev_spatial"] = spatial_witness
    rep.notes.append(
        "spatial flip reverses cells without negating sine coefficients; it does not commute with rendering"
    )
    rep.passed = worst < tolerance and spatial_witness > 1e-3
    return rep


def parse_size(text: str):
    """'HxW' -> (H, W)."""
    try:
        h, w = text.lower().split("x")
        size = int(h), int(w)
    except ValueError:
        raise ValueError(f"size must look like HxW, got {text!r}") from None
    if min(size) < 1:
        raise ValueError(f"size must be positive, got {text!r}")
    return size


def target_size(shape, scale=None, size=None):
    if size is not None:
        return size
    if scale is None:
        raise ValueError("give either a scale or a target size")
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    return max(1, round(shape[0] * scale)), max(1, round(shape[1] * scale))


def cmd_upsample(image, scale=None, size=None, n: int = 0, mode=EnsembleMode.FULL, threads: int = 1, baseline: bool = False):
    """Upsample a low-resolution image with the analytic encoder.

    Returns ``(output, baseline_or_None, report)``.
    """
    mode = EnsembleMode.parse(mode)
    lr = np.asarray(image, dtype=np.float64)
    H, W = target_size(lr.shape, scale, size)
    rep = RunReport("upsample", params={"scale": scale, "size": f"{H}x{W}", "n": n, "mode": mode.value})
    t0 = time.perf_counter()
    fm = encode_pixels(lr, n)
    out = render_image(fm, H, W, mode, threads=threads)
    ms = (time.perf_counter() - t0) * 1e3
    rep.add(image="input", H=H, W=W, n_effective=fm.cfg.n, mode=mode.value, time_ms=ms)
    if fm.cfg.n != n:
        rep.notes.append(f"max frequency capped from {n} to {fm.cfg.n}: one sample per latent")
    base = bicubic_resize(lr, H, W) if baseline else None
    if base is not None:
        rep.aggregates["psnr_vs_bicubic"] = psnr(out, base)
    return out, base, rep


def cmd_render(fm: FeatureMap, scale=None, size=None, mode=EnsembleMode.FULL, threads: int = 1):
    """Render an externally produced feature map (e.g. read from OPEF)."""
    H, W = target_size((fm.h, fm.w), scale, size)
    return render_image(fm, H, W, mode, threads=threads)


def cmd_bench(size=(128, 128), scale_list=(4, 8), n: int = 3, repetitions: int = 3, seed: int = 0,
              threads: int = 1, mode=EnsembleMode.FULL, linear_band=(0.75, 1.25)) -> RunReport:
    """Time rendering of a synthetic feature map at several scales.

    Reports the best-of-``repetitions`` time per image (plus the median),
    throughput, and the MAC estimate.
    Passes when the time ratio between the two largest scales, divided by
    their pixel ratio, lies in ``linear_band``.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    if not scale_list:
        raise ValueError("need at least one scale")
    mode = EnsembleMode.parse(mode)
    h, w = size
    fm = random_feature_map(h, w, n, seed=seed)
    rep = RunReport(
        "bench",
        params={"size": f"{h}x{w}", "scales": list(scale_list), "n": n, "repetitions": repetitions,
                "seed": seed, "threads": threads, "mode": mode.value},
    )
    render_image(fm, 8, 8, mode)  # warm-up
    sizes = [(max(1, round(h * s)), max(1, round(w * s))) for s in scale_list]
    times = [[] for _ in sizes]
    # Scales are interleaved so that machine-load drift hits all of them alike.
    for _ in range(repetitions):
        for k, (H, W) in enumerate(sizes):
            t0 = time.perf_counter()
            render_image(fm, H, W, mode, threads=threads)
            times[k].append((time.perf_counter() - t0) * 1e3)
    for s, (H, W), ts in zip(scale_list, sizes, times):
        ms = min(ts)
        rep.add(scale=float(s), H=H, W=W, time_ms=ms, time_ms_median=float(np.median(ts)),
                megapixels_per_s=H * W / ms / 1e3, macs=op_count(fm.cfg, H, W, fm.channels))
    rep.aggregates["macs_per_pixel"] = op_count(fm.cfg, 1, 1, fm.channels)
    if len(rep.items) >= 2:
        ordered = sorted(rep.items, key=lambda it: it["H"] * it["W"])
        a, b = ordered[-2], ordered[-1]
        pixel_ratio = (b["H"] * b["W"]) / (a["H"] * a["W"])
        time_ratio = b["time_ms"] / a["time_ms"]
        rep.aggregates["time_ratio"] = time_ratio
        rep.aggregates["pixel_ratio"] = pixel_ratio
        rep.passed = linear_band[0] <= time_ratio / pixel_ratio <= linear_band[1]
    return rep


def cmd_ablation(images, r: int = 4, n: int = 3, threads: int = 1, min_gap_db: float = 0.1) -> RunReport:
    """Round-trip PSNR in every ensemble mode.

    Passes when the full patch ensemble has the best corpus mean and beats
    the no-ensemble mode by at least ``min_gap_db``.
    """
    rep = RunReport("ablation", params={"r": r, "n": n, "images": len(images), "min_gap_db": min_gap_db})
    scores = {m.value: [] for m in ABLATION_MODES}
    for name, img in images:
        hr = crop_to_multiple(img, r)
        fm = encode_image(hr, r, OpeConfig(n))
        for m in ABLATION_MODES:
            t0 = time.perf_counter()
            out = render_image(fm, hr.shape[0], hr.shape[1], m, threads=threads)
            ms = (time.perf_counter() - t0) * 1e3
            score = psnr(out, hr)
            scores[m.value].append(score)
            rep.add(image=name, r=r, n=n, mode=m.value, psnr_db=score, time_ms=ms)
    means = {k: _mean(v) for k, v in scores.items()}
    full = means["full"]
    rep.aggregates["mean_psnr"] = means
    ok = all(full >= v for v in means.values())
    gap = full - means["none"]
    rep.aggregates["full_minus_none_db"] = gap if math.isfinite(gap) else 0.0
    rep.passed = bool(ok and (gap >= min_gap_db or not math.isfinite(full)))
    return rep
