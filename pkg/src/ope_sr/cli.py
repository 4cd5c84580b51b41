"""Command-line entry point: ``ope-sr <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .corpus import load_corpus, load_directory
from .featuremap import read_opef, write_opef
from .imageio import load_image, save_image
from .plotting import figure_path, plot_report
from .projector import encode_image
from .renderer import EnsembleMode

MODES = [m.value for m in EnsembleMode]


def int_list(text: str) -> list:
    """'2,3,4' or '1-8' (inclusive) or a mix: '1-3,6'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty list {text!r}")
    return out


def float_list(text: str) -> list:
    return [float(p) for p in text.split(",") if p.strip()]


def size_arg(text: str):
    try:
        return ex.parse_size(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_common(p, images=False):
    p.add_argument("--out", type=Path, help="report path (.csv or .json)")
    p.add_argument("--report", choices=["csv", "json"], help="report format (default: from --out suffix, else csv)")
    p.add_argument("--threads", type=int, default=1, help="worker threads for rendering; never changes results")
    p.add_argument("--no-figures", action="store_true", help="skip the PNG figure written next to --out")
    if images:
        p.add_argument("images", nargs="*", type=Path, help="PNG/PPM images (default: bundled corpus)")
        p.add_argument("--dataset-dir", type=Path, help="directory of PNG/PPM images, e.g. DIV2K validation HR")
        p.add_argument("--limit", type=int, help="use only the first N images of --dataset-dir")


def _add_target(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--scale", type=float, help="uniform scale factor (may be non-integer)")
    g.add_argument("--size", type=size_arg, help="target size HxW")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ope-sr", description="Orthogonal position encoding upsampling toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ortho-check", help="Gram-matrix audit of the OPE basis")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--m", type=int, default=512, help="quadrature points per axis")
    p.add_argument("--tolerance", type=float, default=1e-8)
    _add_common(p)

    p = sub.add_parser("roundtrip", help="encode/render PSNR sweep over r and n")
    p.add_argument("--r", type=int_list, default=[2, 3, 4], help="downscale factors, e.g. 2,3,4")
    p.add_argument("--n", type=int_list, default=None, help="max frequencies, e.g. 1-8 (default 1..2*max r)")
    p.add_argument("--mode", choices=MODES, default="full")
    p.add_argument("--check-nyquist", action="store_true", help="fail unless n=r-1 is best for every r")
    _add_common(p, images=True)

    p = sub.add_parser("flip-check", help="render(flip) vs flip(render)")
    p.add_argument("image", nargs="?", type=Path, help="image (default: first bundled photo)")
    p.add_argument("--r", type=int, default=4)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--tolerance", type=float, default=1e-5)
    _add_common(p)

    p = sub.add_parser("ablation", help="PSNR of the four patch-ensemble modes")
    p.add_argument("--r", type=int, default=4)
    p.add_argument("--n", type=int, default=3)
    _add_common(p, images=True)

    p = sub.add_parser("bench", help="rendering throughput on synthetic feature maps")
    p.add_argument("--size", type=size_arg, default=(128, 128), help="feature map size HxW")
    p.add_argument("--scales", type=float_list, default=[4.0, 8.0])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default="full")
    _add_common(p)

    p = sub.add_parser("upsample", help="upsample a low-resolution image to any size")
    p.add_argument("input", type=Path)
    _add_target(p)
    p.add_argument("--n", type=int, default=0, help="requested max frequency (capped to what one pixel supports)")
    p.add_argument("--mode", choices=MODES, default="full")
    p.add_argument("--out", type=Path, required=True, help="output image (.png or .ppm)")
    p.add_argument("--baseline", type=Path, help="also write a bicubic upsample here")
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("encode", help="project an image into an OPEF feature map")
    p.add_argument("input", type=Path)
    p.add_argument("--r", type=int, default=4)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--out", type=Path, required=True, help="output .opef file")

    p = sub.add_parser("render", help="render an OPEF feature map to an image")
    p.add_argument("features", type=Path)
    _add_target(p)
    p.add_argument("--mode", choices=MODES, default="full")
    p.add_argument("--out", type=Path, required=True, help="output image (.png or .ppm)")
    p.add_argument("--threads", type=int, default=1)
    return parser


def _images(args):
    if args.dataset_dir is not None:
        return load_directory(args.dataset_dir, args.limit)
    if args.images:
        return [(p.stem, load_image(p)) for p in args.images]
    return load_corpus()


def _emit(report, args) -> int:
    for line in report.summary_lines():
        print(line)
    if args.out is not None:
        path = report.write(args.out, args.report)
        print(f"report: {path}")
        if not args.no_figures:
            fig = plot_report(report, figure_path(path))
            if fig is not None:
                print(f"figure: {fig}")
    elif args.report:
        print(report.to_json() if args.report == "json" else report.to_csv())
    return 0 if report.passed else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _run(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _run(args) -> int:
    cmd = args.command
    if cmd == "ortho-check":
        return _emit(ex.cmd_ortho_check(args.n_max, args.m, args.tolerance), args)

    if cmd == "roundtrip":
        n_list = args.n or list(range(1, 2 * max(args.r) + 1))
        rep = ex.cmd_roundtrip(_images(args), args.r, n_list, args.mode, threads=args.threads)
        if args.check_nyquist:
            flags = rep.aggregates["nyquist_n_is_best"]
            rep.passed = bool(flags) and all(flags.values())
        return _emit(rep, args)

    if cmd == "flip-check":
        if args.image is None:
            name, img = load_corpus(include_textures=False)[0]
        else:
            name, img = args.image.stem, load_image(args.image)
        rep = ex.cmd_flip_check(img, args.r, args.n, args.tolerance, name=name, threads=args.threads)
        return _emit(rep, args)

    if cmd == "ablation":
        return _emit(ex.cmd_ablation(_images(args), args.r, args.n, threads=args.threads), args)

    if cmd == "bench":
        rep = ex.cmd_bench(args.size, args.scales, args.n, args.repetitions, args.seed, args.threads, args.mode)
        return _emit(rep, args)

    if cmd == "upsample":
        out, base, rep = ex.cmd_upsample(
            load_image(args.input), args.scale, args.size, args.n, args.mode,
            threads=args.threads, baseline=args.baseline is not None,
        )
        save_image(out, args.out)
        print(f"wrote {args.out} ({out.shape[0]}x{out.shape[1]})")
        if base is not None:
            save_image(base, args.baseline)
            print(f"wrote {args.baseline} (bicubic)")
        for note in rep.notes:
            print(f"note: {note}")
        return 0

    if cmd == "encode":
        fm = encode_image(load_image(args.input), args.r, args.n)
        write_opef(fm, args.out)
        print(f"wrote {args.out} ({fm.h}x{fm.w}, {fm.channels} channels, n={fm.cfg.n})")
        return 0

    if cmd == "render":
        out = ex.cmd_render(read_opef(args.features), args.scale, args.size, args.mode, threads=args.threads)
        save_image(out, args.out)
        print(f"wrote {args.out} ({out.shape[0]}x{out.shape[1]})")
        return 0

    raise AssertionError(cmd)


if __name__ == "__main__":
    sys.exit(main())
