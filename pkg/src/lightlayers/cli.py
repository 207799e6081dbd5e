"""Command-line front end for the layer pipeline.

One executable with subcommands: gen-data, compose, compose-dir,
split-env, prefilter, upsample, eval, inspect.  Exit codes: 0 success,
1 usage error, 2 I/O or data error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import datagen, layerfiles, metrics
from .basis import EnvironmentMap, SoftCubeBasis, split_envmap
from .image import DEFAULT_GAMMA, ImageRGB, gamma_decode, gamma_encode
from .model import compose, compose_directional
from .pfm import read_pfm, write_pfm
from .pngio import read_png, write_png
from .prefilter import glossy_prefilter, irradiance_map
from .refine import RefineConfig, upsample_layers


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lightlayers",
        description="Light-transport layer toolkit: generate layered data, "
        "split illumination, prefilter environments, refine and score "
        "decompositions.",
    )
    parser.add_argument("--verbose", action="store_true", help="chatty progress output")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    p = sub.add_parser("gen-data", help="generate a layered dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--count", type=int, default=None, help="number of records")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--res", type=int, default=None, help="record resolution")
    p.add_argument("--config", default=None, help="key=value config file (flags win)")
    p.add_argument("--env-count", type=int, default=None, help="environment maps to bundle")
    p.add_argument("--occ-samples", type=int, default=None, help="occlusion rays per pixel")
    p.add_argument("--threads", type=int, default=None, help="record-level workers (default 1)")
    directional = p.add_mutually_exclusive_group()
    directional.add_argument(
        "--directional", dest="directional", action="store_true", default=None,
        help="also write the six-direction layers (default)",
    )
    directional.add_argument(
        "--no-directional", dest="directional", action="store_false",
        help="skip the directional layers",
    )

    p = sub.add_parser("compose", help="recompose a layer set")
    p.add_argument("--layers", required=True, help="layer-set stem")
    p.add_argument("--out", required=True, help="output image (.png gamma 2.0, .pfm linear)")
    p.add_argument(
        "--scale", type=float, default=None,
        help="exposure scale (default: the stem's metadata, else 1.0)",
    )

    p = sub.add_parser(
        "compose-dir", help="recompose a directional layer set"
    )
    p.add_argument("--layers", required=True, help="layer-set stem")
    p.add_argument("--out", required=True, help="output image (.png gamma 2.0, .pfm linear)")
    p.add_argument("--scale", type=float, default=None, help="exposure scale (default: metadata)")

    p = sub.add_parser(
        "split-env", help="split an environment into six soft-cube maps"
    )
    p.add_argument("--env", required=True, help="input lat-long PFM")
    p.add_argument("--out", required=True, help="output stem (writes <stem>.env0..5.pfm)")
    p.add_argument("--sigma", type=float, default=20.0, help="sharpening exponent (default 20)")

    p = sub.add_parser(
        "prefilter", help="pre-convolve an environment map"
    )
    p.add_argument("--env", required=True, help="input lat-long PFM")
    p.add_argument("--kind", required=True, choices=("irr", "gloss"), help="lobe type")
    p.add_argument("--n", type=float, default=None, help="Phong exponent (gloss only)")
    p.add_argument("--out", required=True, help="output PFM")
    p.add_argument("--width", type=int, default=64, help="output width (default 64)")
    p.add_argument("--height", type=int, default=32, help="output height (default 32)")

    p = sub.add_parser(
        "upsample", help="refine layers to a high-resolution target"
    )
    p.add_argument("--layers", required=True, help="coarse layer-set stem")
    p.add_argument("--hd", required=True, help="high-resolution image (.png gamma 2.0, .pfm linear)")
    p.add_argument("--out", required=True, help="output layer-set stem")
    p.add_argument("--iterations", type=int, default=100, help="solver sweeps (default 100)")
    p.add_argument("--weight", type=float, default=0.001, help="blend weight (default 0.001)")
    p.add_argument("--epsilon", type=float, default=1e-4, help="division guard (default 1e-4)")
    p.add_argument(
        "--no-exact-finalize", dest="exact_finalize", action="store_false",
        help="skip the final exact specular solve",
    )

    p = sub.add_parser("eval", help="score decompositions")
    p.add_argument("--pred", default=None, help="predicted layer-set stem")
    p.add_argument("--gt", default=None, help="ground-truth layer-set stem")
    p.add_argument("--manifest", default=None, help="dataset manifest for batch mode")
    p.add_argument(
        "--pred-dir", default=None,
        help="batch mode: directory of predicted stems (default: the ground truth itself)",
    )
    p.add_argument("--report", required=True, help="output report file")

    p = sub.add_parser("inspect", help="print image stats")
    p.add_argument("paths", nargs="+", help="PFM or PNG files")

    return parser


def _load_linear_image(path) -> ImageRGB:
    if str(path).lower().endswith(".png"):
        return gamma_decode(read_png(path))
    img = read_pfm(path)
    if not isinstance(img, ImageRGB):
        raise ValueError(f"{path}: expected an RGB image")
    return img


def _read_scale(stem, flag_value) -> float:
    if flag_value is not None:
        return flag_value
    try:
        meta = layerfiles.load_meta(stem)
    except FileNotFoundError:
        return 1.0
    return float(meta.get("scale", 1.0))


def _write_composite(img: ImageRGB, scale: float, out) -> None:
    scaled = ImageRGB(img.data * np.asarray(scale, dtype=img.data.dtype))
    if str(out).lower().endswith(".png"):
        write_png(gamma_encode(scaled, DEFAULT_GAMMA), out)
    else:
        write_pfm(scaled, out)


def _cmd_gen_data(args) -> int:
    overrides = dict(
        count=args.count,
        seed=args.seed,
        resolution=args.res,
        out_dir=args.out,
        directional=args.directional,
        env_count=args.env_count,
        occ_samples=args.occ_samples,
        threads=args.threads,
    )
    if args.config is not None:
        cfg = datagen.load_config(args.config, **overrides)
    else:
        cfg = datagen.DatasetConfig(
            **{k: v for k, v in overrides.items() if v is not None}
        )
    records = datagen.generate_dataset(cfg)
    if args.verbose:
        print(f"wrote {len(records)} records to {cfg.out_dir}")
    return 0


def _cmd_compose(args) -> int:
    layers = layerfiles.load_layers(args.layers)
    _write_composite(compose(layers), _read_scale(args.layers, args.scale), args.out)
    return 0


def _cmd_compose_dir(args) -> int:
    layers = layerfiles.load_directional(args.layers)
    _write_composite(
        compose_directional(layers), _read_scale(args.layers, args.scale), args.out
    )
    return 0


def _cmd_split_env(args) -> int:
    img = read_pfm(args.env)
    if not isinstance(img, ImageRGB):
        raise ValueError(f"{args.env}: environment maps must be RGB")
    env = EnvironmentMap(img)
    for path, part in zip(
        layerfiles.split_env_paths(args.out), split_envmap(env, SoftCubeBasis(args.sigma))
    ):
        write_pfm(part.image, path)
    return 0


def _cmd_prefilter(args) -> int:
    img = read_pfm(args.env)
    if not isinstance(img, ImageRGB):
        raise ValueError(f"{args.env}: environment maps must be RGB")
    env = EnvironmentMap(img)
    if args.kind == "irr":
        result = irradiance_map(env, args.width, args.height)
    else:
        if args.n is None:
            raise UsageError("--kind gloss requires --n")
        result = glossy_prefilter(env, args.n, args.width, args.height)
    write_pfm(result.map.image, args.out)
    return 0


def _cmd_upsample(args) -> int:
    layers = layerfiles.load_layers(args.layers)
    target = _load_linear_image(args.hd)
    cfg = RefineConfig(
        iterations=args.iterations,
        blend_weight=args.weight,
        epsilon=args.epsilon,
        exact_finalize=args.exact_finalize,
    )
    refined = upsample_layers(layers, target, cfg)
    layerfiles.save_layers(args.out, refined)
    return 0


def _eval_one(pred_stem, gt_stem) -> metrics.RecordScores:
    pred = layerfiles.load_layers(pred_stem)
    gt = layerfiles.load_layers(gt_stem)
    return metrics.evaluate_decomposition(pred, gt, compose(gt))


def _cmd_eval(args) -> int:
    if args.manifest is not None:
        base = os.path.dirname(os.path.abspath(args.manifest))
        scores = []
        for rec in datagen.read_manifest(args.manifest):
            gt_stem = os.path.join(base, rec["stem"])
            if args.pred_dir is not None:
                pred_stem = os.path.join(args.pred_dir, os.path.basename(rec["stem"]))
            else:
                pred_stem = gt_stem
            scores.append(_eval_one(pred_stem, gt_stem))
        report = metrics.summarize(scores)
    elif args.pred is not None and args.gt is not None:
        report = metrics.summarize([_eval_one(args.pred, args.gt)])
    else:
        raise UsageError("eval needs either --manifest or both --pred and --gt")
    with open(args.report, "w", encoding="utf-8") as f:
        f.write(report.format())
    if args.verbose:
        print(report.format(), end="")
    return 0


def _cmd_inspect(args) -> int:
    for path in args.paths:
        if str(path).lower().endswith(".png"):
            img = read_png(path)
            encoding = f"gamma({img.gamma:g})"
        else:
            img = read_pfm(path)
            encoding = "linear"
        channels = 3 if isinstance(img, ImageRGB) else 1
        data = img.data
        print(
            f"{path}: {img.width}x{img.height} channels={channels} "
            f"encoding={encoding} min={data.min():.6g} max={data.max():.6g}"
        )
    return 0


_COMMANDS = {
    "gen-data": _cmd_gen_data,
    "compose": _cmd_compose,
    "compose-dir": _cmd_compose_dir,
    "split-env": _cmd_split_env,
    "prefilter": _cmd_prefilter,
    "upsample": _cmd_upsample,
    "eval": _cmd_eval,
    "inspect": _cmd_inspect,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
