"""Command-line driver: simulate, fuse, eval, gradcheck, bench.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

from . import bench as bench_mod
from .cube import mode1_fold, mode1_unfold
from .degradation import (
    GammaParams,
    build_spatial_operator,
    default_spectral_response,
    exposure_case,
    load_spectral_response,
    make_blur_kernel,
    simulate_observations,
)
from .errors import DataError, DimensionMismatchError, ExpofuseError, ParameterError, SolverDivergedError
from .gradcheck import GRADCHECK_TOL, run_gradient_check
from .initialize import init_fused, init_naive
from .io import read_cube, write_cube
from .metrics import evaluate
from .report import (
    save_band_psnr_plot,
    save_comparison_figure,
    save_objective_plot,
    write_metrics_csv,
    write_objective_csv,
)
from .solver import SolverConfig, solve

MANIFEST_NAME = "manifest.json"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="expofuse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="degrade a ground-truth cube into an observation pair")
    sim.add_argument("--input", required=True, help="ground-truth cube file")
    sim.add_argument("--out-dir", required=True)
    sim.add_argument("--case", choices=["1", "2", "custom"], default="1")
    sim.add_argument("--alpha-hsi", type=float, help="custom case: HSI gain")
    sim.add_argument("--gamma-hsi", type=float, help="custom case: HSI exponent")
    sim.add_argument("--alpha-msi", type=float, help="custom case: MSI gain")
    sim.add_argument("--gamma-msi", type=float, help="custom case: MSI exponent")
    sim.add_argument("--response", help="spectral response CSV (default: synthetic 3-channel)")
    sim.add_argument("--blur-size", type=int, default=8)
    sim.add_argument("--blur-sigma", type=float, default=math.sqrt(3.0))
    sim.add_argument("--ratio", type=int, default=4)
    sim.add_argument("--boundary", choices=["symmetric", "periodic", "zero"], default="symmetric")
    sim.add_argument("--seed", type=int, default=0, help="recorded in the manifest")
    sim.add_argument("--no-figures", action="store_true")

    fuse = sub.add_parser("fuse", help="fuse an observation pair into a high-resolution cube")
    fuse.add_argument("--input", required=True, help="LR-HSI cube file")
    fuse.add_argument("--msi", required=True, help="HR-MSI cube file")
    fuse.add_argument("--config", help="solver config JSON (default: built-in defaults)")
    fuse.add_argument("--manifest", help="simulation manifest (for operator params / oracle init)")
    fuse.add_argument("--init", choices=["naive", "fused", "oracle"], default="naive")
    fuse.add_argument("--out-dir", required=True)
    fuse.add_argument("--blur-size", type=int, default=8)
    fuse.add_argument("--blur-sigma", type=float, default=math.sqrt(3.0))
    fuse.add_argument("--ratio", type=int, help="decimation ratio (default: inferred from cube dims)")
    fuse.add_argument("--boundary", choices=["symmetric", "periodic", "zero"], default="symmetric")
    fuse.add_argument("--response", help="spectral response CSV (default: synthetic 3-channel)")
    fuse.add_argument("--no-figures", action="store_true")

    ev = sub.add_parser("eval", help="score an estimate against a reference cube")
    ev.add_argument("--ref", help="reference cube (default: truth from --manifest)")
    ev.add_argument("--est", required=True, help="estimate cube")
    ev.add_argument("--manifest", help="simulation manifest supplying ratio and truth path")
    ev.add_argument("--ratio", type=int, help="resolution ratio for ERGAS (default 4 or manifest)")
    ev.add_argument("--out-dir", required=True)
    ev.add_argument("--name", default="estimate", help="row name in the metrics CSV")
    ev.add_argument("--bands", type=int, nargs=3, help="false-color band indices (r g b)")
    ev.add_argument("--no-figures", action="store_true")

    gc = sub.add_parser("gradcheck", help="finite-difference check of the analytic gradients")
    gc.add_argument("--seed", type=int, default=0)
    gc.add_argument("--instances", type=int, default=5)

    be = sub.add_parser("bench", help="seeded end-to-end synthetic benchmark")
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--iters", type=int, default=bench_mod.BENCH_ITERS)
    be.add_argument("--out-dir", required=True)
    return parser


def _gamma_from_args(args) -> tuple[GammaParams, GammaParams]:
    if args.case != "custom":
        return exposure_case(args.case)
    fields = (args.alpha_hsi, args.gamma_hsi, args.alpha_msi, args.gamma_msi)
    if any(v is None for v in fields):
        raise ParameterError(
            "--case custom requires --alpha-hsi --gamma-hsi --alpha-msi --gamma-msi"
        )
    return GammaParams(fields[0], fields[1]), GammaParams(fields[2], fields[3])


def _load_response(path_arg, bands: int):
    if path_arg:
        return load_spectral_response(path_arg)
    return default_spectral_response(bands)


def _cmd_simulate(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    z = read_cube(args.input)
    g_hsi, g_msi = _gamma_from_args(args)
    kernel = make_blur_kernel(args.blur_size, args.blur_sigma)
    op = build_spatial_operator(kernel, args.ratio, (z.width, z.height), args.boundary)
    response = _load_response(args.response, z.bands)
    sim = simulate_observations(z, g_hsi, g_msi, op, response)

    files = {
        "lr_hsi": "x.cube",
        "hr_msi": "y.cube",
        "truth": "z.cube",
        "truth_exposed_hsi": "zx.cube",
        "truth_exposed_msi": "zy.cube",
        "exposure_hsi": "exposure_hsi.cube",
        "exposure_msi": "exposure_msi.cube",
    }
    dims = z.dims
    write_cube(out / files["lr_hsi"], sim.lr_hsi)
    write_cube(out / files["hr_msi"], sim.hr_msi)
    write_cube(out / files["truth"], sim.truth)
    write_cube(out / files["truth_exposed_hsi"], sim.truth_exposed_hsi)
    write_cube(out / files["truth_exposed_msi"], sim.truth_exposed_msi)
    write_cube(out / files["exposure_hsi"], mode1_fold(sim.exposure_hsi, dims))
    write_cube(out / files["exposure_msi"], mode1_fold(sim.exposure_msi, dims))

    manifest = {
        "files": files,
        "case": args.case,
        "gamma_hsi": {"alpha": g_hsi.alpha, "gamma": g_hsi.gamma},
        "gamma_msi": {"alpha": g_msi.alpha, "gamma": g_msi.gamma},
        "blur_size": args.blur_size,
        "blur_sigma": args.blur_sigma,
        "ratio": args.ratio,
        "boundary": args.boundary,
        "dims": list(dims),
        "msi_channels": response.channels,
        "seed": args.seed,
    }
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    if not args.no_figures:
        save_comparison_figure(
            {
                "ground truth": sim.truth,
                "exposed (HSI side)": sim.truth_exposed_hsi,
                "exposed (MSI side)": sim.truth_exposed_msi,
                "LR-HSI": sim.lr_hsi,
            },
            out / "simulate_preview.png",
        )
    print(f"simulate: wrote {len(files)} cubes + {MANIFEST_NAME} to {out}")
    return 0


def _operator_from_manifest(manifest: dict):
    kernel = make_blur_kernel(manifest["blur_size"], manifest["blur_sigma"])
    dims = manifest["dims"]
    return build_spatial_operator(kernel, manifest["ratio"], (dims[1], dims[2]), manifest["boundary"])


def _cmd_fuse(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    x = read_cube(args.input)
    y = read_cube(args.msi)

    manifest = None
    if args.manifest:
        manifest = json.loads(Path(args.manifest).read_text())
        op = _operator_from_manifest(manifest)
    else:
        if (
            y.width % x.width
            or y.height % x.height
            or y.width // x.width != y.height // x.height
        ):
            raise DimensionMismatchError(
                f"MSI dims {(y.width, y.height)} are not an integer multiple of "
                f"HSI dims {(x.width, x.height)}"
            )
        ratio = args.ratio if args.ratio is not None else y.width // x.width
        if ratio != y.width // x.width:
            raise DimensionMismatchError(
                f"--ratio {ratio} contradicts cube dims (inferred {y.width // x.width})"
            )
        kernel = make_blur_kernel(args.blur_size, args.blur_sigma)
        op = build_spatial_operator(kernel, ratio, (y.width, y.height), args.boundary)

    if (x.width * op.ratio, x.height * op.ratio) != op.in_dims or (y.width, y.height) != op.in_dims:
        raise DimensionMismatchError(
            f"observation dims {(x.width, x.height)} / {(y.width, y.height)} do not fit "
            f"operator dims {op.in_dims} at ratio {op.ratio}"
        )
    response = _load_response(args.response, x.bands)
    if y.bands != response.channels:
        raise DimensionMismatchError(
            f"MSI has {y.bands} channels but response produces {response.channels}"
        )

    config = SolverConfig.from_json(Path(args.config).read_text()) if args.config else SolverConfig()
    hsi = mode1_unfold(x)
    msi = mode1_unfold(y)
    if args.init == "naive":
        init = init_naive(hsi, msi, op, response)
    elif args.init == "fused":
        init = init_fused(hsi, msi, op, response)
    else:
        if not manifest:
            raise ParameterError("--init oracle requires --manifest")
        base = Path(args.manifest).parent
        truth = read_cube(base / manifest["files"]["truth"])
        with warnings.catch_warnings():
            # Exposure fields are ratios, not reflectances; > 1 is expected.
            warnings.simplefilter("ignore")
            e1 = mode1_unfold(read_cube(base / manifest["files"]["exposure_hsi"]))
            e2 = mode1_unfold(read_cube(base / manifest["files"]["exposure_msi"]))
        init = (e1, e2, mode1_unfold(truth))

    state = solve(hsi, msi, op, response, config, init)
    dims = (x.bands,) + op.in_dims
    write_cube(out / "fused.cube", mode1_fold(state.image, dims))
    write_cube(out / "exposure_hsi.cube", mode1_fold(state.exposure_hsi, dims))
    write_cube(out / "exposure_msi.cube", mode1_fold(state.exposure_msi, dims))
    write_objective_csv(state.objective_history, out / "objective_history.csv")
    if not args.no_figures:
        save_objective_plot(state.objective_history, out / "objective_history.png")
    print(
        f"fuse: {state.iteration} iterations, objective "
        f"{state.objective_history[0]:.6g} -> {state.objective_history[-1]:.6g}, wrote {out}"
    )
    return 0


def _cmd_eval(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ratio = args.ratio
    ref_path = args.ref
    if args.manifest:
        manifest = json.loads(Path(args.manifest).read_text())
        if ratio is None:
            ratio = manifest["ratio"]
        if ref_path is None:
            ref_path = Path(args.manifest).parent / manifest["files"]["truth"]
    if ref_path is None:
        raise ParameterError("eval needs --ref or --manifest")
    if ratio is None:
        ratio = 4
    ref = read_cube(ref_path)
    est = read_cube(args.est)
    report = evaluate(ref, est, ratio)
    write_metrics_csv({args.name: report}, out / "metrics.csv")
    (out / "metrics.json").write_text(
        json.dumps({args.name: report.to_dict()}, indent=2, sort_keys=True) + "\n"
    )
    if not args.no_figures:
        bands = tuple(args.bands) if args.bands else None
        save_comparison_figure({"reference": ref, args.name: est}, out / "comparison.png", bands=bands)
        save_band_psnr_plot(ref, est, out / "band_psnr.png")
    print(
        f"eval[{args.name}]: PSNR {report.psnr:.4f} dB, SSIM {report.ssim:.4f}, "
        f"SAM {report.sam:.4f} deg, ERGAS {report.ergas:.4f}"
    )
    return 0


def _cmd_gradcheck(args) -> int:
    worst = run_gradient_check(args.seed, args.instances)
    for block in ("exposure_hsi", "exposure_msi", "image"):
        print(f"gradcheck {block}: max relative error {worst[block]:.3e}")
    ok = all(v < GRADCHECK_TOL for v in worst.values())
    print(f"gradcheck: {'OK' if ok else 'FAIL'} (tolerance {GRADCHECK_TOL:.0e})")
    return 0 if ok else 3


def _cmd_bench(args) -> int:
    result = bench_mod.run_bench(seed=args.seed, iters=args.iters)
    bench_mod.write_bench_outputs(result, args.out_dir)
    print(bench_mod.bench_summary_text(result))
    return 0


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "fuse":
            return _cmd_fuse(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "gradcheck":
            return _cmd_gradcheck(args)
        return _cmd_bench(args)
    except SolverDivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DataError, DimensionMismatchError, ParameterError, ExpofuseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed input ({exc})", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
