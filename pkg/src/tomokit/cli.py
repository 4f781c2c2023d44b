"""Command-line interface.

Subcommands cover the full pipeline: phantom rasterization, sinogram
generation (analytic or discrete, parallel or fan), filtered back
projection, algebraic reconstruction, Tikhonov least squares, Fourier
reconstruction routes, noise injection and image comparison.  Outputs
are chosen by file extension (.img/.pgm for images, .sino/.csv for
sinograms); every command optionally renders a matplotlib figure next
to its data output.

Exit codes: 0 success, 2 configuration error, 3 reported numerical
failure (an iterative solver stopping at its sweep limit).
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

from . import algebraic, fbp, io, metrics, noise, phantom, spectral
from .filters import parse_filter
from .geometry import FanGeometry, make_parallel_geometry
from .projector import FanSinogram, Image, Sinogram, forward_project

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_PI_FORM = re.compile(r"^(?P<num>[0-9.]*)\s*pi\s*(?:/\s*(?P<den>[0-9.]+))?$")


def parse_pi_value(text: str) -> float:
    """Parse '50pi', 'pi/3', '0.5pi/2' or a plain float literal."""
    s = text.strip().lower()
    m = _PI_FORM.match(s)
    if m:
        num = float(m.group("num")) if m.group("num") else 1.0
        den = float(m.group("den")) if m.group("den") else 1.0
        return num * math.pi / den
    return float(s)


def _load_phantom(args) -> phantom.Phantom:
    if args.file is not None:
        return phantom.load_phantom(args.file, r=args.support)
    return phantom.builtin_phantom(args.name)


def _add_phantom_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--name", default="shepp-logan", choices=phantom.BUILTIN_NAMES,
                     help="builtin phantom (default shepp-logan)")
    src.add_argument("--file", type=Path, help="phantom file: lines of 'a b h k phi rho'")
    p.add_argument("--support", type=float, default=None,
                   help="support radius override for --file phantoms")


def _add_figure_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--figure", type=Path, default=None,
                   help="also render a figure (png) of the result")


def _write_image(img: Image, path: Path, window=None) -> None:
    suffix = path.suffix.lower()
    if suffix == ".img":
        io.write_image_raw(img, path)
    elif suffix == ".pgm":
        io.write_pgm(img, path, window=window)
    else:
        raise ValueError(f"unknown image format {suffix!r} (use .img or .pgm)")


def _write_sinogram(sino, path: Path) -> None:
    suffix = path.suffix.lower()
    if suffix == ".sino":
        io.write_sinogram(sino, path)
    elif suffix == ".csv":
        io.write_sinogram_csv(sino, path)
    else:
        raise ValueError(f"unknown sinogram format {suffix!r} (use .sino or .csv)")


def _image_figure(img: Image, args, title: str) -> None:
    if args.figure is not None:
        from .plotting import save_image_figure

        save_image_figure(img, args.figure, title=title, window=getattr(args, "window", None))


def _sinogram_figure(sino, args, title: str) -> None:
    if args.figure is not None:
        from .plotting import save_sinogram_figure

        save_sinogram_figure(sino, args.figure, title=title)


def _report_solve(name: str, report: algebraic.SolveReport) -> int:
    print(
        f"{name}: {report.iterations} iterations, residual {report.residual_norm:.6g}, "
        f"stop reason {report.stop_reason}"
    )
    if not report.converged:
        print(f"{name}: stopped at iteration limit without reaching tolerance",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_phantom(args) -> int:
    ph = _load_phantom(args)
    img = phantom.rasterize(ph, args.size, extent=args.extent)
    _write_image(img, args.output, window=args.window)
    _image_figure(img, args, "phantom")
    return EXIT_OK


def _parallel_geometry(args):
    L = parse_pi_value(args.bandwidth)
    return L, make_parallel_geometry(L, args.radius)


def _fan_geometry(args) -> FanGeometry:
    return FanGeometry(
        D=args.source_radius,
        phi=parse_pi_value(args.fan_angle),
        p=args.sources,
        q=args.rays,
        r=args.radius,
    )


def cmd_sinogram(args) -> int:
    ph = _load_phantom(args)
    if args.fan:
        g = _fan_geometry(args)
        if args.discrete:
            raise ValueError("--discrete is only available for parallel geometry")
        sino = phantom.analytic_fan_sinogram(ph, g)
    else:
        _, g = _parallel_geometry(args)
        if args.discrete:
            img = phantom.rasterize(ph, args.size)
            sino = forward_project(img, g)
        else:
            sino = phantom.analytic_sinogram(ph, g)
    _write_sinogram(sino, args.output)
    _sinogram_figure(sino, args, "sinogram")
    return EXIT_OK


def cmd_fbp(args) -> int:
    sino = io.read_sinogram(args.input)
    is_fan = isinstance(sino, FanSinogram)
    if args.fan and not is_fan:
        raise ValueError("--fan given but the input holds parallel-beam data")
    if is_fan and not args.fan:
        raise ValueError("input holds fan-beam data; pass --fan")
    if args.bandwidth is not None:
        L = parse_pi_value(args.bandwidth)
    elif not is_fan:
        L = math.pi / sino.geometry.d
    else:
        raise ValueError("--bandwidth is required for fan-beam reconstruction")
    spec = parse_filter(args.filter, L)
    if is_fan:
        img = fbp.fbp_fan(sino, spec, shape=args.size, extent=args.extent,
                          interp=args.interp)
    else:
        img = fbp.fbp_parallel(sino, spec, shape=args.size, extent=args.extent,
                               interp=args.interp)
    _write_image(img, args.output, window=args.window)
    _image_figure(img, args, f"fbp ({spec.name})")
    return EXIT_OK


def cmd_art(args) -> int:
    sino = io.read_sinogram(args.input)
    if not isinstance(sino, Sinogram):
        raise ValueError("algebraic reconstruction expects parallel-beam data")
    g = sino.geometry
    extent = args.extent if args.extent is not None else g.r
    A = algebraic.build_radon_matrix(args.size, extent, g.lines())
    y = sino.values.T.ravel()  # angle-major, matching the line order
    if args.nonneg:
        c, report = algebraic.kaczmarz_nonneg(
            A, y, delta=args.delta, max_sweeps=args.max_sweeps,
            row_order=args.row_order, seed=args.seed)
    else:
        c, report = algebraic.kaczmarz(
            A, y, omega=args.omega, delta=args.delta, max_sweeps=args.max_sweeps,
            row_order=args.row_order, seed=args.seed)
    img = Image(values=c.reshape(args.size, args.size, order="F"), extent=extent)
    _write_image(img, args.output, window=args.window)
    _image_figure(img, args, "art" if args.nonneg else "kaczmarz")
    if args.dump_matrix is not None:
        A.dump(args.dump_matrix)
    return _report_solve("kaczmarz", report)


def cmd_tikhonov(args) -> int:
    sino = io.read_sinogram(args.input)
    if not isinstance(sino, Sinogram):
        raise ValueError("algebraic reconstruction expects parallel-beam data")
    g = sino.geometry
    extent = args.extent if args.extent is not None else g.r
    A = algebraic.build_radon_matrix(args.size, extent, g.lines())
    y = sino.values.T.ravel()
    c, report = algebraic.tikhonov_cg(
        A, y, gamma=args.gamma, cg_tol=args.cg_tol, cg_max_iter=args.cg_max_iter)
    img = Image(values=c.reshape(args.size, args.size, order="F"), extent=extent)
    _write_image(img, args.output, window=args.window)
    _image_figure(img, args, f"tikhonov (gamma={args.gamma:g})")
    if args.dump_matrix is not None:
        A.dump(args.dump_matrix)
    return _report_solve("tikhonov", report)


def cmd_dfr(args) -> int:
    sino = io.read_sinogram(args.input)
    if not isinstance(sino, Sinogram):
        raise ValueError("direct Fourier reconstruction expects parallel-beam data")
    img, imag_ratio = spectral.direct_fourier_reconstruct(
        sino, shape=args.size, extent=args.extent)
    print(f"dfr: imaginary/real energy ratio {imag_ratio:.6g}")
    _write_image(img, args.output, window=args.window)
    _image_figure(img, args, "direct Fourier")
    return EXIT_OK


def cmd_laminogram(args) -> int:
    sino = io.read_sinogram(args.input)
    if not isinstance(sino, Sinogram):
        raise ValueError("laminogram filtering expects parallel-beam data")
    img = spectral.laminogram_reconstruct(
        sino, shape=args.size, extent=args.extent, pad_factor=args.pad)
    _write_image(img, args.output, window=args.window)
    _image_figure(img, args, "filtered laminogram")
    return EXIT_OK


def cmd_noise(args) -> int:
    sino = io.read_sinogram(args.input)
    noisy, realized = noise.add_noise(sino, args.level, args.seed)
    print(f"noise: realized ratio {realized:.6g}")
    _write_sinogram(noisy, args.output)
    _sinogram_figure(noisy, args, f"noisy sinogram (level {args.level:g})")
    return EXIT_OK


def cmd_compare(args) -> int:
    a = io.read_image_raw(args.a)
    b = io.read_image_raw(args.b)
    m = metrics.error_metrics(a, b)
    lines = [f"{key},{value!r}" for key, value in m.items()]
    text = "\n".join(lines)
    print(text)
    if args.output is not None:
        args.output.write_text("metric,value\n" + text + "\n", encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tomokit", description="2D computed tomography toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="rasterize a phantom to an image file")
    _add_phantom_args(p)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--window", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--output", type=Path, required=True)
    _add_figure_arg(p)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("sinogram", help="generate sinogram data from a phantom")
    _add_phantom_args(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--analytic", action="store_true", default=True,
                      help="exact line integrals (default)")
    mode.add_argument("--discrete", action="store_true", default=False,
                      help="forward projection of the rasterized phantom")
    p.add_argument("--fan", action="store_true", help="fan beam geometry")
    p.add_argument("--bandwidth", default="50pi",
                   help="parallel-beam bandwidth L, a multiple of pi (e.g. 50pi)")
    p.add_argument("--radius", type=int, default=1, help="support radius r")
    p.add_argument("--size", type=int, default=256,
                   help="raster size for --discrete")
    p.add_argument("--source-radius", type=float, default=3.0, help="fan source radius D")
    p.add_argument("--fan-angle", default="pi/3", help="fan opening angle phi")
    p.add_argument("--sources", type=int, default=270, help="fan source positions p")
    p.add_argument("--rays", type=int, default=90, help="fan half ray count q")
    p.add_argument("--output", type=Path, required=True)
    _add_figure_arg(p)
    p.set_defaults(func=cmd_sinogram)

    p = sub.add_parser("fbp", help="filtered back projection reconstruction")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--fan", action="store_true", help="expect fan-beam input")
    p.add_argument("--filter", default="ram-lak",
                   help="ram-lak | shepp-logan | cosine | hamming:<beta> | gaussian:<beta>")
    p.add_argument("--bandwidth", default=None,
                   help="filter bandwidth L (default: pi/d of the input)")
    p.add_argument("--interp", default="linear", choices=fbp.INTERP_METHODS)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--window", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--output", type=Path, required=True)
    _add_figure_arg(p)
    p.set_defaults(func=cmd_fbp)

    p = sub.add_parser("art", help="Kaczmarz / ART reconstruction")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--nonneg", action="store_true", help="non-negativity constraint")
    p.add_argument("--omega", type=float, default=1.0, help="relaxation in (0, 2)")
    p.add_argument("--delta", type=float, default=1e-6, help="stopping tolerance")
    p.add_argument("--max-sweeps", type=int, default=None)
    p.add_argument("--row-order", choices=["random"], default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump-matrix", type=Path, default=None,
                   help="write the Radon matrix as 'row col value' triples")
    p.add_argument("--window", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--output", type=Path, required=True)
    _add_figure_arg(p)
    p.set_defaults(func=cmd_art)

    p = sub.add_parser("tikhonov", help="regularized least squares reconstruction")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--gamma", type=float, default=0.05, help="regularization weight")
    p.add_argument("--cg-tol", type=float, default=1e-10)
    p.add_argument("--cg-max-iter", type=int, default=None)
    p.add_argument("--dump-matrix", type=Path, default=None)
    p.add_argument("--window", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--output", type=Path, required=True)
    _add_figure_arg(p)
    p.set_defaults(func=cmd_tikhonov)

    p = sub.add_parser("dfr", help="direct Fourier reconstruction")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--window", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--output", type=Path, required=True)
    _add_figure_arg(p)
    p.set_defaults(func=cmd_dfr)

    p = sub.add_parser("laminogram", help="back project, then ramp-filter in 2D")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--pad", type=int, default=None,
                   help="back projection grid enlargement factor")
    p.add_argument("--window", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--output", type=Path, required=True)
    _add_figure_arg(p)
    p.set_defaults(func=cmd_laminogram)

    p = sub.add_parser("noise", help="add seeded white Gaussian noise to a sinogram")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--level", type=float, required=True,
                   help="relative noise energy, e.g. 0.1 for 10%%")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path, required=True)
    _add_figure_arg(p)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("compare", help="error metrics between two .img images")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path, help="reference image")
    p.add_argument("--output", type=Path, default=None, help="also write metrics as CSV")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"tomokit {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
