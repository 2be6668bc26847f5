"""noiselab command line.

Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 numeric or
domain error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench
from .filters import BORDERS, FILTER_KINDS, FilterSpec, apply_filter
from .image_core import PnmFormatError, histogram, read_gray, write_pgm
from .iris import noise_hd_sweep, sweep_csv
from .metrics import format_float, quality_report
from .noise import NOISE_KINDS, apply_noise, make_noise_spec
from .synthetic import synthetic_eye

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_noise_args(p):
    p.add_argument("--noise", required=True, choices=NOISE_KINDS)
    p.add_argument("--density", type=float)
    p.add_argument("--salt-ratio", type=float)
    p.add_argument("--mean", type=float)
    p.add_argument("--variance", type=float)
    p.add_argument("--low", type=float)
    p.add_argument("--high", type=float)
    p.add_argument("--shape", type=int)
    p.add_argument("--scale", type=float)
    p.add_argument("--normalized", action="store_true",
                   help="means/bounds in [0,1] units (x255), variances x255^2")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="noiselab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("add-noise", help="corrupt an image with seeded noise")
    p.add_argument("--in", dest="src", required=True)
    p.add_argument("--out", required=True)
    _add_noise_args(p)

    p = sub.add_parser("filter", help="denoise an image")
    p.add_argument("--in", dest="src", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--filter", required=True, choices=FILTER_KINDS)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--noise-var", type=float)
    p.add_argument("--border", choices=BORDERS, default="replicate")

    p = sub.add_parser("metrics", help="print ref,test,mse,psnr_db,ad,md[,si]")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--si", type=int, metavar="W", help="append the speckle index of TEST with window W")
    p.add_argument("--header", action="store_true")

    p = sub.add_parser("hist", help="256-bin histogram as CSV")
    p.add_argument("--in", dest="src", required=True)
    p.add_argument("--out")

    p = sub.add_parser("iris-hd", help="hamming distance vs noise level sweep")
    p.add_argument("--in", dest="src", required=True)
    p.add_argument("--grid", default="16x16", help="RxC block grid")
    p.add_argument("--noise", required=True, choices=NOISE_KINDS)
    p.add_argument("--levels", required=True, help="comma-separated increasing levels")
    p.add_argument("--seeds", type=int, default=20, help="number of seeds")
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--out")

    p = sub.add_parser("bench", help="run a benchmark config")
    p.add_argument("config")
    p.add_argument("--out", help="CSV output (overrides [run] output)")
    p.add_argument("--markdown", help="markdown output (overrides [run] markdown)")
    p.add_argument("--timings", action="store_true", help="record per-stage wall times")
    p.add_argument("--threads", type=int)

    p = sub.add_parser("synth-eye", help="write the synthetic eye test image")
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=320)
    p.add_argument("--height", type=int, default=280)
    p.add_argument("--variant", type=int, default=0)
    return parser


def _write_text(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _cmd_add_noise(a):
    img = read_gray(a.src)
    spec = make_noise_spec(a.noise, density=a.density, salt_ratio=a.salt_ratio, mean=a.mean,
                           variance=a.variance, low=a.low, high=a.high, shape=a.shape,
                           scale=a.scale, normalized=a.normalized)
    write_pgm(a.out, apply_noise(img, spec, a.seed))


def _cmd_filter(a):
    spec = FilterSpec(a.filter, a.window, a.sigma, a.noise_var, a.border)
    write_pgm(a.out, apply_filter(read_gray(a.src), spec))


def _cmd_metrics(a):
    rep = quality_report(read_gray(a.ref), read_gray(a.test), a.si)
    if a.header:
        print("ref,test,mse,psnr_db,ad,md" + (",si" if a.si else ""))
    print(",".join([a.ref, a.test, *rep.csv_fields()]))


def _cmd_hist(a):
    _write_text(a.out, histogram(read_gray(a.src)).to_csv())


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        r, c = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"--grid expects RxC, got {text!r}") from None
    return r, c


def _cmd_iris_hd(a):
    grid = _parse_grid(a.grid)
    try:
        levels = [float(t) for t in a.levels.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--levels expects a comma-separated list, got {a.levels!r}") from None
    if a.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    if any(b < x for x, b in zip(levels, levels[1:])):
        raise UsageError("--levels must be increasing")
    rows = noise_hd_sweep(read_gray(a.src), a.noise, levels, range(a.seed, a.seed + a.seeds), grid)
    _write_text(a.out, sweep_csv(rows))


def _cmd_bench(a):
    path = Path(a.config)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise bench.BenchIOError(f"cannot read config: {exc}") from exc
    cfg = bench.parse_config(text, base_dir=path.parent)
    rows = bench.run_benchmark(cfg, a.threads)
    failed = [r for r in rows if r.error]
    for r in failed:
        print(f"noiselab: {r.image}/{r.noise}/{r.filter}: {r.error}", file=sys.stderr)
    csv_bytes = bench.emit_csv(rows, timings=a.timings or cfg.timings)
    out = a.out or cfg.output
    if out is None or str(out) == "-":
        sys.stdout.write(csv_bytes.decode("utf-8"))
    else:
        Path(out).write_bytes(csv_bytes)
    md = a.markdown or cfg.markdown
    if md is not None:
        Path(md).write_bytes(bench.emit_markdown(rows))
    return EXIT_DOMAIN if failed else EXIT_OK


def _cmd_synth_eye(a):
    write_pgm(a.out, synthetic_eye(a.width, a.height, a.variant))


_COMMANDS = {
    "add-noise": _cmd_add_noise,
    "filter": _cmd_filter,
    "metrics": _cmd_metrics,
    "hist": _cmd_hist,
    "iris-hd": _cmd_iris_hd,
    "bench": _cmd_bench,
    "synth-eye": _cmd_synth_eye,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args) or EXIT_OK
    except UsageError as exc:
        print(f"noiselab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except bench.ConfigError as exc:
        print(f"noiselab: config error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN if exc.domain else EXIT_IO
    except (OSError, PnmFormatError) as exc:
        print(f"noiselab: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError) as exc:
        print(f"noiselab: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
