"""Batch benchmark: images x noises x filters -> quality reports.

Config files are INI-like::

    # comment
    [images]
    eye = data/eye.pgm          # label = path (relative to the config file)

    [noise.sp]
    kind = salt-pepper
    density = 0.05

    [filter.median3]
    kind = median
    window = 3

    [run]
    seed = 0
    reference = both            # original | noisy | both

A small hand parser is used instead of :mod:`configparser` because errors
must carry line numbers and keys are validated per noise/filter kind.
"""

from __future__ import annotations

import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .filters import FILTER_KINDS, BORDERS, FilterSpec, apply_filter
from .image_core import GrayImage, PnmFormatError, read_gray
from .metrics import QualityReport, format_float, quality_report
from .noise import NOISE_KINDS, NoiseSpec, apply_noise, make_noise_spec

REFERENCES = ("original", "noisy", "both")

CSV_HEADER = (
    "image,noise,filter,"
    "mse_vs_orig,psnr_vs_orig,ad_vs_orig,md_vs_orig,"
    "mse_vs_noisy,psnr_vs_noisy,ad_vs_noisy,md_vs_noisy,"
    "ms_noise,ms_filter,ms_metrics"
)

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def cell_seed(seed: int, image_label: str, noise_label: str) -> int:
    """Per-(image, noise) seed: global seed XOR FNV-1a of ``image \\x1f noise``."""
    return seed ^ fnv1a64(f"{image_label}\x1f{noise_label}".encode("utf-8"))


class ConfigError(ValueError):
    """Invalid benchmark config. ``domain`` marks out-of-range values."""

    def __init__(self, message: str, line: int | None = None, domain: bool = False):
        self.line = line
        self.domain = domain
        super().__init__(f"line {line}: {message}" if line is not None else message)


class BenchIOError(OSError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    images: list[tuple[str, Path]]
    noises: list[tuple[str, NoiseSpec]]
    filters: list[tuple[str, FilterSpec]]
    seed: int = 0
    reference: str = "both"
    output: Path | None = None
    markdown: Path | None = None
    timings: bool = False


@dataclass
class BenchRow:
    image: str
    noise: str
    filter: str
    vs_original: QualityReport | None = None
    vs_noisy: QualityReport | None = None
    ms_noise: float = 0.0
    ms_filter: float = 0.0
    ms_metrics: float = 0.0
    error: str | None = None


# --- config parsing ------------------------------------------------------------

_NOISE_KEYS = {
    "salt-pepper": {"density", "salt_ratio"},
    "gaussian": {"mean", "variance"},
    "uniform": {"low", "high"},
    "speckle": {"variance"},
    "gamma-speckle": {"shape", "scale"},
}
_FILTER_KEYS = {
    "mean": {"window", "border"},
    "median": {"window", "border"},
    "gaussian": {"window", "sigma", "border"},
    "wiener": {"window", "noise_var", "border"},
}
_RUN_KEYS = {"seed", "reference", "output", "markdown", "timings", "normalized"}


def _number(key, raw, line, kind=float):
    try:
        v = kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: invalid number {raw!r}", line) from None
    if kind is float and not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite, got {raw!r}", line, domain=True)
    return v


def _check(cond: bool, key: str, msg: str, line: int):
    if not cond:
        raise ConfigError(f"{key}: {msg}", line, domain=True)


def _bool(key, raw, line):
    low = raw.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}", line)


def _sections(text: str):
    """Yield (name, header_line, {key: (value, line)}) in file order."""
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header {raw.strip()!r}", lineno)
            current = (line[1:-1].strip(), lineno, {})
            sections.append(current)
            continue
        if current is None:
            raise ConfigError("key outside of any section", lineno)
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", lineno)
        if key in current[2]:
            raise ConfigError(f"duplicate key {key!r} in [{current[0]}]", lineno)
        current[2][key] = (value, lineno)
    return sections


def _parse_noise(label, entries, header_line, normalized):
    if "kind" not in entries:
        raise ConfigError(f"[noise.{label}] needs a kind", header_line)
    kind, kline = entries["kind"]
    if kind not in _NOISE_KEYS:
        raise ConfigError(f"kind: unknown noise kind {kind!r} (choose from {', '.join(NOISE_KINDS)})", kline)
    params = {}
    for key, (raw, line) in entries.items():
        if key == "kind":
            continue
        if key not in _NOISE_KEYS[kind]:
            raise ConfigError(f"unknown key {key!r} for {kind} noise", line)
        if key == "shape":
            v = _number(key, raw, line, int)
            _check(v >= 1, key, f"must be an integer >= 1, got {v}", line)
        else:
            v = _number(key, raw, line)
        if key in ("density", "salt_ratio"):
            _check(0 <= v <= 1, key, f"must lie in [0, 1], got {v}", line)
        elif key == "variance":
            _check(v >= 0, key, f"must be non-negative, got {v}", line)
        elif key == "scale":
            _check(v > 0, key, f"must be positive, got {v}", line)
        params[key] = v
    if kind == "uniform" and "low" in params and "high" in params:
        _check(params["low"] <= params["high"], "high", "must be >= low", entries["high"][1])
    try:
        return make_noise_spec(kind, normalized=normalized, **params)
    except ValueError as exc:
        raise ConfigError(str(exc), header_line, domain=True) from None


def _parse_filter(label, entries, header_line):
    if "kind" not in entries:
        raise ConfigError(f"[filter.{label}] needs a kind", header_line)
    kind, kline = entries["kind"]
    if kind not in _FILTER_KEYS:
        raise ConfigError(f"kind: unknown filter kind {kind!r} (choose from {', '.join(FILTER_KINDS)})", kline)
    args = {"kind": kind}
    for key, (raw, line) in entries.items():
        if key == "kind":
            continue
        if key not in _FILTER_KEYS[kind]:
            raise ConfigError(f"unknown key {key!r} for {kind} filter", line)
        if key == "border":
            if raw not in BORDERS:
                raise ConfigError(f"border: expected one of {', '.join(BORDERS)}, got {raw!r}", line)
            args["border"] = raw
        elif key == "window":
            v = _number(key, raw, line, int)
            _check(v >= 1 and v % 2 == 1, key, f"must be an odd integer >= 1, got {v}", line)
            args["window"] = v
        elif key == "sigma":
            v = _number(key, raw, line)
            _check(v > 0, key, f"must be positive, got {v}", line)
            args["sigma"] = v
        else:
            v = _number(key, raw, line)
            _check(v >= 0, key, f"must be non-negative, got {v}", line)
            args["noise_variance"] = v
    return FilterSpec(**args)


def parse_config(text: str, base_dir: str | os.PathLike | None = None) -> BenchConfig:
    """Parse and validate benchmark config text.

    Relative image and output paths resolve against ``base_dir`` when given.
    """
    base = Path(base_dir) if base_dir is not None else None

    def resolve(p: str) -> Path:
        path = Path(p)
        return base / path if base is not None and not path.is_absolute() else path

    images, noises, filters = [], [], []
    noise_sections = []
    run = {}
    seen = {}
    saw_images = False
    for name, line, entries in _sections(text):
        if name == "images":
            if saw_images:
                raise ConfigError("duplicate [images] section", line)
            saw_images = True
            for label, (path, kline) in entries.items():
                if not path:
                    raise ConfigError(f"image {label!r} has an empty path", kline)
                images.append((label, resolve(path)))
        elif name == "run":
            if run:
                raise ConfigError("duplicate [run] section", line)
            for key, (raw, kline) in entries.items():
                if key not in _RUN_KEYS:
                    raise ConfigError(f"unknown key {key!r} in [run]", kline)
            run = entries
        elif name.startswith(("noise.", "filter.")):
            group, label = name.split(".", 1)
            if not label:
                raise ConfigError(f"[{group}.] needs a label", line)
            if (group, label) in seen:
                raise ConfigError(
                    f"duplicate {group} label {label!r} (first defined on line {seen[group, label]})", line
                )
            seen[group, label] = line
            if group == "noise":
                noise_sections.append((label, entries, line))
            else:
                filters.append((label, _parse_filter(label, entries, line)))
        else:
            raise ConfigError(f"unknown section [{name}]", line)

    normalized = _bool("normalized", *run["normalized"]) if "normalized" in run else False
    noises = [(label, _parse_noise(label, e, line, normalized)) for label, e, line in noise_sections]

    if not images:
        raise ConfigError("missing section [images] (or it lists no images)")
    if not noises:
        raise ConfigError("missing [noise.<label>] section")
    if not filters:
        raise ConfigError("missing [filter.<label>] section")

    seed = 0
    if "seed" in run:
        seed = _number("seed", *run["seed"], kind=int)
        _check(0 <= seed < 2**64, "seed", "must be a 64-bit unsigned integer", run["seed"][1])
    reference = "both"
    if "reference" in run:
        reference, rline = run["reference"]
        if reference not in REFERENCES:
            raise ConfigError(f"reference: expected one of {', '.join(REFERENCES)}, got {reference!r}", rline)
    output = resolve(run["output"][0]) if "output" in run else None
    markdown = resolve(run["markdown"][0]) if "markdown" in run else None
    timings = _bool("timings", *run["timings"]) if "timings" in run else False
    return BenchConfig(images, noises, filters, seed, reference, output, markdown, timings)


# --- running ---------------------------------------------------------------------

def thread_count() -> int:
    raw = os.environ.get("NOISELAB_THREADS", "").strip()
    n = int(raw) if raw else 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000.0


def _run_cell(cfg: BenchConfig, image_label: str, clean: GrayImage, noise_label: str,
              noise: NoiseSpec) -> list[BenchRow]:
    t0 = time.perf_counter()
    noisy = apply_noise(clean, noise, cell_seed(cfg.seed, image_label, noise_label))
    ms_noise = _ms(t0)
    rows = []
    for filter_label, spec in cfg.filters:
        row = BenchRow(image_label, noise_label, filter_label, ms_noise=ms_noise)
        try:
            t0 = time.perf_counter()
            out = apply_filter(noisy, spec)
            row.ms_filter = _ms(t0)
            t0 = time.perf_counter()
            if cfg.reference in ("original", "both"):
                row.vs_original = quality_report(clean, out)
            if cfg.reference in ("noisy", "both"):
                row.vs_noisy = quality_report(noisy, out)
            row.ms_metrics = _ms(t0)
        except (ValueError, ArithmeticError) as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


def run_benchmark(cfg: BenchConfig, threads: int | None = None) -> list[BenchRow]:
    """Evaluate the full images x noises x filters grid in cross-product order."""
    loaded = []
    for label, path in cfg.images:
        try:
            loaded.append((label, read_gray(path)))
        except OSError as exc:
            raise BenchIOError(f"cannot read image {label!r}: {exc}") from exc
        except PnmFormatError as exc:
            raise BenchIOError(f"bad image {label!r} ({path}): {exc}") from exc
    cells = [(il, img, nl, ns) for il, img in loaded for nl, ns in cfg.noises]
    threads = thread_count() if threads is None else threads
    if threads <= 1:
        chunks = [_run_cell(cfg, *c) for c in cells]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda c: _run_cell(cfg, *c), cells))
    return [row for chunk in chunks for row in chunk]


# --- reports ---------------------------------------------------------------------

def _report_fields(rep: QualityReport | None) -> list[str]:
    return rep.csv_fields()[:4] if rep is not None else ["", "", "", ""]


def emit_csv(rows: list[BenchRow], timings: bool = True) -> bytes:
    """CSV report; timing columns are left empty when ``timings`` is False."""
    if not rows:
        raise ValueError("no rows to report")
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in rows:
        fields = [r.image, r.noise, r.filter, *_report_fields(r.vs_original), *_report_fields(r.vs_noisy)]
        if timings:
            fields += [format_float(r.ms_noise), format_float(r.ms_filter), format_float(r.ms_metrics)]
        else:
            fields += ["", "", ""]
        buf.write(",".join(fields) + "\n")
    return buf.getvalue().encode("utf-8")


def _cell(metric: str, rep: QualityReport | None) -> str:
    if rep is None:
        return "error"
    value = getattr(rep, metric)
    if metric == "md":
        return str(value)
    return "inf" if math.isinf(value) else f"{value:.2f}"


def emit_markdown(rows: list[BenchRow]) -> bytes:
    """One filters x noises pivot table per metric, per image and reference."""
    if not rows:
        raise ValueError("no rows to report")
    images = list(dict.fromkeys(r.image for r in rows))
    noises = list(dict.fromkeys(r.noise for r in rows))
    filters = list(dict.fromkeys(r.filter for r in rows))
    refs = [(attr, name) for attr, name in (("vs_original", "original"), ("vs_noisy", "noisy"))
            if any(getattr(r, attr) is not None for r in rows)]
    index = {(r.image, r.noise, r.filter): r for r in rows}
    out = []
    for image in images:
        out.append(f"## {image}\n")
        for attr, ref_name in refs:
            for metric, title in (("mse", "MSE"), ("psnr", "PSNR"), ("ad", "AD"), ("md", "MD")):
                out.append(f"### {title} (vs {ref_name})\n")
                out.append("| Filter | " + " | ".join(noises) + " |")
                out.append("|---" * (len(noises) + 1) + "|")
                for flt in filters:
                    cells = []
                    for noise in noises:
                        row = index.get((image, noise, flt))
                        cells.append("" if row is None else _cell(metric, getattr(row, attr)))
                    out.append(f"| {flt} | " + " | ".join(cells) + " |")
                out.append("")
    return ("\n".join(out) + "\n").encode("utf-8")


DEFAULT_CONFIG = """\
# Default levels; the source tables do not publish their noise parameters.
[noise.salt-pepper]
kind = salt-pepper
density = 0.05

[noise.gaussian]
kind = gaussian
mean = 0
variance = 100

[noise.uniform]
kind = uniform
low = -20
high = 20

[noise.speckle]
kind = speckle
variance = 0.04

[filter.mean]
kind = mean
window = 3

[filter.median]
kind = median
window = 3

[filter.gaussian]
kind = gaussian
window = 3
sigma = 0.5

[filter.wiener]
kind = wiener
window = 3
"""
