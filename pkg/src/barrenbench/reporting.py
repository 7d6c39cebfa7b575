"""Run manifests, CSV rows and SVG plots written by the command-line tool."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

from . import __version__
from .config import ExperimentConfig

__all__ = [
    "CSV_HEADER",
    "ORACLE_HEADER",
    "RunManifest",
    "config_bytes",
    "config_hash",
    "csv_row",
    "append_rows",
    "write_json",
    "svg_plot",
]

CSV_HEADER = ["run_id", "n", "d", "D", "loss", "mode", "delta", "mean_grad", "var_grad",
              "std_error", "samples", "converged", "bound"]
ORACLE_HEADER = ["run_id", "n", "d", "D", "loss", "delta", "exact_mean", "exact_var",
                 "mc_var", "mc_std_error", "z_score"]


def config_bytes(cfg: ExperimentConfig) -> bytes:
    """Canonical serialization: sorted keys, compact separators.

    ``output_dir`` is left out since it does not affect results.
    """
    data = cfg.to_dict()
    data.pop("output_dir")
    return json.dumps(data, sort_keys=True, separators=(",", ":")).encode()


def config_hash(cfg: ExperimentConfig) -> str:
    """Git blob hash of the canonical config bytes."""
    data = config_bytes(cfg)
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    config: dict
    config_hash: str
    outputs: list
    tool_version: str = __version__
    started: str = field(default_factory=_now)

    @classmethod
    def for_config(cls, command: str, cfg: ExperimentConfig, outputs) -> "RunManifest":
        return cls(command, cfg.to_dict(), config_hash(cfg), [str(p) for p in outputs])

    def write(self, path):
        write_json(path, asdict(self))


def write_json(path, obj):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_row(cfg: ExperimentConfig, report, bound=None) -> list[str]:
    return [_fmt(v) for v in (
        config_hash(cfg)[:12], cfg.n, cfg.d, cfg.D, cfg.loss, cfg.mode, cfg.delta,
        report.mean_grad, report.var_grad, report.std_error, report.samples_used,
        report.converged, bound)]


def append_rows(path, header, rows):
    """Append rows, writing the header first when the file is new."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if not isinstance(v, str) else v for v in row])


# ---------------------------------------------------------------------------
_W, _H = 640, 420
_ML, _MR, _MT, _MB = 80, 30, 40, 60


def svg_plot(xs, ys, *, xlabel: str, ylabel: str, title: str = "",
             bound=None, bound_label: str = "bound") -> str:
    """Single-panel SVG with a log-scale y axis.

    ``bound`` is an optional sequence of y values drawn as a dashed line.
    Output depends only on the inputs.
    """
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    series = [y for y in ys if y > 0]
    if bound is not None:
        series += [float(b) for b in bound if b > 0]
    if not series:
        series = [1.0]
    lo = math.floor(math.log10(min(series)))
    hi = math.ceil(math.log10(max(series)))
    if hi == lo:
        hi = lo + 1
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def px(x):
        return _ML + (x - x0) / (x1 - x0) * pw

    def py(y):
        return _MT + (hi - math.log10(y)) / (hi - lo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
           f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for e in range(lo, hi + 1):
        y = py(10.0 ** e)
        out.append(f'<line x1="{_ML}" y1="{y:.2f}" x2="{_ML + pw}" y2="{y:.2f}" '
                   f'stroke="#dddddd"/>')
        out.append(f'<text x="{_ML - 8}" y="{y + 4:.2f}" text-anchor="end">1e{e}</text>')
    for x in sorted(set(xs)):
        out.append(f'<text x="{px(x):.2f}" y="{_MT + ph + 18}" text-anchor="middle">'
                   f'{x:g}</text>')
    out.append(f'<text x="{_ML + pw / 2:.2f}" y="{_H - 15}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="20" y="{_MT + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {_MT + ph / 2:.2f})">{ylabel}</text>')
    if title:
        out.append(f'<text x="{_W / 2:.2f}" y="22" text-anchor="middle">{title}</text>')
    if bound is not None:
        pts = " ".join(f"{px(x):.2f},{py(float(b)):.2f}" for x, b in zip(xs, bound) if b > 0)
        out.append(f'<polyline points="{pts}" fill="none" stroke="#c0392b" '
                   f'stroke-dasharray="6,4"/>')
        out.append(f'<text x="{_ML + pw - 4}" y="{_MT + 16}" text-anchor="end" '
                   f'fill="#c0392b">{bound_label}</text>')
    pts = [(px(x), py(y)) for x, y in zip(xs, ys) if y > 0]
    out.append('<polyline points="' + " ".join(f"{a:.2f},{b:.2f}" for a, b in pts)
               + '" fill="none" stroke="#1f4e9c"/>')
    for a, b in pts:
        out.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="3" fill="#1f4e9c"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
