"""Plot CLI: ``isacplot curves|rdm --in <csv> --out <img> [--spec <file>]``.

The optional spec file uses the same flat ``key = value`` style as the
simulator configs and may set: x_column, y_columns (space separated),
log_y, sample_period, speed_per_hz, title.
"""

import argparse
import sys

from .figures import FigureSpec, plot_curves, plot_rdm
from .io import SchemaError


def _parse_spec_file(path):
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    kwargs = {}
    if "x_column" in out:
        kwargs["x_column"] = out["x_column"]
    if "y_columns" in out:
        kwargs["y_columns"] = tuple(out["y_columns"].split())
    if "log_y" in out:
        kwargs["log_y"] = out["log_y"].lower() in ("1", "true", "yes", "on")
    if "sample_period" in out:
        kwargs["sample_period"] = float(out["sample_period"])
    if "speed_per_hz" in out:
        kwargs["speed_per_hz"] = float(out["speed_per_hz"])
    if "title" in out:
        kwargs["title"] = out["title"]
    return kwargs


def build_parser():
    parser = argparse.ArgumentParser(prog="isacplot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("curves", "rdm"):
        p = sub.add_parser(name)
        p.add_argument("--in", dest="inputs", action="append", required=True, help="input CSV (repeatable for curves)")
        p.add_argument("--out", dest="output", required=True, help="output image path")
        p.add_argument("--spec", help="figure spec file (flat key = value)")
        if name == "curves":
            p.add_argument("--metrics", nargs="+", help="metric columns to draw")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    kwargs = _parse_spec_file(args.spec) if args.spec else {}
    if getattr(args, "metrics", None):
        kwargs["y_columns"] = tuple(args.metrics)
    try:
        spec = FigureSpec(
            inputs=tuple(args.inputs),
            output_image=args.output,
            kind="curve" if args.command == "curves" else "heatmap",
            **kwargs,
        )
        if args.command == "curves":
            plot_curves(spec)
        else:
            plot_rdm(spec)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
