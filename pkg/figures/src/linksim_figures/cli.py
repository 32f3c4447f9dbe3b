"""Command-line entry point: figures --summary ... --metric NAME --out PATH."""

from __future__ import annotations

import argparse
import sys

from .render import METRICS, FigureRequest, render_metric_figure, save_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render bias/power/MSE curves or estimate histograms "
                    "from simulation result tables",
    )
    parser.add_argument("--summary", metavar="PATH", help="summary.csv (bias/power/mse)")
    parser.add_argument("--replications", metavar="PATH",
                        help="replications.csv (histograms)")
    parser.add_argument("--metric", required=True, choices=METRICS)
    parser.add_argument("--out", required=True, metavar="PATH",
                        help="output image; vector formats (svg/pdf) by default")
    parser.add_argument("--format", metavar="FMT",
                        help="image format override (default: from --out suffix)")
    parser.add_argument("--quantile", type=float, default=0.995,
                        help="right-tail clip quantile for histograms (default 0.995)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        request = FigureRequest(
            metric=args.metric,
            out_path=args.out,
            summary_path=args.summary,
            replications_path=args.replications,
            image_format=args.format,
            histogram_quantile=args.quantile,
        )
        path = save_figure(render_metric_figure(request), request)
    except (ValueError, FileNotFoundError) as exc:
        print(f"figures: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
