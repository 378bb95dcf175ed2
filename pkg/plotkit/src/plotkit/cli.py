"""Command line: plotkit --in DIR --figure {fig2,fig3,fig4} --out PATH."""

import argparse
import sys

from .loader import BundleError, load_bundle
from .render import FIGURE_METRICS, render_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render experiment CSV artifacts into figure panels",
    )
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory of aggregate CSVs (plus manifest.json)")
    parser.add_argument("--figure", required=True, choices=sorted(FIGURE_METRICS))
    parser.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        bundles = load_bundle(args.in_dir)
        render_figure(bundles, FIGURE_METRICS[args.figure], args.out)
    except (BundleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out} ({len(bundles)} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
