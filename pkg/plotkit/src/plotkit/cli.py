"""Command line: ``plotkit <kind> --in <csv> --out <img> [--x param] [--cutoff N]``."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .figures import KINDS, FigureError, FigureSpec, render


@click.command()
@click.argument("kind", type=click.Choice(KINDS))
@click.option("--in", "in_path", required=True, help="Input CSV.")
@click.option("--out", "out_path", required=True, help="Output image (png/svg/pdf).")
@click.option("--x", "x_param", default=None,
              help="Parameter name for param-curve / switchoff-bars.")
@click.option("--cutoff", type=float, default=None,
              help="Drop production-logistics costs above this (pareto-scatter), "
                   "or days shown (price-profile).")
@click.option("--front", "front_path", default=None,
              help="Pareto front CSV overlaid on the scatter.")
def main(kind: str, in_path: str, out_path: str, x_param: str | None,
         cutoff: float | None, front_path: str | None) -> None:
    """Render one figure from sweep output CSVs."""
    spec = FigureSpec(kind=kind, input_csv=Path(in_path), output_image=Path(out_path),
                      x=x_param, cutoff=cutoff,
                      front_csv=Path(front_path) if front_path else None)
    try:
        series = render(spec)
    except (FigureError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    points = max(len(v) for v in series.values())
    click.echo(f"wrote {out_path} ({points} points)", err=True)


if __name__ == "__main__":
    main()
