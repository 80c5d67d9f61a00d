import csv
import logging
from pathlib import Path
from typing import Iterable, List, Sequence

import click
import numpy as np

from commands.common import PricingContext, pricing_command
from models.scale import ScaleEvaluator
from pricing.cds import payoff_G_extended
from pricing.stopping import (
    boundary_f,
    f_r_of_b,
    solve_h_star,
    suboptimal_levels,
    value_function_extended,
)
from schemas.config import RunConfig
from schemas.model import JumpDiffusionModel
from verification.generator import generator_values_G, interior_grid

logger = logging.getLogger(__name__)

SCALE_RANGE = 5.0
F_R_RANGE = 2.0


def _write(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(value)) for value in row])
    logger.info("wrote %s", path)


def _threshold_value(ev: ScaleEvaluator, switch, b: float, h: float, ys: np.ndarray) -> np.ndarray:
    # J_h(y): stop at once below h, otherwise G_b(h) W(b - y) / W(b - h)
    stop = np.asarray(payoff_G_extended(ev, switch, b, np.minimum(ys, h)))
    wait = payoff_G_extended(ev, switch, b, h) * np.asarray(ev.W(b - ys)) / ev.W(b - h)
    return np.where(ys <= h, stop, wait)


def _offset_label(eps: float, sign: str) -> str:
    return f"J_{sign}_{eps:g}"


def figure_rows(config: RunConfig, sigma: float) -> dict:
    """
    Data of the four figures for one volatility.

    :return: Mapping from file name to (header, rows) without the sigma column.
    """
    model = JumpDiffusionModel.model_validate({**config.model.model_dump(), "sigma": sigma})
    terms, numerics = config.contract, config.numerics
    b, n = terms.b, numerics.grid_n
    ev = ScaleEvaluator(model, terms.r, root_tol=numerics.root_tol)
    switch = config.switch_terms()
    sol = solve_h_star(ev, switch, b, tol=numerics.boundary_tol)

    xs = np.linspace(0.0, SCALE_RANGE, n)
    scale = (["x", "W_phi", "ratio"], zip(xs, ev.W_esscher(xs), ev.ratio_W(xs)))

    bs = np.linspace(0.0, F_R_RANGE, n)
    hs = np.linspace(0.0, b, n)
    roots = (
        ["b", "f_r", "h", "f_h"],
        [(lb, f_r_of_b(ev, lb), h, boundary_f(ev, switch, b, h)) for lb, h in zip(bs, hs)],
    )

    ys = np.linspace(0.0, b, n)
    columns: List[np.ndarray] = [ys, np.asarray(payoff_G_extended(ev, switch, b, ys))]
    header = ["y", "G"]
    for eps in numerics.epsilons:
        for sign, level in (("minus", sol.h_star - eps), ("plus", sol.h_star + eps)):
            if level in suboptimal_levels(sol, [eps]):
                header.append(_offset_label(eps, sign))
                columns.append(_threshold_value(ev, switch, b, level, ys))
    header.append("V")
    columns.append(np.asarray(value_function_extended(sol, ev, switch, b, ys)))
    value = (header, zip(*columns))

    grid = interior_grid(b, n)
    generator = (["y", "generator"], zip(grid, generator_values_G(model, ev, switch, b, grid, numerics.generator)))

    return {
        "fig1_scale.csv": scale,
        "fig2_roots.csv": roots,
        "fig3_value.csv": value,
        "fig4_generator.csv": generator,
    }


@click.command("figures")
@click.option(
    "--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), required=True,
    help="Directory receiving the CSV files.",
)
@click.option(
    "--sigma", "sigmas", type=float, multiple=True, default=(0.0, 0.2), show_default=True,
    help="Volatilities to tabulate; repeat for several.",
)
@pricing_command
def figures(pricing: PricingContext, out_dir: Path, sigmas: Sequence[float]):
    """
    Write the data behind the scale-function, boundary-equation, value-function and
    generator figures as CSV files.

    Args:
        pricing (PricingContext): Validated configuration; sigma is replaced per curve.
        out_dir (Path): Output directory, created when missing.
        sigmas (Sequence[float]): Volatilities to tabulate.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    tables = {}
    for sigma in sigmas:
        for name, (header, rows) in figure_rows(pricing.config, sigma).items():
            entry = tables.setdefault(name, {"header": ["sigma", *header], "rows": []})
            if entry["header"] != ["sigma", *header]:
                raise click.UsageError(f"{name}: epsilon columns differ between sigma values")
            entry["rows"].extend([sigma, *row] for row in rows)

    for name, entry in tables.items():
        _write(out_dir / name, entry["header"], entry["rows"])
    click.echo(f"wrote {len(tables)} files to {out_dir}")
