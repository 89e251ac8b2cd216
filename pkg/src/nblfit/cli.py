"""Command-line interface.

Exit codes: 0 success, 2 parse/usage error, 3 non-convergence, 4 data
incompatible with the model (no moment-equation root).
"""

import importlib.resources
import json
import math
import sys

import click
import numpy as np

from . import compound as cp
from .data import ZAIRE_ENTRIES, zaire_dataset
from .distributions import NblParams, nbl_pmf_direct, nbl_pmf_recursive
from .errors import NoRoot, NonConvergence, ParseError
from .estimate import CountData, fit_em, fit_mle, fit_moments
from .gof import chi_square_test


def load_schema(name):
    ref = importlib.resources.files("nblfit.schemas").joinpath(f"{name}.schema.json")
    return json.loads(ref.read_text())


def parse_dataset_text(text):
    """Two columns (count, frequency), whitespace or comma separated."""
    entries = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ParseError(f"expected two columns, got {len(parts)}", line=lineno)
        try:
            count, freq = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer entry in {line!r}", line=lineno)
        if count in seen:
            raise ParseError(f"duplicate count {count}", line=lineno)
        seen.add(count)
        entries.append((count, freq))
    if not entries:
        raise ParseError("no data rows found")
    try:
        return CountData(sorted(entries))
    except Exception as exc:
        raise ParseError(str(exc))


def load_dataset(name_or_path):
    if name_or_path == "zaire":
        return zaire_dataset()
    try:
        with open(name_or_path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(str(exc))
    return parse_dataset_text(text)


def parse_severity(spec):
    """``exp:MEAN`` for exponential, else ``value:prob,value:prob,...``."""
    if spec.startswith("exp:"):
        return cp.exponential_severity(float(spec.split(":", 1)[1]))
    pmf = {}
    for item in spec.split(","):
        try:
            value, prob = item.split(":")
            pmf[int(value)] = float(prob)
        except ValueError:
            raise ParseError(f"bad severity item {item!r}")
    return cp.DiscreteSeverity(pmf)


def emit(payload, fmt, render_table):
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2))
    else:
        render_table(payload)


@click.group()
def cli():
    """Negative binomial-Lindley claim-count toolkit."""


@cli.command()
@click.option("--data", "dataset", required=True, help="Path or built-in name (zaire).")
@click.option(
    "--method",
    type=click.Choice(["moments", "mle", "em"]),
    default="mle",
    show_default=True,
)
@click.option("--tol", type=float, default=1e-10, show_default=True, help="EM tolerance.")
@click.option("--max-iter", type=int, default=2000, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table")
def fit(dataset, method, tol, max_iter, fmt):
    """Fit the NBL model (moment seed, then the requested method)."""
    if tol <= 0:
        raise click.BadParameter("tol must be positive")
    data = load_dataset(dataset)
    result = fit_moments(data)
    if method == "mle":
        result = fit_mle(data, result.params)
    elif method == "em":
        result = fit_em(data, result.params, tol=tol, max_iter=max_iter)
    if not result.converged:
        raise NonConvergence(f"{method} did not converge in {result.iterations} iterations")
    payload = {
        "method": result.method,
        "r": result.params.r,
        "theta": result.params.theta,
        "logLikelihood": result.log_likelihood,
        "iterations": result.iterations,
        "converged": result.converged,
        "stdErrors": list(result.std_errors) if result.std_errors else None,
    }

    def render(p):
        click.echo(f"method:          {p['method']}")
        click.echo(f"r:               {p['r']:.6f}")
        click.echo(f"theta:           {p['theta']:.6f}")
        if p["stdErrors"]:
            click.echo(
                f"std errors:      {p['stdErrors'][0]:.4f}  {p['stdErrors'][1]:.4f}"
            )
        click.echo(f"log-likelihood:  {p['logLikelihood']:.4f}")
        click.echo(f"iterations:      {p['iterations']}")

    emit(payload, fmt, render)


@cli.command()
@click.option("--r", "r", type=float, required=True)
@click.option("--theta", type=float, required=True)
@click.option("--xmax", type=int, default=10, show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table")
def pmf(r, theta, xmax, scale, fmt):
    """Tabulate the pmf by both evaluation routes."""
    params = NblParams(r, theta)
    recursive = nbl_pmf_recursive(params, xmax)
    direct = np.array([nbl_pmf_direct(params, x) for x in range(xmax + 1)])
    cumulative = np.cumsum(direct)
    discrepancy = float(
        np.max(np.abs(direct - recursive) / np.maximum(direct, 1e-300))
    )
    payload = {
        "x": list(range(xmax + 1)),
        "direct": [scale * v for v in direct],
        "recursive": [scale * v for v in recursive],
        "cumulative": [float(c) for c in cumulative],
        "maxRelativeDiscrepancy": discrepancy,
    }

    def render(p):
        click.echo(f"{'x':>4} {'direct':>16} {'recursive':>16} {'cumulative':>12}")
        for x, d, rec, c in zip(p["x"], p["direct"], p["recursive"], p["cumulative"]):
            click.echo(f"{x:>4} {d:>16.8f} {rec:>16.8f} {c:>12.8f}")
        click.echo(f"max relative discrepancy: {p['maxRelativeDiscrepancy']:.3e}")

    emit(payload, fmt, render)


@cli.command()
@click.option("--data", "dataset", required=True)
@click.option("--r", "r", type=float, required=True)
@click.option("--theta", type=float, required=True)
@click.option("--dof-penalty", type=int, default=2, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table")
def gof(dataset, r, theta, dof_penalty, fmt):
    """Chi-square goodness of fit with rule-of-five pooling."""
    data = load_dataset(dataset)
    report = chi_square_test(data, NblParams(r, theta), dof_penalty=dof_penalty)
    payload = {
        "cells": [
            {"label": lab, "observed": obs, "expected": exp}
            for lab, obs, exp in report.cells
        ],
        "pooledFrom": report.pooled_from,
        "chiSquare": report.chi_square,
        "dof": report.dof,
        "pValue": report.p_value,
        "logLikelihood": report.log_likelihood,
    }

    def render(p):
        click.echo(f"{'cell':>8} {'observed':>10} {'expected':>12}")
        for cell in p["cells"]:
            click.echo(
                f"{cell['label']:>8} {cell['observed']:>10} {cell['expected']:>12.2f}"
            )
        click.echo(f"chi-square:     {p['chiSquare']:.4f}")
        click.echo(f"dof:            {p['dof']}")
        click.echo(f"p-value:        {100 * p['pValue']:.2f}%")
        click.echo(f"log-likelihood: {p['logLikelihood']:.4f}")

    emit(payload, fmt, render)


@cli.command()
@click.option("--r", "r", type=float, required=True)
@click.option("--theta", type=float, required=True)
@click.option("--severity", required=True, help='"v:p,..." or "exp:MEAN".')
@click.option("--ymax", type=float, required=True)
@click.option("--mesh", type=int, default=256, show_default=True)
@click.option("--check-mc", type=int, default=0, help="Monte Carlo draws for cross-check.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table")
def compound(r, theta, severity, ymax, mesh, check_mc, seed, fmt):
    """Aggregate-claims distribution for a given severity model."""
    params = NblParams(r, theta)
    sev = parse_severity(severity)
    if isinstance(sev, cp.DiscreteSeverity):
        dist = cp.compound_discrete(params, sev, int(ymax))
    else:
        dist = cp.compound_continuous(params, sev, ymax, mesh=mesh)
    payload = {
        "kind": dist.kind,
        "atomAtZero": dist.atom_at_zero,
        "grid": [float(g) for g in dist.grid],
        "values": [float(v) for v in dist.values],
    }
    if check_mc:
        ecdf = cp.compound_monte_carlo(params, sev, check_mc, seed)
        deviations = []
        for q in np.arange(0.1, 1.0, 0.1):
            y = float(np.quantile(ecdf.totals, q))
            if y > dist.grid[-1]:
                continue
            deviations.append(abs(cp.compound_cdf(dist, y) - ecdf(y)))
        payload["mcCheck"] = {
            "draws": check_mc,
            "seed": seed,
            "maxDecileDeviation": max(deviations),
        }

    def render(p):
        click.echo(f"atom at zero: {p['atomAtZero']:.8f}")
        label = "probability" if p["kind"] == "discrete" else "density"
        click.echo(f"{'y':>10} {label:>16}")
        for g, v in zip(p["grid"], p["values"]):
            click.echo(f"{g:>10.4f} {v:>16.8f}")
        if "mcCheck" in p:
            click.echo(
                f"max decile deviation vs MC ({p['mcCheck']['draws']} draws): "
                f"{p['mcCheck']['maxDecileDeviation']:.5f}"
            )

    emit(payload, fmt, render)


@cli.command()
@click.option("--name", default="zaire", show_default=True)
def dataset(name):
    """Print a built-in dataset in the two-column text format."""
    if name != "zaire":
        raise ParseError(f"unknown dataset {name!r}")
    click.echo("# count frequency")
    for count, freq in ZAIRE_ENTRIES:
        click.echo(f"{count} {freq}")


def main():
    try:
        cli.main(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except ParseError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except NonConvergence as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except NoRoot as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(4)


if __name__ == "__main__":
    main()
