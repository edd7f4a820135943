"""Command line entry point ``ocrp``.

Exit codes: 0 on success, 1 when a verification suite reports failures, 2 for
usage or parameter errors.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys

import click

from .compositions import Params, format_composition, format_decimal, format_rational, parse_composition
from .kernels import stationary_law
from .operators import generator_convergence, spectrum
from .opensets import OpenIntervalSet, hausdorff


def _rational(ctx, param, value):
    if value is None:
        return None
    from .compositions import parse_rational

    try:
        return parse_rational(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


def _params(alpha, theta) -> Params:
    try:
        return Params(alpha, theta)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


def _emit_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2))


def _emit_csv(header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    click.echo(buf.getvalue(), nl=False)


alpha_opt = click.option("--alpha", default="1/2", show_default=True, callback=_rational, help="0 <= alpha < 1")
theta_opt = click.option("--theta", default="1/2", show_default=True, callback=_rational, help="theta >= 0")


@click.group()
def main():
    """Exact and Monte Carlo tools for the ordered CRP up-down chain."""


@main.command()
@click.option("--n", "n", type=click.IntRange(min=0), required=True)
@alpha_opt
@theta_opt
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
def stationary(n, alpha, theta, fmt):
    """Stationary law on compositions of N."""
    params = _params(alpha, theta)
    law = stationary_law(n, params)
    rows = [(format_composition(s), format_rational(w), format_decimal(w)) for s, w in sorted(law.items(), reverse=True)]
    if fmt == "json":
        _emit_json(
            {
                "n": n,
                "alpha": format_rational(params.alpha),
                "theta": format_rational(params.theta),
                "rows": [{"comp": c, "prob": p, "decimal": d} for c, p, d in rows],
            }
        )
    else:
        _emit_csv(("composition", "probability", "decimal"), rows)


@main.command("spectrum")
@click.option("--k", "k", type=click.IntRange(min=0, max=10), required=True)
@alpha_opt
@theta_opt
def spectrum_cmd(k, alpha, theta):
    """Eigenvalues of the generator on degree <= K."""
    params = _params(alpha, theta)
    values = spectrum(k, params)
    _emit_json({"k": k, "eigenvalues": [{"value": format_rational(v), "mult": m} for v, m in values]})


def _int_list(ctx, param, value):
    try:
        out = [int(x) for x in value.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma separated integers, got {value!r}") from None
    if not out or any(x < 1 for x in out):
        raise click.BadParameter("need at least one positive integer")
    return out


def _composition(ctx, param, value):
    try:
        return parse_composition(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


@main.command("gen-compare")
@click.option("--k", "k", type=click.IntRange(min=0, max=10), required=True)
@click.option("--rho", callback=_composition, required=True, help='composition such as "2,1"')
@click.option("--n-list", callback=_int_list, default="20,40,80,160", show_default=True)
@alpha_opt
@theta_opt
def gen_compare(k, rho, n_list, alpha, theta):
    """Residuals of n^2 (T_n - 1) against the generator on m_RHO."""
    params = _params(alpha, theta)
    if rho.size > k:
        raise click.UsageError(f"|rho| = {rho.size} exceeds k = {k}")
    rows = [(n, format_decimal(r), format_rational(r)) for n, r in generator_convergence(k, rho, n_list, params)]
    _emit_csv(("n", "residual", "residual_exact"), rows)


def _open_set(ctx, param, value):
    try:
        return OpenIntervalSet.parse(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


@main.command()
@click.option("--u", "u", callback=_open_set, required=True, help='e.g. "0,1/3;1/3,1"')
@click.option("--v", "v", callback=_open_set, required=True)
def metric(u, v):
    """Hausdorff distance between the complements of U and V."""
    d = hausdorff(u, v)
    _emit_json({"u": str(u), "v": str(v), "distance": format_rational(d), "decimal": format_decimal(d)})


@main.command()
@click.option("--n", "n", type=click.IntRange(min=1), required=True)
@alpha_opt
@theta_opt
@click.option("--t-max", type=click.FloatRange(min=0), default=1.0, show_default=True)
@click.option("--record-every", type=click.FloatRange(min=0, min_open=True), default=0.1, show_default=True)
@click.option("--samples", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--seed", type=int, default=None, help="defaults to $OCRP_SEED")
@click.option("--out", type=click.Path(dir_okay=False, allow_dash=True), default="-", show_default=True)
@click.option("--no-comp", is_flag=True, help="omit full compositions from the records")
def simulate(n, alpha, theta, t_max, record_every, samples, seed, out, no_comp):
    """Write JSONL trajectory records."""
    from .simulation import simulate as run_simulation
    from .simulation import write_jsonl

    params = _params(alpha, theta)
    if seed is None:
        env = os.environ.get("OCRP_SEED")
        if env is None:
            raise click.UsageError("a seed is required: pass --seed or set OCRP_SEED")
        try:
            seed = int(env)
        except ValueError:
            raise click.UsageError(f"OCRP_SEED must be an integer, got {env!r}") from None
    records = run_simulation(
        n, params, repr(t_max), repr(record_every), samples, seed, keep_comp=not no_comp
    )
    if out == "-":
        write_jsonl(records, sys.stdout)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            write_jsonl(records, fh)


@main.command()
@click.option(
    "--suite", type=click.Choice(["all", "kernels", "qsym", "operators", "metric"]), default="all", show_default=True
)
@click.option("--max-n", type=click.IntRange(min=0, max=10), default=6, show_default=True)
@alpha_opt
@theta_opt
def verify(suite, max_n, alpha, theta):
    """Run exact identity checks and print a JSON report."""
    from .verify import run_suite

    params = _params(alpha, theta)
    report = run_suite(suite, params, max_n)
    _emit_json(report.to_json())
    if not report.ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
