"""Command-line front end.

Subcommands: bounds, certify, coverage, povm, simulate.  Every command is
deterministic given its flags and seed, prints JSON, and uses CI-friendly
exit codes: 0 pass, 1 check failure, 2 domain error, 3 I/O error.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import click
import numpy as np

from .algebra import DegenerateSchmidtError, SchmidtVector
from .bell import BETA_Q, build_w1_functional
from .povm import (
    ANALYTIC_COVERAGE,
    CoveragePredicateError,
    build_extremal_povm,
    canonical_relabeling,
    coverage_count,
    povm_to_json,
)
from .randomness import StatisticsTable, bell_value_from_table, ideal_statistics
from .report import DEFAULT_TOLERANCES, bounds_report, certification_report

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_DOMAIN_ERROR = 2
EXIT_IO_ERROR = 3


def _emit(payload: dict, machine: bool, out: str | None) -> None:
    text = json.dumps(payload) if machine else json.dumps(payload, indent=2)
    if out:
        try:
            with open(out, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            click.echo(f"error: cannot write {out}: {exc}", err=True)
            sys.exit(EXIT_IO_ERROR)
    click.echo(text)


def _parse_alpha(alpha: tuple[float, float, float]) -> SchmidtVector:
    try:
        return SchmidtVector.from_iterable(alpha, normalize=True)
    except (DegenerateSchmidtError, ValueError) as exc:
        click.echo(f"error: invalid alpha: {exc}", err=True)
        sys.exit(EXIT_DOMAIN_ERROR)


def _parse_tolerances(entries: tuple[str, ...]) -> dict:
    overrides = {}
    for entry in entries:
        name, _, value = entry.partition("=")
        if name not in DEFAULT_TOLERANCES or not value:
            click.echo(f"error: unknown tolerance override '{entry}'", err=True)
            sys.exit(EXIT_DOMAIN_ERROR)
        overrides[name] = float(value)
    return overrides


@click.group()
def main() -> None:
    """Certification toolkit for qutrit randomness from extremal POVMs."""


@main.command()
@click.option("--json", "machine", is_flag=True, help="compact machine output")
@click.option("--out", type=click.Path(), default=None)
@click.option("--tol", "tol_overrides", multiple=True, help="NAME=VALUE tolerance override")
def bounds(machine: bool, out: str | None, tol_overrides: tuple[str, ...]) -> None:
    """Enumerated classical bound and ideal quantum value of W1 and W2."""
    report = bounds_report(_parse_tolerances(tol_overrides))
    _emit(report, machine, out)
    sys.exit(EXIT_PASS if report["pass"] else EXIT_CHECK_FAILURE)


@main.command()
@click.option("--alpha", nargs=3, type=float, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--json", "machine", is_flag=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--tol", "tol_overrides", multiple=True)
def certify(alpha, seed: int, machine: bool, out: str | None, tol_overrides) -> None:
    """Run the full certification chain for one Schmidt vector."""
    vec = _parse_alpha(alpha)
    try:
        report = certification_report(vec, seed=seed, tolerances=_parse_tolerances(tol_overrides))
    except CoveragePredicateError as exc:
        click.echo(f"error: coverage predicate failed: {exc}", err=True)
        sys.exit(EXIT_DOMAIN_ERROR)
    _emit(report, machine, out)
    sys.exit(EXIT_PASS if report["pass"] else EXIT_CHECK_FAILURE)


def _coverage_chunk(args: tuple[int, int]) -> int:
    n, seed_entropy = args
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed_entropy))
    return coverage_count(n, rng)


@main.command()
@click.option("--samples", type=int, required=True)
@click.option("--seed", type=int, default=0)
@click.option("--workers", type=int, default=None, help="default: available parallelism")
@click.option("--json", "machine", is_flag=True)
@click.option("--out", type=click.Path(), default=None)
def coverage(samples: int, seed: int, workers: int | None, machine: bool, out: str | None) -> None:
    """Monte Carlo fraction of random states admitting the construction."""
    if samples < 1:
        click.echo("error: --samples must be >= 1", err=True)
        sys.exit(EXIT_DOMAIN_ERROR)
    if workers is None:
        workers = os.cpu_count() or 1
    workers = max(1, min(workers, samples))
    children = np.random.SeedSequence(seed).spawn(workers)
    counts = [samples // workers] * workers
    counts[-1] += samples - sum(counts)
    jobs = [(n, child.entropy) for n, child in zip(counts, children)]
    if workers == 1:
        hits = _coverage_chunk(jobs[0])
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_coverage_chunk, jobs))
    frac = hits / samples
    halfwidth = 1.96 * float(np.sqrt(max(frac * (1 - frac), 1e-300) / samples))
    payload = {
        "samples": samples,
        "seed": seed,
        "workers": workers,
        "fraction": frac,
        "confidence_halfwidth_95": halfwidth,
        "analytic_reference": ANALYTIC_COVERAGE,
        "sampling_measure": "uniform simplex over squared Schmidt coefficients",
    }
    _emit(payload, machine, out)
    sys.exit(EXIT_PASS)


@main.command()
@click.option("--alpha", nargs=3, type=float, required=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--json", "machine", is_flag=True)
def povm(alpha, out: str | None, machine: bool) -> None:
    """Construct the extremal POVM and export it as JSON."""
    vec = _parse_alpha(alpha)
    try:
        canonical, _ = canonical_relabeling(vec)
        built, params = build_extremal_povm(canonical)
    except CoveragePredicateError as exc:
        click.echo(f"error: coverage predicate failed: {exc}", err=True)
        sys.exit(EXIT_DOMAIN_ERROR)
    _emit(povm_to_json(built, canonical, params), machine, out)
    sys.exit(EXIT_PASS)


@main.command()
@click.option("--alpha", nargs=3, type=float, required=True)
@click.option("--out", type=click.Path(), default=None)
@click.option("--json", "machine", is_flag=True)
def simulate(alpha, out: str | None, machine: bool) -> None:
    """Emit the full ideal statistics table as JSON records."""
    vec = _parse_alpha(alpha)
    try:
        canonical, _ = canonical_relabeling(vec)
        table = ideal_statistics(canonical)
    except CoveragePredicateError as exc:
        click.echo(f"error: coverage predicate failed: {exc}", err=True)
        sys.exit(EXIT_DOMAIN_ERROR)
    records = table.to_records()
    # self-check: re-ingest and confirm the W1 value survives the round trip
    recovered = bell_value_from_table(build_w1_functional(), StatisticsTable.from_records(records))
    payload = {"records": records, "w1_from_table": recovered, "beta_Q": BETA_Q}
    _emit(payload, machine, out)
    sys.exit(EXIT_PASS if abs(recovered - BETA_Q) <= 1e-10 else EXIT_CHECK_FAILURE)


if __name__ == "__main__":
    main()
