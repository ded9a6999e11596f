"""`scc` command line: run experiments, sweep parameters, verify properties."""

import os
import sys

import click

from . import __version__
from .configfile import canonical_algorithm, canonical_sweep_param, load_experiment
from .csvio import emit_csv, emit_summary, emit_traces
from .errors import ConfigError
from .harness import ExperimentSpec, run_experiment, summarize, trace_export_records
from .config import SystemConfig


def _write_outputs(spec, rows, records, out_dir, traces=True):
    os.makedirs(out_dir, exist_ok=True)
    emit_csv(rows, os.path.join(out_dir, "results.csv"))
    if traces:
        emit_traces(trace_export_records(spec, records), os.path.join(out_dir, "traces.csv"))
    summary = summarize(rows)
    emit_summary(summary, os.path.join(out_dir, "summary.csv"))
    return summary


def _print_summary(summary):
    click.echo(f"{'scenario':<18} {'algorithm':<11} {'trials':>6} {'fail':>4} "
               f"{'nmse mean':>12} {'nmse med':>12} {'wsr mean':>10} {'iters':>7}")
    for s in summary:
        click.echo(
            f"{s['scenario_id']:<18} {s['algorithm']:<11} {s['trials']:>6} {s['failures']:>4} "
            f"{s['nmse_mean']:>12.5e} {s['nmse_median']:>12.5e} {s['wsr_mean']:>10.4f} "
            f"{s['iterations_mean']:>7.1f}"
        )


@click.group()
@click.version_option(version=__version__, prog_name="scc")
def main():
    """Sensing-computation-communication beamforming simulator."""


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="experiment INI file")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="output directory for results.csv / traces.csv / summary.csv")
@click.option("--seed", type=int, default=None, help="override the master seed")
@click.option("--threads", type=int, default=None, help="override the worker count")
def run(config_path, out_dir, seed, threads):
    """Run the experiment described by an INI file."""
    try:
        spec, traces = load_experiment(config_path, out_dir=out_dir, seed=seed, threads=threads)
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc
    rows, records = run_experiment(spec, return_records=True)
    summary = _write_outputs(spec, rows, records, out_dir, traces=traces)
    _print_summary(summary)


@main.command()
@click.option("--param", required=True, help="one of snr, k, n, r0, rho")
@click.option("--values", required=True, help="comma-separated sweep values")
@click.option("--algo", required=True,
              help="one of cem, wsr, fixed-mmse, zfbf, mfbf, ufbf")
@click.option("--mode", default="cem", type=click.Choice(["cem", "wsr"]),
              help="objective mode for the baseline algorithms")
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="master seed")
@click.option("--snr", type=float, default=5.0, show_default=True,
              help="base transmit SNR in dB (unless snr is the swept parameter)")
@click.option("--out", "out_dir", default="sweep_out", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--threads", type=int, default=1, show_default=True)
def sweep(param, values, algo, mode, trials, seed, snr, out_dir, threads):
    """Sweep one parameter of the desk-scale default system."""
    try:
        algorithm = canonical_algorithm(algo)
        sweep_param = canonical_sweep_param(param)
        try:
            value_list = tuple(float(v) for v in values.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"cannot parse sweep values {values!r}") from None
        if not value_list:
            raise ConfigError("no sweep values given")

        wants_wsr = algorithm == "wsr" or (algorithm not in ("cem", "wsr") and mode == "wsr")
        if sweep_param == "rho" and algorithm == "cem":
            raise ConfigError("the fused-MSE budget constrains the sum-rate problem; "
                              "sweep rho with --algo wsr")
        if sweep_param == "r0" and wants_wsr:
            raise ConfigError("rate floors are fixed constraints of the computation problem; "
                              "sweep r0 with --algo cem or a cem-mode baseline")

        config = SystemConfig(rate_thresholds=0.0 if wants_wsr else SystemConfig.rate_thresholds)
        if sweep_param != "snr_db":
            config = config.with_snr_db(snr)
        spec = ExperimentSpec(
            config=config,
            algorithm=algorithm,
            objective_mode=mode,
            sweep_param=sweep_param,
            sweep_values=value_list,
            trials=trials,
            master_seed=seed,
            output_dir=out_dir,
            workers=threads,
        )
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc
    rows, records = run_experiment(spec, return_records=True)
    summary = _write_outputs(spec, rows, records, out_dir)
    _print_summary(summary)


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
def verify(seed, out_dir):
    """Run the property battery and write report.txt."""
    from .verify import verify_suite

    report = verify_suite(seed=seed)
    text = report.as_text()
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "report.txt")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    click.echo(text, nl=False)
    click.echo(f"report written to {path}")
    if not report.passed:
        sys.exit(1)


if __name__ == "__main__":
    main()
