#experiment_commands.py
from pathlib import Path
from typing import Optional

import typer

from ..csvlog import echo_config
from ..experiments import run_angle_sweep, run_eigen_gain
from ..models import Experiment
from . import console, handle_errors, set_verbose
from .run_commands import CONFIG_HELP, OUT_HELP, SEED_HELP, resolve


def _prepare(config: Path, seed: Optional[int], out: Optional[str], experiment: Experiment):
    """El comando fija el experimento, de modo que rigen sus valores por defecto"""
    run_config, out_dir = resolve(config, seed, out, experiment)
    (out_dir / "config.echo").write_text(echo_config(run_config), encoding="utf-8")
    return run_config, out_dir


@handle_errors
def sweep_angle(
    config: Path = typer.Option(..., "--config", help=CONFIG_HELP),
    seed: Optional[int] = typer.Option(None, "--seed", help=SEED_HELP),
    out: Optional[str] = typer.Option(None, "--out", help=OUT_HELP),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Ganancia de la división en función del ángulo con v_min (angle_sweep.csv)"""
    set_verbose(verbose)
    run_config, out_dir = _prepare(config, seed, out, Experiment.ANGLE_SWEEP)
    path = run_angle_sweep(run_config, out_dir)
    console.print(f"✅ Barrido de ángulos escrito en {path}")


@handle_errors
def eigen_gain(
    config: Path = typer.Option(..., "--config", help=CONFIG_HELP),
    seed: Optional[int] = typer.Option(None, "--seed", help=SEED_HELP),
    out: Optional[str] = typer.Option(None, "--out", help=OUT_HELP),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """λ_min y ganancia medida por neurona en un óptimo (eigen_gain.csv)"""
    set_verbose(verbose)
    run_config, out_dir = _prepare(config, seed, out, Experiment.EIGEN_VS_GAIN)
    path = run_eigen_gain(run_config, out_dir)
    console.print(f"✅ Autovalor vs ganancia escrito en {path}")
