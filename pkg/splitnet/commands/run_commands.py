#run_commands.py
from pathlib import Path
from typing import Optional, Tuple

import typer

from ..csvlog import echo_config, load_config
from ..experiments import run, run_angle_sweep, run_eigen_gain
from ..models import Experiment
from ..schemas import RunConfig
from ..storage import prepare_out_dir, resolve_out_dir
from ..verify.properties import run_properties
from ..verify.report import report
from . import console, handle_errors, set_verbose

CONFIG_HELP = "Archivo INI con la configuración de la corrida"
SEED_HELP = "Semilla (reemplaza run.seed)"
OUT_HELP = "Directorio de salida (reemplaza SPLITNET_OUT_DIR y run.out_dir)"


def resolve(
    config_path: Optional[Path],
    seed: Optional[int],
    out: Optional[str],
    experiment: Optional[Experiment] = None,
) -> Tuple[RunConfig, Path]:
    """Configuración validada y directorio de salida listo para escribir"""
    run_overrides = {}
    if seed is not None:
        run_overrides["seed"] = seed
    if experiment is not None:
        run_overrides["experiment"] = experiment.value
    config = load_config(config_path, {"run": run_overrides})
    out_dir = prepare_out_dir(resolve_out_dir(out, config.run.out_dir))
    return config, out_dir


def dispatch(config: RunConfig, out_dir: Path) -> int:
    """Ejecuta el experimento configurado; devuelve el código de salida"""
    experiment = config.run.experiment
    if experiment == Experiment.VERIFY_ALL:
        (out_dir / "config.echo").write_text(echo_config(config), encoding="utf-8")
        return report(run_properties(), out_dir, console)

    if experiment == Experiment.ANGLE_SWEEP:
        (out_dir / "config.echo").write_text(echo_config(config), encoding="utf-8")
        path = run_angle_sweep(config, out_dir)
        console.print(f"✅ Barrido de ángulos escrito en {path}")
        return 0

    if experiment == Experiment.EIGEN_VS_GAIN:
        (out_dir / "config.echo").write_text(echo_config(config), encoding="utf-8")
        path = run_eigen_gain(config, out_dir)
        console.print(f"✅ Autovalor vs ganancia escrito en {path}")
        return 0

    console.print(f"🔄 {experiment.value} con {config.run.method.value}, semilla {config.run.seed}")
    summary = run(config, out_dir)
    console.print(
        f"✅ {summary.neuron_count} neuronas en {summary.rounds} rondas, "
        f"pérdida final {summary.final_loss:.6g} ({summary.out_dir})"
    )
    return 0


@handle_errors
def run_experiment(
    config: Path = typer.Option(..., "--config", help=CONFIG_HELP),
    seed: Optional[int] = typer.Option(None, "--seed", help=SEED_HELP),
    out: Optional[str] = typer.Option(None, "--out", help=OUT_HELP),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Registro a nivel DEBUG"),
):
    """Ejecuta el experimento indicado en la configuración"""
    set_verbose(verbose)
    run_config, out_dir = resolve(config, seed, out)
    code = dispatch(run_config, out_dir)
    if code:
        raise typer.Exit(code=code)
