#csvlog.py
"""
Lectura y eco de la configuración INI, y escritura incremental de los CSV de
cada corrida (run.csv, splits.csv, final_model.csv y tablas de experimentos).
"""
import configparser
import csv
import hashlib
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from pydantic import ValidationError

from .config import settings
from .exceptions import ConfigError
from .models import NetworkState, SplitEvent
from .schemas import RunConfig

logger = logging.getLogger(__name__)

RUN_HEADER = ["round", "iter", "neuron_count", "loss", "grad_norm", "event"]
SPLITS_HEADER = ["round", "parent_index", "lambda_min", "epsilon", "child_a", "child_b", "method"]
NONE_VALUES = ("", "none", "null")

UNKNOWN_SECTION = "Sección desconocida en la configuración"


def fmt(value: Any) -> str:
    """Flotantes con 17 cifras significativas; None como celda vacía"""
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


# ------------------------------------------
# Configuración
# ------------------------------------------

def _clean(value: str) -> Optional[str]:
    value = value.strip()
    return None if value.lower() in NONE_VALUES else value


def build_config(raw: Dict[str, Dict[str, Any]]) -> RunConfig:
    """
    Valida un diccionario por secciones y convierte los errores de pydantic en
    ConfigError con la clave `sección.clave` que falló.
    """
    allowed = set(RunConfig.model_fields)
    for section in raw:
        if section not in allowed:
            raise ConfigError(f"{UNKNOWN_SECTION}: [{section}]", key=section)
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        error = exc.errors()[0]
        key = ".".join(str(part) for part in error["loc"]) or "config"
        raise ConfigError(f"Valor inválido en '{key}': {error['msg']}", key=key) from exc


def parse_ini(text: str) -> Dict[str, Dict[str, Any]]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"Archivo de configuración ilegible: {exc}") from exc
    return {
        section: {key: _clean(value) for key, value in parser.items(section)}
        for section in parser.sections()
    }


def load_config(
    path: Optional[Path] = None,
    overrides: Optional[Dict[str, Dict[str, Any]]] = None,
) -> RunConfig:
    """
    Lee un INI y aplica los overrides (flags de la CLI, variables de entorno)
    por encima de los valores del archivo.

    Raises:
        ConfigError: Archivo ausente, sección o clave desconocida, valor fuera de rango
    """
    raw: Dict[str, Dict[str, Any]] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"No existe el archivo de configuración: {path}")
        raw = parse_ini(path.read_text(encoding="utf-8"))
    for section, values in (overrides or {}).items():
        raw.setdefault(section, {}).update(values)
    if raw.get("run", {}).get("seed") is None:
        raw.setdefault("run", {})["seed"] = settings.DEFAULT_SEED
    return build_config(raw)


def echo_config(config: RunConfig) -> str:
    """La configuración resuelta, con todos los valores por defecto, en formato INI"""
    lines: List[str] = []
    for section, values in config.model_dump(mode="json").items():
        lines.append(f"[{section}]")
        for key, value in values.items():
            if value is None:
                value = "none"
            elif isinstance(value, bool):
                value = str(value).lower()
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)


def config_hash(config: RunConfig) -> str:
    return hashlib.sha256(echo_config(config).encode("utf-8")).hexdigest()[:16]


# ------------------------------------------
# Escritura de CSV
# ------------------------------------------

def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]], hash_: str) -> Path:
    """Tabla completa con la línea `# config_hash=` y una fila de encabezado"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write(f"# config_hash={hash_}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def read_table(path: Path) -> List[Dict[str, str]]:
    """Filas de un CSV propio como diccionarios, ignorando la línea del hash"""
    with Path(path).open(encoding="utf-8", newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))


class ExperimentLog:
    """
    Registro incremental de una corrida.

    Cada fila se escribe y se vacía al disco en cuanto llega, de modo que una
    corrida abortada conserva lo registrado hasta el error.
    """

    def __init__(self, out_dir: Path, config: RunConfig):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.hash = config_hash(config)
        self.iter = 0
        self._last = (-1, -1)

        (self.out_dir / "config.echo").write_text(echo_config(config), encoding="utf-8")
        self._run = self._open("run.csv", RUN_HEADER)
        self._splits = self._open("splits.csv", SPLITS_HEADER)

    def _open(self, name: str, header: Sequence[str]):
        f = (self.out_dir / name).open("w", encoding="utf-8", newline="")
        f.write(f"# config_hash={self.hash}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        f.flush()
        return f, writer

    def log_row(self, round: int, iter: int, neuron_count: int, loss: float, grad_norm: Optional[float], event: str) -> None:
        if (round, iter) < self._last:
            raise ValueError(f"Fila fuera de orden: ({round}, {iter}) después de {self._last}")
        self._last = (round, iter)
        f, writer = self._run
        writer.writerow([fmt(v) for v in (round, iter, neuron_count, loss, grad_norm, event)])
        f.flush()

    def log_trace(self, round: int, neuron_count: int, trace) -> None:
        """Filas de traza del descenso; `iter` es acumulado a lo largo de la corrida"""
        start = self.iter
        for row in trace:
            self.log_row(round, start + row.iter, neuron_count, row.loss, row.grad_norm, "descent")
        if trace:
            self.iter = start + trace[-1].iter

    def log_split(self, event: SplitEvent, method: str) -> None:
        f, writer = self._splits
        writer.writerow([fmt(v) for v in (
            event.round, event.parent_index, event.lambda_min, event.epsilon,
            event.children[0], event.children[1], method,
        )])
        f.flush()

    def write_final_model(self, net: NetworkState) -> Path:
        header = ["index", "weight"] + [f"theta_{j}" for j in range(net.dim)]
        rows = ([i, float(net.weights[i])] + [float(t) for t in net.neurons[i]] for i in range(net.n))
        return write_table(self.out_dir / "final_model.csv", header, rows, self.hash)

    def close(self) -> None:
        for f, _ in (self._run, self._splits):
            if not f.closed:
                f.close()

    def __enter__(self) -> "ExperimentLog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
