#report.py
import csv
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.table import Table

from .properties import PropertyResult

REPORT_TXT = "verify_report.txt"
REPORT_CSV = "verify_report.csv"
REPORT_HEADER = ["property", "tier", "status", "measured", "threshold", "seconds", "covers", "detail"]

STATUS_STYLE = {"PASS": "green", "PASS-BY-FLOOR": "cyan", "FAIL": "bold red"}


def _measured(result: PropertyResult) -> str:
    return "" if result.measured is None else f"{result.measured:.6g}"


def render_table(results: List[PropertyResult]) -> Table:
    table = Table(title="Verificación numérica")
    for column in ("Propiedad", "Nivel", "Estado", "Medido", "Umbral", "s"):
        table.add_column(column)
    for r in results:
        style = STATUS_STYLE.get(r.status, "")
        table.add_row(r.name, r.tier.value, f"[{style}]{r.status}[/{style}]", _measured(r), r.threshold,
                      f"{r.seconds:.2f}")
    return table


def summary_text(results: List[PropertyResult]) -> str:
    """Resumen en texto plano, una línea por propiedad"""
    lines = []
    for r in results:
        line = f"{r.status:<14} {r.name:<28} medido={_measured(r) or '-'} umbral={r.threshold or '-'}"
        if r.detail:
            line += f"  ({r.detail})"
        lines.append(line)
    failed = sum(not r.passed for r in results)
    lines.append("")
    lines.append(f"{len(results) - failed}/{len(results)} propiedades aprobadas")
    return "\n".join(lines) + "\n"


def write_report(results: List[PropertyResult], out_dir: Path) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / REPORT_TXT).write_text(summary_text(results), encoding="utf-8")
    with (out_dir / REPORT_CSV).open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for r in results:
            writer.writerow([r.name, r.tier.value, r.status, _measured(r), r.threshold,
                             f"{r.seconds:.3f}", ";".join(r.covers), r.detail])
    return out_dir


def exit_code(results: List[PropertyResult]) -> int:
    """0 solo si todas las propiedades pasaron"""
    return 0 if results and all(r.passed for r in results) else 1


def report(results: List[PropertyResult], out_dir: Path, console: Optional[Console] = None) -> int:
    """Muestra la tabla, escribe los archivos del reporte y devuelve el código de salida"""
    console = console or Console()
    console.print(render_table(results))
    write_report(results, out_dir)
    code = exit_code(results)
    if code == 0:
        console.print(f"✅ Todas las propiedades pasaron ({len(results)})")
    else:
        failed = [r.name for r in results if not r.passed]
        console.print(f"❌ Fallaron: {', '.join(failed)}")
    return code
