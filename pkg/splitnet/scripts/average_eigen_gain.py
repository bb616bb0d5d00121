# scripts/average_eigen_gain.py
"""
Promedia varios eigen_gain.csv (uno por semilla) agrupando por rango de la
neurona: el rango 0 es la de menor λ_min en cada corrida.

Uso: python -m splitnet.scripts.average_eigen_gain salida.csv corrida1/eigen_gain.csv corrida2/eigen_gain.csv ...
"""
import sys
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from splitnet.csvlog import read_table, write_table

AVERAGE_HEADER = ["rank", "runs", "lambda_min_mean", "gain_mean", "gain_std"]


def _file_hash(path: Path) -> str:
    first = Path(path).read_text(encoding="utf-8").splitlines()[0]
    return first.split("=", 1)[1] if first.startswith("# config_hash=") else ""


def average_by_rank(paths: Sequence[Path]) -> List[Tuple[int, int, float, float, float]]:
    """Filas (rango, corridas, media de λ_min, media y desviación de la ganancia)"""
    grouped: Dict[int, List[Tuple[float, float]]] = defaultdict(list)
    for path in paths:
        rows = sorted(read_table(path), key=lambda r: (float(r["lambda_min"]), int(r["neuron"])))
        for rank, row in enumerate(rows):
            grouped[rank].append((float(row["lambda_min"]), float(row["gain"])))

    averaged = []
    for rank in sorted(grouped):
        values = np.array(grouped[rank])
        averaged.append((rank, len(values), float(values[:, 0].mean()), float(values[:, 1].mean()),
                         float(values[:, 1].std())))
    return averaged


def main(argv: Sequence[str]) -> int:
    if len(argv) < 2:
        print("❌ Uso: average_eigen_gain.py SALIDA.csv ENTRADA.csv [ENTRADA.csv ...]")
        return 2
    out, inputs = Path(argv[0]), [Path(p) for p in argv[1:]]
    missing = [p for p in inputs if not p.is_file()]
    if missing:
        print(f"❌ No existen: {', '.join(str(p) for p in missing)}")
        return 2

    print(f"🔄 Promediando {len(inputs)} corridas...")
    rows = average_by_rank(inputs)
    hashes = {_file_hash(p) for p in inputs}
    write_table(out, AVERAGE_HEADER, rows, hashes.pop() if len(hashes) == 1 else "mixed")
    for rank, runs, lam, gain, _ in rows:
        print(f"  ✅ rango {rank}: λ_min={lam:.6g}, ganancia={gain:.6g} ({runs} corridas)")
    print(f"🎉 Promedios escritos en {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
