"""Data export service: CSV, JSON and gnuplot output with atomic file writes."""

import csv
import io
import json
import os
import tempfile
from enum import Enum
from pathlib import Path

import numpy as np


class NumpyEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, complex):
            return [obj.real, obj.imag]
        if isinstance(obj, Enum):
            return obj.value
        return super().default(obj)


class ExportService:
    """Export results in various formats."""

    @staticmethod
    def to_csv(rows: list[dict], columns: list[str] | None = None) -> str:
        if not rows:
            return ""
        cols = columns or list(rows[0].keys())
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            clean = {k: (float(v) if isinstance(v, np.floating) else v) for k, v in row.items()}
            writer.writerow(clean)
        return buf.getvalue()

    @staticmethod
    def to_json(data, pretty: bool = False) -> str:
        indent = 2 if pretty else None
        return json.dumps(data, cls=NumpyEncoder, ensure_ascii=False, indent=indent, allow_nan=False)

    @staticmethod
    def write_atomic(path: str | Path, content: str) -> Path:
        """Write via a temporary file in the same directory, then rename."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(content)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        return path

    @staticmethod
    def phase_diagram_rows(cells) -> list[dict]:
        """Format phase-diagram cells for CSV export."""
        return [cell.to_dict() for cell in cells]

    @staticmethod
    def phase_diagram_plot_script(csv_name: str, n_max: float) -> str:
        """gnuplot script: E_f colour map with both η1 bounds ±(n/2)/(n+½)."""
        return "\n".join([
            "set datafile separator ','",
            "set xlabel 'n'",
            "set ylabel 'eta1'",
            f"set xrange [0:{n_max}]",
            "set yrange [-0.5:0.5]",
            "set cblabel 'E_f (bits)'",
            "set key outside",
            "bound(n) = (n / 2.0) / (n + 0.5)",
            f"plot '{csv_name}' every ::1 using 1:(strcol(3) eq \"entangled\" ? $2 : 1/0):4 with points pt 5 ps 0.5 palette title 'entangled', \\",
            f"     '{csv_name}' every ::1 using 1:(strcol(3) eq \"separable\" ? $2 : 1/0) with points pt 5 ps 0.5 lc rgb '#dddddd' title 'separable', \\",
            "     bound(x) with lines lw 2 lc rgb 'black' title 'separability bound', \\",
            "     -bound(x) with lines lw 2 dt 2 lc rgb 'black' title 'uncertainty bound'",
            "",
        ])
