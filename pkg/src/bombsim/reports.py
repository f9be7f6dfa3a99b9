"""Run records, delimited report files, and plain-text summary tables.

One run = one RunReport = one CSV row with a stable column order.  The first
line of every report file names the schema so downstream tooling can refuse
files it does not understand.  Wall-clock time is the only
non-reproducible column; determinism checks compare rows with it dropped.
"""

from __future__ import annotations

import csv
import hashlib
import io
import time
from dataclasses import dataclass, field

from .oracles import QueryLedger

SCHEMA_ID = "bombsim-report/1"

COLUMNS = [
    "schema", "experiment", "run_id", "n", "eps", "L", "delta", "d",
    "backend", "c_s", "seed", "answer", "correct",
    "q_classical", "q_standard", "q_bomb", "q_symmetric", "q_projective",
    "q_quantum", "explosion", "wall_ms",
]

TIMING_COLUMNS = {"wall_ms"}


def canonical_answer(value) -> str:
    """Compact deterministic rendering of an answer value."""
    text = repr(value)
    if len(text) <= 40:
        return text
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    return f"sha256:{digest}"


@dataclass
class RunReport:
    experiment: str
    run_id: int
    seed: int
    n: int | None = None
    eps: float | None = None
    L: int | None = None
    delta: float | None = None
    d: int | None = None
    backend: str | None = None
    c_s: float | None = None
    answer: str = ""
    correct: bool | None = None
    queries: dict[str, int] = field(default_factory=dict)
    explosion: float | None = None
    wall_ms: float | None = None

    @classmethod
    def from_ledger(cls, ledger: QueryLedger, **kwargs) -> "RunReport":
        return cls(queries=dict(ledger.counts),
                   explosion=ledger.explosion_probability, **kwargs)

    def row(self) -> dict[str, str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "1" if v else "0"
            if isinstance(v, float):
                return format(v, ".12g")
            return str(v)

        out = {
            "schema": SCHEMA_ID,
            "experiment": self.experiment,
            "run_id": fmt(self.run_id),
            "n": fmt(self.n),
            "eps": fmt(self.eps),
            "L": fmt(self.L),
            "delta": fmt(self.delta),
            "d": fmt(self.d),
            "backend": fmt(self.backend),
            "c_s": fmt(self.c_s),
            "seed": fmt(self.seed),
            "answer": self.answer,
            "correct": fmt(self.correct),
            "explosion": fmt(self.explosion),
            "wall_ms": fmt(self.wall_ms),
        }
        for model in ("classical", "standard", "bomb", "symmetric",
                      "projective", "quantum"):
            out[f"q_{model}"] = fmt(self.queries.get(model, 0))
        return out


def render_report_csv(reports) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA_ID}\n")
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.row())
    return buf.getvalue()


def write_report_csv(reports, path) -> None:
    with open(path, "w") as fh:
        fh.write(render_report_csv(reports))


def read_report_rows(path) -> list[dict]:
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def strip_timing(csv_text: str) -> str:
    """Report text with timing columns blanked, for byte comparisons."""
    out_lines = []
    reader = csv.reader(io.StringIO(csv_text))
    header: list[str] | None = None
    for row in reader:
        if not row:
            continue
        if row[0].startswith("#"):
            out_lines.append(",".join(row))
            continue
        if header is None:
            header = row
            out_lines.append(",".join(row))
            continue
        cells = [("" if header[i] in TIMING_COLUMNS else cell)
                 for i, cell in enumerate(row)]
        out_lines.append(",".join(cells))
    return "\n".join(out_lines) + "\n"


def summary_table(rows: list[dict], columns: list[str] | None = None) -> str:
    """Aligned plain-text table of dict rows."""
    if not rows:
        return "(no rows)\n"
    columns = columns if columns is not None else list(rows[0].keys())
    cells = [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells))
              for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


class StopWatch:
    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = (time.perf_counter() - self._t0) * 1000.0
        return False
