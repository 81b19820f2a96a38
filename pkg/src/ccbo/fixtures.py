"""Bundled sample datasets and the shared CSV schema.

Four read-only tables ship with the package: the five-point starting design
for synthetic campaigns ("table2-start", no measured outcomes), the
eight-point quasi-random laboratory initialization ("table1-lab-init"), and
the two guided laboratory campaign logs ("supp1-300nm", "supp2-3um"). Values
are embedded exactly as recorded; the lab tables are physical measurements and
are never regenerated from the synthetic oracle.

All CSV produced or consumed anywhere in the package uses the column order
``label,concentration,flow_rate,voltage,solvent,size,feasible``.
"""

import csv
import io
from dataclasses import dataclass

from .errors import DomainError, UnknownFixtureError
from .space import DesignPoint

CSV_COLUMNS = ("label", "concentration", "flow_rate", "voltage", "solvent", "size", "feasible")


@dataclass(frozen=True)
class FixtureRow:
    label: str
    point: DesignPoint
    size: float | None = None
    feasible: bool | None = None


def _row(label, c, q, u, solvent, size=None, feas=None) -> FixtureRow:
    point = DesignPoint(
        {"concentration": c, "flow_rate": q, "voltage": u, "solvent": solvent}
    )
    return FixtureRow(label=label, point=point, size=size, feasible=feas)


_FIXTURES: dict[str, tuple[FixtureRow, ...]] = {
    "table2-start": (
        _row("S-1", 0.50, 15.00, 10.0, "DMAc"),
        _row("S-2", 0.50, 0.10, 10.0, "CHCl3"),
        _row("S-3", 3.00, 20.00, 15.0, "DMAc"),
        _row("S-4", 1.00, 20.00, 10.0, "CHCl3"),
        _row("S-5", 0.20, 0.02, 10.0, "CHCl3"),
    ),
    "table1-lab-init": (
        _row("0-1", 2.40, 1.73, 14.0, "DMAc", 0.56, True),
        _row("0-2", 4.06, 0.44, 15.7, "CHCl3", 1.00, False),
        _row("0-3", 2.88, 49.11, 11.8, "DMAc", 15.00, False),
        _row("0-4", 0.76, 0.01, 17.6, "CHCl3", 1.20, False),
        _row("0-5", 0.11, 10.43, 14.5, "CHCl3", 6.26, True),
        _row("0-6", 3.55, 0.06, 12.8, "DMAc", 0.15, True),
        _row("0-7", 4.55, 2.39, 16.7, "CHCl3", 5.24, True),
        _row("0-8", 1.88, 0.21, 11.0, "DMAc", 1.12, True),
    ),
    "supp1-300nm": (
        _row("1-1", 2.32, 0.09, 12.0, "DMAc", 0.48, True),
        _row("1-2", 1.33, 0.74, 13.9, "DMAc", 0.47, True),
        _row("2-1", 1.89, 0.43, 13.9, "DMAc", 0.53, True),
        _row("2-2", 3.52, 0.10, 12.3, "DMAc", 0.27, True),
        _row("3-1", 0.58, 0.84, 14.0, "DMAc", 0.30, True),
        _row("3-2", 4.61, 0.07, 12.4, "DMAc", 0.30, True),
    ),
    "supp2-3um": (
        _row("1-1", 1.66, 0.80, 10.7, "DMAc", 0.30, True),
        _row("1-2", 0.36, 3.65, 14.6, "CHCl3", 2.69, True),
        _row("2-1", 0.57, 3.74, 16.5, "CHCl3", 4.69, True),
        _row("2-2", 0.05, 3.55, 14.5, "CHCl3", 10.64, False),
        _row("3-1", 1.63, 1.92, 16.2, "CHCl3", 4.14, True),
        _row("3-2", 4.51, 1.38, 14.9, "CHCl3", 4.05, True),
        _row("4-1", 4.45, 1.30, 17.4, "CHCl3", 3.58, True),
        _row("4-2", 4.02, 1.08, 16.3, "CHCl3", 3.29, True),
    ),
}


def fixture_names() -> list[str]:
    return sorted(_FIXTURES)


def load_fixture(name: str) -> list[FixtureRow]:
    try:
        return list(_FIXTURES[name])
    except KeyError:
        raise UnknownFixtureError(
            f"unknown fixture {name!r}; available: {', '.join(fixture_names())}"
        )


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        p = row.point
        writer.writerow(
            [
                row.label,
                repr(float(p["concentration"])),
                repr(float(p["flow_rate"])),
                repr(float(p["voltage"])),
                p["solvent"],
                "" if row.size is None else repr(float(row.size)),
                "" if row.feasible is None else int(row.feasible),
            ]
        )
    return buf.getvalue()


def parse_history_csv(text: str, require_outcomes: bool = True) -> list[FixtureRow]:
    """Parse the shared CSV schema; row numbers are reported on bad input."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DomainError("history CSV is empty (a header row is mandatory)")
    header = [h.strip() for h in header]
    missing = [c for c in CSV_COLUMNS[:5] if c not in header]
    if missing:
        raise DomainError(f"history CSV header is missing columns: {', '.join(missing)}")
    idx = {c: header.index(c) for c in CSV_COLUMNS if c in header}
    rows: list[FixtureRow] = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec or all(not f.strip() for f in rec):
            continue
        try:
            point = DesignPoint(
                {
                    "concentration": float(rec[idx["concentration"]]),
                    "flow_rate": float(rec[idx["flow_rate"]]),
                    "voltage": float(rec[idx["voltage"]]),
                    "solvent": rec[idx["solvent"]].strip(),
                }
            )
            size_field = rec[idx["size"]].strip() if "size" in idx and idx["size"] < len(rec) else ""
            feas_field = rec[idx["feasible"]].strip() if "feasible" in idx and idx["feasible"] < len(rec) else ""
            size = float(size_field) if size_field else None
            feas = bool(int(feas_field)) if feas_field else None
        except (ValueError, IndexError) as exc:
            raise DomainError(f"history CSV row {lineno}: {exc}")
        if require_outcomes and (size is None or feas is None):
            raise DomainError(f"history CSV row {lineno}: size and feasible are required")
        rows.append(FixtureRow(label=rec[idx["label"]] if "label" in idx else "", point=point, size=size, feasible=feas))
    return rows
