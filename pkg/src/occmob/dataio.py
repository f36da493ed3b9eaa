"""File ingestion and report emission.

Input side: micro records (father/child class pairs by birth year), income
records (class and income by survey wave), cohort definitions, and bare 3x3
matrices. All inputs are comma-delimited UTF-8 with a dot decimal separator;
the micro and income files carry a mandatory header. Class columns take the
codes W, M, U (case-insensitive). Malformed rows are skipped and reported
with their line number; a missing column or a rejection rate above 50% is
fatal.

Output side: a structured report document (canonical JSON, stable key order,
full float precision so results survive a round trip) and a flat delimited
variant with one value per row. Reports carry no timestamps: identical runs
produce identical bytes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .model import OccClass

__all__ = [
    "MicroRecord",
    "IncomeRecord",
    "CohortSpec",
    "TransitionCounts",
    "ParseReport",
    "DEFAULT_COHORTS",
    "parse_micro_csv",
    "parse_income_csv",
    "parse_cohorts",
    "aggregate_counts",
    "read_matrix_csv",
    "read_report",
    "write_report",
    "write_micro_csv",
    "write_micro_counts",
    "write_income_csv",
]

_CLASS_CODES = "WMU"


@dataclass(frozen=True)
class MicroRecord:
    """One father-child occupational pair, keyed by the child's birth year."""

    birth_year: int
    father_class: OccClass
    child_class: OccClass
    weight: float = 1.0


@dataclass(frozen=True)
class IncomeRecord:
    """One income observation from a survey wave."""

    wave_year: int
    birth_year: int
    occ_class: OccClass
    income: float


@dataclass(frozen=True)
class CohortSpec:
    """A birth-year cohort, bounds inclusive."""

    label: str
    birth_from: int
    birth_to: int

    def __post_init__(self):
        if self.birth_from > self.birth_to:
            raise DataError(
                f"cohort {self.label!r}: birth_from {self.birth_from} > birth_to {self.birth_to}"
            )

    def contains(self, year: int) -> bool:
        return self.birth_from <= year <= self.birth_to


DEFAULT_COHORTS = (
    CohortSpec("I", 1940, 1951),
    CohortSpec("II", 1952, 1965),
    CohortSpec("III", 1966, 1977),
)


@dataclass(frozen=True)
class TransitionCounts:
    """Weighted 3x3 transition counts, father class on rows.

    Rows may be empty here (a tiny simulation can leave classes unseen);
    the estimation pipeline is where empty parent classes become errors.
    """

    counts: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.counts, dtype=float)
        if a.shape != (3, 3):
            raise DataError(f"expected 3x3 counts, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DataError("counts must be finite")
        if a.min() < 0:
            raise DataError(f"negative count {a.min():g}")
        object.__setattr__(self, "counts", a)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.counts, dtype=dtype)

    @property
    def total(self) -> float:
        return float(self.counts.sum())


@dataclass
class ParseReport:
    """Per-file parse outcome: row counts plus line-numbered rejections."""

    path: str
    n_rows: int = 0
    n_accepted: int = 0
    rejected: list[str] = field(default_factory=list)

    @property
    def n_rejected(self) -> int:
        return len(self.rejected)


def _open_reader(path):
    fh = open(path, newline="", encoding="utf-8")
    return fh, csv.DictReader(fh)


def _check_header(reader, path, required):
    names = [h.strip().lower() for h in (reader.fieldnames or [])]
    missing = [col for col in required if col not in names]
    if missing:
        raise DataError(f"{path}: missing required column(s) {', '.join(missing)}")
    return names


def _norm_row(row):
    # DictReader keys come from the header verbatim; normalize once per row.
    return {
        (k.strip().lower() if k else k): (v.strip() if isinstance(v, str) else v)
        for k, v in row.items()
    }


def _finish(report: ParseReport) -> None:
    if report.n_rows and report.n_rejected * 2 > report.n_rows:
        preview = "; ".join(report.rejected[:5])
        raise DataError(
            f"{report.path}: {report.n_rejected} of {report.n_rows} rows rejected ({preview})"
        )


def parse_micro_csv(path) -> tuple[list[MicroRecord], ParseReport]:
    """Read `birth_year,father_class,child_class[,weight]` records.

    Returns the accepted records and a ParseReport with one diagnostic per
    rejected row. The weight column is optional and defaults to 1.
    """
    path = str(path)
    records: list[MicroRecord] = []
    report = ParseReport(path)
    fh, reader = _open_reader(path)
    with fh:
        names = _check_header(reader, path, ["birth_year", "father_class", "child_class"])
        has_weight = "weight" in names
        for row in reader:
            report.n_rows += 1
            r = _norm_row(row)
            try:
                year = int(r["birth_year"])
                father = OccClass.from_code(r["father_class"])
                child = OccClass.from_code(r["child_class"])
                w = 1.0
                if has_weight and r.get("weight"):
                    w = float(r["weight"])
                    if not np.isfinite(w) or w < 0:
                        raise ValueError(f"weight {w} must be a nonnegative real")
            except (TypeError, ValueError, KeyError) as exc:
                report.rejected.append(f"line {reader.line_num}: {exc}")
                continue
            records.append(MicroRecord(year, father, child, w))
            report.n_accepted += 1
    _finish(report)
    return records, report


def parse_income_csv(path) -> tuple[list[IncomeRecord], ParseReport]:
    """Read `wave_year,birth_year,occ_class,income` records (income > 0)."""
    path = str(path)
    records: list[IncomeRecord] = []
    report = ParseReport(path)
    fh, reader = _open_reader(path)
    with fh:
        _check_header(reader, path, ["wave_year", "birth_year", "occ_class", "income"])
        for row in reader:
            report.n_rows += 1
            r = _norm_row(row)
            try:
                wave = int(r["wave_year"])
                year = int(r["birth_year"])
                occ = OccClass.from_code(r["occ_class"])
                income = float(r["income"])
                if not np.isfinite(income) or income <= 0:
                    raise ValueError(f"income {income} must be positive")
            except (TypeError, ValueError, KeyError) as exc:
                report.rejected.append(f"line {reader.line_num}: {exc}")
                continue
            records.append(IncomeRecord(wave, year, occ, income))
            report.n_accepted += 1
    _finish(report)
    return records, report


def parse_cohorts(path) -> list[CohortSpec]:
    """Read `label,birth_from,birth_to` lines (header optional, # comments ok)."""
    path = str(path)
    specs: list[CohortSpec] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if [p.lower() for p in parts[:3]] == ["label", "birth_from", "birth_to"]:
                continue
            if len(parts) != 3:
                raise DataError(f"{path}: line {lineno}: expected label,birth_from,birth_to")
            try:
                spec = CohortSpec(parts[0], int(parts[1]), int(parts[2]))
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from None
            specs.append(spec)
    if not specs:
        raise DataError(f"{path}: no cohorts defined")
    for i, a in enumerate(specs):
        for b in specs[i + 1:]:
            if a.birth_from <= b.birth_to and b.birth_from <= a.birth_to:
                raise DataError(f"{path}: cohorts {a.label!r} and {b.label!r} overlap")
    return specs


def aggregate_counts(records, cohort: CohortSpec, use_weights: bool = True) -> TransitionCounts:
    """Sum record weights into 3x3 cells for records born inside the cohort."""
    counts = np.zeros((3, 3))
    n = 0
    for rec in records:
        if cohort.contains(rec.birth_year):
            counts[rec.father_class, rec.child_class] += rec.weight if use_weights else 1.0
            n += 1
    if n == 0:
        raise DataError(
            f"cohort {cohort.label!r} ({cohort.birth_from}-{cohort.birth_to}) has no records"
        )
    return TransitionCounts(counts)


def read_matrix_csv(path) -> np.ndarray:
    """Read a bare 3x3 matrix: three comma-separated numeric lines."""
    path = str(path)
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",") if p.strip() != ""]
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise DataError(f"{path}: line {lineno}: non-numeric matrix entry") from None
    a = np.array(rows)
    if a.shape != (3, 3):
        raise DataError(f"{path}: expected a 3x3 matrix, got shape {a.shape}")
    return a


# ---------------------------------------------------------------------------
# report emission


def _as_document(doc) -> dict:
    if isinstance(doc, dict):
        return doc
    to_doc = getattr(doc, "to_document", None)
    if to_doc is not None:
        return to_doc()
    raise TypeError(f"cannot serialize {type(doc).__name__} as a report")


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return ";".join(str(x) for x in v)
    return str(v)


def _flat_rows(doc: dict):
    """Flatten a report document to (cohort, section, name, from, to, value).

    Matrices get one row per cell with father/child codes in the from/to
    columns; 3-vectors keyed fathers/children get the class code in `from`;
    everything else flattens to dotted names. Top-level metadata rows carry
    an empty cohort label.
    """
    rows = []
    for key, val in doc.items():
        if key == "cohorts":
            continue
        if isinstance(val, dict):
            for name, v in _walk(val, key + "."):
                rows.append(("", "meta", name, "", "", _fmt_value(v)))
        else:
            rows.append(("", "meta", key, "", "", _fmt_value(val)))
    for coh in doc.get("cohorts", []):
        label = str(coh.get("label", ""))
        for key, val in coh.items():
            if key == "label":
                continue
            if key == "matrices" and isinstance(val, dict):
                for mname, m in val.items():
                    for i in range(3):
                        for j in range(3):
                            rows.append((label, "matrix", mname,
                                         _CLASS_CODES[i], _CLASS_CODES[j],
                                         _fmt_value(float(m[i][j]))))
            elif key in ("fathers", "children") and isinstance(val, (list, tuple)):
                for i, v in enumerate(val):
                    rows.append((label, "shares", key, _CLASS_CODES[i], "",
                                 _fmt_value(float(v))))
            elif isinstance(val, dict):
                for name, v in _walk(val):
                    rows.append((label, key, name, "", "", _fmt_value(v)))
            else:
                rows.append((label, "cohort", key, "", "", _fmt_value(val)))
    return rows


def _walk(d: dict, prefix: str = ""):
    for k, v in d.items():
        name = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _walk(v, name + ".")
        elif isinstance(v, (list, tuple)) and len(v) == 3 and all(
            isinstance(x, (int, float)) for x in v
        ):
            for code, x in zip(_CLASS_CODES, v):
                yield f"{name}.{code}", x
        else:
            yield name, v


def write_report(doc, path, fmt: str = "document") -> None:
    """Serialize a report document (or object with to_document()) to path.

    fmt "document" writes canonical JSON: sorted keys, two-space indent,
    full float precision. fmt "delimited" writes one CSV row per value with
    header cohort,section,name,from,to,value. Both are byte-stable for
    identical documents.
    """
    document = _as_document(doc)
    path = str(path)
    if fmt == "document":
        text = json.dumps(document, indent=2, sort_keys=True, allow_nan=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    elif fmt == "delimited":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["cohort", "section", "name", "from", "to", "value"])
            writer.writerows(_flat_rows(document))
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def read_report(path) -> dict:
    """Read back a document-format report."""
    with open(str(path), encoding="utf-8") as fh:
        return json.load(fh)


def write_micro_csv(records, path) -> None:
    """Write micro records in the ingestible CSV format (weights kept)."""
    with open(str(path), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["birth_year", "father_class", "child_class", "weight"])
        for rec in records:
            writer.writerow([rec.birth_year, rec.father_class.code,
                             rec.child_class.code, repr(rec.weight)])


def write_micro_counts(counts, path, birth_year: int = 1950) -> None:
    """Write a 3x3 count matrix as nine weighted micro rows.

    The fixed birth year (default 1950, inside the first default cohort)
    makes the file directly ingestible by the estimation pipeline.
    """
    a = np.asarray(counts, dtype=float)
    with open(str(path), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["birth_year", "father_class", "child_class", "weight"])
        for i in range(3):
            for j in range(3):
                writer.writerow([birth_year, _CLASS_CODES[i], _CLASS_CODES[j],
                                 repr(float(a[i, j]))])


def write_income_csv(records, path) -> None:
    """Write income records in the ingestible CSV format."""
    with open(str(path), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["wave_year", "birth_year", "occ_class", "income"])
        for rec in records:
            writer.writerow([rec.wave_year, rec.birth_year, rec.occ_class.code,
                             repr(rec.income)])
