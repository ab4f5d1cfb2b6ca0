"""Dataset retrieval, parsing, and the versioned raw record store.

Every successful ingestion of changed content appends a new immutable
version: one JSON-lines file per (dataset, version) with a metadata header
line, so any loaded statement can be traced back to the bytes it came from.
"""

from __future__ import annotations

import gzip
import hashlib
import io
import json
import threading
import time
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Protocol
from xml.etree import ElementTree

DatasetCategory = str  # static | semi-static | realtime
SourceFormat = str  # csv | kml | json


class IngestionError(Exception):
    pass


@dataclass(frozen=True)
class CsvDialect:
    delimiter: str = ","
    quotechar: str = '"'
    header: bool = True


@dataclass(frozen=True)
class DatasetDescriptor:
    dataset_id: str
    source: str
    format: SourceFormat = "csv"
    period_seconds: float = 0
    category: DatasetCategory = "static"
    mapping_ref: str | None = None
    dialect: CsvDialect = CsvDialect()

    def __post_init__(self) -> None:
        if self.category in ("semi-static", "realtime") and self.period_seconds <= 0:
            raise ValueError(
                f"{self.dataset_id}: {self.category} datasets need a positive period"
            )


@dataclass(frozen=True)
class RawRecord:
    dataset_id: str
    version: int
    row_index: int
    fields: dict[str, str]
    retrieved_at: str = ""
    source_hash: str = ""


@dataclass(frozen=True)
class GeometryRecord:
    dataset_id: str
    version: int
    feature_id: str
    points: tuple[tuple[float, float], ...]  # (lat, lon), always >= 2

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise ValueError(f"{self.feature_id}: a line needs at least 2 points")
        for lat, lon in self.points:
            if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
                raise ValueError(f"{self.feature_id}: coordinate out of range")


@dataclass(frozen=True)
class RowIssue:
    row: int
    message: str


# -- parsers ----------------------------------------------------------------


def parse_csv(
    data: bytes, dialect: CsvDialect = CsvDialect(), dataset_id: str = "", version: int = 0
) -> tuple[list[RawRecord], list[RowIssue]]:
    """Rows to records; field names come from the header. Ragged rows are
    reported and skipped, the rest of the stream continues."""
    import csv

    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise IngestionError(f"{dataset_id}: source is not valid UTF-8: {exc}") from exc
    reader = csv.reader(
        io.StringIO(text, newline=""),
        delimiter=dialect.delimiter,
        quotechar=dialect.quotechar,
    )
    records: list[RawRecord] = []
    issues: list[RowIssue] = []
    header: list[str] | None = None
    row_index = 0
    for lineno, row in enumerate(reader, start=1):
        if not row:
            continue
        if dialect.header and header is None:
            header = row
            continue
        if header is None:
            header = [f"col{i}" for i in range(len(row))]  # headerless: positional names
        if len(row) != len(header):
            issues.append(
                RowIssue(lineno, f"expected {len(header)} fields, got {len(row)}")
            )
            continue
        records.append(
            RawRecord(dataset_id, version, row_index, dict(zip(header, row)))
        )
        row_index += 1
    if dialect.header and header is None:
        raise IngestionError(f"{dataset_id}: missing header row")
    return records, issues


def _local_tag(tag: str) -> str:
    return tag.rpartition("}")[2]


def parse_kml_linestrings(
    data: bytes, dataset_id: str = "", version: int = 0
) -> tuple[list[GeometryRecord], list[RowIssue]]:
    """LineString geometries from KML (or KMZ, unzipped first).

    KML stores lon,lat[,alt]; points come out as (lat, lon) with altitude
    dropped. Malformed features are reported and skipped.
    """
    if data[:2] == b"PK":
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            kml_names = [n for n in zf.namelist() if n.lower().endswith(".kml")]
            if not kml_names:
                raise IngestionError(f"{dataset_id}: KMZ archive contains no KML entry")
            data = zf.read(kml_names[0])
    try:
        root = ElementTree.fromstring(data)
    except ElementTree.ParseError as exc:
        raise IngestionError(f"{dataset_id}: malformed XML: {exc}") from exc

    records: list[GeometryRecord] = []
    issues: list[RowIssue] = []
    feature_no = 0
    for placemark in root.iter():
        if _local_tag(placemark.tag) != "Placemark":
            continue
        feature_no += 1
        feature_id = placemark.get("id") or ""
        coords_text = None
        for el in placemark.iter():
            tag = _local_tag(el.tag)
            if tag == "name" and not feature_id and el.text:
                feature_id = el.text.strip()
            elif tag == "LineString":
                for sub in el.iter():
                    if _local_tag(sub.tag) == "coordinates":
                        coords_text = sub.text or ""
        if not feature_id:
            feature_id = f"feature{feature_no}"
        if coords_text is None:
            continue  # placemark without a line geometry: not ours to report
        points: list[tuple[float, float]] = []
        bad = False
        for chunk in coords_text.split():
            parts = chunk.split(",")
            if len(parts) < 2:
                issues.append(RowIssue(feature_no, f"{feature_id}: bad coordinate {chunk!r}"))
                bad = True
                break
            try:
                lon, lat = float(parts[0]), float(parts[1])
            except ValueError:
                issues.append(RowIssue(feature_no, f"{feature_id}: bad coordinate {chunk!r}"))
                bad = True
                break
            points.append((lat, lon))
        if bad:
            continue
        if len(points) < 2:
            issues.append(RowIssue(feature_no, f"{feature_id}: fewer than 2 points"))
            continue
        try:
            records.append(
                GeometryRecord(dataset_id, version, feature_id, tuple(points))
            )
        except ValueError as exc:
            issues.append(RowIssue(feature_no, str(exc)))
    return records, issues


def parse_json_records(
    data: bytes, dataset_id: str = "", version: int = 0
) -> tuple[list[RawRecord], list[RowIssue]]:
    """A JSON feed: an array of flat objects (or {"records": [...]})."""
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IngestionError(f"{dataset_id}: malformed JSON feed: {exc}") from exc
    if isinstance(payload, dict):
        payload = payload.get("records", [])
    if not isinstance(payload, list):
        raise IngestionError(f"{dataset_id}: JSON feed must be a list of objects")
    records: list[RawRecord] = []
    issues: list[RowIssue] = []
    row_index = 0
    for i, item in enumerate(payload):
        if not isinstance(item, dict):
            issues.append(RowIssue(i, "feed entry is not an object"))
            continue
        fields = {str(k): "" if v is None else str(v) for k, v in item.items()}
        records.append(RawRecord(dataset_id, version, row_index, fields))
        row_index += 1
    return records, issues


# -- record store -------------------------------------------------------------


class RecordStore:
    """Append-only versioned record files: records/<dataset>/v<N>.jsonl.

    The first line of each file is a metadata header (hash, timestamp);
    existing files are never rewritten.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock_for(self, dataset_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(dataset_id, threading.Lock())

    def _dataset_dir(self, dataset_id: str) -> Path:
        return self.root / dataset_id

    def versions(self, dataset_id: str) -> list[int]:
        d = self._dataset_dir(dataset_id)
        if not d.is_dir():
            return []
        out = []
        for p in d.glob("v*.jsonl"):
            stem = p.stem[1:]
            if stem.isdigit():
                out.append(int(stem))
        return sorted(out)

    def latest_version(self, dataset_id: str) -> int | None:
        versions = self.versions(dataset_id)
        return versions[-1] if versions else None

    def _meta(self, dataset_id: str, version: int) -> dict:
        path = self._dataset_dir(dataset_id) / f"v{version}.jsonl"
        with open(path, encoding="utf-8") as fh:
            return json.loads(fh.readline())

    def latest_hash(self, dataset_id: str) -> str | None:
        latest = self.latest_version(dataset_id)
        if latest is None:
            return None
        return self._meta(dataset_id, latest).get("source_hash")

    def append_version(
        self,
        dataset_id: str,
        records: Iterable[RawRecord],
        source_hash: str,
        retrieved_at: str,
    ) -> tuple[int, int]:
        """Write the next version; returns (version, record count)."""
        with self._lock_for(dataset_id):
            version = (self.latest_version(dataset_id) or 0) + 1
            d = self._dataset_dir(dataset_id)
            d.mkdir(parents=True, exist_ok=True)
            path = d / f"v{version}.jsonl"
            count = 0
            with open(path, "x", encoding="utf-8") as fh:
                fh.write(
                    json.dumps(
                        {
                            "dataset": dataset_id,
                            "version": version,
                            "source_hash": source_hash,
                            "retrieved_at": retrieved_at,
                        }
                    )
                    + "\n"
                )
                for rec in records:
                    fh.write(json.dumps([rec.row_index, rec.fields]) + "\n")
                    count += 1
            return version, count

    def read_records(self, dataset_id: str, version: int) -> list[RawRecord]:
        path = self._dataset_dir(dataset_id) / f"v{version}.jsonl"
        if not path.exists():
            raise IngestionError(f"no stored records for {dataset_id} v{version}")
        with open(path, encoding="utf-8") as fh:
            meta = json.loads(fh.readline())
            out = []
            for line in fh:
                row_index, fields = json.loads(line)
                out.append(
                    RawRecord(
                        dataset_id,
                        version,
                        row_index,
                        fields,
                        meta.get("retrieved_at", ""),
                        meta.get("source_hash", ""),
                    )
                )
            return out


# -- single ingestion run ------------------------------------------------------


@dataclass
class IngestReport:
    dataset_id: str
    new_version: int | None = None
    record_count: int = 0
    skipped: bool = False
    error: str | None = None
    issues: list[RowIssue] = field(default_factory=list)


def _read_source(source: str) -> bytes:
    path = Path(source)
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as fh:
            return fh.read()
    return path.read_bytes()


def geometry_to_record(geom: GeometryRecord) -> RawRecord:
    """Flatten a line geometry so the uniform record store can hold it."""
    points = " ".join(f"{lat},{lon}" for lat, lon in geom.points)
    return RawRecord(
        geom.dataset_id,
        geom.version,
        0,
        {"feature_id": geom.feature_id, "points": points},
    )


def ingest_once(
    descriptor: DatasetDescriptor,
    record_store: RecordStore,
    fetch: Callable[[str], bytes] = _read_source,
    now: Callable[[], str] | None = None,
) -> IngestReport:
    """Retrieve, hash-compare, parse, and version one dataset."""
    report = IngestReport(dataset_id=descriptor.dataset_id)
    try:
        data = fetch(descriptor.source)
    except Exception as exc:
        report.error = f"source unreachable ({exc}); will retry next period"
        return report
    source_hash = hashlib.sha256(data).hexdigest()
    if record_store.latest_hash(descriptor.dataset_id) == source_hash:
        report.skipped = True
        return report
    version = (record_store.latest_version(descriptor.dataset_id) or 0) + 1
    try:
        if descriptor.format == "csv":
            records, issues = parse_csv(
                data, descriptor.dialect, descriptor.dataset_id, version
            )
        elif descriptor.format == "kml":
            geoms, issues = parse_kml_linestrings(data, descriptor.dataset_id, version)
            records = []
            for i, geom in enumerate(geoms):
                rec = geometry_to_record(geom)
                records.append(
                    RawRecord(rec.dataset_id, rec.version, i, rec.fields)
                )
        elif descriptor.format == "json":
            records, issues = parse_json_records(data, descriptor.dataset_id, version)
        else:
            raise IngestionError(f"unsupported format {descriptor.format!r}")
    except IngestionError as exc:
        report.error = str(exc)
        return report
    timestamp = now() if now else time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    new_version, count = record_store.append_version(
        descriptor.dataset_id, records, source_hash, timestamp
    )
    report.new_version = new_version
    report.record_count = count
    report.issues = issues
    return report


# -- scheduler ----------------------------------------------------------------


class Clock(Protocol):
    def now(self) -> float: ...

    def wait_until(self, deadline: float, abort: threading.Event) -> bool:
        """Block until `deadline`; False when aborted instead."""
        ...


class SystemClock:
    def now(self) -> float:
        return time.monotonic()

    def wait_until(self, deadline: float, abort: threading.Event) -> bool:
        while True:
            remaining = deadline - self.now()
            if remaining <= 0:
                return True
            if abort.wait(min(remaining, 0.2)):
                return False


class ManualClock:
    """Test clock: time only moves when advance() is called.

    Waiting threads register themselves, so a test can advance one tick and
    then block until every worker is parked on a future deadline again
    (see quiescent()) -- that makes tick-driven schedules fully deterministic.
    """

    def __init__(self, start: float = 0.0):
        self._time = start
        self._cond = threading.Condition()
        self._waiters: dict[int, float] = {}

    def now(self) -> float:
        with self._cond:
            return self._time

    def advance(self, dt: float) -> None:
        with self._cond:
            self._time += dt
            self._cond.notify_all()

    def wait_until(self, deadline: float, abort: threading.Event) -> bool:
        ident = threading.get_ident()
        with self._cond:
            self._waiters[ident] = deadline
            self._cond.notify_all()
            try:
                while self._time < deadline:
                    if abort.is_set():
                        return False
                    self._cond.wait(0.02)
                return not abort.is_set()
            finally:
                self._waiters.pop(ident, None)
                self._cond.notify_all()

    def quiescent(self, expected_waiters: int) -> bool:
        """True when `expected_waiters` threads are all parked in the future."""
        with self._cond:
            if len(self._waiters) < expected_waiters:
                return False
            return all(d > self._time for d in self._waiters.values())

    def sleep(self, duration: float, abort: threading.Event | None = None) -> None:
        """For handlers that simulate slow work."""
        self.wait_until(self.now() + duration, abort or threading.Event())


class Scheduler:
    """Runs each scheduled dataset on its own worker at its own period.

    Distinct datasets proceed concurrently; one dataset never overlaps
    itself (single worker per dataset). A failing run is retried at the
    next period and never disturbs the other datasets.
    """

    def __init__(
        self,
        descriptors: Iterable[DatasetDescriptor],
        runner: Callable[[DatasetDescriptor], IngestReport],
        clock: Clock | None = None,
        on_report: Callable[[IngestReport], None] | None = None,
    ):
        self._descriptors = [d for d in descriptors if d.period_seconds > 0]
        self._runner = runner
        self._clock = clock or SystemClock()
        self._on_report = on_report
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self.reports: list[IngestReport] = []
        self._reports_lock = threading.Lock()

    def _emit(self, report: IngestReport) -> None:
        with self._reports_lock:
            self.reports.append(report)
        if self._on_report:
            self._on_report(report)

    def _loop(self, descriptor: DatasetDescriptor) -> None:
        next_due = self._clock.now()
        while not self._stop.is_set():
            if not self._clock.wait_until(next_due, self._stop):
                return
            try:
                report = self._runner(descriptor)
            except Exception as exc:  # a broken handler must not kill the worker
                report = IngestReport(dataset_id=descriptor.dataset_id, error=str(exc))
            self._emit(report)
            next_due += descriptor.period_seconds
            now = self._clock.now()
            if next_due < now:
                next_due = now  # fell behind: run promptly but never overlap

    def start(self) -> None:
        for descriptor in self._descriptors:
            thread = threading.Thread(
                target=self._loop,
                args=(descriptor,),
                name=f"ingest-{descriptor.dataset_id}",
                daemon=True,
            )
            self._threads.append(thread)
            thread.start()

    def stop(self, timeout: float = 5.0) -> None:
        self._stop.set()
        for thread in self._threads:
            thread.join(timeout)

    def report_count(self, dataset_id: str | None = None) -> int:
        with self._reports_lock:
            if dataset_id is None:
                return len(self.reports)
            return sum(1 for r in self.reports if r.dataset_id == dataset_id)
