"""Knowledge-base verification checks and run-to-run regression diffing.

A check either runs a graph-pattern query, demands that instances of a class
carry at least one of some required properties, enforces a cardinality, or
hunts dangling object-property targets. Checks are data: the built-in suite
can be extended from a JSON file. Runs are persistable so the next ingestion
can be compared against a baseline.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .ontology import SchemaCatalog
from .querylang import GraphPatternQuery, TriplePattern, Var, evaluate
from .store import QuadStore
from .terms import Iri, Literal
from .vocab import GEO_LAT, RDF_TYPE, city

SAMPLE_CAP = 20


@dataclass(frozen=True)
class CheckDefinition:
    check_id: str
    description: str
    kind: str  # pattern | require-any | cardinality | dangling-objects
    severity: str = "error"  # error | warning
    expectation: str = "empty-result"  # empty-result | nonempty-result
    params: dict = field(default_factory=dict)


@dataclass
class CheckResult:
    check_id: str
    violation_count: int
    samples: list[str]
    severity: str = "error"


@dataclass
class CheckRun:
    run_id: str
    timestamp: str
    results: list[CheckResult]

    def count_for(self, check_id: str) -> int | None:
        for result in self.results:
            if result.check_id == check_id:
                return result.violation_count
        return None

    def to_json(self) -> dict:
        return {
            "run_id": self.run_id,
            "timestamp": self.timestamp,
            "results": [asdict(r) for r in self.results],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "CheckRun":
        return cls(
            payload["run_id"],
            payload["timestamp"],
            [CheckResult(**r) for r in payload["results"]],
        )


@dataclass
class RegressionEntry:
    check_id: str
    baseline: int
    current: int


@dataclass
class RegressionReport:
    baseline_run_id: str
    current_run_id: str
    regressions: list[RegressionEntry] = field(default_factory=list)
    improvements: list[RegressionEntry] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "baseline_run_id": self.baseline_run_id,
            "current_run_id": self.current_run_id,
            "regressions": [asdict(e) for e in self.regressions],
            "improvements": [asdict(e) for e in self.improvements],
        }


# -- ISTAT support table ---------------------------------------------------


class IstatTable:
    """Municipality name -> national statistics code, notation-insensitive.

    Multiple rows may share one code (official name plus known aliases).
    """

    def __init__(self, rows: list[tuple[str, str]] | None = None):
        self._codes: dict[str, str] = {}
        for name, code in rows or []:
            key = self._norm(name)
            if key:
                self._codes[key] = code.strip()

    @staticmethod
    def _norm(name: str) -> str:
        cleaned = "".join(ch if ch.isalnum() or ch.isspace() else " " for ch in name)
        return " ".join(cleaned.upper().split())

    def lookup(self, name: str) -> str | None:
        return self._codes.get(self._norm(name))

    def __len__(self) -> int:
        return len(self._codes)

    @classmethod
    def from_text(cls, text: str) -> "IstatTable":
        rows = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            name, sep, code = line.rpartition(",")
            if sep:
                rows.append((name.strip(), code.strip()))
        return cls(rows)

    @classmethod
    def load(cls, path: str | Path) -> "IstatTable":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def to_text(self) -> str:
        return "\n".join(f"{name},{code}" for name, code in sorted(self._codes.items())) + "\n"


def istat_normalize(name: str, table: IstatTable) -> str | None:
    return table.lookup(name)


# -- built-in suite ----------------------------------------------------------


def builtin_checks(catalog: SchemaCatalog) -> list[CheckDefinition]:
    checks = [
        CheckDefinition(
            "service-unreconciled",
            "services connected to the street guide by neither access nor road",
            "require-any",
            params={"class": str(city("Service")), "any_of": [str(city("hasAccess")), str(city("isIn"))]},
        ),
        CheckDefinition(
            "dangling-object-targets",
            "object-property links pointing at a node the store knows nothing about",
            "dangling-objects",
        ),
        CheckDefinition(
            "weather-report-unlinked",
            "weather reports not joined to any municipality",
            "require-any",
            params={"class": str(city("WeatherReport")), "any_of": [str(city("refersTo"))]},
        ),
        CheckDefinition(
            "entry-coordinate-excess",
            "entries with more than one coordinate pair",
            "cardinality",
            params={"class": str(city("Entry")), "property": str(GEO_LAT), "max": 1},
        ),
        CheckDefinition(
            "route-no-first-section",
            "routes missing their first section",
            "require-any",
            params={"class": str(city("Route")), "any_of": [str(city("hasFirstSection"))]},
        ),
        CheckDefinition(
            "route-no-first-stop",
            "routes missing their departure stop",
            "require-any",
            params={"class": str(city("Route")), "any_of": [str(city("hasFirstStop"))]},
        ),
    ]
    # Every catalog cardinality rule becomes a check of its own.
    for rule in catalog.cardinalities:
        cls_local = rule.class_iri.rpartition("#")[2]
        prop_local = rule.property_iri.rpartition("#")[2]
        params: dict = {"class": str(rule.class_iri), "property": str(rule.property_iri)}
        if rule.min_card is not None:
            params["min"] = rule.min_card
        if rule.max_card is not None:
            params["max"] = rule.max_card
        checks.append(
            CheckDefinition(
                f"card-{cls_local}-{prop_local}",
                f"{cls_local}.{prop_local} cardinality "
                f"[{rule.min_card if rule.min_card is not None else 0}"
                f"..{rule.max_card if rule.max_card is not None else 'n'}]",
                "cardinality",
                params=params,
            )
        )
    return checks


def load_checks(path: str | Path) -> list[CheckDefinition]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return [CheckDefinition(**item) for item in payload]


def save_checks(checks: list[CheckDefinition], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps([asdict(c) for c in checks], indent=1), encoding="utf-8"
    )


# -- execution ------------------------------------------------------------------


def _type_subjects(store: QuadStore, class_iri: Iri) -> set:
    return {q.subject for q in store.match(None, RDF_TYPE, class_iri)}


def _run_require_any(store: QuadStore, params: dict) -> list[str]:
    class_iri = Iri(params["class"])
    required = [Iri(p) for p in params["any_of"]]
    out = []
    for subject in _type_subjects(store, class_iri):
        if not any(store.count(subject, prop) for prop in required):
            out.append(str(subject))
    return sorted(out)


def _run_cardinality(store: QuadStore, params: dict) -> list[str]:
    class_iri = Iri(params["class"])
    prop = Iri(params["property"])
    min_card = params.get("min")
    max_card = params.get("max")
    out = []
    for subject in _type_subjects(store, class_iri):
        n = len({q.object for q in store.match(subject, prop)})
        if min_card is not None and n < min_card:
            out.append(str(subject))
        elif max_card is not None and n > max_card:
            out.append(str(subject))
    return sorted(out)


def _run_dangling(store: QuadStore, catalog: SchemaCatalog) -> list[str]:
    """Targets of object properties with no type and no statements of their own."""
    object_props = {
        p.iri for p in catalog.properties.values() if p.kind == "object-property"
    }
    out = set()
    for quad in store.match():
        if quad.predicate not in object_props:
            continue
        target = quad.object
        if not isinstance(target, Iri):
            continue
        if store.count(target, RDF_TYPE) == 0 and store.count(target) == 0:
            out.add(str(target))
    return sorted(out)


def _run_pattern(store: QuadStore, params: dict, expectation: str) -> list[str]:
    patterns = []
    for s, p, o in params["patterns"]:
        patterns.append(
            TriplePattern(_parse_term(s), _parse_term(p), _parse_term(o))
        )
    query = GraphPatternQuery(tuple(patterns), project=tuple(params.get("project", ())))
    table = evaluate(query, store)
    rows = [" ".join(_show(t) for t in row) for row in table.rows]
    if expectation == "nonempty-result":
        return [] if rows else ["(query returned no rows)"]
    return rows


def _parse_term(text: str):
    if text.startswith("?"):
        return Var(text[1:])
    if "://" in text:
        return Iri(text)
    return Literal(text)


def _show(term) -> str:
    if isinstance(term, Literal):
        return term.lexical
    return str(term)


def run_check(
    store: QuadStore, catalog: SchemaCatalog, check: CheckDefinition
) -> CheckResult:
    if check.kind == "require-any":
        violations = _run_require_any(store, check.params)
    elif check.kind == "cardinality":
        violations = _run_cardinality(store, check.params)
    elif check.kind == "dangling-objects":
        violations = _run_dangling(store, catalog)
    elif check.kind == "pattern":
        violations = _run_pattern(store, check.params, check.expectation)
    else:
        raise ValueError(f"unknown check kind {check.kind!r}")
    return CheckResult(
        check.check_id, len(violations), violations[:SAMPLE_CAP], check.severity
    )


def run_checks(
    store: QuadStore,
    catalog: SchemaCatalog,
    checks: list[CheckDefinition],
    run_id: str | None = None,
) -> CheckRun:
    results = [run_check(store, catalog, check) for check in checks]
    return CheckRun(
        run_id or uuid.uuid4().hex[:12],
        time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        results,
    )


def diff_runs(baseline: CheckRun, current: CheckRun) -> RegressionReport:
    report = RegressionReport(baseline.run_id, current.run_id)
    base = {r.check_id: r.violation_count for r in baseline.results}
    for result in current.results:
        before = base.get(result.check_id)
        if before is None:
            continue
        if result.violation_count > before:
            report.regressions.append(
                RegressionEntry(result.check_id, before, result.violation_count)
            )
        elif result.violation_count < before:
            report.improvements.append(
                RegressionEntry(result.check_id, before, result.violation_count)
            )
    return report


# -- run registry -----------------------------------------------------------------


class RunRegistry:
    """Persisted check runs, one JSON file each, so baselines survive restarts."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def save(self, run: CheckRun) -> Path:
        path = self.root / f"{run.run_id}.json"
        path.write_text(json.dumps(run.to_json(), indent=1), encoding="utf-8")
        return path

    def get(self, run_id: str) -> CheckRun | None:
        path = self.root / f"{run_id}.json"
        if not path.exists():
            return None
        return CheckRun.from_json(json.loads(path.read_text(encoding="utf-8")))

    def run_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))

    def latest(self) -> CheckRun | None:
        paths = sorted(self.root.glob("*.json"), key=lambda p: p.stat().st_mtime)
        if not paths:
            return None
        return CheckRun.from_json(json.loads(paths[-1].read_text(encoding="utf-8")))
