"""A workspace directory: configuration, raw records, the statement store,
review queue, and validation runs, plus the operations the CLI and HTTP
service expose over them.

Layout (everything lives under one root):
    workspace.conf          dataset descriptors + table locations
    store.nq                the persisted statement store (rebuilt on load)
    records/                versioned raw records, one file per version
    runs/                   validation runs (JSON)
    reviews.json            review queue state
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import nquads
from .addresses import MunicipalityAliases, QualifierTable
from .ingestion import (
    CsvDialect,
    DatasetDescriptor,
    IngestReport,
    RecordStore,
    Scheduler,
    ingest_once,
)
from .inference import check_constraints, materialize_inference
from .mapping import (
    MappingOutput,
    TransformContext,
    apply_mapping,
    compile_mapping,
    load_model,
)
from .ontology import builtin_catalog
from .reconcile import PipelineConfig, Reconciler, entry_coordinates
from .review import ReviewQueue
from .store import QuadStore
from .terms import GraphId, Iri
from .testkit import Corpus, CorpusSpec, generate_corpus, write_corpus
from .validation import (
    CheckRun,
    IstatTable,
    RegressionReport,
    RunRegistry,
    builtin_checks,
    diff_runs,
    load_checks,
    run_checks,
)
from .vocab import city

CONFIG_NAME = "workspace.conf"
STORE_NAME = "store.nq"
RESOLUTIONS_DATASET = "review_resolutions"


class WorkspaceError(Exception):
    pass


@dataclass
class WorkspaceConfig:
    base: str = "http://citykb.local/resource"
    datasets: dict[str, DatasetDescriptor] = field(default_factory=dict)
    mapping_paths: dict[str, str] = field(default_factory=dict)
    tables: dict[str, str] = field(default_factory=dict)
    checks_path: str | None = None

    @classmethod
    def parse(cls, text: str, source: str = CONFIG_NAME) -> "WorkspaceConfig":
        config = cls()
        current: dict | None = None

        def flush():
            nonlocal current
            if current is None:
                return
            dataset_id = current.pop("id")
            mapping = current.pop("mapping", None)
            dialect = CsvDialect(
                delimiter=current.pop("csv-delimiter", ","),
                quotechar=current.pop("csv-quote", '"'),
                header=current.pop("csv-header", "yes") != "no",
            )
            descriptor = DatasetDescriptor(
                dataset_id=dataset_id,
                source=current.pop("source", ""),
                format=current.pop("format", "csv"),
                period_seconds=float(current.pop("period", 0)),
                category=current.pop("category", "static"),
                mapping_ref=mapping,
                dialect=dialect,
            )
            if current:
                raise WorkspaceError(
                    f"{source}: unknown dataset keys {sorted(current)} for {dataset_id!r}"
                )
            config.datasets[dataset_id] = descriptor
            if mapping:
                config.mapping_paths[dataset_id] = mapping
            current = None

        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, _, rest = line.partition(" ")
            rest = rest.strip()
            if head == "base":
                config.base = rest
            elif head == "table":
                kind, _, path = rest.partition(" ")
                config.tables[kind] = path.strip()
            elif head == "checks":
                config.checks_path = rest
            elif head == "dataset":
                flush()
                current = {"id": rest}
            elif current is not None:
                current[head] = rest
            else:
                raise WorkspaceError(f"{source}:{lineno}: unrecognized line {line!r}")
        flush()
        return config


class Workspace:
    def __init__(self, root: str | Path, create: bool = False):
        self.root = Path(root)
        config_path = self.root / CONFIG_NAME
        if not config_path.exists():
            if not create:
                raise WorkspaceError(f"no {CONFIG_NAME} in {self.root}")
            self.root.mkdir(parents=True, exist_ok=True)
            config_path.write_text("# citykb workspace\n", encoding="utf-8")
        self.config = WorkspaceConfig.parse(config_path.read_text(encoding="utf-8"))
        self.catalog = builtin_catalog()
        self.record_store = RecordStore(self.root / "records")
        self.runs = RunRegistry(self.root / "runs")
        self.review_queue = ReviewQueue(self.root / "reviews.json")
        self.store = QuadStore()
        store_path = self.root / STORE_NAME
        if store_path.exists():
            report = self.store.import_nquads(store_path)
            if report.errors:
                raise WorkspaceError(
                    f"{store_path}: {len(report.errors)} bad statements, "
                    f"first: {report.errors[0].message}"
                )
        self._state_path = self.root / "state.json"
        self._state = (
            json.loads(self._state_path.read_text())
            if self._state_path.exists()
            else {"source_hashes": {}}
        )
        self.qualifier_table = self._load_table("qualifiers", QualifierTable.load, QualifierTable.builtin)
        self.aliases = self._load_table("aliases", MunicipalityAliases.load, MunicipalityAliases)
        self.istat = self._load_table("istat", IstatTable.load, IstatTable)

    def _load_table(self, kind: str, loader, default):
        path = self.config.tables.get(kind)
        if path:
            return loader(self.root / path)
        return default()

    def _save_state(self) -> None:
        self._state_path.write_text(json.dumps(self._state, indent=1), encoding="utf-8")

    def save_store(self) -> Path:
        path = self.root / STORE_NAME
        self.store.export_nquads(path)
        return path

    # -- ingestion -------------------------------------------------------------

    def descriptor(self, dataset_id: str) -> DatasetDescriptor:
        descriptor = self.config.datasets.get(dataset_id)
        if descriptor is None:
            raise WorkspaceError(f"unknown dataset {dataset_id!r}")
        return descriptor

    def ingest(self, dataset_id: str) -> IngestReport:
        descriptor = self.descriptor(dataset_id)
        source = str((self.root / descriptor.source))
        if descriptor.format == "nquads":
            return self._ingest_nquads(descriptor, source)
        resolved = DatasetDescriptor(
            dataset_id=descriptor.dataset_id,
            source=source,
            format=descriptor.format,
            period_seconds=descriptor.period_seconds,
            category=descriptor.category,
            mapping_ref=descriptor.mapping_ref,
            dialect=descriptor.dialect,
        )
        return ingest_once(resolved, self.record_store)

    def _ingest_nquads(self, descriptor: DatasetDescriptor, source: str) -> IngestReport:
        """Pre-mapped statement files load straight into their own graph."""
        report = IngestReport(dataset_id=descriptor.dataset_id)
        try:
            data = Path(source).read_bytes()
        except OSError as exc:
            report.error = f"source unreachable ({exc}); will retry next period"
            return report
        digest = hashlib.sha256(data).hexdigest()
        if self._state["source_hashes"].get(descriptor.dataset_id) == digest:
            report.skipped = True
            return report
        quads, issues = nquads.parse_lines(data.decode("utf-8").splitlines())
        version = (self.store.active_version(descriptor.dataset_id) or 0) + 1
        replace = self.store.replace_graph(descriptor.dataset_id, version, quads)
        report.new_version = version
        report.record_count = replace.added
        self._state["source_hashes"][descriptor.dataset_id] = digest
        self._save_state()
        return report

    def scheduler(self, on_report=None, clock=None) -> Scheduler:
        return Scheduler(
            self.config.datasets.values(),
            lambda d: self.ingest(d.dataset_id),
            clock=clock,
            on_report=on_report,
        )

    # -- mapping ---------------------------------------------------------------

    def map_dataset(self, dataset_id: str, version: int | None = None) -> MappingOutput:
        descriptor = self.descriptor(dataset_id)
        if descriptor.format == "nquads":
            raise WorkspaceError(f"{dataset_id} is a statement file; ingest loads it directly")
        mapping_path = self.config.mapping_paths.get(dataset_id)
        if mapping_path is None:
            raise WorkspaceError(f"dataset {dataset_id!r} has no mapping model")
        version = version or self.record_store.latest_version(dataset_id)
        if version is None:
            raise WorkspaceError(f"dataset {dataset_id!r} has no ingested records")
        records = self.record_store.read_records(dataset_id, version)
        model = load_model(self.root / mapping_path)
        columns = set(records[0].fields) if records else None
        compiled = compile_mapping(model, self.catalog, columns, base=self.config.base)
        context = TransformContext(istat_lookup=self.istat.lookup)
        output = apply_mapping(compiled, records, context)
        active = self.store.active_version(dataset_id)
        if active is not None and version == active:
            self.store.insert(output.quads)  # re-map of the live version: fixpoint
        elif active is not None and version < active:
            raise WorkspaceError(
                f"{dataset_id} v{version} is older than the active graph v{active}"
            )
        else:
            self.store.replace_graph(dataset_id, version, output.quads)
        return output

    # -- inference & validation --------------------------------------------------

    def refresh_inference(self) -> GraphId:
        return materialize_inference(self.store, self.catalog)

    def constraint_violations(self):
        return check_constraints(self.store, self.catalog)

    def checks(self):
        checks = builtin_checks(self.catalog)
        if self.config.checks_path:
            checks = checks + load_checks(self.root / self.config.checks_path)
        return checks

    def validate(
        self, baseline: str | None = None
    ) -> tuple[CheckRun, RegressionReport | None]:
        run = run_checks(self.store, self.catalog, self.checks())
        base_run = None
        if baseline:
            base_run = self.runs.get(baseline)
            if base_run is None:
                raise WorkspaceError(f"no validation run {baseline!r}")
        else:
            base_run = self.runs.latest()
        self.runs.save(run)
        report = diff_runs(base_run, run) if base_run else None
        return run, report

    # -- reconciliation -----------------------------------------------------------

    def _pipeline_config(self, output_graph: GraphId) -> PipelineConfig:
        return PipelineConfig(
            qualifier_table=self.qualifier_table,
            municipality_aliases=self.aliases,
            output_graph=output_graph,
        )

    def reconcile_all(self):
        """Full pipeline run: links land in a fresh reconciliation graph,
        ambiguous outcomes join the review queue."""
        version = (self.store.active_version("reconciliation") or 0) + 1
        graph = GraphId("reconciliation", version)
        reconciler = Reconciler(self.store, self._pipeline_config(graph), self.catalog)
        outcomes = reconciler.reconcile_all()
        emitted = [q for outcome in outcomes.values() for q in outcome.emitted_quads]
        self.store.replace_graph("reconciliation", version, emitted)
        road_names = {
            str(view.iri): view.official for view in reconciler.gazetteer.roads.values()
        }
        stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        for outcome in outcomes.values():
            if outcome.level != "pending-review":
                continue
            coords = {}
            for cand in outcome.candidates:
                target = cand.entry_iri or cand.road_iri
                point = entry_coordinates(self.store, target)
                if point:
                    coords[str(target)] = point
            self.review_queue.add_outcome(
                outcome, road_names, coords, discovered_at=stamp
            )
        return outcomes

    def reconcile_service(self, service_iri: str):
        graph = GraphId("reconciliation", self.store.active_version("reconciliation") or 1)
        reconciler = Reconciler(self.store, self._pipeline_config(graph), self.catalog)
        outcome = reconciler.reconcile(Iri(service_iri))
        if outcome.emitted_quads:
            self.store.insert(outcome.emitted_quads)
        return outcome

    def resolve_review(
        self, review_id: str, choice: str, idempotency_key: str, reviewer: str = ""
    ):
        version = self.store.active_version(RESOLUTIONS_DATASET) or 1
        resolution = self.review_queue.resolve(
            review_id,
            choice,
            idempotency_key,
            reviewer=reviewer,
            resolved_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            output_graph=GraphId(RESOLUTIONS_DATASET, version),
        )
        if resolution.emitted and not resolution.replay:
            self.store.insert(resolution.emitted)
            self.save_store()
        return resolution


# -- demo bootstrap ------------------------------------------------------------------


def create_demo_workspace(
    root: str | Path,
    spec: CorpusSpec | None = None,
    seed: int = 1,
    services: int = 400,
) -> tuple[Workspace, Corpus]:
    """A ready-to-serve workspace built from a generated corpus: street guide
    and services loaded, pipeline run, ambiguous cases queued."""
    root = Path(root)
    spec = spec or CorpusSpec(
        seed=seed,
        municipalities=3,
        roads_per_municipality=30,
        services=services,
        corruption_mix={
            "clean": 0.3,
            "qualifier-variant": 0.1,
            "word-swap": 0.2,
            "strange-chars": 0.1,
            "municipality-alias": 0.1,
            "typo": 0.05,
            "missing-number": 0.05,
            "snc": 0.05,
            "red-number": 0.025,
            "roman-numeral": 0.025,
        },
        ambiguous_share=0.5,
    )
    corpus = generate_corpus(spec)
    root.mkdir(parents=True, exist_ok=True)
    write_corpus(corpus, root)
    (root / CONFIG_NAME).write_text(
        "# generated demo workspace\n"
        "base http://citykb.local/resource\n"
        "table aliases municipality_aliases.txt\n"
        "table istat istat.txt\n"
        "\n"
        "dataset street_guide\n"
        "  source street_guide.nq\n"
        "  format nquads\n"
        "\n"
        "dataset services\n"
        "  source services.csv\n"
        "  format csv\n"
        "  mapping services.map\n",
        encoding="utf-8",
    )
    workspace = Workspace(root)
    workspace.ingest("street_guide")
    workspace.ingest("services")
    workspace.map_dataset("services")
    workspace.reconcile_all()
    workspace.refresh_inference()
    workspace.validate()
    workspace.save_store()
    return workspace, corpus
