"""Declarative record-to-statement mapping.

A mapping model names, per dataset, the entities minted from each record
(class + URI template), the cells that become data properties, and the links
between entities. Models are compiled against the ontology catalog before
use, so every reference mistake is caught with its file location, once, and
application stays a straight loop.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Iterable
from urllib.parse import quote

from .ingestion import RawRecord
from .ontology import SchemaCatalog, TEMPORAL_PAIRS
from .terms import (
    GraphId,
    Iri,
    Literal,
    Quad,
    XSD_BOOLEAN,
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    iri_is_wellformed,
)
from .vocab import RDF_TYPE, RESOURCE_NS, TIME_IN_XSD_DATETIME


class MappingError(Exception):
    pass


@dataclass(frozen=True)
class CompileIssue:
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.location}: {self.message}"


class MappingCompileError(MappingError):
    def __init__(self, issues: list[CompileIssue]):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


DATATYPES: dict[str, Iri] = {
    "string": XSD_STRING,
    "integer": XSD_INTEGER,
    "decimal": XSD_DECIMAL,
    "double": XSD_DOUBLE,
    "datetime": XSD_DATETIME,
    "boolean": XSD_BOOLEAN,
}

TRANSFORMS = ("trim", "uppercase", "parse-decimal", "istat-lookup")


@dataclass(frozen=True)
class DataPropertyMap:
    column: str
    property_name: str
    datatype: str = "string"
    transform: str | None = None


@dataclass(frozen=True)
class EntityMap:
    alias: str
    class_name: str
    uri_template: str
    data_properties: tuple[DataPropertyMap, ...] = ()
    temporal: tuple[str, str] | None = None  # (kind, timestamp column)


@dataclass(frozen=True)
class LinkMap:
    subject_alias: str
    property_name: str
    object_alias: str


@dataclass(frozen=True)
class MappingModel:
    dataset_id: str
    entity_maps: tuple[EntityMap, ...]
    link_maps: tuple[LinkMap, ...] = ()


# -- model file -----------------------------------------------------------

_PROP_LINE = re.compile(
    r"^prop\s+(?P<prop>\S+)\s+from\s+(?P<col>\S+)"
    r"(?:\s+as\s+(?P<dt>\S+))?(?:\s*\|\s*(?P<tr>\S+))?$"
)


def parse_model_text(text: str, source: str = "<string>") -> MappingModel:
    """Parse the three-section model format (entities, properties, links)."""
    dataset_id: str | None = None
    entities: list[EntityMap] = []
    links: list[LinkMap] = []
    issues: list[CompileIssue] = []

    current: dict | None = None

    def flush() -> None:
        nonlocal current
        if current is None:
            return
        if current.get("class") is None or current.get("uri") is None:
            issues.append(
                CompileIssue(
                    f"{source}:{current['line']}",
                    f"entity {current['alias']!r} needs both a class and a uri line",
                )
            )
        else:
            entities.append(
                EntityMap(
                    current["alias"],
                    current["class"],
                    current["uri"],
                    tuple(current["props"]),
                    current["temporal"],
                )
            )
        current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        where = f"{source}:{lineno}"
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "dataset":
            dataset_id = rest
        elif head == "entity":
            flush()
            current = {
                "alias": rest,
                "class": None,
                "uri": None,
                "props": [],
                "temporal": None,
                "line": lineno,
            }
        elif head == "class" and current is not None:
            current["class"] = rest
        elif head == "uri" and current is not None:
            current["uri"] = rest
        elif head == "prop" and current is not None:
            m = _PROP_LINE.match(line)
            if not m:
                issues.append(CompileIssue(where, f"bad prop line: {line!r}"))
                continue
            current["props"].append(
                DataPropertyMap(
                    m.group("col"),
                    m.group("prop"),
                    m.group("dt") or "string",
                    m.group("tr"),
                )
            )
        elif head == "temporal" and current is not None:
            parts = rest.split()
            if len(parts) == 3 and parts[1] == "from":
                current["temporal"] = (parts[0], parts[2])
            else:
                issues.append(CompileIssue(where, f"bad temporal line: {line!r}"))
        elif head == "link":
            parts = rest.split()
            if len(parts) == 3:
                links.append(LinkMap(parts[0], parts[1], parts[2]))
            else:
                issues.append(
                    CompileIssue(where, "link needs: link <subject> <property> <object>")
                )
        else:
            issues.append(CompileIssue(where, f"unrecognized line: {line!r}"))
    flush()
    if dataset_id is None:
        issues.append(CompileIssue(source, "missing dataset line"))
    if issues:
        raise MappingCompileError(issues)
    return MappingModel(dataset_id, tuple(entities), tuple(links))


def load_model(path) -> MappingModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model_text(fh.read(), source=str(path))


# -- compilation ------------------------------------------------------------

_PLACEHOLDER = re.compile(r"\{([A-Za-z0-9_.:-]+)\}")


@dataclass(frozen=True)
class _CompiledTemplate:
    parts: tuple[str, ...]  # literal fragments, len(columns)+1
    columns: tuple[str, ...]

    def render(self, fields: dict[str, str]) -> str | None:
        """None when any referenced column is empty (no IRI can be minted)."""
        parts = self.parts
        out = [parts[0]]
        for i, column in enumerate(self.columns):
            value = fields.get(column, "").strip()
            if not value:
                return None
            out.append(quote(value, safe=""))
            out.append(parts[i + 1])
        return "".join(out)


@dataclass(frozen=True)
class _CompiledProperty:
    column: str
    iri: Iri
    datatype: Iri
    transform: str | None
    numeric: bool


@dataclass(frozen=True)
class _CompiledEntity:
    alias: str
    class_iri: Iri
    template: _CompiledTemplate
    properties: tuple[_CompiledProperty, ...]
    temporal: tuple[str, str] | None
    columns: tuple[str, ...]  # everything this entity reads


@dataclass(frozen=True)
class _CompiledLink:
    subject_alias: str
    property_iri: Iri
    object_alias: str


@dataclass(frozen=True)
class CompiledMapping:
    dataset_id: str
    entities: tuple[_CompiledEntity, ...]
    links: tuple[_CompiledLink, ...]


def _compile_template(
    template: str, base: str, columns: set[str] | None, where: str, issues: list[CompileIssue]
) -> _CompiledTemplate:
    literals: list[str] = []
    refs: list[str] = []
    pos = 0
    pending = ""
    for m in _PLACEHOLDER.finditer(template):
        pending += template[pos : m.start()]
        name = m.group(1)
        if name == "base":
            pending += base
        else:
            literals.append(pending)
            pending = ""
            refs.append(name)
            if columns is not None and name not in columns:
                issues.append(
                    CompileIssue(where, f"uri template references missing column {name!r}")
                )
        pos = m.end()
    pending += template[pos:]
    literals.append(pending)
    compiled = _CompiledTemplate(tuple(literals), tuple(refs))
    probe = compiled.render({c: "x" for c in refs})
    if probe is None or not iri_is_wellformed(probe, RESOURCE_NS):
        issues.append(
            CompileIssue(where, f"uri template does not produce an absolute IRI: {template!r}")
        )
    return compiled


def compile_mapping(
    model: MappingModel,
    catalog: SchemaCatalog,
    columns: set[str] | None = None,
    base: str = RESOURCE_NS.rstrip("/"),
) -> CompiledMapping:
    """Resolve and type-check a model; raises MappingCompileError listing
    every problem with its model location."""
    issues: list[CompileIssue] = []
    entities: list[_CompiledEntity] = []
    by_alias: dict[str, _CompiledEntity] = {}

    seen_aliases: set[str] = set()
    for emap in model.entity_maps:
        where = f"entity {emap.alias}"
        if emap.alias in seen_aliases:
            issues.append(CompileIssue(where, "duplicate alias"))
            continue
        seen_aliases.add(emap.alias)
        try:
            class_iri = catalog.resolve(_default_ns(emap.class_name))
        except ValueError as exc:
            issues.append(CompileIssue(where, str(exc)))
            continue
        if class_iri not in catalog.classes:
            issues.append(CompileIssue(where, f"unknown class {emap.class_name!r}"))
            continue
        template = _compile_template(emap.uri_template, base, columns, where, issues)
        props: list[_CompiledProperty] = []
        for pmap in emap.data_properties:
            pwhere = f"{where}, prop {pmap.property_name}"
            try:
                prop_iri = catalog.resolve(_default_ns(pmap.property_name))
            except ValueError as exc:
                issues.append(CompileIssue(pwhere, str(exc)))
                continue
            pdef = catalog.properties.get(prop_iri)
            if pdef is None:
                issues.append(CompileIssue(pwhere, "unknown property"))
                continue
            if pdef.kind != "data-property":
                issues.append(CompileIssue(pwhere, "object property cannot carry a cell value"))
                continue
            if pmap.datatype not in DATATYPES:
                issues.append(CompileIssue(pwhere, f"unknown datatype {pmap.datatype!r}"))
                continue
            if pmap.transform is not None and pmap.transform not in TRANSFORMS:
                issues.append(CompileIssue(pwhere, f"unknown transform {pmap.transform!r}"))
                continue
            if columns is not None and pmap.column not in columns:
                issues.append(CompileIssue(pwhere, f"missing column {pmap.column!r}"))
                continue
            datatype = DATATYPES[pmap.datatype]
            props.append(
                _CompiledProperty(
                    pmap.column,
                    prop_iri,
                    datatype,
                    pmap.transform,
                    datatype != XSD_STRING and datatype != XSD_DATETIME and datatype != XSD_BOOLEAN,
                )
            )
        temporal = None
        if emap.temporal is not None:
            kind, column = emap.temporal
            if kind not in TEMPORAL_PAIRS:
                issues.append(CompileIssue(where, f"unknown temporal kind {kind!r}"))
            elif columns is not None and column not in columns:
                issues.append(CompileIssue(where, f"temporal column {column!r} missing"))
            else:
                temporal = (kind, column)
        read = tuple(
            dict.fromkeys(
                list(template.columns)
                + [p.column for p in props]
                + ([temporal[1]] if temporal else [])
            )
        )
        compiled = _CompiledEntity(emap.alias, class_iri, template, tuple(props), temporal, read)
        entities.append(compiled)
        by_alias[emap.alias] = compiled

    links: list[_CompiledLink] = []
    for lmap in model.link_maps:
        where = f"link {lmap.subject_alias} {lmap.property_name} {lmap.object_alias}"
        subj = by_alias.get(lmap.subject_alias)
        obj = by_alias.get(lmap.object_alias)
        if subj is None or obj is None:
            issues.append(CompileIssue(where, "link references an undeclared alias"))
            continue
        try:
            prop_iri = catalog.resolve(_default_ns(lmap.property_name))
        except ValueError as exc:
            issues.append(CompileIssue(where, str(exc)))
            continue
        pdef = catalog.properties.get(prop_iri)
        if pdef is None:
            issues.append(CompileIssue(where, "unknown property"))
            continue
        if pdef.kind != "object-property":
            issues.append(CompileIssue(where, "data property cannot link two entities"))
            continue
        if pdef.domain and not any(
            catalog.is_subclass_of(subj.class_iri, d) for d in pdef.domain
        ):
            issues.append(
                CompileIssue(where, f"domain of {lmap.property_name} excludes {subj.class_iri}")
            )
            continue
        if (
            pdef.range is not None
            and pdef.range in catalog.classes
            and not catalog.is_subclass_of(obj.class_iri, pdef.range)
        ):
            issues.append(
                CompileIssue(where, f"range of {lmap.property_name} excludes {obj.class_iri}")
            )
            continue
        links.append(_CompiledLink(lmap.subject_alias, prop_iri, lmap.object_alias))

    if issues:
        raise MappingCompileError(issues)
    return CompiledMapping(model.dataset_id, tuple(entities), tuple(links))


def _default_ns(name: str) -> str:
    if "://" in name or ":" in name:
        return name
    return f"city:{name}"


# -- application -------------------------------------------------------------


@dataclass(frozen=True)
class CellIssue:
    row_index: int
    column: str
    message: str


@dataclass
class MappingOutput:
    quads: list[Quad] = field(default_factory=list)
    issues: list[CellIssue] = field(default_factory=list)


class TransformContext:
    """Runtime lookups needed by transforms (currently the ISTAT table)."""

    def __init__(self, istat_lookup: Callable[[str], str | None] | None = None):
        self.istat_lookup = istat_lookup


def _cell_is_suppressed(value: str, numeric: bool) -> bool:
    stripped = value.strip()
    if not stripped:
        return True
    if stripped.upper() == "SNC":
        return True
    return numeric and stripped == "0"


def apply_mapping(
    compiled: CompiledMapping,
    records: Iterable[RawRecord],
    context: TransformContext | None = None,
) -> MappingOutput:
    """Run the plan over records; output is fully determined by the inputs.

    Quads land in the graph (dataset, record version). A cell that fails its
    datatype or transform is reported and skipped; the record's other quads
    are still produced.
    """
    out = MappingOutput()
    quads = out.quads
    issues = out.issues
    context = context or TransformContext()
    for record in records:
        if record.dataset_id != compiled.dataset_id:
            raise MappingError(
                f"record from {record.dataset_id!r} fed to mapping "
                f"for {compiled.dataset_id!r}"
            )
        graph = GraphId(record.dataset_id, record.version)
        fields = record.fields
        minted: dict[str, Iri] = {}
        for entity in compiled.entities:
            if not any(fields.get(col, "").strip() for col in entity.columns):
                continue  # nothing of this entity in the record
            subject_str = entity.template.render(fields)
            if subject_str is None:
                issues.append(
                    CellIssue(
                        record.row_index,
                        ",".join(entity.template.columns),
                        f"entity {entity.alias}: uri column empty, entity skipped",
                    )
                )
                continue
            subject = Iri(subject_str)
            minted[entity.alias] = subject
            quads.append(Quad(subject, RDF_TYPE, entity.class_iri, graph))
            for prop in entity.properties:
                value = fields.get(prop.column, "")
                if _cell_is_suppressed(value, prop.numeric):
                    continue
                transformed, problem = _apply_transform(value, prop, context)
                if problem is not None:
                    issues.append(CellIssue(record.row_index, prop.column, problem))
                    continue
                quads.append(
                    Quad(subject, prop.iri, Literal(transformed, prop.datatype), graph)
                )
            if entity.temporal is not None:
                kind, column = entity.temporal
                stamp = fields.get(column, "").strip()
                if stamp:
                    try:
                        quads.extend(temporal_link(subject, kind, stamp, graph))
                    except ValueError as exc:
                        issues.append(CellIssue(record.row_index, column, str(exc)))
        for link in compiled.links:
            subject = minted.get(link.subject_alias)
            obj = minted.get(link.object_alias)
            if subject is not None and obj is not None:
                quads.append(Quad(subject, link.property_iri, obj, graph))
    return out


def _apply_transform(
    value: str, prop: _CompiledProperty, context: TransformContext
) -> tuple[str, str | None]:
    if prop.transform == "trim":
        value = value.strip()
    elif prop.transform == "uppercase":
        value = value.strip().upper()
    elif prop.transform == "parse-decimal":
        value = value.strip().replace(" ", "")
        if "," in value and "." not in value:
            value = value.replace(",", ".")
    elif prop.transform == "istat-lookup":
        if context.istat_lookup is None:
            return value, "istat-lookup transform needs an ISTAT table"
        code = context.istat_lookup(value)
        if code is None:
            return value, f"no ISTAT code for municipality {value.strip()!r}"
        value = code
    problem = _check_datatype(value, prop.datatype)
    return value, problem


def _check_datatype(value: str, datatype: Iri) -> str | None:
    try:
        if datatype == XSD_INTEGER:
            int(value)
        elif datatype in (XSD_DECIMAL, XSD_DOUBLE):
            float(value)
        elif datatype == XSD_DATETIME:
            _parse_utc(value)
        elif datatype == XSD_BOOLEAN and value.lower() not in ("true", "false", "0", "1"):
            return f"not a boolean: {value!r}"
    except ValueError:
        return f"value {value!r} does not parse as {datatype.rpartition('#')[2]}"
    return None


# -- time instants -------------------------------------------------------------

_FRAGMENT_BY_KIND = {
    "parking": "instantParking",
    "wreport": "instantWReport",
    "observation": "instantObserv",
    "forecast": "instantForecast",
    "avm": "instantAVM",
}


def _parse_utc(timestamp: str) -> datetime:
    parsed = datetime.fromisoformat(timestamp.replace("Z", "+00:00"))
    if parsed.tzinfo is None or parsed.utcoffset() != timezone.utc.utcoffset(None):
        raise ValueError(f"timestamp must be UTC ISO-8601: {timestamp!r}")
    return parsed


def temporal_link(
    resource: Iri, kind: str, timestamp: str, graph: GraphId
) -> list[Quad]:
    """Mint the per-(resource, timestamp) instant and its three statements.

    The instant URI hangs off the resource URI, so identical timestamps on
    different resources always yield distinct instants, and repeating the
    call is exact.
    """
    if kind not in TEMPORAL_PAIRS:
        raise ValueError(f"unknown temporal kind {kind!r}")
    _parse_utc(timestamp)
    forward, backward = TEMPORAL_PAIRS[kind]
    instant = Iri(f"{resource}#{_FRAGMENT_BY_KIND[kind]}_{timestamp}")
    return [
        Quad(resource, forward, instant, graph),
        Quad(instant, backward, resource, graph),
        Quad(instant, TIME_IN_XSD_DATETIME, Literal(timestamp, XSD_DATETIME), graph),
    ]
