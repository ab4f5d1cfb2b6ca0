"""Italian street-address normalization for the reconciliation pipeline.

Parsing is deliberately two-speed: the conservative number grammar accepts
only the well-formed civic shapes (plain, red "/R", single-letter exponent),
while the lenient re-parse used by the strip-and-retry step recovers the
usual garbled forms ("34/AB", "403D", "(12)", "ANG. 3").
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from importlib import resources
from itertools import product
from pathlib import Path

# Characters treated as noise inside street/number text. The trailing "ANG"
# word (corner marker) is handled separately. Configurable per deployment.
DEFAULT_STRANGE_CHARS = "-/°?.,()"

COLOR_RED = "R"
COLOR_BLACK = "B"

QUALIFIER_WORDS = (
    "VIA",
    "VIALE",
    "PIAZZA",
    "PIAZZALE",
    "VICOLO",
    "CORSO",
    "BORGO",
    "LARGO",
    "LUNGARNO",
    "STRADA",
    "LOCALITA",
)


def clean_token(token: str, strange_chars: str = DEFAULT_STRANGE_CHARS) -> str:
    return "".join(ch for ch in token.upper() if ch not in strange_chars).strip()


def tokenize_street(raw: str, strange_chars: str = DEFAULT_STRANGE_CHARS) -> list[str]:
    tokens = []
    for piece in raw.replace(",", " ").split():
        cleaned = clean_token(piece, strange_chars)
        if cleaned:
            tokens.append(cleaned)
    return tokens


@dataclass(frozen=True)
class StreetNumberToken:
    number: int | None = None
    exponent: str | None = None
    color: str = COLOR_BLACK
    anomalous: str | None = None  # zero | snc | unparsed
    raw: str = ""

    def __post_init__(self) -> None:
        if (self.number is None) == (self.anomalous is None):
            raise ValueError("exactly one of number/anomalous must be set")

    @property
    def usable(self) -> bool:
        return self.number is not None

    def key(self) -> tuple[int, str, str]:
        return (self.number or 0, self.exponent or "", self.color)


_PLAIN = re.compile(r"^(\d+)$")
_SLASH_SUFFIX = re.compile(r"^(\d+)/([A-Z])$")
_LENIENT = re.compile(r"^(\d+)([A-Z0-9]*)$")


def _parse_number_part(part: str) -> StreetNumberToken:
    part = part.strip()
    if _PLAIN.match(part):
        return StreetNumberToken(number=int(part), raw=part)
    m = _SLASH_SUFFIX.match(part)
    if m:
        number, letter = int(m.group(1)), m.group(2)
        if letter == COLOR_RED:
            return StreetNumberToken(number=number, color=COLOR_RED, raw=part)
        return StreetNumberToken(number=number, exponent=letter, raw=part)
    return StreetNumberToken(anomalous="unparsed", raw=part)


def parse_number_field(raw: str) -> list[StreetNumberToken]:
    """Conservative parse of a civic-number field.

    Ranges/lists split on "-" and ","; "0" and "SNC" are flagged as the
    known placeholder anomalies; anything else odd is kept as unparsed.
    """
    text = raw.strip().upper()
    if not text:
        return []
    if text == "0":
        return [StreetNumberToken(anomalous="zero", raw=raw.strip())]
    if text == "SNC":
        return [StreetNumberToken(anomalous="snc", raw=raw.strip())]
    tokens = []
    for part in re.split(r"[-,]", text):
        part = part.strip()
        if part:
            tokens.append(_parse_number_part(part))
    return tokens


def lenient_number_field(
    raw: str, strange_chars: str = DEFAULT_STRANGE_CHARS
) -> list[StreetNumberToken]:
    """Aggressive re-parse: strip strange characters, drop corner markers,
    then split a leading digit run from whatever trails it."""
    text = raw.strip().upper()
    if not text or text in ("0", "SNC"):
        return parse_number_field(raw)
    tokens = []
    for part in re.split(r"[-,]", text):
        words = [w for w in part.split() if clean_token(w, strange_chars) not in ("", "ANG")]
        squashed = clean_token("".join(words), strange_chars)
        if not squashed:
            continue
        m = _LENIENT.match(squashed)
        if not m or not m.group(1):
            tokens.append(StreetNumberToken(anomalous="unparsed", raw=part.strip()))
            continue
        number, suffix = int(m.group(1)), m.group(2)
        if suffix == "":
            tokens.append(StreetNumberToken(number=number, raw=part.strip()))
        elif suffix == COLOR_RED:
            tokens.append(StreetNumberToken(number=number, color=COLOR_RED, raw=part.strip()))
        else:
            tokens.append(StreetNumberToken(number=number, exponent=suffix, raw=part.strip()))
    return tokens


@dataclass(frozen=True)
class NormalizedAddress:
    raw_street: str
    raw_number: str
    street_tokens: tuple[str, ...]
    qualifier: str | None
    number_tokens: tuple[StreetNumberToken, ...]
    municipality_raw: str
    municipality_canonical: str | None = None

    @property
    def street_key(self) -> str:
        return " ".join(self.street_tokens)

    @property
    def empty(self) -> bool:
        return not (self.raw_street.strip() or self.raw_number.strip() or self.municipality_raw.strip())

    def with_street(self, tokens: list[str]) -> "NormalizedAddress":
        qualifier = tokens[0] if tokens and tokens[0] in QUALIFIER_WORDS else None
        return replace(self, street_tokens=tuple(tokens), qualifier=qualifier)


def parse_address(
    street: str,
    number: str,
    municipality: str,
    strange_chars: str = DEFAULT_STRANGE_CHARS,
) -> NormalizedAddress:
    tokens = tokenize_street(street, strange_chars)
    qualifier = tokens[0] if tokens and tokens[0] in QUALIFIER_WORDS else None
    return NormalizedAddress(
        raw_street=street,
        raw_number=number,
        street_tokens=tuple(tokens),
        qualifier=qualifier,
        number_tokens=tuple(parse_number_field(number)),
        municipality_raw=" ".join(tokenize_street(municipality, strange_chars)),
    )


# -- support tables -----------------------------------------------------------


class TableFormatError(ValueError):
    pass


@dataclass
class QualifierTable:
    """Toponym-notation variants: canonical word -> accepted shorthands.

    Variants are stored token-cleaned, since comparison always happens on
    cleaned tokens. The table must keep variant sets disjoint and no variant
    may collide with a different canonical.
    """

    variants: dict[str, frozenset[str]] = field(default_factory=dict)
    _to_canonical: dict[str, str] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        mapping: dict[str, str] = {}
        for canonical, variant_set in self.variants.items():
            for variant in variant_set:
                owner = mapping.get(variant)
                if owner is not None and owner != canonical:
                    raise TableFormatError(
                        f"variant {variant!r} claimed by both {owner!r} and {canonical!r}"
                    )
                if variant in self.variants and variant != canonical:
                    raise TableFormatError(
                        f"variant {variant!r} equals a different canonical word"
                    )
                mapping[variant] = canonical
        self._to_canonical = mapping

    def alternatives(self, token: str) -> frozenset[str]:
        """Every other way to write `token`, per the table."""
        canonical = self._to_canonical.get(token)
        if canonical is not None:
            return frozenset({canonical} | self.variants[canonical]) - {token}
        if token in self.variants:
            return self.variants[token]
        return frozenset()

    def expansions(self, tokens: tuple[str, ...], limit: int = 128) -> list[tuple[str, ...]]:
        """All rewritings of the token sequence (identity first), capped."""
        options = [(token,) + tuple(sorted(self.alternatives(token))) for token in tokens]
        out = []
        for combo in product(*options):
            out.append(combo)
            if len(out) >= limit:
                break
        return out

    @classmethod
    def from_pairs(cls, pairs: list[tuple[str, str]]) -> "QualifierTable":
        table: dict[str, set[str]] = {}
        for canonical, variant in pairs:
            canonical_clean = clean_token(canonical)
            variant_clean = clean_token(variant)
            if not canonical_clean or not variant_clean:
                continue
            if variant_clean != canonical_clean:
                table.setdefault(canonical_clean, set()).add(variant_clean)
        return cls({k: frozenset(v) for k, v in table.items()})

    @classmethod
    def from_text(cls, text: str) -> "QualifierTable":
        return cls.from_pairs(_parse_pair_lines(text))

    @classmethod
    def load(cls, path: str | Path) -> "QualifierTable":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def builtin(cls) -> "QualifierTable":
        text = resources.files("citykb.data").joinpath("qualifiers.txt").read_text("utf-8")
        return cls.from_text(text)


def _parse_pair_lines(text: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        first, sep, second = line.partition(",")
        if not sep:
            raise TableFormatError(f"line {lineno}: expected 'canonical,variant'")
        pairs.append((first.strip(), second.strip()))
    return pairs


class MunicipalityAliases:
    """Non-official municipality spellings -> official name (both normalized)."""

    def __init__(self, pairs: list[tuple[str, str]] | None = None):
        self._by_alias: dict[str, str] = {}
        for canonical, alias in pairs or []:
            canonical_norm = " ".join(tokenize_street(canonical))
            alias_norm = " ".join(tokenize_street(alias))
            if alias_norm and canonical_norm:
                self._by_alias[alias_norm] = canonical_norm

    def resolve(self, name_norm: str) -> str | None:
        return self._by_alias.get(name_norm)

    def __len__(self) -> int:
        return len(self._by_alias)

    @classmethod
    def from_text(cls, text: str) -> "MunicipalityAliases":
        return cls(_parse_pair_lines(text))

    @classmethod
    def load(cls, path: str | Path) -> "MunicipalityAliases":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def to_text(self) -> str:
        lines = [f"{canonical},{alias}" for alias, canonical in sorted(self._by_alias.items())]
        return "\n".join(lines) + ("\n" if lines else "")
