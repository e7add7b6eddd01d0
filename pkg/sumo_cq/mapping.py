"""Reader for the lexicon-to-ontology mapping files.

Mapping lines repeat the `data.<pos>` record of a synset and end with one or
more `&%<Concept><suffix>` annotations, e.g. `... | a solid-hoofed ... &%Horse=`.
"""
import collections
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List

from smart_open import open

from sumo_cq.errors import MappingFormatError
from sumo_cq.wordnet import POS_NAMES, SynsetId, synset_id

logger = logging.getLogger(__name__)

_ANNOTATION = re.compile(r"&%([A-Za-z0-9_\-]+)(\S?)")
_OFFSET = re.compile(r"\d{8}\Z")


class MappingRelation(str, Enum):
    EQUIVALENCE = "="
    SUBSUMPTION = "+"
    INSTANCE = "@"
    NOT_EQUIVALENCE = "!="
    NOT_SUBSUMPTION = "!+"

    @property
    def is_complement(self):
        return self in (MappingRelation.NOT_EQUIVALENCE, MappingRelation.NOT_SUBSUMPTION)

    @property
    def base(self):
        if self is MappingRelation.NOT_EQUIVALENCE:
            return MappingRelation.EQUIVALENCE
        if self is MappingRelation.NOT_SUBSUMPTION:
            return MappingRelation.SUBSUMPTION
        return self

    @property
    def strength(self):
        return _STRENGTH[self.base]


_STRENGTH = {
    MappingRelation.EQUIVALENCE: 3,
    MappingRelation.INSTANCE: 2,
    MappingRelation.SUBSUMPTION: 1,
}

# `:` and `[` are the complement markers of the distributed files
DEFAULT_SUFFIXES = {
    "=": MappingRelation.EQUIVALENCE,
    "+": MappingRelation.SUBSUMPTION,
    "@": MappingRelation.INSTANCE,
    ":": MappingRelation.NOT_EQUIVALENCE,
    "[": MappingRelation.NOT_SUBSUMPTION,
}


def suffix_table(config_suffixes=None):
    """Builds a suffix table from `{"=": "EQUIVALENCE", ...}` style configuration."""
    if not config_suffixes:
        return dict(DEFAULT_SUFFIXES)
    table = {}
    for suffix, relation in config_suffixes.items():
        if len(suffix) != 1:
            raise MappingFormatError(f"mapping suffix {suffix!r} must be one character")
        try:
            table[suffix] = MappingRelation[relation.upper()]
        except KeyError:
            raise MappingFormatError(f"unknown mapping relation {relation!r}") from None
    return table


@dataclass(frozen=True, order=True)
class MappingEntry:
    concept: str
    relation: MappingRelation

    def to_json(self):
        return [self.concept, self.relation.value]

    @classmethod
    def from_json(cls, row):
        return cls(row[0], MappingRelation(row[1]))

    def __str__(self):
        return f"{self.concept}{self.relation.value}"


@dataclass
class MappingData:
    mapping: Dict[SynsetId, List[MappingEntry]]
    unmapped: List[SynsetId] = field(default_factory=list)
    duplicates: int = 0
    counts: collections.Counter = field(default_factory=collections.Counter)

    def multi_mapped(self, pos=None):
        return [sid for sid, entries in self.mapping.items()
                if len(entries) > 1 and (pos is None or sid.pos == pos)]


def parse_mapping_line(line, suffixes, path=None, lineno=None):
    fields = line.split(None, 3)
    if len(fields) < 3 or not _OFFSET.match(fields[0]) or fields[2] not in POS_NAMES:
        raise MappingFormatError("not a synset record", path, lineno)
    sid = synset_id(fields[2], fields[0])

    entries = []
    for m in _ANNOTATION.finditer(line):
        concept, suffix = m.groups()
        if not suffix:
            raise MappingFormatError(f"annotation &%{concept} without a suffix", path, lineno)
        if suffix not in suffixes:
            raise MappingFormatError(f"unknown mapping suffix {suffix!r} after {concept}", path, lineno)
        entries.append(MappingEntry(concept, suffixes[suffix]))
    return sid, fields[2], entries


def parse_mapping_files(paths, suffixes=None):
    suffixes = suffixes or DEFAULT_SUFFIXES
    mapping = {}
    unmapped = []
    duplicates = 0
    counts = collections.Counter()

    for path in paths:
        with open(path, "r", encoding="utf-8", errors="replace") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip() or line[0].isspace() or line.startswith(";"):
                    continue
                sid, ss_type, entries = parse_mapping_line(line.rstrip("\n"), suffixes, path, lineno)

                kept = mapping.setdefault(sid, [])
                for e in entries:
                    if e in kept:
                        duplicates += 1
                    else:
                        kept.append(e)
                counts[POS_NAMES[ss_type]] += 1
                if not entries:
                    unmapped.append(sid)

    unmapped = sorted(set(sid for sid in unmapped if not mapping[sid]))
    logger.info(f"mapping: {len(mapping)} synsets, {len(unmapped)} unmapped, "
                f"{sum(len(v) > 1 for v in mapping.values())} with several concepts")
    return MappingData(dict(sorted(mapping.items())), unmapped, duplicates, counts)


def apply_corrections(mapping, corrections):
    """Renames concepts through a `{wrong: right}` table."""
    if not corrections:
        return mapping
    out = {}
    for sid, entries in mapping.items():
        fixed = []
        for e in entries:
            e = MappingEntry(corrections.get(e.concept, e.concept), e.relation)
            if e not in fixed:
                fixed.append(e)
        out[sid] = fixed
    return out
