"""Reader for the morphosemantic links table.

The project distributes the table as a spreadsheet; export it to a
delimited text file first (see howto_inputs.md). Each row names a verb
sense, a relation and a noun sense. Senses may be sense keys
(`schedule%2:31:00::`), `lemma pos#n` notation (`schedule v#2`) or raw
offsets.
"""
import collections
import csv
import logging
from dataclasses import dataclass, field
from typing import List

from smart_open import open

from sumo_cq.errors import InputFormatError
from sumo_cq.wordnet import LexicalLink, LinkKind

logger = logging.getLogger(__name__)

RELATIONS = {
    "event": LinkKind.EVENT,
    "agent": LinkKind.AGENT,
    "instrument": LinkKind.INSTRUMENT,
    "result": LinkKind.RESULT,
}


@dataclass
class MorphosemanticLinks:
    links: List[LexicalLink]
    unresolved: List[dict] = field(default_factory=list)
    skipped_relations: collections.Counter = field(default_factory=collections.Counter)
    rows: int = 0


def parse_morphosemantic_links(path, sense_index, delimiter="\t", verb_column="verb",
                               relation_column="relation", noun_column="noun"):
    links = set()
    unresolved = []
    skipped = collections.Counter()
    rows = 0

    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f, delimiter=delimiter)
        header = next(reader, None)
        if header is None:
            return MorphosemanticLinks([])
        header = [h.strip() for h in header]
        try:
            verb_i, rel_i, noun_i = (header.index(c) for c in (verb_column, relation_column, noun_column))
        except ValueError:
            raise InputFormatError(f"header {header} lacks one of the columns "
                                   f"{verb_column!r}, {relation_column!r}, {noun_column!r}", path, 1)

        for lineno, row in enumerate(reader, 2):
            if not any(cell.strip() for cell in row):
                continue
            if len(row) <= max(verb_i, rel_i, noun_i):
                raise InputFormatError(f"row has {len(row)} cells", path, lineno)
            rows += 1

            relation = row[rel_i].strip().lower()
            kind = RELATIONS.get(relation)
            if kind is None:
                skipped[relation] += 1
                continue

            verb = sense_index.resolve(row[verb_i], pos_hint="v")
            noun = sense_index.resolve(row[noun_i], pos_hint="n")
            for column, text, sid, pos in ((verb_column, row[verb_i], verb, "v"),
                                           (noun_column, row[noun_i], noun, "n")):
                if sid is None:
                    unresolved.append({"line": lineno, "column": column, "sense": text.strip()})
                elif sid.pos != pos:
                    unresolved.append({"line": lineno, "column": column, "sense": text.strip(),
                                       "reason": f"expected pos {pos}, got {sid.pos}"})
            if verb is None or noun is None or verb.pos != "v" or noun.pos != "n":
                continue
            links.add(LexicalLink(kind, verb, noun))

    if unresolved:
        logger.warning(f"{path}: {len(unresolved)} unresolvable senses")
    if skipped:
        logger.info(f"{path}: skipped relations {dict(sorted(skipped.items()))}")

    return MorphosemanticLinks(sorted(links), unresolved, skipped, rows)
