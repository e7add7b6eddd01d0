"""Reader for the lexical database files (`data.<pos>` and `index.sense`)."""
import collections
import logging
import multiprocessing.pool
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple

from smart_open import open

from sumo_cq.errors import WordNetFormatError

logger = logging.getLogger(__name__)

POS_NAMES = {"n": "noun", "v": "verb", "a": "adjective", "s": "satellite", "r": "adverb"}
DATA_FILES = {"n": "data.noun", "v": "data.verb", "a": "data.adj", "r": "data.adv"}
SENSE_KEY_SS_TYPE = {"1": "n", "2": "v", "3": "a", "4": "r", "5": "s"}

ANTONYM_POINTER = "!"
SIMILAR_POINTER = "&"

_ADJ_MARKER = re.compile(r"\((?:a|p|ip)\)$")
_OFFSET = re.compile(r"\d{8}\Z")
_LEMMA_SENSE = re.compile(r"^(?P<lemma>.+?)[ #](?P<pos>[nvasr])#(?P<sense>\d+)$")
_OFFSET_REF = re.compile(r"^(?P<offset>\d{8})(?:[-#](?P<pos>[nvasr]))?$")


class SynsetId(NamedTuple):
    """(pos, offset). Satellites live in the adjective file and use pos `a`."""
    pos: str
    offset: int

    def __str__(self):
        return f"{self.offset:08d}-{self.pos}"

    @classmethod
    def parse(cls, text):
        offset, _, pos = text.partition("-")
        return cls(pos, int(offset))


def synset_id(pos, offset):
    return SynsetId("a" if pos == "s" else pos, int(offset))


class LinkKind(str, Enum):
    ANTONYM = "antonym"
    SIMILAR = "similar"
    EVENT = "event"
    AGENT = "agent"
    INSTRUMENT = "instrument"
    RESULT = "result"


PROCESS_LINKS = (LinkKind.AGENT, LinkKind.INSTRUMENT, LinkKind.RESULT)


@dataclass(frozen=True)
class Synset:
    id: SynsetId
    pos: str
    lemmas: Tuple[str, ...]
    gloss: Optional[str] = None

    def to_json(self):
        return {"id": str(self.id), "pos": self.pos, "lemmas": list(self.lemmas), "gloss": self.gloss}

    @classmethod
    def from_json(cls, d):
        return cls(SynsetId.parse(d["id"]), d["pos"], tuple(d["lemmas"]), d.get("gloss"))


@dataclass(frozen=True, order=True)
class LexicalLink:
    kind: LinkKind
    source: SynsetId
    target: SynsetId

    def to_json(self):
        return [self.kind.value, str(self.source), str(self.target)]

    @classmethod
    def from_json(cls, row):
        return cls(LinkKind(row[0]), SynsetId.parse(row[1]), SynsetId.parse(row[2]))


def undirected(kind, a, b):
    """Antonym and similar links are stored once, with source < target."""
    return LexicalLink(kind, min(a, b), max(a, b))


@dataclass
class WordNetData:
    synsets: Dict[SynsetId, Synset]
    antonyms: List[LexicalLink]
    similars: List[LexicalLink]
    counts: collections.Counter
    ignored_pointers: collections.Counter


def parse_data_line(line, path=None, lineno=None):
    """Returns the synset of one data line and its (symbol, target) pointers."""
    def fail(msg):
        raise WordNetFormatError(msg, path, lineno)

    head, bar, gloss = line.partition(" | ")
    if not bar and line.rstrip().endswith(" |"):
        head, gloss = line.rstrip()[:-2], ""
    fields = head.split()
    if len(fields) < 6:
        fail("truncated synset record")

    offset, _, ss_type = fields[0], fields[1], fields[2]
    if not _OFFSET.match(offset):
        fail(f"bad synset offset {offset!r}")
    if ss_type not in POS_NAMES:
        fail(f"bad synset type {ss_type!r}")
    try:
        w_cnt = int(fields[3], 16)
    except ValueError:
        fail(f"bad word count {fields[3]!r}")
    if w_cnt == 0:
        fail("synset without words")

    i = 4
    words = fields[i:i + 2 * w_cnt:2]
    i += 2 * w_cnt
    if len(words) != w_cnt or i >= len(fields):
        fail("word list shorter than its count")
    lemmas = tuple(_ADJ_MARKER.sub("", w) for w in words)

    try:
        p_cnt = int(fields[i])
    except ValueError:
        fail(f"bad pointer count {fields[i]!r}")
    i += 1
    pointers = []
    for _ in range(p_cnt):
        if i + 4 > len(fields):
            fail("pointer list shorter than its count")
        symbol, target, pos, src_tgt = fields[i:i + 4]
        if not _OFFSET.match(target) or pos not in POS_NAMES or len(src_tgt) != 4:
            fail(f"malformed pointer {' '.join(fields[i:i + 4])!r}")
        pointers.append((symbol, synset_id(pos, target)))
        i += 4

    synset = Synset(synset_id(ss_type, offset), POS_NAMES[ss_type], lemmas, gloss.strip() or None)
    return synset, pointers


def _parse_data_file(path):
    synsets = []
    antonyms, similars = set(), set()
    ignored = collections.Counter()

    with open(path, "r", encoding="utf-8", errors="replace") as f:
        for lineno, line in enumerate(f, 1):
            # license header lines start with spaces
            if not line.strip() or line[0].isspace():
                continue
            synset, pointers = parse_data_line(line.rstrip("\n"), path, lineno)
            synsets.append(synset)
            for symbol, target in pointers:
                if symbol == ANTONYM_POINTER:
                    antonyms.add(undirected(LinkKind.ANTONYM, synset.id, target))
                elif symbol == SIMILAR_POINTER:
                    similars.add(undirected(LinkKind.SIMILAR, synset.id, target))
                else:
                    ignored[symbol] += 1

    return synsets, antonyms, similars, ignored


def parse_wordnet_data(paths, parallelism=4):
    """Parses `data.<pos>` files.

    Antonym and similar pointers are collected as unordered synset pairs, so
    the two directions the database lists for each pointer collapse into one
    link and the result is symmetric whichever direction was present.
    """
    paths = list(paths.values()) if isinstance(paths, dict) else list(paths)

    with multiprocessing.pool.ThreadPool(max(1, min(parallelism, len(paths) or 1))) as p:
        parsed = p.map(_parse_data_file, paths)

    synsets = {}
    antonyms, similars = set(), set()
    counts = collections.Counter()
    ignored = collections.Counter()
    for path, (file_synsets, file_antonyms, file_similars, file_ignored) in zip(paths, parsed):
        for s in file_synsets:
            if s.id in synsets:
                raise WordNetFormatError(f"duplicate synset {s.id}", path)
            synsets[s.id] = s
            counts[s.pos] += 1
        antonyms |= file_antonyms
        similars |= file_similars
        ignored.update(file_ignored)

    logger.info(f"parsed {len(synsets)} synsets ({dict(sorted(counts.items()))}), "
                f"{len(antonyms)} antonym and {len(similars)} similar links")
    if ignored:
        logger.info(f"ignored pointers: {dict(sorted(ignored.items()))}")

    return WordNetData(dict(sorted(synsets.items())), sorted(antonyms), sorted(similars), counts, ignored)


class SenseIndex:
    """Resolves sense keys, `lemma pos#n` notation and raw offsets to synset ids."""

    def __init__(self, by_key=None, by_lemma=None):
        self.by_key = by_key or {}
        self.by_lemma = by_lemma or {}

    def __len__(self):
        return len(self.by_key)

    def resolve(self, text, pos_hint=None) -> Optional[SynsetId]:
        text = text.strip()
        if "%" in text:
            return self.by_key.get(text.lower())
        m = _LEMMA_SENSE.match(text)
        if m:
            pos = "a" if m["pos"] == "s" else m["pos"]
            return self.by_lemma.get((m["lemma"].lower().replace(" ", "_"), pos, int(m["sense"])))
        m = _OFFSET_REF.match(text)
        if m and (m["pos"] or pos_hint):
            return synset_id(m["pos"] or pos_hint, m["offset"])
        return None


def parse_sense_index(path):
    by_key, by_lemma = {}, {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            fields = line.split()
            if not fields:
                continue
            if len(fields) != 4 or "%" not in fields[0]:
                raise WordNetFormatError("malformed sense index line", path, lineno)
            key, offset, sense_number = fields[0], fields[1], fields[2]
            lemma, _, lex_sense = key.partition("%")
            ss_type = SENSE_KEY_SS_TYPE.get(lex_sense[:1])
            if ss_type is None or not _OFFSET.match(offset):
                raise WordNetFormatError(f"bad sense key {key!r}", path, lineno)
            sid = synset_id(ss_type, offset)
            by_key[key.lower()] = sid
            by_lemma[(lemma.lower(), sid.pos, int(sense_number))] = sid
    return SenseIndex(by_key, by_lemma)
