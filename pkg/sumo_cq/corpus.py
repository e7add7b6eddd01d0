"""Corpus assembly: all generators, stable ids, the manifest and the
per-ontology problem files."""
import collections
import logging
import multiprocessing.pool
import os

from tqdm import tqdm

from sumo_cq.errors import CorpusError, InputFormatError, IntegrityError
from sumo_cq.formula import canonical_key, negate, symbols
from sumo_cq.kif import emit_suo_kif, parse_suo_kif
from sumo_cq.patterns import (CATEGORY_ORDER, Category, Problem, expand_antonym_pairs, generate_antonym,
                              generate_event, generate_multiple_mapping, generate_process)
from sumo_cq.tptp import problem_text
from sumo_cq.util import dump_json, jsonl_line, read_json, read_jsonl, timer, write_text
from sumo_cq.wordnet import PROCESS_LINKS, LinkKind

logger = logging.getLogger(__name__)

CORPUS_FORMAT = 1
POLARITIES = ("truth", "falsity")

DEDUP_RULE = ("problems whose truth-tests have the same canonical key (alpha-renaming and conjunct order "
              "ignored) are one problem; collapsed_from counts the source pairs merged into it")


class Corpus:
    def __init__(self, problems, filters=None):
        self.problems = list(problems)
        self.filters = filters or {}
        self._by_id = {p.id: p for p in self.problems}

    def __len__(self):
        return len(self.problems)

    def __iter__(self):
        return iter(self.problems)

    def __getitem__(self, problem_id):
        return self._by_id[problem_id]

    def __contains__(self, problem_id):
        return problem_id in self._by_id

    def counts(self):
        c = collections.Counter(p.category for p in self.problems)
        return {cat.value: c.get(cat, 0) for cat in CATEGORY_ORDER}

    def meta(self):
        return {
            "format": "sumo-cq-corpus",
            "version": CORPUS_FORMAT,
            "problems": len(self.problems),
            "conjectures": 2 * len(self.problems),
            "categories": self.counts(),
            "filters": self.filters,
            "dedup": DEDUP_RULE,
        }


def assign_ids(problems):
    """Ids are the category prefix plus the position after sorting each
    category by canonical key, so they only depend on the conjectures."""
    by_category = collections.defaultdict(list)
    for p in problems:
        by_category[p.category].append(p)

    ordered = []
    for category in CATEGORY_ORDER:
        group = sorted(by_category.get(category, ()), key=lambda p: p.key)
        for i, p in enumerate(group, 1):
            p.id = f"{category.prefix}_{i:05d}"
        ordered.extend(group)
    return ordered


def build_corpus(snapshot, projected, attribute_overrides=None, parallelism=4):
    start = timer()
    mapping = projected.mapping
    kinds = snapshot.kinds

    def multiple_mapping(c):
        return generate_multiple_mapping(mapping, kinds, attribute_overrides, c)

    def event(c):
        return generate_event(snapshot.links_of(LinkKind.EVENT), mapping, kinds, c)

    def antonym(c):
        pairs = expand_antonym_pairs(snapshot.links_of(LinkKind.ANTONYM), snapshot.links_of(LinkKind.SIMILAR),
                                     snapshot.synsets)
        c["base_pairs"] = len(snapshot.links_of(LinkKind.ANTONYM))
        c["expanded_pairs"] = len(pairs)
        return generate_antonym(pairs, mapping, kinds, attribute_overrides, c)

    def process(c):
        return generate_process(snapshot.links_of(*PROCESS_LINKS), mapping, kinds, attribute_overrides, c)

    generators = [("multiple_mapping", multiple_mapping), ("event", event), ("antonym", antonym),
                  ("process", process)]

    def run(item):
        name, fn = item
        counters = collections.Counter()
        return name, fn(counters), counters

    with multiprocessing.pool.ThreadPool(max(1, min(parallelism, len(generators)))) as pool:
        results = pool.map(run, generators)

    problems, filters = [], {}
    for name, generated, counters in results:
        problems.extend(generated)
        filters[name] = dict(sorted(counters.items()))
        logger.info(f"{name}: {len(generated)} problems, filters {filters[name]}")

    seen = {}
    for p in problems:
        other = seen.setdefault(p.key, p)
        if other is not p:
            raise CorpusError(f"{other.category.value} and {p.category.value} problems share the conjecture "
                              f"{emit_suo_kif(p.truth_test)}")

    corpus = Corpus(assign_ids(problems), filters)
    logger.info(f"corpus: {len(corpus)} problems, {2 * len(corpus)} conjectures in {timer(start):.06}s")
    return corpus


def problem_json(p):
    return {
        "id": p.id,
        "category": p.category.value,
        "pattern": p.pattern,
        "truth_test": emit_suo_kif(p.truth_test),
        "falsity_test": emit_suo_kif(p.falsity_test),
        "collapsed_from": p.collapsed_from,
        "provenance": p.provenance,
    }


def problem_from_json(d, path=None):
    try:
        category = Category(d["category"])
    except (KeyError, ValueError):
        raise InputFormatError(f"problem {d.get('id')}: unknown category {d.get('category')!r}", path) from None
    truth = parse_suo_kif(d["truth_test"], path)
    falsity = parse_suo_kif(d["falsity_test"], path)
    if canonical_key(falsity) != canonical_key(negate(truth)):
        raise IntegrityError(f"problem {d['id']}: falsity-test is not the negated truth-test")
    return Problem(category, truth, d["provenance"], pattern=d.get("pattern"), id=d["id"],
                   collapsed_from=d.get("collapsed_from", 1), falsity_test=falsity)


def write_corpus(corpus, manifest_path, meta_path):
    write_text(manifest_path, "".join(jsonl_line(problem_json(p)) for p in corpus))
    write_text(meta_path, dump_json(corpus.meta()))


def read_corpus(manifest_path, meta_path=None):
    problems = [problem_from_json(d, manifest_path) for d in read_jsonl(manifest_path)]
    filters = {}
    if meta_path is not None and os.path.exists(meta_path):
        meta = read_json(meta_path)
        if meta.get("format") != "sumo-cq-corpus" or meta.get("version") != CORPUS_FORMAT:
            raise InputFormatError(f"unsupported corpus format {meta.get('format')} v{meta.get('version')}",
                                   meta_path)
        filters = meta.get("filters", {})
    return Corpus(problems, filters)


def conjecture(problem, polarity):
    return problem.truth_test if polarity == "truth" else problem.falsity_test


def problem_path(problems_dir, ontology, problem_id, polarity):
    return os.path.join(problems_dir, ontology, f"{problem_id}_{polarity}.p")


def write_problem_files(corpus, problems_dir, ontology, axiom_file, symbol_map, show_progress=True):
    """One TPTP file per conjecture; the ontology is pulled in through an
    include directive."""
    start = timer()
    every = set()
    for p in corpus:
        every.update(symbols(p.truth_test))
    symbol_map.check_injective(sorted(every))

    include = os.path.abspath(axiom_file) if "://" not in str(axiom_file) else axiom_file
    paths = []
    for p in tqdm(corpus.problems, desc=f"emit {ontology}", disable=not show_progress):
        sources = "; ".join(" ".join(s) for s in p.provenance.get("sources", [])[:3])
        for polarity in POLARITIES:
            path = problem_path(problems_dir, ontology, p.id, polarity)
            header = [f"{p.id} {polarity}-test, {p.category.label}" + (f" ({p.pattern})" if p.pattern else ""),
                      f"sources: {sources}"]
            write_text(path, problem_text(f"{p.id}_{polarity}", conjecture(p, polarity), symbol_map, include,
                                          header))
            paths.append(path)
    logger.info(f"wrote {len(paths)} problem files for {ontology} in {timer(start):.06}s")
    return paths
