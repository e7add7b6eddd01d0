import json
import os

import pytest

from sumo_cq.corpus import (build_corpus, problem_from_json, problem_json, problem_path, read_corpus,
                            write_corpus, write_problem_files)
from sumo_cq.errors import InputFormatError, IntegrityError, SymbolCollisionError
from sumo_cq.formula import canonical_key
from sumo_cq.kif import emit_suo_kif
from sumo_cq.tptp import SymbolMap, parse_tptp, unmap_formula

from conftest import data_path

SUMO_MAP = SymbolMap(table=(("$instance", "s__instance"), ("$subclass", "s__subclass")))


def test_counts(corpus):
    assert len(corpus) == 18
    assert corpus.counts() == {
        "MultipleMapping": 3, "Event1": 1, "Event2": 1, "Event3": 1,
        "Antonym1": 2, "Antonym2": 3, "Antonym3": 2,
        "Agent": 2, "Instrument": 1, "Result": 2,
    }


def test_ids_follow_category_order_and_canonical_key(corpus):
    ids = [p.id for p in corpus]
    assert ids[:3] == ["mm_00001", "mm_00002", "mm_00003"]
    assert ids[-2:] == ["re_00001", "re_00002"]
    mm = [p for p in corpus if p.category.value == "MultipleMapping"]
    assert [p.key for p in mm] == sorted(p.key for p in mm)
    assert len(set(ids)) == len(ids)


def test_meta(corpus):
    meta = corpus.meta()
    assert meta["problems"] == 18
    assert meta["conjectures"] == 36
    assert meta["filters"]["antonym"]["expanded_pairs"] == 39
    assert meta["filters"]["antonym"]["base_pairs"] == 4
    assert meta["filters"]["event"]["pairs"] == 5


def test_build_is_deterministic(snapshot, projected, corpus):
    again = build_corpus(snapshot, projected, parallelism=1)
    assert [problem_json(p) for p in again] == [problem_json(p) for p in corpus]


def test_attribute_overrides_change_conjectures(snapshot, projected):
    overridden = build_corpus(snapshot, projected, attribute_overrides={"Male": "property"})
    assert any("(property ?X Male)" in emit_suo_kif(p.truth_test) for p in overridden)


def test_manifest_round_trip(corpus, tmp_path):
    manifest, meta = str(tmp_path / "corpus.jsonl"), str(tmp_path / "corpus.meta.json")
    write_corpus(corpus, manifest, meta)
    loaded = read_corpus(manifest, meta)
    assert [p.id for p in loaded] == [p.id for p in corpus]
    assert [p.key for p in loaded] == [p.key for p in corpus]
    assert loaded.filters == json.loads(json.dumps(corpus.filters))
    assert "mm_00001" in loaded


def test_falsity_test_must_negate_the_truth_test():
    d = {"id": "x", "category": "Event1", "truth_test": "(equal Death Killing)",
         "falsity_test": "(equal Death Killing)", "provenance": {}}
    with pytest.raises(IntegrityError):
        problem_from_json(d)
    d["category"] = "Event9"
    with pytest.raises(InputFormatError):
        problem_from_json(d)


def test_unsupported_corpus_version(corpus, tmp_path):
    manifest, meta = str(tmp_path / "corpus.jsonl"), str(tmp_path / "corpus.meta.json")
    write_corpus(corpus, manifest, meta)
    with open(meta, "w") as f:
        json.dump({"format": "sumo-cq-corpus", "version": 0}, f)
    with pytest.raises(InputFormatError):
        read_corpus(manifest, meta)


def test_problem_files(corpus, tmp_path):
    axioms = data_path("micro", "ontology.p")
    paths = write_problem_files(corpus, str(tmp_path), "adimen", axioms, SUMO_MAP, show_progress=False)
    assert len(paths) == 36
    first = corpus.problems[0]
    path = problem_path(str(tmp_path), "adimen", first.id, "truth")
    assert path in paths
    with open(path) as f:
        text = f.read()
    assert text.startswith(f"% {first.id} truth-test, Multiple Mapping\n")
    assert f"include('{os.path.abspath(axioms)}')." in text
    records = parse_tptp(text)
    assert [r.name for r in records] == [f"{first.id}_truth"]
    assert canonical_key(unmap_formula(records[0].formula, SUMO_MAP)) == first.key


def test_problem_files_refuse_colliding_symbols(corpus, tmp_path):
    colliding = SymbolMap(table=(("$instance", "s__Horse"),))
    with pytest.raises(SymbolCollisionError):
        write_problem_files(corpus, str(tmp_path), "adimen", "o.p", colliding, show_progress=False)


def test_micro_corpus_reads(micro_corpus):
    assert [p.id for p in micro_corpus] == [f"micro_0{i}" for i in range(1, 7)]
    assert micro_corpus["micro_05"].pattern == "P4"
