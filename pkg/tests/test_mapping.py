import pytest

from sumo_cq.errors import MappingFormatError
from sumo_cq.mapping import (DEFAULT_SUFFIXES, MappingEntry, MappingRelation, apply_corrections,
                             parse_mapping_files, parse_mapping_line, suffix_table)
from sumo_cq.wordnet import SynsetId

from conftest import data_path

EQ, SUB, INST = MappingRelation.EQUIVALENCE, MappingRelation.SUBSUMPTION, MappingRelation.INSTANCE


@pytest.fixture(scope="module")
def mapping():
    return parse_mapping_files([data_path("mapping", f"WordNetMappings30-{pos}.txt")
                                for pos in ("noun", "verb", "adj")])


def test_relation_properties():
    assert MappingRelation.NOT_EQUIVALENCE.is_complement
    assert MappingRelation.NOT_SUBSUMPTION.base is SUB
    assert EQ.strength > INST.strength > SUB.strength
    assert str(MappingEntry("Horse", SUB)) == "Horse+"


def test_parse_line_with_several_annotations():
    sid, ss_type, entries = parse_mapping_line(
        "00001006 27 n 01 coal 0 000 | fossil fuel &%FossilFuel+ &%Mineral+ &%Rock+", DEFAULT_SUFFIXES)
    assert sid == SynsetId("n", 1006)
    assert ss_type == "n"
    assert entries == [MappingEntry("FossilFuel", SUB), MappingEntry("Mineral", SUB), MappingEntry("Rock", SUB)]


@pytest.mark.parametrize("line,message", [
    ("00001006 27 n 01 coal 0 000 | fossil fuel &%FossilFuel", "without a suffix"),
    ("00001006 27 n 01 coal 0 000 | fossil fuel &%FossilFuel?", "unknown mapping suffix"),
    ("coal 27 n 01 | fossil fuel &%FossilFuel+", "not a synset record"),
])
def test_malformed_lines(line, message):
    with pytest.raises(MappingFormatError, match=message):
        parse_mapping_line(line, DEFAULT_SUFFIXES, "m.txt", 3)


def test_complement_suffixes(mapping):
    assert mapping.mapping[SynsetId("n", 1001)] == [MappingEntry("Artifact", MappingRelation.NOT_EQUIVALENCE)]
    assert mapping.mapping[SynsetId("a", 3031)] == [MappingEntry("SurfaceChanging",
                                                                 MappingRelation.NOT_SUBSUMPTION)]


def test_counts_and_unmapped(mapping):
    assert len(mapping.mapping) == 48
    assert mapping.unmapped == [SynsetId("n", 1022)]
    assert mapping.mapping[SynsetId("n", 1022)] == []
    assert mapping.counts == {"noun": 23, "verb": 10, "adjective": 5, "satellite": 10}
    assert mapping.duplicates == 0


def test_multi_mapped(mapping):
    assert sorted(mapping.multi_mapped("n")) == [SynsetId("n", 1004), SynsetId("n", 1005), SynsetId("n", 1006),
                                                 SynsetId("n", 1021)]
    assert mapping.multi_mapped("v") == []


def test_satellites_use_adjective_ids(mapping):
    assert mapping.mapping[SynsetId("a", 3001)] == [MappingEntry("Hot", SUB)]


def test_duplicate_annotations_are_counted(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("00001004 05 n 01 male_horse 0 000 | gloss &%Horse+ &%Horse+\n")
    md = parse_mapping_files([str(path)])
    assert md.mapping[SynsetId("n", 1004)] == [MappingEntry("Horse", SUB)]
    assert md.duplicates == 1


def test_configured_suffixes(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("00001004 05 n 01 male_horse 0 000 | gloss &%Horse~\n")
    md = parse_mapping_files([str(path)], suffix_table({"~": "subsumption"}))
    assert md.mapping[SynsetId("n", 1004)] == [MappingEntry("Horse", SUB)]
    with pytest.raises(MappingFormatError):
        suffix_table({"~": "kinship"})
    with pytest.raises(MappingFormatError):
        suffix_table({"~~": "subsumption"})


def test_apply_corrections():
    sid = SynsetId("n", 1)
    fixed = apply_corrections({sid: [MappingEntry("Hors", SUB), MappingEntry("Horse", SUB)]}, {"Hors": "Horse"})
    assert fixed == {sid: [MappingEntry("Horse", SUB)]}
