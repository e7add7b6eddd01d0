import pytest

from sumo_cq.errors import KifSyntaxError
from sumo_cq.taxonomy import (ConceptKind, TaxonomyFact, assign_kinds, parse_kif_facts, parse_suo_kif_taxonomy,
                              read_core_manifest)

from conftest import data_path


@pytest.fixture(scope="module")
def taxonomy():
    return parse_suo_kif_taxonomy([data_path("kif", "core.kif"), data_path("kif", "domain.kif")],
                                  read_core_manifest(data_path("kif", "core_manifest.txt")),
                                  extra_concepts=["Salmon"])


def test_core_manifest_resolves_next_to_itself():
    assert read_core_manifest(data_path("kif", "core_manifest.txt")) == [data_path("kif", "core.kif")]


def test_parse_kif_facts_skips_everything_else():
    facts, skipped, self_loops = parse_kif_facts(data_path("kif", "domain.kif"))
    assert facts == [TaxonomyFact("subclass", "Frying", "Cooking", "domain.kif"),
                     TaxonomyFact("subclass", "DeepFrying", "Frying", "domain.kif")]
    assert skipped == {"subclass/non-ground": 1}
    assert self_loops == 1


def test_non_facts_in_core(taxonomy):
    assert taxonomy.skipped["documentation"] == 1
    assert taxonomy.skipped["=>"] == 1
    assert taxonomy.self_loops == 1


def test_core_concepts(taxonomy):
    assert {"Entity", "Horse", "Cooking", "agent", "YearDuration"} <= taxonomy.core
    assert "Frying" not in taxonomy.core
    assert "DeepFrying" not in taxonomy.core


@pytest.mark.parametrize("concept,kind", [
    ("Entity", ConceptKind.CLASS),
    ("Horse", ConceptKind.CLASS),
    ("Frying", ConceptKind.CLASS),
    ("YearDuration", ConceptKind.OBJECT),
    ("UnitOfDuration", ConceptKind.CLASS),
    ("Male", ConceptKind.INDIVIDUAL_ATTRIBUTE),
    ("Teacher", ConceptKind.INDIVIDUAL_ATTRIBUTE),
    ("Attribute", ConceptKind.CLASS_OF_ATTRIBUTES),
    ("TemperatureAttribute", ConceptKind.CLASS_OF_ATTRIBUTES),
    ("agent", ConceptKind.INDIVIDUAL_RELATION),
    ("member", ConceptKind.INDIVIDUAL_RELATION),
    ("BinaryPredicate", ConceptKind.CLASS_OF_RELATIONS),
    ("Salmon", ConceptKind.OBJECT),
])
def test_kinds(taxonomy, concept, kind):
    assert taxonomy.kinds[concept] is kind


def test_facts_are_unique_and_sorted(taxonomy):
    keys = [(f.relation, f.child, f.parent) for f in taxonomy.facts]
    assert keys == sorted(set(keys))


def test_ambiguous_kinds_are_reported():
    facts = [TaxonomyFact("subclass", "Attribute", "Entity"),
             TaxonomyFact("subclass", "Relation", "Entity"),
             TaxonomyFact("instance", "odd", "Attribute"),
             TaxonomyFact("instance", "odd", "Relation")]
    kinds, ambiguous = assign_kinds(facts)
    assert kinds["odd"] is ConceptKind.INDIVIDUAL_RELATION
    assert ambiguous == [("odd", ["r", "a"])]


def test_syntax_errors_carry_the_file(tmp_path):
    path = tmp_path / "broken.kif"
    path.write_text("(subclass A B)\n(subclass C\n")
    with pytest.raises(KifSyntaxError) as e:
        parse_kif_facts(str(path))
    assert e.value.line == 2
