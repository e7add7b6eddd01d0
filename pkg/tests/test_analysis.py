import itertools
import random

import pytest

from sumo_cq.analysis import (JOINT, ConjectureStatus, OntologyAxiomIndex, ProblemClass, ProblemVerdict,
                              classify_all, classify_problem, compute_metrics, coverage, difficulty, efficiency,
                              sample_uniform, verdict_counts)
from sumo_cq.errors import ConfigError, IntegrityError
from sumo_cq.harness import RunRecord, SzsStatus

from conftest import data_path

PROVED, FAILED = SzsStatus.THEOREM, SzsStatus.COUNTER_SATISFIABLE


def rec(polarity, status, prover="p", time_s=1.0, problem_id="x", used=()):
    return RunRecord("o", problem_id, polarity, prover, status, time_s, list(used))


@pytest.mark.parametrize("truth,falsity", list(itertools.product([True, False], repeat=2)))
def test_decision_table(truth, falsity):
    v = classify_problem([rec("truth", PROVED if truth else SzsStatus.TIMEOUT)],
                         [rec("falsity", PROVED if falsity else FAILED)])
    expected = {
        (True, False): ProblemClass.SOLVED_ENTAILED,
        (False, True): ProblemClass.SOLVED_INCOMPATIBLE,
        (True, True): ProblemClass.INCONSISTENCY_DETECTED,
        (False, False): ProblemClass.UNSOLVED,
    }[truth, falsity]
    assert v.verdict is expected
    assert (v.truth is ConjectureStatus.PASSING) == truth
    assert (v.falsity is ConjectureStatus.PASSING) == falsity
    if not (truth or falsity):
        assert v.truth is v.falsity is ConjectureStatus.UNKNOWN


def test_random_record_multisets():
    rng = random.Random(5)
    statuses = list(SzsStatus)
    for _ in range(500):
        truth = [rec("truth", rng.choice(statuses), f"p{i}") for i in range(rng.randint(0, 5))]
        falsity = [rec("falsity", rng.choice(statuses), f"p{i}") for i in range(rng.randint(0, 5))]
        v = classify_problem(truth, falsity, "x")
        t, f = any(r.proved for r in truth), any(r.proved for r in falsity)
        assert (v.verdict is ProblemClass.INCONSISTENCY_DETECTED) == (t and f)
        assert (v.verdict is ProblemClass.UNSOLVED) == (not t and not f)
        assert v.truth_provers == sorted(r.prover_id for r in truth if r.proved)


def test_any_prover_suffices():
    v = classify_problem([rec("truth", SzsStatus.TIMEOUT, "a"), rec("truth", PROVED, "b")],
                         [rec("falsity", SzsStatus.GAVE_UP, "a")])
    assert v.verdict is ProblemClass.SOLVED_ENTAILED
    assert v.truth_provers == ["b"]


def test_classify_rejects_mixed_records():
    with pytest.raises(IntegrityError):
        classify_problem([rec("truth", PROVED, problem_id="x")], [rec("falsity", FAILED, problem_id="y")])
    with pytest.raises(IntegrityError):
        classify_problem([rec("falsity", PROVED)], [])


def test_classify_all(micro_corpus, micro_records):
    verdicts = {v.problem_id: v.verdict for v in classify_all(micro_corpus, micro_records)}
    assert verdicts == {
        "micro_01": ProblemClass.SOLVED_ENTAILED,
        "micro_02": ProblemClass.SOLVED_ENTAILED,
        "micro_03": ProblemClass.SOLVED_INCOMPATIBLE,
        "micro_04": ProblemClass.SOLVED_INCOMPATIBLE,
        "micro_05": ProblemClass.UNSOLVED,
        "micro_06": ProblemClass.INCONSISTENCY_DETECTED,
    }


def test_problems_without_records_are_unsolved(micro_corpus):
    verdicts = classify_all(micro_corpus, [], ["micro"])
    assert len(verdicts) == 6
    assert verdict_counts(verdicts) == {"micro": {"SolvedEntailed": 0, "SolvedIncompatible": 0,
                                                  "Unsolved": 6, "InconsistencyDetected": 0}}


def test_verdict_json_round_trip(micro_corpus, micro_records):
    for v in classify_all(micro_corpus, micro_records):
        assert ProblemVerdict.from_json(v.to_json()) == v


class TestEfficiencyAndDifficulty:

    def test_efficiency(self):
        assert efficiency([rec("truth", PROVED, time_s=2.0), rec("truth", PROVED, time_s=0.5)]) == 1.25
        assert efficiency([rec("truth", FAILED)]) is None
        assert efficiency([]) is None

    def test_attempted_denominator(self):
        records = [rec("truth", PROVED, time_s=2.0), rec("truth", FAILED), rec("truth", SzsStatus.TIMEOUT)]
        assert efficiency(records, "attempted") == pytest.approx(0.5 / 3)
        with pytest.raises(ConfigError):
            efficiency(records, "median")

    def test_zero_times_are_clamped(self):
        assert efficiency([rec("truth", PROVED, time_s=0.0)]) == pytest.approx(1000.0)

    def test_efficiency_is_monotone(self):
        rng = random.Random(17)
        for _ in range(500):
            times = [rng.uniform(0.01, 100.0) for _ in range(rng.randint(1, 8))]
            proved = [rec("truth", PROVED, time_s=t) for t in times]
            failed = [rec("truth", FAILED) for _ in range(rng.randint(0, 3))]
            base = efficiency(proved)
            # a proof faster than every other one never lowers the measure
            faster = rec("truth", PROVED, time_s=min(times) * rng.uniform(0.1, 1.0))
            assert efficiency(proved + [faster]) >= base - 1e-12
            # slowing a proof down never raises it
            i = rng.randrange(len(proved))
            slowed = proved[:i] + [rec("truth", PROVED, time_s=times[i] * rng.uniform(1.0, 10.0))] + proved[i + 1:]
            assert efficiency(slowed) <= base + 1e-12
            assert efficiency(slowed + failed, "attempted") <= efficiency(proved + failed, "attempted") + 1e-12
            # over attempted conjectures, losing a proof never raises it
            lost = proved[:i] + [rec("truth", SzsStatus.TIMEOUT)] + proved[i + 1:]
            assert (efficiency(lost + failed, "attempted") or 0.0) <= efficiency(proved + failed, "attempted") + 1e-12

    @pytest.mark.parametrize("times,expected", [([1.0, 1.0], 1.0), ([2.0, 4.0], 0.375)])
    def test_reference_arithmetic(self, times, expected):
        assert efficiency([rec("truth", PROVED, time_s=t) for t in times]) == expected

    def test_difficulty(self):
        assert difficulty([rec("truth", PROVED, "a"), rec("truth", FAILED, "b")]) == 0.5
        assert difficulty([rec("truth", PROVED)]) == 0.0
        five = [rec("truth", PROVED, "p0")] + [rec("truth", SzsStatus.TIMEOUT, f"p{i}") for i in range(1, 5)]
        assert difficulty(five) == pytest.approx(0.8)
        with pytest.raises(ValueError):
            difficulty([])


@pytest.fixture
def micro_index():
    return OntologyAxiomIndex.from_file(data_path("micro", "ontology.p"))


def test_axiom_index(micro_index):
    assert len(micro_index) == 15
    assert micro_index.unit_clauses == 10
    assert micro_index.formulae == 5
    assert micro_index.is_atomic("a13")
    assert not micro_index.is_atomic("a8")
    assert len(OntologyAxiomIndex.from_file(data_path("micro", "broken.p"))) == 16


def test_coverage_rejects_unknown_axioms(micro_index):
    with pytest.raises(IntegrityError):
        coverage([rec("truth", PROVED, used=["zz"])], micro_index)
    assert coverage([rec("truth", FAILED)], micro_index).pct is None


class TestJointMetrics:

    @pytest.fixture
    def rows(self, micro_corpus, micro_records, micro_index):
        verdicts = classify_all(micro_corpus, micro_records)
        metrics = compute_metrics(micro_corpus, micro_records, verdicts, "micro", JOINT, axiom_index=micro_index)
        return {(m.division, m.category): m for m in metrics}

    def test_layout(self, rows):
        assert len(rows) == 2 * (10 + 3)
        assert rows["truth", "Mapping"].members == ["MultipleMapping", "Event1", "Event2", "Event3"]
        assert rows["truth", "Total"].is_rollup

    def test_truth_division(self, rows):
        mm = rows["truth", "MultipleMapping"]
        assert (mm.total, mm.proved, mm.pct, mm.mean_time_s, mm.efficiency, mm.difficulty) == \
            (2, 1, 50.0, 2.0, 0.5, 0.0)
        e2 = rows["truth", "Event2"]
        assert (e2.proved, e2.efficiency, e2.difficulty) == (1, 1.0, 0.5)
        mapping = rows["truth", "Mapping"]
        assert (mapping.total, mapping.proved, mapping.pct, mapping.mean_time_s, mapping.efficiency,
                mapping.difficulty) == (4, 2, 50.0, 1.5, 0.75, 0.25)
        assert rows["truth", "Competency"].proved == 0
        assert rows["truth", "Competency"].total == 2
        assert rows["truth", "Total"].pct == pytest.approx(100 / 3)

    def test_inconsistent_problems_count_but_never_prove(self, rows):
        e1 = rows["truth", "Event1"]
        assert (e1.total, e1.proved, e1.efficiency, e1.difficulty) == (1, 0, None, None)
        assert rows["truth", "Total"].total == 6

    def test_falsity_division(self, rows):
        mm = rows["falsity", "MultipleMapping"]
        assert (mm.proved, mm.mean_time_s, mm.efficiency, mm.difficulty) == (1, 0.25, 4.0, 0.0)
        a3 = rows["falsity", "Antonym3"]
        assert (a3.proved, a3.mean_time_s, a3.efficiency, a3.difficulty) == (1, 0.5, 2.0, 0.5)
        total = rows["falsity", "Total"]
        assert (total.proved, total.mean_time_s, total.efficiency) == (2, 0.375, 3.0)

    def test_coverage(self, rows):
        c = rows["truth", "MultipleMapping"].coverage
        assert (c.used, c.pct, c.exclusive, c.unit_clauses, c.formulae) == (3, 20.0, 2, 2, 1)
        assert (c.per_proof_used, c.per_proof_unit_clauses, c.per_proof_formulae) == (3.0, 2.0, 1.0)
        c = rows["truth", "Event2"].coverage
        assert (c.used, c.exclusive, c.unit_clauses, c.formulae) == (3, 2, 2, 1)
        c = rows["falsity", "MultipleMapping"].coverage
        assert (c.used, c.exclusive, c.unit_clauses, c.formulae) == (1, 1, 0, 1)
        assert rows["falsity", "Antonym3"].coverage.exclusive == 1
        c = rows["truth", "Mapping"].coverage
        assert (c.used, c.exclusive) == (5, 4)
        assert c.pct == pytest.approx(100 * 5 / 15)
        assert rows["truth", "Result"].coverage.pct is None

    def test_rollup_exclusive_is_the_sum_of_its_members(self, rows):
        for division in ("truth", "falsity"):
            for rollup in ("Mapping", "Competency", "Total"):
                m = rows[division, rollup]
                assert m.coverage.exclusive == sum(rows[division, c].coverage.exclusive for c in m.members)


class TestProverMetrics:

    def metrics(self, corpus, records, run, denominator="solved"):
        verdicts = classify_all(corpus, records)
        rows = compute_metrics(corpus, records, verdicts, "micro", run, denominator)
        return {(m.division, m.category): m for m in rows}

    def test_per_prover_efficiency(self, micro_corpus, micro_records):
        assert self.metrics(micro_corpus, micro_records, "vampire")["truth", "MultipleMapping"].efficiency == 0.5
        assert self.metrics(micro_corpus, micro_records, "eprover")["truth", "MultipleMapping"].efficiency == 0.25

    def test_attempted_denominator(self, micro_corpus, micro_records):
        rows = self.metrics(micro_corpus, micro_records, "vampire", "attempted")
        assert rows["truth", "Mapping"].efficiency == 0.125

    def test_no_joint_only_columns(self, micro_corpus, micro_records):
        row = self.metrics(micro_corpus, micro_records, "vampire")["truth", "MultipleMapping"]
        assert row.difficulty is None
        assert row.coverage is None


class TestSample:

    def test_size_is_floored(self, micro_corpus):
        assert len(sample_uniform(micro_corpus, 0.5, 7)) == 3
        assert len(sample_uniform(micro_corpus, 0.49, 7)) == 2
        assert sample_uniform(micro_corpus, 0.1, 7) == []
        assert len(sample_uniform(micro_corpus, 1.0, 7)) == 6

    def test_deterministic_and_in_corpus_order(self, corpus):
        one = sample_uniform(corpus, 0.5, 11)
        assert [p.id for p in one] == [p.id for p in sample_uniform(corpus, 0.5, 11)]
        order = [p.id for p in corpus]
        assert [p.id for p in one] == sorted((p.id for p in one), key=order.index)
        assert len(set(p.id for p in one)) == 9

    def test_fraction_range(self, micro_corpus):
        with pytest.raises(ConfigError):
            sample_uniform(micro_corpus, 1.5, 0)
