"""Classification of problems from prover records and the statistics the
report is made of: proof rates, run times, efficiency, difficulty and
axiom coverage."""
import collections
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np

from sumo_cq.corpus import POLARITIES
from sumo_cq.errors import ConfigError, InputFormatError, IntegrityError
from sumo_cq.formula import is_literal
from sumo_cq.patterns import CATEGORY_ORDER, COMPETENCY_CATEGORIES, MAPPING_CATEGORIES
from sumo_cq.tptp import parse_tptp
from sumo_cq.util import read_text, timer

logger = logging.getLogger(__name__)

TIMER_RESOLUTION_S = 1e-3
JOINT = "joint"
DENOMINATORS = ("solved", "attempted")

ROLLUPS = (
    ("Mapping", MAPPING_CATEGORIES),
    ("Competency", COMPETENCY_CATEGORIES),
    ("Total", CATEGORY_ORDER),
)


class ConjectureStatus(str, Enum):
    PASSING = "passing"
    NON_PASSING = "non-passing"
    UNKNOWN = "unknown"


class ProblemClass(str, Enum):
    SOLVED_ENTAILED = "SolvedEntailed"
    SOLVED_INCOMPATIBLE = "SolvedIncompatible"
    UNSOLVED = "Unsolved"
    INCONSISTENCY_DETECTED = "InconsistencyDetected"

    @property
    def meaning(self):
        return _MEANING[self]


_MEANING = {
    ProblemClass.SOLVED_ENTAILED: "the ontology is validated against the question",
    ProblemClass.SOLVED_INCOMPATIBLE: "there is a defect in the ontology",
    ProblemClass.UNSOLVED: "the question may be new knowledge",
    ProblemClass.INCONSISTENCY_DETECTED: "the ontology is inconsistent",
}

# (truth proved, falsity proved) -> verdict, conjecture statuses
DECISION_TABLE = {
    (True, False): (ProblemClass.SOLVED_ENTAILED, ConjectureStatus.PASSING, ConjectureStatus.NON_PASSING),
    (False, True): (ProblemClass.SOLVED_INCOMPATIBLE, ConjectureStatus.NON_PASSING, ConjectureStatus.PASSING),
    (True, True): (ProblemClass.INCONSISTENCY_DETECTED, ConjectureStatus.PASSING, ConjectureStatus.PASSING),
    (False, False): (ProblemClass.UNSOLVED, ConjectureStatus.UNKNOWN, ConjectureStatus.UNKNOWN),
}


@dataclass
class ProblemVerdict:
    problem_id: str
    ontology: Optional[str]
    category: Optional[str]
    truth: ConjectureStatus
    falsity: ConjectureStatus
    verdict: ProblemClass
    truth_provers: List[str] = field(default_factory=list)
    falsity_provers: List[str] = field(default_factory=list)

    def to_json(self):
        d = asdict(self)
        d["truth"] = self.truth.value
        d["falsity"] = self.falsity.value
        d["verdict"] = self.verdict.value
        return d

    @classmethod
    def from_json(cls, d):
        d = dict(d)
        d["truth"] = ConjectureStatus(d["truth"])
        d["falsity"] = ConjectureStatus(d["falsity"])
        d["verdict"] = ProblemClass(d["verdict"])
        return cls(**d)


def classify_problem(truth_records, falsity_records, problem_id=None, ontology=None, category=None):
    """A conjecture counts as proved when any prover found a proof."""
    truth_records, falsity_records = list(truth_records), list(falsity_records)
    for r in truth_records + falsity_records:
        if problem_id is None:
            problem_id = r.problem_id
        if r.problem_id != problem_id:
            raise IntegrityError(f"records of {r.problem_id} classified together with {problem_id}")
    for r in truth_records:
        if r.polarity != "truth":
            raise IntegrityError(f"{r.key} passed as a truth-test record")
    for r in falsity_records:
        if r.polarity != "falsity":
            raise IntegrityError(f"{r.key} passed as a falsity-test record")

    truth_provers = sorted({r.prover_id for r in truth_records if r.proved})
    falsity_provers = sorted({r.prover_id for r in falsity_records if r.proved})
    verdict, truth, falsity = DECISION_TABLE[bool(truth_provers), bool(falsity_provers)]
    return ProblemVerdict(problem_id, ontology, category, truth, falsity, verdict, truth_provers, falsity_provers)


def group_records(records):
    """(ontology, problem id, polarity) -> records."""
    grouped = collections.defaultdict(list)
    for r in records:
        grouped[r.ontology, r.problem_id, r.polarity].append(r)
    return grouped


def ontologies_of(records, configured=()):
    labels = list(configured)
    for r in records:
        if r.ontology not in labels:
            labels.append(r.ontology)
    return labels


def classify_all(corpus, records, ontologies=()):
    """One verdict per (ontology, problem); problems without records are Unsolved."""
    grouped = group_records(records)
    verdicts = []
    for label in ontologies_of(records, ontologies):
        for p in corpus:
            verdicts.append(classify_problem(grouped.get((label, p.id, "truth"), ()),
                                             grouped.get((label, p.id, "falsity"), ()),
                                             p.id, label, p.category.value))
    return verdicts


def _clamped(t):
    return max(float(t), TIMER_RESOLUTION_S)


def efficiency_of_times(times, attempted=None, denominator="solved"):
    if denominator not in DENOMINATORS:
        raise ConfigError(f"efficiency denominator must be one of {DENOMINATORS}")
    times = list(times)
    if not times:
        return None
    inverse = np.reciprocal(np.array([_clamped(t) for t in times]))
    n = len(times) if denominator == "solved" else max(attempted or 0, len(times))
    return float(inverse.sum() / n)


def efficiency(records, denominator="solved"):
    """Average of the inverse solve times over the proved records; None
    without proofs. The `attempted` denominator divides by every record."""
    records = list(records)
    return efficiency_of_times([r.wall_time_s for r in records if r.proved], len(records), denominator)


def difficulty(records):
    """Share of the provers attempting a conjecture that failed to prove it."""
    records = list(records)
    if not records:
        raise ValueError("difficulty of a conjecture nobody attempted")
    failed = sum(not r.proved for r in records)
    return failed / len(records)


class OntologyAxiomIndex:
    """Axiom name -> (formula, is_atomic) for one ontology file."""

    def __init__(self, axioms=None):
        self.axioms = dict(axioms or {})

    def __len__(self):
        return len(self.axioms)

    def __contains__(self, name):
        return name in self.axioms

    def names(self):
        return set(self.axioms)

    def is_atomic(self, name):
        return self.axioms[name][1]

    @property
    def unit_clauses(self):
        return sum(1 for _, atomic in self.axioms.values() if atomic)

    @property
    def formulae(self):
        return len(self.axioms) - self.unit_clauses

    def add(self, records, path=None):
        for rec in records:
            if rec.role == "conjecture":
                continue
            if rec.name in self.axioms:
                raise InputFormatError(f"axiom name {rec.name} defined twice", path, rec.line)
            self.axioms[rec.name] = (rec.formula, is_literal(rec.formula))

    @classmethod
    def from_file(cls, path, follow_includes=True):
        start = timer()
        index = cls()
        pending, seen = [str(path)], set()
        while pending:
            current = pending.pop(0)
            if current in seen:
                continue
            seen.add(current)
            records, includes = parse_tptp(read_text(current), current, with_includes=True)
            index.add(records, current)
            if follow_includes:
                base = os.path.dirname(current)
                pending.extend(i if os.path.isabs(i) else os.path.join(base, i) for i in includes)
        logger.info(f"indexed {len(index)} axioms of {path} ({index.unit_clauses} unit clauses, "
                    f"{index.formulae} formulae) in {timer(start):.06}s")
        return index


@dataclass
class Coverage:
    used: int = 0
    pct: Optional[float] = None
    exclusive: int = 0
    unit_clauses: int = 0
    formulae: int = 0
    per_proof_used: Optional[float] = None
    per_proof_unit_clauses: Optional[float] = None
    per_proof_formulae: Optional[float] = None


def coverage(records, index, usage=None, row=None):
    """Axioms used by the proofs among `records`.

    `usage` maps each axiom to the set of rows using it across the whole
    run; an axiom counts as exclusive to `row` when no other row uses it.
    """
    proofs = [r for r in records if r.proved]
    used = set()
    for r in proofs:
        used.update(r.used_axioms)
    unknown = sorted(a for a in used if a not in index)
    if unknown:
        raise IntegrityError(f"proofs use axioms missing from the ontology: {unknown[:10]}")

    cov = Coverage(used=len(used))
    if not proofs:
        return cov
    cov.pct = 100.0 * len(used) / len(index) if len(index) else None
    cov.exclusive = len(used) if usage is None else sum(1 for a in used if usage.get(a) == {row})
    cov.unit_clauses = sum(1 for a in used if index.is_atomic(a))
    cov.formulae = cov.used - cov.unit_clauses
    cov.per_proof_used = float(np.mean([len(r.used_axioms) for r in proofs]))
    cov.per_proof_unit_clauses = float(np.mean([sum(index.is_atomic(a) for a in r.used_axioms) for r in proofs]))
    cov.per_proof_formulae = cov.per_proof_used - cov.per_proof_unit_clauses
    return cov


@dataclass
class CategoryMetrics:
    run: str
    ontology: str
    division: str
    category: str
    total: int
    proved: int
    pct: float
    mean_time_s: Optional[float]
    efficiency: Optional[float]
    difficulty: Optional[float] = None
    coverage: Optional[Coverage] = None
    members: List[str] = field(default_factory=list)

    @property
    def is_rollup(self):
        return bool(self.members)


@dataclass
class _Outcome:
    proved: bool
    time_s: Optional[float]
    records: list


def _outcomes(grouped, ontology, problems, polarity, run, excluded):
    out = {}
    for p in problems:
        records = grouped.get((ontology, p.id, polarity), [])
        if run != JOINT:
            records = [r for r in records if r.prover_id == run]
        proving = [r for r in records if r.proved]
        if p.id in excluded or not proving:
            out[p.id] = _Outcome(False, None, records)
        else:
            out[p.id] = _Outcome(True, min(r.wall_time_s for r in proving), records)
    return out


def _row(run, ontology, division, category, outcomes, denominator, members=()):
    total = len(outcomes)
    proved_times = [o.time_s for o in outcomes.values() if o.proved]
    attempted = sum(1 for o in outcomes.values() if o.records)
    return CategoryMetrics(
        run=run,
        ontology=ontology,
        division=division,
        category=category,
        total=total,
        proved=len(proved_times),
        pct=100.0 * len(proved_times) / total if total else 0.0,
        mean_time_s=float(np.mean(proved_times)) if proved_times else None,
        efficiency=efficiency_of_times(proved_times, attempted, denominator),
        members=list(members),
    )


def _difficulty(outcomes):
    ratings = [difficulty(o.records) for o in outcomes.values() if o.proved]
    return float(np.mean(ratings)) if ratings else None


def compute_metrics(corpus, records, verdicts, ontology, run, denominator="solved", axiom_index=None):
    """Rows for one run (a prover id, or "joint" for the best of all
    provers) on one ontology: every category and the Mapping, Competency
    and Total rollups, in both divisions.

    Problems whose verdict is InconsistencyDetected count toward totals but
    never as proved. Difficulty and coverage are filled for joint runs.
    """
    grouped = group_records(records)
    excluded = {v.problem_id for v in verdicts
                if v.ontology == ontology and v.verdict is ProblemClass.INCONSISTENCY_DETECTED}
    by_category = collections.defaultdict(list)
    for p in corpus:
        by_category[p.category].append(p)

    per_row = {}
    for division in POLARITIES:
        for category in CATEGORY_ORDER:
            per_row[division, category.value] = _outcomes(grouped, ontology, by_category.get(category, ()),
                                                          division, run, excluded)

    joint = run == JOINT
    usage = collections.defaultdict(set)
    if joint and axiom_index is not None:
        for row, outcomes in per_row.items():
            for r in _proving_records(outcomes):
                for a in r.used_axioms:
                    usage[a].add(row)

    rows = []
    for division in POLARITIES:
        for category in CATEGORY_ORDER:
            outcomes = per_row[division, category.value]
            m = _row(run, ontology, division, category.value, outcomes, denominator)
            if joint:
                m.difficulty = _difficulty(outcomes)
                if axiom_index is not None:
                    m.coverage = coverage(_proving_records(outcomes), axiom_index, usage, (division, category.value))
            rows.append(m)

        for name, members in ROLLUPS:
            merged = {}
            for category in members:
                merged.update(per_row[division, category.value])
            m = _row(run, ontology, division, name, merged, denominator, [c.value for c in members])
            if joint:
                m.difficulty = _difficulty(merged)
                if axiom_index is not None:
                    m.coverage = coverage(_proving_records(merged), axiom_index)
                    # S of a rollup is the sum of its members' S, not recomputed over the merged rows
                    member_rows = [r for r in rows if r.division == division and r.category in m.members]
                    m.coverage.exclusive = sum(r.coverage.exclusive for r in member_rows)
            rows.append(m)
    return rows


def _proving_records(outcomes):
    return [r for o in outcomes.values() if o.proved for r in o.records]


def sample_uniform(problems, fraction, seed):
    """floor(n * fraction) problems drawn without replacement, returned in
    corpus order."""
    if not 0 <= fraction <= 1:
        raise ConfigError(f"sample fraction {fraction} outside [0, 1]")
    problems = list(problems)
    size = int(math.floor(len(problems) * fraction + 1e-9))
    if size == 0:
        return []
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(len(problems), size=size, replace=False))
    return [problems[i] for i in chosen]


def verdict_counts(verdicts) -> Dict[str, Dict[str, int]]:
    """ontology -> verdict -> count."""
    counts = collections.defaultdict(lambda: {c.value: 0 for c in ProblemClass})
    for v in verdicts:
        counts[v.ontology][v.verdict.value] += 1
    return dict(counts)
