"""Running theorem provers over the corpus.

Every (ontology, conjecture, prover) triple is one job; each finished job
becomes one line in an append-only JSON Lines record store, so an
interrupted batch resumes by re-planning against the store.
"""
import io
import logging
import multiprocessing.pool
import os
import re
import shlex
import shutil
import subprocess
import threading
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import psutil
from tqdm import tqdm

from sumo_cq.corpus import POLARITIES, problem_path
from sumo_cq.errors import ConfigError, IntegrityError
from sumo_cq.util import digest, ensure_dir, exists, jsonl_line, read_jsonl, timer, write_text

logger = logging.getLogger(__name__)

MIB = 1024 * 1024
PLACEHOLDERS = ("problem", "time_s", "mem_mib")

_SZS_STATUS = re.compile(r"SZS status\s+(\w+)")
_USED_AXIOM = re.compile(r"file\(\s*'([^']*)'\s*,\s*([A-Za-z0-9_]+|'[^']*')\s*\)")


class SzsStatus(str, Enum):
    THEOREM = "Theorem"
    COUNTER_SATISFIABLE = "CounterSatisfiable"
    SATISFIABLE = "Satisfiable"
    TIMEOUT = "Timeout"
    GAVE_UP = "GaveUp"
    RESOURCE_OUT = "ResourceOut"
    UNKNOWN = "Unknown"
    ERROR = "Error"

    @property
    def proved(self):
        return self is SzsStatus.THEOREM


_SZS_ALIASES = {
    "Unsatisfiable": SzsStatus.THEOREM,
    "ContradictoryAxioms": SzsStatus.THEOREM,
    "MemoryOut": SzsStatus.RESOURCE_OUT,
    "InputError": SzsStatus.ERROR,
    "SyntaxError": SzsStatus.ERROR,
    "SemanticError": SzsStatus.ERROR,
    "TypeError": SzsStatus.ERROR,
    "OSError": SzsStatus.ERROR,
    "UsageError": SzsStatus.ERROR,
    "Inappropriate": SzsStatus.GAVE_UP,
    "Incomplete": SzsStatus.GAVE_UP,
}

# progress lines some runners print around the verdict
_SZS_IGNORED = ("Started", "Ended", "Status")


def parse_szs_status(output) -> Tuple[SzsStatus, Optional[str]]:
    """The last SZS verdict in `output`, normalized, plus the raw status word."""
    raw = None
    for m in _SZS_STATUS.finditer(output):
        if m.group(1) not in _SZS_IGNORED:
            raw = m.group(1)
    if raw is None:
        return SzsStatus.UNKNOWN, None
    try:
        return SzsStatus(raw), raw
    except ValueError:
        return _SZS_ALIASES.get(raw, SzsStatus.UNKNOWN), raw


def extract_used_axioms(output, axiom_file):
    """Names of the annotated formulas in a proof whose source is the ontology file."""
    base = os.path.basename(str(axiom_file))
    used = set()
    for source, name in _USED_AXIOM.findall(output):
        if os.path.basename(source) != base:
            continue
        used.add(name[1:-1] if name.startswith("'") else name)
    return sorted(used)


@dataclass
class ProverConfig:
    id: str
    executable: str
    args: List[str]
    time_limit_s: float = 60
    memory_limit_mib: int = 2048
    # ceiling the harness enforces over the process tree, defaults to memory_limit_mib
    memory_ceiling_mib: Optional[int] = None
    kill_grace_s: float = 5
    poll_s: float = 0.2

    def __post_init__(self):
        if isinstance(self.args, str):
            self.args = shlex.split(self.args)
        if not self.id or not re.match(r"[A-Za-z0-9_.\-]+\Z", self.id):
            raise ConfigError(f"prover id {self.id!r} must be a non-empty word")
        if self.time_limit_s <= 0:
            raise ConfigError(f"prover {self.id}: time limit must be positive")
        if self.memory_limit_mib <= 0:
            raise ConfigError(f"prover {self.id}: memory limit must be positive")
        if self.memory_ceiling_mib is None:
            self.memory_ceiling_mib = self.memory_limit_mib
        if self.memory_ceiling_mib <= 0:
            raise ConfigError(f"prover {self.id}: memory ceiling must be positive")
        if not any("{problem}" in a for a in self.args):
            raise ConfigError(f"prover {self.id}: argument template lacks the {{problem}} placeholder")
        try:
            self.command("p")
        except (KeyError, IndexError, ValueError) as e:
            raise ConfigError(f"prover {self.id}: bad argument template placeholder {e}") from None

    @classmethod
    def from_dict(cls, d):
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        missing = [k for k in ("id", "executable", "args") if k not in known]
        if missing:
            raise ConfigError(f"prover config {d.get('id', '?')} lacks {', '.join(missing)}")
        return cls(**known)

    def command(self, problem):
        values = {"problem": problem, "time_s": f"{self.time_limit_s:g}", "mem_mib": str(self.memory_limit_mib)}
        return [self.executable] + [a.format(**values) for a in self.args]

    def resolve(self):
        return shutil.which(self.executable) or (self.executable if os.path.isfile(self.executable) else None)


@dataclass(frozen=True, order=True)
class Job:
    ontology: str
    problem_id: str
    polarity: str
    prover_id: str
    problem_path: str = field(compare=False)
    axiom_file: str = field(compare=False)

    @property
    def key(self):
        return self.ontology, self.problem_id, self.polarity, self.prover_id


@dataclass
class RunRecord:
    ontology: str
    problem_id: str
    polarity: str
    prover_id: str
    status: SzsStatus
    wall_time_s: float
    used_axioms: List[str] = field(default_factory=list)
    raw_status: Optional[str] = None
    output_digest: Optional[str] = None
    output: Optional[str] = None
    exit_code: Optional[int] = None
    message: Optional[str] = None

    @property
    def key(self):
        return self.ontology, self.problem_id, self.polarity, self.prover_id

    @property
    def proved(self):
        return self.status.proved

    def to_json(self):
        d = asdict(self)
        d["status"] = self.status.value
        return d

    @classmethod
    def from_json(cls, d):
        d = dict(d)
        d["status"] = SzsStatus(d["status"])
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})


class RecordStore:
    """Append-only JSON Lines file of RunRecords. Must be on local disk."""

    def __init__(self, path):
        self.path = str(path)

    def load(self):
        if not exists(self.path):
            return []
        records = [RunRecord.from_json(d) for d in read_jsonl(self.path, tolerate_partial_tail=True)]
        seen = set()
        for r in records:
            if r.key in seen:
                raise IntegrityError(f"{self.path}: more than one record for {r.key}")
            seen.add(r.key)
        return records

    def _repair_tail(self):
        """Cuts a half-written last line so the next append starts cleanly."""
        with io.open(self.path, "rb+") as f:
            data = f.read()
            if not data or data.endswith(b"\n"):
                return
            cut = data.rfind(b"\n") + 1
            logger.warning(f"{self.path}: dropping {len(data) - cut} bytes of a truncated record")
            f.seek(cut)
            f.truncate()

    def open(self):
        parent = os.path.dirname(self.path)
        if parent:
            ensure_dir(parent)
        if os.path.exists(self.path):
            self._repair_tail()
        return io.open(self.path, "a", encoding="utf-8", newline="\n")

    def append(self, records):
        with self.open() as f:
            for r in records:
                f.write(jsonl_line(r.to_json()))
                f.flush()
                os.fsync(f.fileno())


def plan_jobs(corpus, provers, ontologies, existing, problems_dir):
    """Jobs lacking a record, ordered by (ontology, problem id, polarity, prover id).

    `ontologies` is a list of (label, axiom_file) pairs.
    """
    done = {r.key for r in existing}
    ids = sorted(p.id for p in corpus)
    prover_ids = sorted(p.id for p in provers)
    jobs = []
    for label, axiom_file in ontologies:
        for problem_id in ids:
            for polarity in POLARITIES:
                for prover_id in prover_ids:
                    if (label, problem_id, polarity, prover_id) in done:
                        continue
                    jobs.append(Job(label, problem_id, polarity, prover_id,
                                    problem_path(problems_dir, label, problem_id, polarity), axiom_file))
    return jobs


def _tree(proc):
    try:
        return [proc] + proc.children(recursive=True)
    except psutil.NoSuchProcess:
        return []


def _tree_rss(proc):
    total = 0
    for p in _tree(proc):
        try:
            total += p.memory_info().rss
        except (psutil.NoSuchProcess, psutil.AccessDenied):
            pass
    return total


def kill_tree(proc, grace_s):
    procs = _tree(proc)
    for p in procs:
        try:
            p.terminate()
        except (psutil.NoSuchProcess, psutil.AccessDenied):
            pass
    _, alive = psutil.wait_procs(procs, timeout=grace_s)
    for p in alive:
        try:
            p.kill()
        except (psutil.NoSuchProcess, psutil.AccessDenied):
            pass


def output_path(outputs_dir, job):
    return os.path.join(outputs_dir, job.ontology, job.prover_id, f"{job.problem_id}_{job.polarity}.out")


def _record(job, status, wall, **kwargs):
    return RunRecord(job.ontology, job.problem_id, job.polarity, job.prover_id, status, round(wall, 3), **kwargs)


def run_job(job, prover, outputs_dir=None, stop=None):
    """Runs one prover on one conjecture under its wall-clock and memory limits.

    Setting `stop` (a threading.Event) kills the prover and gives an Error record.
    """
    if not os.path.exists(job.problem_path):
        return _record(job, SzsStatus.ERROR, 0.0, message=f"problem file {job.problem_path} missing")

    cmd = prover.command(job.problem_path)
    wall_limit = prover.time_limit_s + prover.kill_grace_s
    mem_limit = prover.memory_ceiling_mib * MIB
    start = timer()
    try:
        proc = psutil.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.STDOUT, stdin=subprocess.DEVNULL)
    except OSError as e:
        return _record(job, SzsStatus.ERROR, timer(start), message=f"cannot start {cmd[0]}: {e}")

    killed = None
    out = b""
    while True:
        try:
            out, _ = proc.communicate(timeout=prover.poll_s)
            break
        except subprocess.TimeoutExpired:
            pass
        if timer(start) > wall_limit:
            killed = SzsStatus.TIMEOUT
        elif _tree_rss(proc) > mem_limit:
            killed = SzsStatus.RESOURCE_OUT
        elif stop is not None and stop.is_set():
            killed = SzsStatus.ERROR
        if killed is not None:
            kill_tree(proc, prover.kill_grace_s)
            out, _ = proc.communicate()
            break
    wall = timer(start)

    text = out.decode("utf-8", errors="replace")
    status, raw = parse_szs_status(text)
    message = None
    if killed is not None and not status.proved:
        status = killed
        message = {SzsStatus.TIMEOUT: f"killed after {wall:.3f}s", SzsStatus.RESOURCE_OUT: "memory limit exceeded",
                   SzsStatus.ERROR: "cancelled"}[killed]
    if status.proved and wall > prover.time_limit_s:
        status = SzsStatus.TIMEOUT
        message = f"proof found after the {prover.time_limit_s:g}s limit"

    stored = None
    if outputs_dir is not None:
        stored = output_path(outputs_dir, job)
        write_text(stored, text)

    used = extract_used_axioms(text, job.axiom_file) if status.proved else []
    return _record(job, status, wall, used_axioms=used, raw_status=raw, output_digest=digest(text),
                   output=stored, exit_code=proc.returncode, message=message)


def _safe_run(args):
    job, prover, outputs_dir, stop = args
    if stop.is_set():
        return None
    try:
        return run_job(job, prover, outputs_dir, stop)
    except Exception as e:
        logger.exception(f"job {job.key} failed")
        return _record(job, SzsStatus.ERROR, 0.0, message=f"{type(e).__name__}: {e}")


def run_all(plan, provers, store, parallelism=1, outputs_dir=None, show_progress=True):
    """Runs the plan, appending each record to `store` as it completes.

    With `parallelism` 1 the records come out in plan order.
    """
    if not plan:
        logger.info("nothing to run, every job has a record")
        return []

    by_id = {p.id: p for p in provers}
    missing = sorted({job.prover_id for job in plan} - set(by_id))
    if missing:
        raise ConfigError(f"plan names unconfigured provers {missing}")
    for prover in by_id.values():
        if prover.resolve() is None:
            logger.warning(f"prover {prover.id}: {prover.executable} not found, its jobs will record Error")

    start = timer()
    stop = threading.Event()
    work = [(job, by_id[job.prover_id], outputs_dir, stop) for job in plan]
    records = []
    pool = multiprocessing.pool.ThreadPool(parallelism) if parallelism > 1 else None
    try:
        results = pool.imap_unordered(_safe_run, work) if pool else map(_safe_run, work)
        with store.open() as f:
            for record in tqdm(results, total=len(work), desc="prove", disable=not show_progress):
                f.write(jsonl_line(record.to_json()))
                f.flush()
                os.fsync(f.fileno())
                records.append(record)
    except BaseException:
        # queued jobs are dropped, running provers are killed
        stop.set()
        if pool is not None:
            pool.terminate()
            pool.join()
        raise
    if pool is not None:
        pool.close()
        pool.join()

    proved = sum(r.proved for r in records)
    logger.info(f"ran {len(records)} jobs, {proved} proofs, in {timer(start):.06}s")
    return records


def validate_records(records, corpus, ontology_labels=None, axiom_names=None):
    """Referential integrity of the store against the corpus and ontologies.

    `axiom_names` optionally maps an ontology label to its set of axiom names.
    """
    for r in records:
        if r.problem_id not in corpus:
            raise IntegrityError(f"record {r.key} names a problem missing from the corpus")
        if r.polarity not in POLARITIES:
            raise IntegrityError(f"record {r.key} has unknown polarity {r.polarity!r}")
        if ontology_labels is not None and r.ontology not in ontology_labels:
            raise IntegrityError(f"record {r.key} names an unconfigured ontology")
        if r.used_axioms and not r.proved:
            raise IntegrityError(f"record {r.key} lists used axioms without a proof")
        if axiom_names is not None and r.ontology in axiom_names:
            unknown = sorted(set(r.used_axioms) - axiom_names[r.ontology])
            if unknown:
                raise IntegrityError(f"record {r.key} uses axioms {unknown} missing from {r.ontology}")
