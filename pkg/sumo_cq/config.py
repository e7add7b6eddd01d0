"""The run configuration: one JSON file naming every input, the ontologies
and provers to evaluate, and where artifacts go.

Relative paths resolve against the directory holding the configuration
file. Every stage writes its artifacts below `output_dir`.
"""
import logging
import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from sumo_cq.analysis import DENOMINATORS
from sumo_cq.errors import ConfigError
from sumo_cq.harness import ProverConfig
from sumo_cq.tptp import SymbolMap
from sumo_cq.util import exists, is_remote, read_json

logger = logging.getLogger(__name__)

_LABEL = re.compile(r"[A-Za-z0-9_.\-]+\Z")


@dataclass
class OntologyConfig:
    label: str
    axiom_file: str
    symbol_map: Optional[str] = None

    def load_symbol_map(self):
        return SymbolMap.from_json(self.symbol_map) if self.symbol_map else SymbolMap()


@dataclass
class RunConfig:
    name: str
    output_dir: str
    comment: str = ""
    wordnet_dir: Optional[str] = None
    sense_index: Optional[str] = None
    morphosemantic_table: Optional[str] = None
    morphosemantic: Dict[str, str] = field(default_factory=dict)
    mapping_files: List[str] = field(default_factory=list)
    mapping_suffixes: Optional[Dict[str, str]] = None
    concept_corrections: Dict[str, str] = field(default_factory=dict)
    taxonomy_files: List[str] = field(default_factory=list)
    core_manifest: Optional[str] = None
    ontologies: List[OntologyConfig] = field(default_factory=list)
    attribute_overrides: Dict[str, str] = field(default_factory=dict)
    provers: List[ProverConfig] = field(default_factory=list)
    seed: int = 0
    jobs: int = 1
    parallelism: int = 4
    sample_fraction: float = 0.01
    efficiency_denominator: str = "solved"
    report: dict = field(default_factory=dict)
    wandb_project: Optional[str] = None
    path: Optional[str] = None

    def artifact(self, *parts):
        return os.path.join(self.output_dir, *parts)

    @property
    def snapshot_path(self):
        return self.artifact("snapshot.json")

    @property
    def projected_path(self):
        return self.artifact("projected.json")

    @property
    def projection_report_path(self):
        return self.artifact("projection_report.txt")

    @property
    def projection_stats_path(self):
        return self.artifact("projection_stats.tsv")

    @property
    def corpus_path(self):
        return self.artifact("corpus.jsonl")

    @property
    def corpus_meta_path(self):
        return self.artifact("corpus.meta.json")

    @property
    def problems_dir(self):
        return self.artifact("problems")

    @property
    def records_path(self):
        return self.artifact("records.jsonl")

    @property
    def outputs_dir(self):
        return self.artifact("outputs")

    @property
    def verdicts_path(self):
        return self.artifact("verdicts.jsonl")

    @property
    def reports_dir(self):
        return self.artifact("reports")

    @property
    def sample_path(self):
        return self.artifact("sample.jsonl")

    @property
    def judgments_path(self):
        return self.artifact("judgments.tsv")

    def ontology(self, label):
        for o in self.ontologies:
            if o.label == label:
                return o
        raise ConfigError(f"no ontology labelled {label!r}, configured: {[o.label for o in self.ontologies]}")

    def prover(self, prover_id):
        for p in self.provers:
            if p.id == prover_id:
                return p
        raise ConfigError(f"no prover {prover_id!r}, configured: {[p.id for p in self.provers]}")

    def layout(self):
        layout = dict(self.report)
        layout.setdefault("ontologies", [o.label for o in self.ontologies])
        layout.setdefault("provers", [p.id for p in self.provers])
        return layout


_PATH_KEYS = ("wordnet_dir", "sense_index", "morphosemantic_table", "core_manifest", "output_dir")
_PATH_LIST_KEYS = ("mapping_files", "taxonomy_files")
_REQUIRED = ("name", "output_dir")


def _resolve(base, path):
    if path is None or is_remote(path) or os.path.isabs(path):
        return path
    if is_remote(base):
        return f"{base.rstrip('/')}/{path}"
    return os.path.normpath(os.path.join(base, path))


def _load_prover(entry, base):
    if isinstance(entry, str):
        path = _resolve(base, entry)
        if not exists(path):
            raise ConfigError(f"prover config {path} not found")
        entry = read_json(path)
        base = os.path.dirname(path)
    if not isinstance(entry, dict):
        raise ConfigError(f"prover entry must be an object or a file name, got {entry!r}")
    entry = dict(entry)
    # bare names are looked up on PATH, anything with a directory part is a file
    executable = entry.get("executable", "")
    if os.sep in executable:
        entry["executable"] = _resolve(base, executable)
    return ProverConfig.from_dict(entry)


def config_from_dict(d, base="."):
    missing = [k for k in _REQUIRED if not d.get(k)]
    if missing:
        raise ConfigError(f"config lacks required keys: {', '.join(missing)}")

    d = dict(d)
    for key in _PATH_KEYS:
        d[key] = _resolve(base, d.get(key))
    for key in _PATH_LIST_KEYS:
        d[key] = [_resolve(base, p) for p in d.get(key, [])]

    corrections = d.get("concept_corrections") or {}
    if isinstance(corrections, str):
        corrections = read_json(_resolve(base, corrections))
    d["concept_corrections"] = corrections

    ontologies = []
    for o in d.get("ontologies", []):
        if not isinstance(o, dict) or "label" not in o or "axiom_file" not in o:
            raise ConfigError(f"ontology entries need a label and an axiom_file, got {o!r}")
        if not _LABEL.match(o["label"]):
            raise ConfigError(f"ontology label {o['label']!r} must be a single word")
        ontologies.append(OntologyConfig(o["label"], _resolve(base, o["axiom_file"]),
                                         _resolve(base, o.get("symbol_map"))))
    d["ontologies"] = ontologies
    labels = [o.label for o in ontologies]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"duplicate ontology labels in {labels}")

    d["provers"] = [_load_prover(p, base) for p in d.get("provers", [])]
    ids = [p.id for p in d["provers"]]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"duplicate prover ids in {ids}")

    unknown = sorted(set(d) - set(RunConfig.__dataclass_fields__))
    if unknown:
        logger.warning(f"ignoring unknown config keys {unknown}")
    cfg = RunConfig(**{k: v for k, v in d.items() if k in RunConfig.__dataclass_fields__})

    if cfg.jobs < 1 or cfg.parallelism < 1:
        raise ConfigError("jobs and parallelism must be at least 1")
    if not 0 <= cfg.sample_fraction <= 1:
        raise ConfigError(f"sample_fraction {cfg.sample_fraction} outside [0, 1]")
    if cfg.efficiency_denominator not in DENOMINATORS:
        raise ConfigError(f"efficiency_denominator must be one of {DENOMINATORS}")
    return cfg


def input_paths(cfg):
    """Every input file or directory the configuration refers to."""
    paths = [cfg.wordnet_dir, cfg.sense_index, cfg.morphosemantic_table, cfg.core_manifest]
    paths += cfg.mapping_files + cfg.taxonomy_files
    for o in cfg.ontologies:
        paths += [o.axiom_file, o.symbol_map]
    return [p for p in paths if p]


def validate_paths(cfg):
    missing = [p for p in input_paths(cfg) if not exists(p)]
    if missing:
        raise ConfigError(f"configured inputs not found: {', '.join(missing)}")


def load_config(path, check_paths=True):
    if not exists(path):
        raise ConfigError(f"config file {path} not found")
    try:
        d = read_json(path)
    except ValueError as e:
        raise ConfigError(f"{path}: not valid JSON ({e})") from None
    base = str(path).rsplit("/", 1)[0] if is_remote(path) else os.path.dirname(os.path.abspath(path))
    cfg = config_from_dict(d, base)
    cfg.path = str(path)
    if check_paths:
        validate_paths(cfg)
    return cfg
