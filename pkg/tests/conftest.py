import os

import pytest

from sumo_cq.config import load_config
from sumo_cq.corpus import build_corpus, read_corpus
from sumo_cq.harness import ProverConfig, RunRecord
from sumo_cq.projection import Taxonomy, project_mapping
from sumo_cq.snapshot import ingest
from sumo_cq.util import read_jsonl

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")
MICRO_DIR = os.path.join(DATA_DIR, "micro")


def data_path(*parts):
    return os.path.join(DATA_DIR, *parts)


@pytest.fixture
def fixture_config(tmp_path):
    """The bundled miniature inputs, writing artifacts below tmp_path."""
    cfg = load_config(data_path("config.json"))
    cfg.output_dir = str(tmp_path / "out")
    return cfg


@pytest.fixture(scope="session")
def snapshot():
    return ingest(load_config(data_path("config.json")))


@pytest.fixture(scope="session")
def projected(snapshot):
    return project_mapping(snapshot.mapping, Taxonomy(snapshot.facts), snapshot.core, snapshot.synsets)


@pytest.fixture(scope="session")
def corpus(snapshot, projected):
    return build_corpus(snapshot, projected)


@pytest.fixture
def micro_corpus():
    return read_corpus(os.path.join(MICRO_DIR, "corpus.jsonl"))


@pytest.fixture
def micro_records():
    return [RunRecord.from_json(d) for d in read_jsonl(os.path.join(MICRO_DIR, "records.jsonl"))]


@pytest.fixture
def replay_prover():
    """Replays the hand-written prover output stored for each micro problem."""
    return ProverConfig("replay", "sh", [os.path.join(MICRO_DIR, "replay_prover.sh"), "{problem}"],
                        time_limit_s=10, kill_grace_s=1, poll_s=0.05)
