import argparse
import logging
import os
import sys

from sumo_cq import __version__
from sumo_cq.analysis import OntologyAxiomIndex, ProblemVerdict, classify_all, sample_uniform
from sumo_cq.config import load_config
from sumo_cq.corpus import CORPUS_FORMAT, build_corpus, problem_json, read_corpus, write_corpus, write_problem_files
from sumo_cq.errors import CqError, MissingArtifactError
from sumo_cq.harness import RecordStore, plan_jobs, run_all, validate_records
from sumo_cq.projection import (PROJECTION_FORMAT, REFERENCE_STATS, ProjectedMapping, Taxonomy, project_mapping,
                                write_projection_report)
from sumo_cq.report import log_wandb, render_report, write_judgment_template
from sumo_cq.snapshot import SNAPSHOT_FORMAT, KnowledgeSnapshot, ingest
from sumo_cq.util import exists, jsonl_line, read_jsonl, timer, write_text

logger = logging.getLogger("sumo_cq")

STAGES = ("ingest", "project", "generate", "emit", "run", "classify", "report", "sample")


def parse_args(argv=None):
    parser = argparse.ArgumentParser(prog="sumo-cq", description="""
    Competency-question testing of first-order ontologies. Each stage reads the
    artifacts of the previous one from `output_dir` and writes its own:
        ingest     lexical database, mapping and taxonomy -> snapshot.json
        project    mapping lifted onto the ontology core  -> projected.json, projection_report.txt
        generate   question patterns                      -> corpus.jsonl, corpus.meta.json
        emit       one TPTP file per conjecture           -> problems/<ontology>/
        run        theorem provers on every conjecture    -> records.jsonl, outputs/
        classify   verdict per problem                    -> verdicts.jsonl
        report     proof, efficiency and coverage tables  -> reports/
        sample     uniform audit sample                   -> sample.jsonl, judgments.tsv
    Modify the config file:
        - set `wordnet_dir`, `mapping_files`, `taxonomy_files` and `core_manifest` to the inputs
        - list the ontologies to test under `ontologies`, each with an `axiom_file`
        - list prover configs under `provers` (see configs/provers/)
        - set `name` and `wandb_project` to log report metrics to Weights & Biases
    """, formatter_class=argparse.RawTextHelpFormatter)
    parser.add_argument("--config", type=str, default=None, help="Config file location")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log debug messages")
    parser.add_argument("--quiet", action="store_true", help="No progress bars, warnings and errors only")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} (snapshot format {SNAPSHOT_FORMAT}, "
                                f"projection format {PROJECTION_FORMAT}, corpus format {CORPUS_FORMAT})")

    sub = parser.add_subparsers(dest="stage", metavar="stage")
    sub.add_parser("ingest", help="Parse every input into a knowledge snapshot")
    project = sub.add_parser("project", help="Lift the mapping onto the ontology core")
    project.add_argument("--reference", action="store_true", help="Print reference figures beside the statistics")
    sub.add_parser("generate", help="Instantiate the question patterns")
    emit = sub.add_parser("emit", help="Write TPTP problem files")
    emit.add_argument("--ontology", type=str, default=None, help="Only this ontology label")
    run = sub.add_parser("run", help="Run the provers on every conjecture lacking a record")
    run.add_argument("--jobs", type=int, default=None, help="Provers running at once (default: config `jobs`)")
    run.add_argument("--prover", type=str, action="append", default=None, help="Only this prover id (repeatable)")
    run.add_argument("--ontology", type=str, action="append", default=None, help="Only this ontology (repeatable)")
    sub.add_parser("classify", help="Classify every problem from the records")
    report = sub.add_parser("report", help="Render the report tables")
    report.add_argument("--efficiency-denominator", choices=("solved", "attempted"), default=None,
                        help="Divide inverse times by solved (default) or attempted conjectures")
    sample = sub.add_parser("sample", help="Draw a uniform sample of problems for manual review")
    sample.add_argument("--fraction", type=float, default=None, help="Share of the corpus (default: config)")
    sample.add_argument("--seed", type=int, default=None, help="Sampling seed (default: config `seed`)")

    args = parser.parse_args(argv)
    if args.stage is None:
        parser.error(f"a stage is required, one of {', '.join(STAGES)}")
    if args.config is None:
        parser.error("--config is required")
    return args


def require(path, stage):
    if not exists(path):
        raise MissingArtifactError(path, stage)
    return path


def load_corpus(cfg):
    return read_corpus(require(cfg.corpus_path, "generate"), cfg.corpus_meta_path)


def do_ingest(cfg, args):
    snapshot = ingest(cfg)
    snapshot.save(cfg.snapshot_path)
    logger.info(f"snapshot written to {cfg.snapshot_path}")


def do_project(cfg, args):
    snapshot = KnowledgeSnapshot.load(require(cfg.snapshot_path, "ingest"))
    projected = project_mapping(snapshot.mapping, Taxonomy(snapshot.facts), snapshot.core, snapshot.synsets,
                                cfg.parallelism)
    projected.save(cfg.projected_path)
    write_projection_report(projected.stats, cfg.projection_report_path, cfg.projection_stats_path,
                            REFERENCE_STATS if args.reference else None)
    logger.info(f"projection written to {cfg.projected_path}, report in {cfg.projection_report_path}")


def do_generate(cfg, args):
    snapshot = KnowledgeSnapshot.load(require(cfg.snapshot_path, "ingest"))
    projected = ProjectedMapping.load(require(cfg.projected_path, "project"))
    corpus = build_corpus(snapshot, projected, cfg.attribute_overrides, cfg.parallelism)
    write_corpus(corpus, cfg.corpus_path, cfg.corpus_meta_path)
    for category, n in corpus.counts().items():
        logger.info(f"  {category}: {n}")


def do_emit(cfg, args):
    corpus = load_corpus(cfg)
    ontologies = [cfg.ontology(args.ontology)] if args.ontology else cfg.ontologies
    for o in ontologies:
        write_problem_files(corpus, cfg.problems_dir, o.label, o.axiom_file, o.load_symbol_map(),
                            show_progress=not args.quiet)


def do_run(cfg, args):
    corpus = load_corpus(cfg)
    ontologies = [cfg.ontology(label) for label in args.ontology] if args.ontology else cfg.ontologies
    provers = [cfg.prover(p) for p in args.prover] if args.prover else cfg.provers
    for o in ontologies:
        require(os.path.join(cfg.problems_dir, o.label), "emit")

    store = RecordStore(cfg.records_path)
    existing = store.load()
    validate_records(existing, corpus, [o.label for o in cfg.ontologies])
    plan = plan_jobs(corpus, provers, [(o.label, o.axiom_file) for o in ontologies], existing, cfg.problems_dir)
    logger.info(f"{len(existing)} records present, {len(plan)} jobs to run")
    run_all(plan, provers, store, args.jobs or cfg.jobs, cfg.outputs_dir, show_progress=not args.quiet)


def load_records(cfg, corpus):
    store = RecordStore(cfg.records_path)
    records = store.load()
    validate_records(records, corpus, [o.label for o in cfg.ontologies])
    return records


def do_classify(cfg, args):
    corpus = load_corpus(cfg)
    records = load_records(cfg, corpus) if exists(cfg.records_path) else []
    if not records:
        logger.warning(f"no records in {cfg.records_path}, every problem is unsolved")
    verdicts = classify_all(corpus, records, [o.label for o in cfg.ontologies])
    write_text(cfg.verdicts_path, "".join(jsonl_line(v.to_json()) for v in verdicts))
    logger.info(f"{len(verdicts)} verdicts written to {cfg.verdicts_path}")


def do_report(cfg, args):
    corpus = load_corpus(cfg)
    verdicts = [ProblemVerdict.from_json(d) for d in read_jsonl(require(cfg.verdicts_path, "classify"))]
    records = load_records(cfg, corpus) if exists(cfg.records_path) else []

    layout = cfg.layout()
    axiom_indexes = {}
    primary = layout["ontologies"][0] if layout["ontologies"] else None
    if primary and any(r.ontology == primary and r.proved for r in records):
        axiom_indexes[primary] = OntologyAxiomIndex.from_file(cfg.ontology(primary).axiom_file)
        validate_records(records, corpus, axiom_names={primary: axiom_indexes[primary].names()})

    denominator = args.efficiency_denominator or cfg.efficiency_denominator
    paths, tables = render_report(corpus, records, verdicts, layout, cfg.reports_dir, axiom_indexes, denominator)
    if cfg.wandb_project:
        log_wandb(tables, cfg.wandb_project, cfg.name, {"config": cfg.path, "denominator": denominator})
    logger.info(f"report written to {paths[-1]}")


def do_sample(cfg, args):
    corpus = load_corpus(cfg)
    fraction = cfg.sample_fraction if args.fraction is None else args.fraction
    seed = cfg.seed if args.seed is None else args.seed
    chosen = sample_uniform(corpus.problems, fraction, seed)
    write_text(cfg.sample_path, "".join(jsonl_line(problem_json(p)) for p in chosen))
    write_judgment_template(chosen, cfg.judgments_path)
    logger.info(f"sampled {len(chosen)} of {len(corpus)} problems (fraction {fraction}, seed {seed})")


COMMANDS = {
    "ingest": do_ingest,
    "project": do_project,
    "generate": do_generate,
    "emit": do_emit,
    "run": do_run,
    "classify": do_classify,
    "report": do_report,
    "sample": do_sample,
}


def main(argv=None):
    args = parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    start = timer()
    try:
        cfg = load_config(args.config)
        COMMANDS[args.stage](cfg, args)
    except CqError as e:
        logger.error(f"{e.category}: {e}")
        return e.exit_code
    logger.info(f"{args.stage} done in {timer(start):.06}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
