"""Report tables: delimited files plus a plain text rendering.

Three shapes are produced:
  ontologies  one run (a prover, or the joint best of all provers) on every ontology
  provers     every prover on the primary ontology
  joint       all provers together on the primary ontology, with difficulty
              and axiom coverage
"""
import logging
import os

import wandb

from sumo_cq.analysis import JOINT, ProblemClass, compute_metrics, verdict_counts
from sumo_cq.kif import emit_suo_kif
from sumo_cq.patterns import Category
from sumo_cq.util import timer, write_text

logger = logging.getLogger(__name__)

DASH = "-"

BASE_COLUMNS = ["run", "ontology", "division", "category", "total", "proved", "pct", "mean_time_s", "efficiency"]
JOINT_COLUMNS = ["difficulty", "N", "P", "S", "C", "F", "N_per_proof", "C_per_proof", "F_per_proof"]


def _num(x, decimals=2):
    return DASH if x is None else f"{x:.{decimals}f}"


def fmt_pct(m, decimals=2):
    return DASH if m.proved == 0 else f"{m.pct:.{decimals}f}"


def fmt_time(t, decimals=2):
    return f"{DASH} s." if t is None else f"{t:.{decimals}f} s."


def category_label(name):
    try:
        return Category(name).label
    except ValueError:
        return name


def tsv_row(m, with_joint=False, decimals=2):
    cells = [m.run, m.ontology, m.division, m.category, str(m.total), str(m.proved), fmt_pct(m, decimals),
             _num(m.mean_time_s, decimals), _num(m.efficiency, decimals)]
    if with_joint:
        cells.append(_num(m.difficulty, decimals))
        cells += coverage_cells(m.coverage, decimals)
    return cells


def coverage_cells(c, decimals=2):
    if c is None or c.pct is None:
        return [DASH] * 8
    return [str(c.used), _num(c.pct, decimals), str(c.exclusive), str(c.unit_clauses), str(c.formulae),
            _num(c.per_proof_used, decimals), _num(c.per_proof_unit_clauses, decimals),
            _num(c.per_proof_formulae, decimals)]


def write_tsv(path, rows, with_joint=False, decimals=2):
    header = BASE_COLUMNS + (JOINT_COLUMNS if with_joint else [])
    lines = ["\t".join(header)] + ["\t".join(tsv_row(m, with_joint, decimals)) for m in rows]
    write_text(path, "\n".join(lines) + "\n")


def _division_cells(m, decimals):
    return [str(m.proved), fmt_pct(m, decimals), fmt_time(m.mean_time_s, decimals), _num(m.efficiency, decimals)]


def render_table(title, rows, decimals=2):
    """Categories down, truth-test and falsity-test column groups across."""
    by_key = {(m.division, m.category): m for m in rows}
    categories = []
    for m in rows:
        if m.category not in categories:
            categories.append(m.category)

    header = ["", "#", "%", "T", "E", "#", "%", "T", "E"]
    body = []
    for name in categories:
        truth = by_key.get(("truth", name))
        falsity = by_key.get(("falsity", name))
        total = (truth or falsity).total
        label = f"{category_label(name)} ({total:,})"
        cells = [label]
        for m in (truth, falsity):
            cells += _division_cells(m, decimals) if m is not None else [DASH] * 4
        body.append(cells)

    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    group = sum(widths[1:5]) + 3 * 2
    lines = [title, "",
             " " * widths[0] + "  " + "Truth-tests".center(group) + "    " + "Falsity-tests".center(group)]

    def fmt(cells):
        left = cells[0].ljust(widths[0])
        t = "  ".join(c.rjust(w) for c, w in zip(cells[1:5], widths[1:5]))
        f = "  ".join(c.rjust(w) for c, w in zip(cells[5:], widths[5:]))
        return f"{left}  {t}    {f}"

    lines.append(fmt(header))
    lines.append("-" * len(lines[-1]))
    for cells in body:
        lines.append(fmt(cells))
    return "\n".join(lines)


def render_joint_table(title, rows, decimals=2):
    header = ["", "div", "#", "%", "D", "N", "P", "S", "C", "F", "N/p", "C/p", "F/p"]
    body = []
    for m in rows:
        cov = coverage_cells(m.coverage, decimals)
        body.append([f"{category_label(m.category)} ({m.total:,})", m.division, str(m.proved), fmt_pct(m, decimals),
                     _num(m.difficulty, decimals)] + cov)
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = [title, ""]
    for cells in [header] + body:
        lines.append(cells[0].ljust(widths[0]) + "  " + "  ".join(c.rjust(w) for c, w in zip(cells[1:], widths[1:])))
        if cells is header:
            lines.append("-" * len(lines[-1]))
    return "\n".join(lines)


def inconsistency_banner(verdicts):
    bad = [v for v in verdicts if v.verdict is ProblemClass.INCONSISTENCY_DETECTED]
    if not bad:
        return None
    lines = ["!" * 72,
             f"!! INCONSISTENCY DETECTED: {len(bad)} problem(s) had both conjectures proved.",
             "!! These problems are excluded from every proved count below.",
             "!! " + ", ".join(f"{v.ontology}:{v.problem_id}" for v in bad[:20]) + (" ..." if len(bad) > 20 else ""),
             "!" * 72]
    return "\n".join(lines)


def render_verdict_summary(verdicts):
    counts = verdict_counts(verdicts)
    lines = ["Problem verdicts", ""]
    for ontology, by_class in counts.items():
        lines.append(f"  {ontology}: " + ", ".join(f"{k} {v}" for k, v in by_class.items()))
    for c in ProblemClass:
        lines.append(f"    {c.value}: {c.meaning}")
    return "\n".join(lines)


def render_report(corpus, records, verdicts, layout, out_dir, axiom_indexes=None, denominator="solved"):
    """Computes every table the layout asks for and writes them under
    `out_dir`. Returns the written paths and the metric rows by table name.

    `layout` keys: ontologies (labels, first is primary), provers (ids),
    ontologies_run (prover id or "joint" for the ontology table), decimals.
    """
    start = timer()
    axiom_indexes = axiom_indexes or {}
    decimals = layout.get("decimals", 2)
    ontologies = list(layout.get("ontologies") or [])
    for v in verdicts:
        if v.ontology not in ontologies:
            ontologies.append(v.ontology)
    provers = list(layout.get("provers") or sorted({r.prover_id for r in records}))
    run = layout.get("ontologies_run", JOINT)

    tables = {}
    tables["ontologies"] = [m for label in ontologies
                            for m in compute_metrics(corpus, records, verdicts, label, run, denominator)]
    primary = ontologies[0] if ontologies else None
    tables["provers"] = [m for prover in provers if primary
                         for m in compute_metrics(corpus, records, verdicts, primary, prover, denominator)]
    tables["joint"] = compute_metrics(corpus, records, verdicts, primary, JOINT, denominator,
                                      axiom_indexes.get(primary)) if primary else []

    paths = []
    for name, rows in tables.items():
        path = os.path.join(out_dir, f"{name}.tsv")
        write_tsv(path, rows, with_joint=name == "joint", decimals=decimals)
        paths.append(path)

    text = []
    banner = inconsistency_banner(verdicts)
    if banner:
        text.append(banner)
        logger.warning(banner.splitlines()[1].lstrip("! "))
    text.append(render_verdict_summary(verdicts))
    for label in ontologies:
        rows = [m for m in tables["ontologies"] if m.ontology == label]
        text.append(render_table(f"Ontology {label}, run {run}", rows, decimals))
    for prover in provers:
        rows = [m for m in tables["provers"] if m.run == prover]
        text.append(render_table(f"Prover {prover} on {primary}", rows, decimals))
    if primary:
        text.append(render_joint_table(f"Joint analysis on {primary}", tables["joint"], decimals))

    path = os.path.join(out_dir, "report.txt")
    write_text(path, "\n\n".join(text) + "\n")
    paths.append(path)
    logger.info(f"wrote {len(paths)} report files in {timer(start):.06}s")
    return paths, tables


def log_wandb(tables, project, name, config=None):
    """Logs every row's proof rate and efficiency to Weights & Biases."""
    wandb.init(project=project, name=name, config=config or {})
    stats = {}
    for table, rows in tables.items():
        for m in rows:
            prefix = f"{table}/{m.run}/{m.ontology}/{m.division}/{m.category}"
            stats[f"{prefix}/proved"] = m.proved
            stats[f"{prefix}/pct"] = m.pct
            if m.efficiency is not None:
                stats[f"{prefix}/efficiency"] = m.efficiency
            if m.difficulty is not None:
                stats[f"{prefix}/difficulty"] = m.difficulty
    wandb.log(stats)
    wandb.finish()


JUDGMENT_COLUMNS = ["id", "category", "truth_test", "falsity_test", "sources",
                    "truth_correct", "truth_precise", "falsity_correct", "falsity_precise"]


def write_judgment_template(problems, path):
    """TSV for manual review of a sample, with the judgment columns left empty."""
    lines = ["\t".join(JUDGMENT_COLUMNS)]
    for p in problems:
        sources = "; ".join(" ".join(s) for s in p.provenance.get("sources", []))
        lines.append("\t".join([p.id, p.category.value, emit_suo_kif(p.truth_test), emit_suo_kif(p.falsity_test),
                                sources, "", "", "", ""]))
    write_text(path, "\n".join(lines) + "\n")
