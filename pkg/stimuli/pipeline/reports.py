"""
Table builders for the CSV outputs and the Markdown summary report
"""
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from ..corpus import Instance, stats_by_dataset
from ..error_analysis import ERROR_TYPES, ErrorCounts, ErrorType
from ..evaluation import (SPAN_MODES, MatchMode, Prf, clause_alignment, clause_match_prf,
                          clause_prf, span_prf)
from ..mapping import gold_clause_flags

logger = logging.getLogger(__name__)

STATS_COLUMNS = ["dataset", "size", "stimuli", "mu", "sigma", "mu_s_per_i", "mu_s_per_c",
                 "clauses_total", "clauses_with_s", "mu_clauses_per_i", "mu_all_s_per_i"]
EVAL_COLUMNS = ["dataset", "model", "mode", "P", "R", "F1",
                "precision", "recall", "f1", "tp_p", "tp_r", "n_pred", "n_gold"]


def group_by_dataset(instances: Iterable[Instance]) -> Dict[str, List[Instance]]:
    groups: Dict[str, List[Instance]] = {}
    for instance in instances:
        groups.setdefault(instance.dataset, []).append(instance)
    return dict(sorted(groups.items()))


def stats_table(instances: Sequence[Instance]) -> pd.DataFrame:
    rows = []
    for dataset, stats in stats_by_dataset(instances).items():
        rows.append({"dataset": dataset, **stats.to_dict()})
    return pd.DataFrame(rows, columns=STATS_COLUMNS)


def clause_detection_row(dataset: str, annotated: Sequence[Instance],
                         extracted: Sequence[Sequence], kappa: Optional[float] = None) -> Dict:
    """One row of the clause-detection table for instances with annotated clauses.

    ``extracted`` holds the extracted clause spans aligned with ``annotated``.
    """
    annotated_spans = [i.clause_spans for i in annotated]
    stimuli = [i.stimulus_spans for i in annotated]
    match = clause_match_prf(extracted, annotated_spans)
    vs_annotated = clause_alignment(stimuli, annotated_spans)
    vs_extracted = clause_alignment(stimuli, extracted)
    return {
        "dataset": dataset,
        "extracted_precision": match.precision,
        "extracted_recall": match.recall,
        "extracted_f1": match.f1,
        "annotated_exact": vs_annotated["exact"],
        "annotated_left": vs_annotated["left"],
        "annotated_right": vs_annotated["right"],
        "stimuli_extracted_exact": vs_extracted["exact"],
        "stimuli_extracted_left": vs_extracted["left"],
        "stimuli_extracted_right": vs_extracted["right"],
        "kappa": kappa,
    }


def _prf_row(dataset: str, model: str, mode: MatchMode, prf: Prf) -> Dict:
    return {
        "dataset": dataset,
        "model": model,
        "mode": mode.value,
        "P": round(prf.precision * 100),
        "R": round(prf.recall * 100),
        "F1": round(prf.f1 * 100),
        **prf.to_dict(),
    }


def evaluate_instances(instances: Sequence[Instance], mode: MatchMode) -> Prf:
    """Score the stored predictions of ``instances`` under one mode."""
    missing = [i.id for i in instances if i.pred_iob is None]
    if missing:
        raise ValueError(f"{len(missing)} instances carry no predictions (first: {missing[0]})")
    if mode == MatchMode.CLAUSE:
        scored = [i for i in instances if i.clauses is not None and i.pred_clauses is not None]
        return clause_prf([i.pred_clauses for i in scored], [gold_clause_flags(i) for i in scored])
    return span_prf([i.predicted_spans for i in instances], [i.stimulus_spans for i in instances], mode)


def eval_table(instances: Sequence[Instance], model: str,
               modes: Sequence[MatchMode] = tuple(SPAN_MODES) + (MatchMode.CLAUSE,)) -> pd.DataFrame:
    rows = []
    for dataset, group in group_by_dataset(instances).items():
        for mode in modes:
            rows.append(_prf_row(dataset, model, mode, evaluate_instances(group, mode)))
    return pd.DataFrame(rows, columns=EVAL_COLUMNS)


def errors_table(counts: Dict[Tuple[str, str], ErrorCounts]) -> pd.DataFrame:
    """Rows = error types, columns = model/dataset plus Sum; "All" totals the errors.

    True positives follow the "All" row since they are not errors.
    """
    columns = [f"{model}/{dataset}" for model, dataset in counts]
    rows = []
    for error_type in ERROR_TYPES:
        rows.append([error_type.label] + [c[error_type] for c in counts.values()])
    rows.append(["All"] + [c.total_errors for c in counts.values()])
    rows.append([ErrorType.TRUE_POSITIVE.label] + [c[ErrorType.TRUE_POSITIVE] for c in counts.values()])
    frame = pd.DataFrame(rows, columns=["error"] + columns)
    frame["Sum"] = frame[columns].sum(axis=1) if columns else 0
    return frame


def write_table(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info("Wrote %d rows to %s", len(frame), path)
    return path


def _cell(value) -> str:
    if isinstance(value, float):
        if pd.isna(value):
            return ""
        return f"{value:.4f}"
    return str(value)


def markdown_table(frame: pd.DataFrame) -> str:
    header = "| " + " | ".join(str(c) for c in frame.columns) + " |"
    rule = "| " + " | ".join("---" for _ in frame.columns) + " |"
    body = ["| " + " | ".join(_cell(v) for v in row) + " |" for row in frame.itertuples(index=False)]
    return "\n".join([header, rule] + body)


def render_report(csv_paths: Sequence[Union[str, Path]], title: str = "Stimulus detection report") -> str:
    """Markdown document with one section per CSV table."""
    sections = [f"# {title}", ""]
    for csv_path in csv_paths:
        csv_path = Path(csv_path)
        if not csv_path.exists():
            raise FileNotFoundError(f"report input not found: {csv_path}")
        frame = pd.read_csv(csv_path)
        sections.extend([f"## {csv_path.stem}", "", markdown_table(frame), ""])
    return "\n".join(sections)
