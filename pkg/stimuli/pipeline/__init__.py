# Pipeline Module
from .reports import (clause_detection_row, errors_table, eval_table, evaluate_instances,
                      markdown_table, render_report, stats_table, write_table)

__all__ = [
    'clause_detection_row',
    'errors_table',
    'eval_table',
    'evaluate_instances',
    'markdown_table',
    'render_report',
    'stats_table',
    'write_table',
]
