#!/usr/bin/env python3
"""
Command-line pipeline for emotion stimulus detection:
1. Validate a corpus and compute dataset statistics
2. Extract clauses from constituency trees and score them
3. Split, train, predict
4. Evaluate, analyse errors and write a report
"""
import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from .clause_extract import extract_clauses
from .config import ConfigManager
from .corpus import Instance, corpus_vocabulary, load_corpus, save_corpus, split_corpus
from .error_analysis import ErrorCounts, classify_corpus
from .evaluation import SPAN_MODES, MatchMode, corpus_kappa
from .models.embeddings import EmbeddingTable, load_embeddings
from .models.factory import ModelFactory
from .models.trainer import TrainedModel, train_model
from .parsetree import parse_bracket, read_tree_file
from .pipeline.reports import (clause_detection_row, errors_table, eval_table, group_by_dataset,
                               render_report, stats_table, write_table)
from .synthetic import generate_synthetic

logger = logging.getLogger("stimuli")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
PARTS = ("train", "dev", "test")
TRAIN_OVERRIDES = {
    "max_epochs": "max_epochs",
    "batch_size": "batch_size",
    "learning_rate": "learning_rate",
    "dropout": "dropout_p",
    "patience": "patience",
    "embedding_dim": "embedding_dim",
    "hidden_dim": "hidden_dim",
    "selection_metric": "selection_metric",
    "seed": "seed",
}


def setup_logging(verbose: bool = False) -> None:
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                        format=LOG_FORMAT, stream=sys.stderr)


def _emit(frame: pd.DataFrame, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(frame.to_csv(index=False))
    else:
        write_table(frame, out)
        print(f"✓ Wrote {out}")


def _load_splits(path: Path) -> Dict[str, List[str]]:
    if not path.exists():
        raise FileNotFoundError(f"splits file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        splits = json.load(f)
    missing = [part for part in PARTS if part not in splits]
    if missing:
        raise ValueError(f"splits file {path} lacks {', '.join(missing)}")
    return splits


def _partition(instances: Sequence[Instance], args) -> Dict[str, List[Instance]]:
    """Split from --splits when given, otherwise a seeded random split."""
    if getattr(args, "splits", None):
        splits = _load_splits(args.splits)
        by_id = {instance.id: instance for instance in instances}
        unknown = [i for part in PARTS for i in splits[part] if i not in by_id]
        if unknown:
            raise ValueError(f"splits file names {len(unknown)} unknown ids (first: {unknown[0]})")
        return {part: [by_id[i] for i in splits[part]] for part in PARTS}
    split = split_corpus(instances, args.seed if args.seed is not None else 0)
    return split._asdict()


def _select_part(instances: List[Instance], args) -> List[Instance]:
    if not getattr(args, "part", None):
        return instances
    return _partition(instances, args)[args.part]


def _trees_for(instances: Sequence[Instance], trees_path: Optional[Path]) -> List[str]:
    if trees_path is not None:
        trees = read_tree_file(trees_path)
        if len(trees) != len(instances):
            raise ValueError(f"{trees_path} has {len(trees)} trees for {len(instances)} instances")
        return trees
    missing = [i.id for i in instances if i.parse is None]
    if missing:
        raise ValueError(f"{len(missing)} instances have no parse (first: {missing[0]}); pass --trees")
    return [i.parse for i in instances]


def _extract_all(instances: Sequence[Instance], trees: Sequence[str], config, join: bool):
    labels = frozenset(config.clauses.clause_labels)
    results = []
    for instance, bracket in zip(instances, trees):
        segs = extract_clauses(parse_bracket(bracket), labels, join=join,
                               max_short=config.clauses.max_short_segment)
        if len(segs.tokens) != len(instance.tokens):
            raise ValueError(f"instance {instance.id}: tree has {len(segs.tokens)} leaves "
                             f"for {len(instance.tokens)} tokens")
        results.append(list(segs.segments))
    return results


# -- subcommands ---------------------------------------------------------------

def cmd_validate(args) -> int:
    instances = load_corpus(args.corpus)
    print(f"✓ {args.corpus}: {len(instances)} valid instances")
    return 0


def cmd_synthetic(args) -> int:
    instances = generate_synthetic(args.n, args.seed if args.seed is not None else 0)
    save_corpus(instances, args.out)
    print(f"✓ Wrote {len(instances)} synthetic instances to {args.out}")
    return 0


def cmd_stats(args) -> int:
    _emit(stats_table(load_corpus(args.corpus)), args.out)
    return 0


def cmd_clauses_extract(args) -> int:
    config = ConfigManager(args.config).config
    instances = load_corpus(args.corpus)
    segments = _extract_all(instances, _trees_for(instances, args.trees), config,
                            join=config.clauses.join_segments and not args.no_join)
    updated = [instance.with_clauses(spans) for instance, spans in zip(instances, segments)]
    save_corpus(updated, args.out)
    total = sum(len(spans) for spans in segments)
    print(f"✓ Extracted {total} clauses for {len(updated)} instances into {args.out}")
    return 0


def cmd_clauses_eval(args) -> int:
    config = ConfigManager(args.config).config
    instances = [i for i in load_corpus(args.corpus) if i.clauses is not None]
    if not instances:
        raise ValueError(f"{args.corpus} has no instances with annotated clauses")
    extracted = dict(zip(
        (i.id for i in instances),
        _extract_all(instances, _trees_for(instances, args.trees), config,
                     join=config.clauses.join_segments and not args.no_join),
    ))
    second: Dict[str, Instance] = {}
    if args.agreement:
        second = {i.id: i for i in load_corpus(args.agreement) if i.clauses is not None}

    rows = []
    for dataset, group in group_by_dataset(instances).items():
        kappa = None
        paired = [i for i in group if i.id in second]
        if paired:
            kappa = corpus_kappa([i.clause_spans for i in paired],
                                 [second[i.id].clause_spans for i in paired],
                                 [len(i) for i in paired])
        rows.append(clause_detection_row(dataset, group, [extracted[i.id] for i in group], kappa))
    _emit(pd.DataFrame(rows), args.out)
    return 0


def cmd_split(args) -> int:
    instances = load_corpus(args.corpus)
    split = split_corpus(instances, args.seed if args.seed is not None else 0)
    ids = {part: [i.id for i in getattr(split, part)] for part in PARTS}
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(ids, f, indent=2)
    print(f"✓ Split {len(instances)} instances "
          f"({len(ids['train'])}/{len(ids['dev'])}/{len(ids['test'])}) into {args.out}")
    return 0


def cmd_train(args) -> int:
    manager = ConfigManager(args.config)
    overrides = {field: getattr(args, flag) for flag, field in TRAIN_OVERRIDES.items()}
    config = manager.apply_overrides(overrides).train

    instances = load_corpus(args.corpus)
    parts = _partition(instances, args)
    vocabulary = corpus_vocabulary(instances)
    if args.embeddings:
        embeddings = load_embeddings(args.embeddings, vocabulary, dim=config.embedding_dim)
        logger.info("Embedding coverage %.3f", embeddings.coverage(vocabulary))
    else:
        embeddings = EmbeddingTable.random(vocabulary, config.embedding_dim, config.seed)

    print(f"Training {args.arch} for up to {config.max_epochs} epochs "
          f"({len(parts['train'])} train / {len(parts['dev'])} dev)")
    trained = train_model(args.arch, parts["train"], parts["dev"], embeddings, config)
    trained.save(args.checkpoint)

    history_path = args.out or args.checkpoint.with_suffix(".history.csv")
    write_table(pd.DataFrame([asdict(r) for r in trained.history],
                             columns=["epoch", "loss", "dev_metric"]), history_path)
    print(f"✓ Saved checkpoint {args.checkpoint} (best epoch {trained.best_epoch})")
    print(f"✓ Wrote history {history_path}")
    return 0


def cmd_predict(args) -> int:
    trained = TrainedModel.load(args.checkpoint)
    instances = _select_part(load_corpus(args.corpus), args)
    predicted = trained.predict_corpus(instances)
    save_corpus(predicted, args.out)
    print(f"✓ Wrote {trained.architecture} predictions for {len(predicted)} instances to {args.out}")
    return 0


def cmd_eval(args) -> int:
    instances = _select_part(load_corpus(args.corpus), args)
    modes = [MatchMode(args.mode)] if args.mode else list(SPAN_MODES) + [MatchMode.CLAUSE]
    _emit(eval_table(instances, args.arch or "model", modes), args.out)
    return 0


def cmd_errors(args) -> int:
    counts: Dict[tuple, ErrorCounts] = {}
    for corpus_path in args.corpus:
        instances = _select_part(load_corpus(corpus_path), args)
        for dataset, group in group_by_dataset(instances).items():
            missing = [i.id for i in group if i.pred_iob is None]
            if missing:
                raise ValueError(f"{corpus_path}: {len(missing)} instances carry no predictions")
            counts[(corpus_path.stem, dataset)] = classify_corpus(
                [i.stimulus_spans for i in group], [i.predicted_spans for i in group])
    _emit(errors_table(counts), args.out)
    return 0


def cmd_report(args) -> int:
    text = render_report(args.tables)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
        print(f"✓ Wrote report {args.out}")
    return 0


# -- parser --------------------------------------------------------------------

def _add_part_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--splits", type=Path, help="JSON file of train/dev/test ids")
    parser.add_argument("--part", choices=PARTS, help="Restrict to one split")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--seed", type=int, help="Random seed")

    parser = argparse.ArgumentParser(prog="stimuli", description="Emotion stimulus detection toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("validate", parents=[common], help="Schema-check a corpus")
    p.add_argument("--corpus", type=Path, required=True)
    p.set_defaults(func=cmd_validate)

    p = commands.add_parser("synthetic", parents=[common], help="Generate a synthetic corpus")
    p.add_argument("--n", type=int, default=50, help="Number of instances")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_synthetic)

    p = commands.add_parser("stats", parents=[common], help="Dataset statistics CSV")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_stats)

    clauses = commands.add_parser("clauses", help="Clause extraction")
    clause_commands = clauses.add_subparsers(dest="clauses_command", required=True)
    for name, func, out_required, help_text in (
            ("extract", cmd_clauses_extract, True, "Write extracted clauses into the corpus"),
            ("eval", cmd_clauses_eval, False, "Clause detection table CSV")):
        p = clause_commands.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--corpus", type=Path, required=True)
        p.add_argument("--trees", type=Path, help="Sidecar file with one bracket tree per line")
        p.add_argument("--config", type=Path)
        p.add_argument("--no-join", action="store_true", help="Skip fragment merging")
        p.add_argument("--out", type=Path, required=out_required)
        if name == "eval":
            p.add_argument("--agreement", type=Path,
                           help="Second annotator's clause corpus for kappa")
        p.set_defaults(func=func)

    p = commands.add_parser("split", parents=[common], help="Write train/dev/test ids")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_split)

    p = commands.add_parser("train", parents=[common], help="Train a model")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--arch", choices=ModelFactory.list_architectures(), required=True)
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--splits", type=Path, help="JSON file of train/dev/test ids")
    p.add_argument("--config", type=Path)
    p.add_argument("--embeddings", type=Path, help="Text-format embedding file")
    p.add_argument("--out", type=Path, help="History CSV (default: next to the checkpoint)")
    p.add_argument("--max-epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--dropout", type=float)
    p.add_argument("--patience", type=int)
    p.add_argument("--embedding-dim", type=int)
    p.add_argument("--hidden-dim", type=int)
    p.add_argument("--selection-metric", choices=["accuracy", "f1"])
    p.set_defaults(func=cmd_train)

    p = commands.add_parser("predict", parents=[common], help="Write predictions into the corpus")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    _add_part_flags(p)
    p.set_defaults(func=cmd_predict)

    p = commands.add_parser("eval", parents=[common], help="Score predictions (CSV)")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--mode", choices=[m.value for m in MatchMode])
    p.add_argument("--arch", help="Model name for the report rows")
    p.add_argument("--out", type=Path)
    _add_part_flags(p)
    p.set_defaults(func=cmd_eval)

    p = commands.add_parser("errors", parents=[common], help="Error taxonomy counts (CSV)")
    p.add_argument("--corpus", type=Path, action="append", required=True,
                   help="Predicted corpus; repeat for several models")
    p.add_argument("--out", type=Path)
    _add_part_flags(p)
    p.set_defaults(func=cmd_errors)

    p = commands.add_parser("report", parents=[common], help="Markdown summary of CSV tables")
    p.add_argument("tables", type=Path, nargs="+")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(getattr(args, "verbose", False))
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, OSError) as e:
        logger.error("%s", e)
        print(f"✗ {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
