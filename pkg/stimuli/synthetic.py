"""Templated synthetic corpora for tests and desk-scale experiments.

Each instance comes with a bracket parse whose clause extraction reproduces
the annotated clauses, and a stimulus that coincides with its stimulus clause.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .corpus import ClauseAnnotation, Instance, Span, spans_to_iob

logger = logging.getLogger(__name__)

DATASET_NAME = "synthetic"


@dataclass
class SyntheticGrammar:
    """Word lists and template rates; whatever is left after the rates is neutral."""
    subjects: Tuple[Tuple[str, str], ...] = (("She", "is"), ("He", "is"), ("They", "are"), ("We", "are"))
    cues: Dict[str, str] = field(default_factory=lambda: {
        "happy": "joy",
        "glad": "joy",
        "sad": "sadness",
        "angry": "anger",
        "afraid": "fear",
        "surprised": "surprise",
        "disgusted": "disgust",
        "ashamed": "shame",
    })
    determiners: Tuple[str, ...] = ("the", "a")
    agents: Tuple[str, ...] = ("team", "dog", "storm", "coach", "market", "council", "band", "neighbor")
    verbs: Tuple[str, ...] = ("won", "lost", "left", "closed", "changed", "cancelled", "found", "broke")
    objects: Tuple[str, ...] = ("game", "house", "show", "school", "contract", "window", "election", "match")
    adverbs: Tuple[str, ...] = ("today", "again", "now")
    because_rate: float = 0.4
    so_rate: float = 0.3

    def __post_init__(self):
        if self.because_rate < 0 or self.so_rate < 0 or self.because_rate + self.so_rate > 1:
            raise ValueError("template rates must be non-negative and sum to at most 1")


def _pick(rng: np.random.Generator, options: Sequence):
    return options[int(rng.integers(len(options)))]


def _copula_tag(copula: str) -> str:
    return "VBZ" if copula == "is" else "VBP"


def _event(rng: np.random.Generator, grammar: SyntheticGrammar) -> Tuple[List[str], str]:
    """An event clause "DET NOUN VERB DET NOUN" and its S subtree."""
    det1, noun1 = _pick(rng, grammar.determiners), _pick(rng, grammar.agents)
    verb = _pick(rng, grammar.verbs)
    det2, noun2 = _pick(rng, grammar.determiners), _pick(rng, grammar.objects)
    tree = (f"(S (NP (DT {det1}) (NN {noun1})) "
            f"(VP (VBD {verb}) (NP (DT {det2}) (NN {noun2}))))")
    return [det1, noun1, verb, det2, noun2], tree


def _because(rng, grammar) -> Tuple[List[str], str, List[Tuple[Span, bool]], str]:
    subject, copula = _pick(rng, grammar.subjects)
    cue = _pick(rng, sorted(grammar.cues))
    event, event_tree = _event(rng, grammar)
    tokens = [subject, copula, cue, "because"] + event + ["."]
    parse = (f"(S (NP (PRP {subject})) (VP ({_copula_tag(copula)} {copula}) (ADJP (JJ {cue})) "
             f"(SBAR (IN because) {event_tree})) (. .))")
    clauses = [(Span(0, 4), False), (Span(4, len(tokens)), True)]
    return tokens, parse, clauses, cue


def _so(rng, grammar):
    subject, copula = _pick(rng, grammar.subjects)
    subject = subject.lower()
    cue = _pick(rng, sorted(grammar.cues))
    event, event_tree = _event(rng, grammar)
    tokens = event + [",", "so", subject, copula, cue, "."]
    parse = (f"(S {event_tree} (, ,) (RB so) "
             f"(S (NP (PRP {subject})) (VP ({_copula_tag(copula)} {copula}) (ADJP (JJ {cue})))) (. .))")
    clauses = [(Span(0, 5), True), (Span(5, len(tokens)), False)]
    return tokens, parse, clauses, cue


def _neutral(rng, grammar):
    subject, copula = _pick(rng, grammar.subjects)
    cue = _pick(rng, sorted(grammar.cues))
    adverb = _pick(rng, grammar.adverbs)
    tokens = [subject, copula, cue, adverb, "."]
    parse = (f"(S (NP (PRP {subject})) (VP ({_copula_tag(copula)} {copula}) (ADJP (JJ {cue})) "
             f"(ADVP (RB {adverb}))) (. .))")
    clauses = [(Span(0, len(tokens)), False)]
    return tokens, parse, clauses, cue


def generate_synthetic(n: int, seed: int, grammar: Optional[SyntheticGrammar] = None) -> List[Instance]:
    """Generate ``n`` instances deterministically from ``seed``."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    grammar = grammar or SyntheticGrammar()
    rng = np.random.default_rng(seed)

    instances = []
    for k in range(n):
        draw = rng.random()
        if draw < grammar.because_rate:
            template = _because
        elif draw < grammar.because_rate + grammar.so_rate:
            template = _so
        else:
            template = _neutral
        tokens, parse, clauses, cue = template(rng, grammar)
        stimuli = [span for span, is_stimulus in clauses if is_stimulus]
        instances.append(Instance(
            id=f"{DATASET_NAME}-{k:05d}",
            dataset=DATASET_NAME,
            tokens=tuple(tokens),
            iob=tuple(spans_to_iob(stimuli, len(tokens))),
            clauses=tuple(ClauseAnnotation(span, flag) for span, flag in clauses),
            parse=parse,
            emotion=grammar.cues[cue],
        ))

    logger.debug("Generated %d synthetic instances (seed %d)", n, seed)
    return instances
