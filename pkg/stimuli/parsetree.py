"""Penn-Treebank bracket trees with leaf-index geometry."""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

from .corpus import Span

logger = logging.getLogger(__name__)

TREEBANK_ESCAPES = {
    "-LRB-": "(",
    "-RRB-": ")",
    "-LCB-": "{",
    "-RCB-": "}",
    "-LSB-": "[",
    "-RSB-": "]",
}


class TreeParseError(ValueError):
    """Malformed bracket string; offset is the character position of the problem."""

    def __init__(self, offset: int, message: str):
        self.offset = offset
        super().__init__(f"offset {offset}: {message}")


@dataclass(frozen=True)
class ConstTree:
    """A constituency node. Pre-terminals carry a token, internal nodes children."""
    label: str
    children: Tuple["ConstTree", ...]
    token: Optional[str]
    leaf_span: Span

    @property
    def is_preterminal(self) -> bool:
        return self.token is not None

    @property
    def base_label(self) -> str:
        """Label without Treebank function tags or indices (S-TPC-1 -> S)."""
        if self.label.startswith("-"):
            return self.label
        return self.label.split("-")[0].split("=")[0]


def _tokenize(text: str) -> List[Tuple[str, int]]:
    pieces = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            pieces.append((ch, i))
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            pieces.append((text[i:j], i))
            i = j
    return pieces


def parse_bracket(text: str) -> ConstTree:
    """Parse one bracket tree, e.g. "(S (NP (PRP She)) (VP (VBD left)))"."""
    pieces = _tokenize(text)
    if not pieces:
        raise TreeParseError(0, "empty tree string")
    if pieces[0][0] != "(":
        raise TreeParseError(pieces[0][1], f"expected '(' but found {pieces[0][0]!r}")

    # stack frames: [label, children, token, open_offset]
    stack: List[list] = []
    root: Optional[ConstTree] = None
    next_leaf = 0
    pos = 0
    while pos < len(pieces):
        piece, offset = pieces[pos]
        if root is not None:
            raise TreeParseError(offset, "trailing material after the root node")
        if piece == "(":
            label = ""
            if pos + 1 < len(pieces) and pieces[pos + 1][0] not in "()":
                label = pieces[pos + 1][0]
                pos += 1
            stack.append([label, [], None, offset])
        elif piece == ")":
            if not stack:
                raise TreeParseError(offset, "unbalanced ')'")
            label, children, token, open_offset = stack.pop()
            if token is not None:
                node = ConstTree(label, (), token, Span(next_leaf, next_leaf + 1))
                next_leaf += 1
            elif children:
                node = ConstTree(label, tuple(children), None,
                                 Span(children[0].leaf_span.start, children[-1].leaf_span.end))
            else:
                raise TreeParseError(open_offset, f"node {label!r} has neither children nor a token")
            if stack:
                stack[-1][1].append(node)
            else:
                root = node
        else:
            if not stack:
                raise TreeParseError(offset, f"token {piece!r} outside brackets")
            frame = stack[-1]
            if frame[2] is not None or frame[1]:
                raise TreeParseError(offset, f"unexpected token {piece!r} in node {frame[0]!r}")
            frame[2] = piece
        pos += 1

    if stack:
        raise TreeParseError(len(text), f"{len(stack)} unclosed '('")
    return root


def iter_nodes(tree: ConstTree) -> Iterator[ConstTree]:
    """Pre-order traversal."""
    stack = [tree]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def leaves(tree: ConstTree) -> List[str]:
    return [node.token for node in iter_nodes(tree) if node.is_preterminal]


def unescape_token(token: str) -> str:
    return TREEBANK_ESCAPES.get(token, token)


def to_bracket(tree: ConstTree) -> str:
    """Serialize back to a single-line bracket string."""
    if tree.is_preterminal:
        return f"({tree.label} {tree.token})"
    inner = " ".join(to_bracket(child) for child in tree.children)
    if tree.label:
        return f"({tree.label} {inner})"
    return f"({inner})"


def read_tree_file(path: Union[str, Path]) -> List[str]:
    """Read a sidecar with one bracket tree per line, aligned with the corpus."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"tree file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        trees = [line.strip() for line in f]
    while trees and not trees[-1]:
        trees.pop()
    logger.info("Read %d trees from %s", len(trees), path.name)
    return trees
