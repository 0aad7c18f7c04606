"""Hierarchical symbol library: a levelled DAG of composable semantics.

A library maps integer symbol ids to nodes.  A node without children is a
leaf (level 0); a parent node stands for the ordered sequence of its
children, and its level is one more than its deepest child.  The ordered
child sequence is the node's composition rule: a window of symbols can be
rewritten to the parent only when it equals that sequence exactly.

Libraries are value objects: operations that "modify" a library return a
new one, so instances can be shared freely across threads.

File format (JSON)::

    {"nodes": [{"id": 3, "label": "car", "children": [1, 2],
                "modifier": false}, ...]}

Child order is significant; node order in the file is not.  Levels and the
pattern index are derived, never stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import (
    CycleDetected,
    DanglingChild,
    DuplicateId,
    LibraryIOError,
    SchemaError,
    UnknownSymbol,
)

SymbolId = int

# (id, label, children, modifier) tuples accepted by build_library
NodeSpec = tuple[SymbolId, str, "list[SymbolId] | tuple[SymbolId, ...]", bool]


@dataclass(frozen=True)
class SemanticNode:
    """One entry of the library.

    ``modifier`` marks symbols that qualify another symbol (adjectives,
    roughly) and may be dropped by the receiver when unknown.
    """

    id: SymbolId
    label: str
    children: tuple[SymbolId, ...]
    modifier: bool = False
    level: int = 0

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(eq=False)
class SymbolSequence:
    """An ordered run of symbol ids, optionally annotated with its level.

    ``level`` is the maximum node level present, relative to the library
    the sequence was produced from; it is ``None`` when the producer had
    no library at hand (e.g. a raw decoder output).  Equality compares
    symbols only.
    """

    symbols: tuple[SymbolId, ...]
    level: int | None = 0

    def __post_init__(self) -> None:
        self.symbols = tuple(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, SymbolSequence):
            return self.symbols == other.symbols
        return NotImplemented

    def __repr__(self) -> str:
        return f"SymbolSequence({list(self.symbols)!r}, level={self.level})"


@dataclass
class SemanticLibrary:
    """Validated, levelled symbol DAG with a composition-pattern index.

    ``pattern_index`` maps each ordered child sequence to the sorted list
    of parents composed of exactly that sequence.  ``ambiguous`` is true
    when two parents share one composition rule; such libraries are legal
    (ambiguity is one of the noise sources worth simulating) but lookups
    then prefer the lowest parent id.
    """

    nodes: dict[SymbolId, SemanticNode] = field(default_factory=dict)
    pattern_index: dict[tuple[SymbolId, ...], list[SymbolId]] = field(default_factory=dict)
    ambiguous: bool = False

    def __contains__(self, symbol: SymbolId) -> bool:
        return symbol in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, symbol: SymbolId) -> SemanticNode:
        try:
            return self.nodes[symbol]
        except KeyError:
            raise UnknownSymbol(f"symbol {symbol} not in library") from None

    def level(self, symbol: SymbolId) -> int:
        return self.node(symbol).level

    def label(self, symbol: SymbolId) -> str:
        return self.node(symbol).label

    def max_level(self) -> int:
        """Highest node level; 0 for an empty library."""
        if not self.nodes:
            return 0
        return max(node.level for node in self.nodes.values())

    def leaves(self) -> tuple[SymbolId, ...]:
        return tuple(sorted(i for i, n in self.nodes.items() if n.is_leaf))

    def symbols_at_or_below(self, level: int) -> tuple[SymbolId, ...]:
        """All ids with node level <= ``level``, ascending."""
        return tuple(sorted(i for i, n in self.nodes.items() if n.level <= level))

    def max_pattern_length(self) -> int:
        if not self.pattern_index:
            return 0
        return max(len(p) for p in self.pattern_index)

    def sequence_level(self, symbols) -> int:
        """Max level over ``symbols``; 0 for an empty run."""
        return max((self.level(s) for s in symbols), default=0)

    def expand(self, symbol: SymbolId, target_level: int) -> SymbolSequence:
        """Recursively substitute children until every symbol sits at or
        below ``target_level``.

        Children are expanded in stored order, so the result is
        deterministic.  A symbol already at or below the target maps to
        itself.
        """
        node = self.node(symbol)
        out: list[SymbolId] = []
        self._expand_into(node, target_level, out)
        return SymbolSequence(tuple(out), level=self.sequence_level(out))

    def _expand_into(self, node: SemanticNode, target_level: int, out: list[SymbolId]) -> None:
        if node.level <= target_level:
            out.append(node.id)
            return
        for child in node.children:
            self._expand_into(self.nodes[child], target_level, out)

    def match_parent(self, window) -> tuple[SymbolId, bool] | None:
        """Exact lookup of an ordered window against the composition rules.

        Returns ``(parent_id, ambiguous)`` for the lowest-id parent whose
        child sequence equals ``window``, or ``None`` when nothing matches.
        Reordered windows do not match: order is part of the meaning.
        """
        parents = self.pattern_index.get(tuple(window))
        if not parents:
            return None
        return parents[0], len(parents) > 1

    def add_node(self, label: str, children, modifier: bool = False) -> tuple["SemanticLibrary", SymbolId]:
        """Return a new library with one extra node and its fresh id.

        The fresh id is max existing id + 1 (0 for an empty library), so
        growth is deterministic.  ``self`` is left untouched.
        """
        children = tuple(children)
        for child in children:
            if child not in self.nodes:
                raise DanglingChild(f"child {child} not in library")
        new_id = max(self.nodes, default=-1) + 1
        specs = [(n.id, n.label, n.children, n.modifier) for n in self.nodes.values()]
        specs.append((new_id, label, children, modifier))
        return build_library(specs), new_id

    def with_node(self, node_id: SymbolId, label: str, children, modifier: bool = False) -> "SemanticLibrary":
        """Return a new library containing a node under a caller-chosen id.

        Used when replaying taught definitions, where both sides must end
        up agreeing on the id.  Inserting an identical node is a no-op;
        inserting a different node under a taken id raises DuplicateId.
        """
        children = tuple(children)
        existing = self.nodes.get(node_id)
        if existing is not None:
            if (existing.label, existing.children, existing.modifier) == (label, children, modifier):
                return self
            raise DuplicateId(f"id {node_id} already holds a different node")
        specs = [(n.id, n.label, n.children, n.modifier) for n in self.nodes.values()]
        specs.append((node_id, label, children, modifier))
        return build_library(specs)


def build_library(specs) -> SemanticLibrary:
    """Build a validated library from (id, label, children, modifier) specs.

    Checks id uniqueness, child existence and acyclicity, then computes
    levels (leaf = 0, parent = 1 + deepest child) and the pattern index.
    Raises DuplicateId, DanglingChild or CycleDetected.
    """
    raw: dict[SymbolId, tuple[str, tuple[SymbolId, ...], bool]] = {}
    for node_id, label, children, modifier in specs:
        node_id = int(node_id)
        if node_id < 0:
            raise SchemaError(f"negative symbol id {node_id}")
        if node_id in raw:
            raise DuplicateId(f"duplicate id {node_id}")
        raw[node_id] = (str(label), tuple(int(c) for c in children), bool(modifier))

    for node_id, (_, children, _) in raw.items():
        for child in children:
            if child not in raw:
                raise DanglingChild(f"node {node_id} references missing child {child}")

    levels = _compute_levels(raw)

    nodes = {
        node_id: SemanticNode(node_id, label, children, modifier, levels[node_id])
        for node_id, (label, children, modifier) in raw.items()
    }
    pattern_index: dict[tuple[SymbolId, ...], list[SymbolId]] = {}
    for node_id, node in nodes.items():
        if node.children:
            pattern_index.setdefault(node.children, []).append(node_id)
    for parents in pattern_index.values():
        parents.sort()
    ambiguous = any(len(p) > 1 for p in pattern_index.values())
    return SemanticLibrary(nodes=nodes, pattern_index=pattern_index, ambiguous=ambiguous)


def _compute_levels(raw: dict[SymbolId, tuple[str, tuple[SymbolId, ...], bool]]) -> dict[SymbolId, int]:
    """Longest-path levels via iterative DFS; raises CycleDetected."""
    levels: dict[SymbolId, int] = {}
    ON_PATH, DONE = 1, 2
    state: dict[SymbolId, int] = {}
    for start in raw:
        if state.get(start) == DONE:
            continue
        stack: list[tuple[SymbolId, bool]] = [(start, False)]
        while stack:
            node_id, children_done = stack.pop()
            children = raw[node_id][1]
            if children_done:
                levels[node_id] = 1 + max(levels[c] for c in children) if children else 0
                state[node_id] = DONE
                continue
            if state.get(node_id) == DONE:
                continue
            if state.get(node_id) == ON_PATH:
                raise CycleDetected(f"symbol {node_id} is composed of itself")
            state[node_id] = ON_PATH
            stack.append((node_id, True))
            for child in children:
                if state.get(child) != DONE:
                    if state.get(child) == ON_PATH:
                        raise CycleDetected(f"symbol {child} is composed of itself")
                    stack.append((child, False))
    return levels


def to_file(lib: SemanticLibrary, path) -> None:
    """Write ``lib`` as JSON; node order is normalized to ascending id."""
    payload = {
        "nodes": [
            {
                "id": node.id,
                "label": node.label,
                "children": list(node.children),
                "modifier": node.modifier,
            }
            for node in sorted(lib.nodes.values(), key=lambda n: n.id)
        ]
    }
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise LibraryIOError(f"cannot write {path}: {exc}") from exc


def from_file(path) -> SemanticLibrary:
    """Load and validate a library file; inverse of :func:`to_file`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise LibraryIOError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc

    if not isinstance(payload, dict) or "nodes" not in payload:
        raise SchemaError("library file must be an object with a 'nodes' array")
    entries = payload["nodes"]
    if not isinstance(entries, list):
        raise SchemaError("'nodes' must be an array")

    specs: list[NodeSpec] = []
    for entry in entries:
        if not isinstance(entry, dict):
            raise SchemaError("every node must be an object")
        missing = {"id", "label", "children"} - entry.keys()
        if missing:
            raise SchemaError(f"node missing keys: {sorted(missing)}")
        if not isinstance(entry["id"], int) or isinstance(entry["id"], bool):
            raise SchemaError(f"node id must be an integer, got {entry['id']!r}")
        if not isinstance(entry["children"], list):
            raise SchemaError("node children must be an array of ids")
        for child in entry["children"]:
            if not isinstance(child, int) or isinstance(child, bool):
                raise SchemaError(f"child id must be an integer, got {child!r}")
        specs.append(
            (entry["id"], str(entry["label"]), entry["children"], bool(entry.get("modifier", False)))
        )
    return build_library(specs)


def digit_library() -> SemanticLibrary:
    """Nine leaf symbols labelled "1".."9": the stock message alphabet."""
    return build_library([(d, str(d), (), False) for d in range(1, 10)])
